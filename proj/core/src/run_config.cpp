#include "hjs/run_config.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <system_error>

#include <unistd.h>

#ifndef HJS_VERSION
#define HJS_VERSION "0.0.0"
#endif

namespace hjs {

namespace {

double get_number(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const Json& v = j.at(key);
    if (!v.is_number()) {
        throw ValidationError(key, "expected a number");
    }
    return v.get<double>();
}

std::size_t get_count(const Json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const Json& v = j.at(key);
    if (!v.is_number_unsigned()) {
        throw ValidationError(key, "expected a nonnegative integer");
    }
    return v.get<std::size_t>();
}

bool allows_exact_ou(const CoefficientSpec& c) {
    return std::holds_alternative<LinearDrift>(c.drift) &&
           std::holds_alternative<ConstantDiffusion>(c.diffusion);
}

} // namespace

std::string tool_version() {
    return HJS_VERSION;
}

void validate(const RunConfig& c) {
    validate(c.model);
    const auto require = [](bool ok, const char* field, const char* message) {
        if (!ok) {
            throw ValidationError(field, message);
        }
    };
    require(std::isfinite(c.horizon) && c.horizon > 0.0, "horizon", "must be finite and > 0");
    require(c.n_paths >= 1, "n_paths", "must be >= 1");
    require(c.burn_in_fraction >= 0.0 && c.burn_in_fraction < 1.0, "burn_in_fraction",
            "must lie in [0, 1)");
    if (c.burn_in) {
        require(std::isfinite(*c.burn_in) && *c.burn_in >= 0.0 && *c.burn_in < c.horizon,
                "burn_in", "must lie in [0, horizon)");
    }
    require(c.bins >= 1, "bins", "must be >= 1");
    for (std::size_t k = 0; k < c.times.size(); ++k) {
        require(std::isfinite(c.times[k]) && c.times[k] >= 0.0, "times", "must be finite and >= 0");
        require(k == 0 || c.times[k] > c.times[k - 1], "times", "must be strictly increasing");
    }
    require(std::isfinite(c.scan_radius) && c.scan_radius > 0.0, "scan_radius",
            "must be finite and > 0");
    require(c.points >= 1, "points", "must be >= 1");
    require(c.test_function == "one" || c.test_function == "x" || c.test_function == "x2" ||
                c.test_function == "rate",
            "test_function", "must be one of one, x, x2, rate");
    if (c.poly_m) {
        require(std::isfinite(*c.poly_m) && *c.poly_m > 2.0, "poly_m", "must be > 2");
    }
    validate(c.integrator, c.model.coefficients);
    const std::size_t m = c.model.dimension();
    for (const auto* s : {&c.start_a, &c.start_b}) {
        if (*s) {
            require((*s)->y.rows() == m && (*s)->y.cols() == m, s == &c.start_a ? "start_a" : "start_b",
                    "y must be M x M");
        }
    }
}

RunConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) {
        throw ValidationError("config", "expected an object");
    }
    RunConfig c;
    if (j.contains("rates")) {
        c.model = model_from_json(j);
    } else {
        if (!j.contains("model")) {
            throw ValidationError("model", "missing");
        }
        const Json& model = j.at("model");
        if (model.is_string()) {
            c.model_path = model.get<std::string>();
            std::filesystem::path p(c.model_path);
            c.model = load_model(p.is_absolute() ? p : base_dir / p);
        } else {
            c.model = model_from_json(model);
            if (j.contains("model_path")) {
                c.model_path = j.at("model_path").get<std::string>();
            }
        }
    }

    const bool scheme_given = j.contains("integrator") && j.at("integrator").contains("scheme");
    if (j.contains("integrator")) {
        c.integrator = integrator_from_json(j.at("integrator"), "integrator");
    }
    if (!scheme_given) {
        c.integrator.scheme = allows_exact_ou(c.model.coefficients)
                                  ? IntegrationScheme{ExactOU{}}
                                  : IntegrationScheme{EulerMaruyama{}};
    }

    c.horizon = get_number(j, "horizon", c.horizon);
    c.n_paths = get_count(j, "n_paths", c.n_paths);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) {
            throw ValidationError("seed", "must be an unsigned 64-bit integer");
        }
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.burn_in_fraction = get_number(j, "burn_in_fraction", c.burn_in_fraction);
    if (j.contains("burn_in") && !j.at("burn_in").is_null()) {
        c.burn_in = get_number(j, "burn_in", 0.0);
    }
    c.bins = get_count(j, "bins", c.bins);
    if (j.contains("times")) {
        const Json& t = j.at("times");
        if (!t.is_array()) {
            throw ValidationError("times", "expected an array");
        }
        for (const auto& v : t) {
            if (!v.is_number()) {
                throw ValidationError("times", "expected numbers");
            }
            c.times.push_back(v.get<double>());
        }
    }
    if (j.contains("format")) {
        try {
            c.format = parse_path_format(j.at("format").get<std::string>());
        } catch (const std::exception& e) {
            throw ValidationError("format", e.what());
        }
    }
    c.scan_radius = get_number(j, "scan_radius", c.scan_radius);
    c.points = get_count(j, "points", c.points);
    if (j.contains("test_function")) {
        c.test_function = j.at("test_function").get<std::string>();
    }
    const std::size_t m = c.model.dimension();
    if (j.contains("start_a") && !j.at("start_a").is_null()) {
        c.start_a = state_from_json(j.at("start_a"), m, "start_a");
    }
    if (j.contains("start_b") && !j.at("start_b").is_null()) {
        c.start_b = state_from_json(j.at("start_b"), m, "start_b");
    }
    if (j.contains("poly_m") && !j.at("poly_m").is_null()) {
        c.poly_m = get_number(j, "poly_m", 0.0);
    }
    validate(c);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("config", "cannot open " + path.string());
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("config", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j, path.parent_path());
}

Json config_to_json(const RunConfig& c) {
    Json j{{"model", model_to_json(c.model)},
           {"model_path", c.model_path},
           {"integrator", integrator_to_json(c.integrator)},
           {"horizon", c.horizon},
           {"n_paths", c.n_paths},
           {"seed", c.seed},
           {"burn_in_fraction", c.burn_in_fraction},
           {"burn_in", c.burn_in ? Json(*c.burn_in) : Json(nullptr)},
           {"bins", c.bins},
           {"times", c.times},
           {"format", to_string(c.format)},
           {"scan_radius", c.scan_radius},
           {"points", c.points},
           {"test_function", c.test_function},
           {"start_a", c.start_a ? state_to_json(*c.start_a) : Json(nullptr)},
           {"start_b", c.start_b ? state_to_json(*c.start_b) : Json(nullptr)},
           {"poly_m", c.poly_m ? Json(*c.poly_m) : Json(nullptr)}};
    return j;
}

std::string config_digest(const RunConfig& config) {
    return json_digest(config_to_json(config));
}

Json manifest_to_json(const RunManifest& m) {
    return {{"command", m.command},
            {"config_digest", m.config_digest},
            {"model_digest", m.model_digest},
            {"tool_version", m.tool_version},
            {"wall_clock_seconds", m.wall_clock_seconds},
            {"path_seeds", m.path_seeds},
            {"outputs", m.outputs}};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    static std::atomic<unsigned> counter{0};
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot rename onto " + path.string());
    }
}

} // namespace hjs
