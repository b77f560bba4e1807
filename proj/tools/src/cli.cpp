#include "hjs_cli/cli.hpp"

#include "hjs/assumptions.hpp"
#include "hjs/diagnostics.hpp"
#include "hjs/engine.hpp"
#include "hjs/intensity.hpp"
#include "hjs/model_io.hpp"
#include "hjs/parallel.hpp"
#include "hjs/path_io.hpp"
#include "hjs/random.hpp"
#include "hjs/run_config.hpp"
#include "hjs/stability.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace hjs::cli {

namespace {

namespace fs = std::filesystem;

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
// Grid resolution of the frame classifier.
constexpr std::size_t kClassifierPoints = 4001;
constexpr std::array<double, 2> kVandermondeTimes{0.1, 1.0};

using Clock = std::chrono::steady_clock;

struct CommonFlags {
    std::string config;
    std::string out;
};

std::string dump(const Json& j) {
    return j.dump(2) + "\n";
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path manifest_path_for(const fs::path& out) {
    auto p = out;
    p += ".manifest.json";
    return p;
}

void write_manifest(const fs::path& where, const std::string& command, const RunConfig& cfg,
                    Clock::time_point start, std::vector<std::uint64_t> seeds,
                    std::vector<std::string> outputs) {
    RunManifest m;
    m.command = command;
    m.config_digest = config_digest(cfg);
    m.model_digest = model_digest(cfg.model);
    m.tool_version = tool_version();
    m.wall_clock_seconds = seconds_since(start);
    m.path_seeds = std::move(seeds);
    m.outputs = std::move(outputs);
    write_file_atomic(where, dump(manifest_to_json(m)));
}

std::vector<std::uint64_t> path_seeds(const RunConfig& cfg) {
    std::vector<std::uint64_t> seeds(cfg.n_paths);
    for (std::size_t k = 0; k < cfg.n_paths; ++k) {
        seeds[k] = mix_seed(cfg.seed, k);
    }
    return seeds;
}

std::string path_file_name(std::size_t index, PathFormat format) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "path_%06zu.", index);
    return buf + file_extension(format);
}

// Workers simulate and serialize a chunk; this thread is the only writer.
int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, std::ostream& out) {
    const auto start = Clock::now();
    fs::create_directories(out_dir);
    const auto seeds = path_seeds(cfg);
    const std::size_t threads = default_thread_count();
    const std::size_t chunk = std::max<std::size_t>(1, 4 * threads);
    std::vector<std::string> outputs;
    for (std::size_t first = 0; first < cfg.n_paths; first += chunk) {
        const std::size_t len = std::min(chunk, cfg.n_paths - first);
        std::vector<std::string> bytes(len);
        parallel_for(len, threads, [&](std::size_t k) {
            const Path p = simulate_path(cfg.model, cfg.horizon, cfg.integrator, seeds[first + k]);
            std::ostringstream os(std::ios::binary);
            write_path(os, p, cfg.format);
            bytes[k] = std::move(os).str();
        });
        for (std::size_t k = 0; k < len; ++k) {
            const auto name = path_file_name(first + k, cfg.format);
            write_file_atomic(out_dir / name, bytes[k]);
            outputs.push_back(name);
        }
    }
    write_manifest(out_dir / "manifest.json", "simulate", cfg, start, seeds, outputs);
    out << dump({{"paths", cfg.n_paths}, {"out", out_dir.string()}});
    return 0;
}

Json witness_json(const AssumptionReport& r) {
    Json j{{"frame", to_string(r.frame)},
           {"sigma_bounds_ok", r.sigma_bounds_ok},
           {"sigma0_squared", r.sigma0},
           {"sigma1_squared", r.sigma1},
           {"degenerate_columns", r.degenerate_columns},
           {"notes", r.notes}};
    if (r.exponential) {
        j["exponential"] = {{"d", r.exponential->d},
                            {"r", r.exponential->r},
                            {"condition", r.exponential->condition},
                            {"C", r.exponential->C},
                            {"eta", r.exponential->eta}};
    }
    if (r.polynomial) {
        j["polynomial"] = {{"gamma", r.polynomial->gamma},
                           {"r", r.polynomial->r},
                           {"m", r.polynomial->m}};
    }
    if (r.violating_point) {
        j["violating_point"] = *r.violating_point;
    }
    return j;
}

Json drift_json(const DriftScanResult& d) {
    Json violations = Json::array();
    for (const auto& v : d.violations) {
        violations.push_back({{"state", state_to_json(v.z)},
                              {"generator", v.generator},
                              {"bound", v.bound}});
    }
    return {{"success", d.success},
            {"d1", d.d1},
            {"d2", d.d2},
            {"far_field_max_ratio", d.far_field_max_ratio},
            {"points", d.points},
            {"far_field_points", d.far_field_points},
            {"positive_generator_points", d.positive_generator_points},
            {"violation_count", d.violation_count},
            {"violations", violations},
            {"message", d.message}};
}

int cmd_check_stability(const RunConfig& cfg, const fs::path& out_file, std::ostream& out) {
    const auto start = Clock::now();
    const auto& model = cfg.model;
    const auto assumptions = check_assumptions(model, cfg.scan_radius, kClassifierPoints);
    const auto stab = compute_stability(model);
    const bool stable = stab.rho < 1.0;

    Json report{{"H", matrix_to_json(stab.H)},
                {"rho", stab.rho},
                {"kappa", stab.kappa},
                {"m", matrix_to_json(stab.m)},
                {"stability_ok", stable},
                {"frame", to_string(assumptions.frame)},
                {"assumptions", witness_json(assumptions)}};

    std::vector<std::string> warnings;
    std::optional<LyapunovSpec> lyap;
    if (assumptions.frame == Frame::Exponential) {
        lyap = LyapunovSpec::exponential();
    } else if (assumptions.frame == Frame::Polynomial) {
        const auto& w = *assumptions.polynomial;
        const double m = cfg.poly_m.value_or(w.m);
        lyap = LyapunovSpec::polynomial(m);
        if (auto msg = polynomial_exponent_warning(m, w.gamma, assumptions.sigma1); !msg.empty()) {
            warnings.push_back(msg);
        }
        report["poly_m"] = m;
    }
    if (!stable) {
        report["drift_scan"] = nullptr;
        warnings.push_back("rho(H) >= 1: drift scan skipped");
    } else if (!lyap) {
        report["drift_scan"] = nullptr;
        warnings.push_back("no Lyapunov frame applies: drift scan skipped");
    } else {
        DriftScanOptions opts;
        opts.n_points = cfg.points;
        opts.seed = cfg.seed;
        opts.threads = default_thread_count();
        const ScanRegion region{cfg.scan_radius, cfg.scan_radius};
        report["drift_scan"] = drift_json(drift_scan(model, *lyap, stab, region, opts));
    }

    Json vdm = Json::array();
    for (std::size_t j = 0; j < model.dimension(); ++j) {
        std::vector<double> rates(model.dimension());
        for (std::size_t i = 0; i < rates.size(); ++i) {
            rates[i] = model.kernel.alpha(i, j);
        }
        for (double t0 : kVandermondeTimes) {
            const auto v = vandermonde_determinant(rates, t0);
            vdm.push_back({{"column", j + 1},
                           {"t0", t0},
                           {"determinant", v.determinant},
                           {"invertible", v.invertible}});
        }
    }
    report["vandermonde"] = vdm;
    report["warnings"] = warnings;

    write_file_atomic(out_file, dump(report));
    write_manifest(manifest_path_for(out_file), "check-stability", cfg, start, {},
                   {out_file.filename().string()});
    out << dump({{"stability_ok", stable}, {"frame", to_string(assumptions.frame)},
                 {"out", out_file.string()}});
    return 0;
}

int cmd_ergodic_test(const RunConfig& cfg, const fs::path& out_file, std::ostream& out) {
    const auto start = Clock::now();
    const auto g = make_test_function(cfg.test_function, cfg.model);
    const double burn_in = cfg.effective_burn_in();
    const auto seeds = path_seeds(cfg);
    std::vector<ErgodicEstimate> estimates(cfg.n_paths);
    std::vector<std::vector<double>> samples(cfg.n_paths);
    parallel_for(cfg.n_paths, default_thread_count(), [&](std::size_t k) {
        const Path p = simulate_path(cfg.model, cfg.horizon, cfg.integrator, seeds[k]);
        estimates[k] = time_average(p, g, burn_in);
        samples[k] = pooled_x_samples(std::span<const Path>(&p, 1), burn_in);
    });

    Json per_path = Json::array();
    for (std::size_t k = 0; k < cfg.n_paths; ++k) {
        per_path.push_back({{"seed", seeds[k]},
                            {"value", estimates[k].value},
                            {"standard_error", estimates[k].standard_error},
                            {"batch_count", estimates[k].batch_count}});
    }
    std::vector<double> pooled;
    for (const auto& s : samples) {
        pooled.insert(pooled.end(), s.begin(), s.end());
    }
    const auto hist = invariant_histogram(pooled, cfg.bins, Interval{-1.0, 1.0});
    Json report{{"command", "ergodic-test"},
                {"test_function", cfg.test_function},
                {"horizon", cfg.horizon},
                {"burn_in", burn_in},
                {"estimates", per_path},
                {"histogram",
                 {{"bin_edges", hist.bin_edges},
                  {"bin_masses", hist.bin_masses},
                  {"positivity_compact", {hist.positivity_compact.lo, hist.positivity_compact.hi}},
                  {"min_mass_on_compact", hist.min_mass_on_compact},
                  {"sample_count", hist.sample_count}}}};
    write_file_atomic(out_file, dump(report));
    write_manifest(manifest_path_for(out_file), "ergodic-test", cfg, start, seeds,
                   {out_file.filename().string()});
    out << dump({{"value", estimates.front().value},
                 {"standard_error", estimates.front().standard_error},
                 {"out", out_file.string()}});
    return 0;
}

int cmd_mixing_test(const RunConfig& cfg, const fs::path& out_file, std::ostream& out) {
    const auto start = Clock::now();
    if (cfg.times.empty()) {
        throw ValidationError("times", "at least one time is required");
    }
    if (!cfg.start_a || !cfg.start_b) {
        throw ValidationError(cfg.start_a ? "start_b" : "start_a", "missing");
    }
    MixingOptions opts;
    opts.n_paths = cfg.n_paths;
    opts.bins = cfg.bins;
    opts.integrator = cfg.integrator;
    opts.seed = cfg.seed;
    opts.threads = default_thread_count();
    const auto curve = mixing_curve(cfg.model, *cfg.start_a, *cfg.start_b, cfg.times, opts);

    std::ostringstream csv;
    csv << std::setprecision(17) << "t,tv,fit,noise_floor,noise_sd\n";
    for (std::size_t k = 0; k < curve.times.size(); ++k) {
        const double fit = std::exp(curve.fitted_log_c - curve.fitted_rate * curve.times[k]);
        csv << curve.times[k] << ',' << curve.tv_estimates[k] << ','
            << (curve.fit_points >= 2 ? fit : 0.0) << ',' << curve.noise_floor[k] << ','
            << curve.noise_sd[k] << '\n';
    }
    auto csv_file = out_file;
    csv_file.replace_extension(".csv");
    if (csv_file == out_file) {
        csv_file += ".csv";
    }

    Json report{{"command", "mixing-test"},
                {"times", curve.times},
                {"tv_estimates", curve.tv_estimates},
                {"noise_floor", curve.noise_floor},
                {"noise_sd", curve.noise_sd},
                {"fitted_rate", curve.fitted_rate},
                {"fitted_log_c", curve.fitted_log_c},
                {"fit_r2", curve.fit_r2},
                {"fit_points", curve.fit_points},
                {"kendall_tau", curve.kendall_tau},
                {"n_paths", cfg.n_paths},
                {"bins", cfg.bins},
                {"start_a", state_to_json(*cfg.start_a)},
                {"start_b", state_to_json(*cfg.start_b)}};
    write_file_atomic(csv_file, csv.str());
    write_file_atomic(out_file, dump(report));
    write_manifest(manifest_path_for(out_file), "mixing-test", cfg, start, {},
                   {out_file.filename().string(), csv_file.filename().string()});
    out << dump({{"fitted_rate", curve.fitted_rate},
                 {"fit_r2", curve.fit_r2},
                 {"out", out_file.string()}});
    return 0;
}

std::vector<double> parse_times(const std::string& text) {
    std::vector<double> times;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            times.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw ValidationError("times", "cannot parse \"" + item + "\"");
        }
    }
    return times;
}

State parse_state(const std::string& text, std::size_t dimension, const char* field) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(field, std::string("malformed JSON: ") + e.what());
    }
    return state_from_json(j, dimension, field);
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message,
                  const std::string& field = {}) {
    Json e{{"kind", kind}, {"message", message}};
    if (!field.empty()) {
        e["field"] = field;
    }
    err << Json{{"error", e}}.dump() << '\n';
}

bool is_subcommand(const std::string& s) {
    return s == "simulate" || s == "check-stability" || s == "ergodic-test" ||
           s == "mixing-test";
}

} // namespace

std::string usage() {
    return "usage: hjs <command> [options]\n"
           "\n"
           "commands:\n"
           "  simulate        --config F [--horizon T] [--paths N] [--seed S] [--grid-dt D]\n"
           "                  [--format jsonl|bin] --out DIR\n"
           "  check-stability --config F [--scan-radius R] [--points N] --out FILE\n"
           "  ergodic-test    --config F [--horizon T] [--burn-in B] [--g x|x2|rate] --out FILE\n"
           "  mixing-test     --config F --times t1,t2,... [--paths N] [--bins K]\n"
           "                  --start-a JSON --start-b JSON --out FILE\n"
           "\n"
           "HJS_THREADS sets the worker count.\n";
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty() || args[0] == "-h" || args[0] == "--help") {
        (args.empty() ? err : out) << usage();
        return args.empty() ? kExitUsage : 0;
    }
    const std::string& command = args[0];
    if (!is_subcommand(command)) {
        err << "unknown command \"" << command << "\"\n\n" << usage();
        return kExitUsage;
    }

    CLI::App app{"hjs " + command};
    app.name("hjs " + command);
    CommonFlags common;
    std::optional<double> horizon;
    std::optional<std::size_t> paths;
    std::optional<std::uint64_t> seed;
    std::optional<double> grid_dt;
    std::optional<std::string> format;
    std::optional<double> scan_radius;
    std::optional<std::size_t> points;
    std::optional<double> burn_in;
    std::optional<std::string> g;
    std::optional<std::string> times;
    std::optional<std::size_t> bins;
    std::optional<std::string> start_a;
    std::optional<std::string> start_b;

    app.add_option("--config", common.config, "Run or model config (JSON)")->required();
    app.add_option("--out", common.out, "Output file or directory")->required();
    app.add_option("--seed", seed, "Master seed");
    if (command == "simulate") {
        app.add_option("--horizon", horizon, "Horizon T");
        app.add_option("--paths", paths, "Number of paths");
        app.add_option("--grid-dt", grid_dt, "Skeleton grid spacing");
        app.add_option("--format", format, "jsonl or bin");
    } else if (command == "check-stability") {
        app.add_option("--scan-radius", scan_radius, "Half-width of the scanned box");
        app.add_option("--points", points, "Sampled states");
    } else if (command == "ergodic-test") {
        app.add_option("--horizon", horizon, "Horizon T");
        app.add_option("--paths", paths, "Number of paths");
        app.add_option("--burn-in", burn_in, "Discarded initial time");
        app.add_option("--g", g, "Test function: x, x2 or rate");
        app.add_option("--grid-dt", grid_dt, "Skeleton grid spacing");
        app.add_option("--bins", bins, "Histogram bins");
    } else {
        app.add_option("--times", times, "Comma-separated observation times");
        app.add_option("--paths", paths, "Paths per start");
        app.add_option("--bins", bins, "Bins per coordinate");
        app.add_option("--start-a", start_a, "First start state as JSON");
        app.add_option("--start-b", start_b, "Second start state as JSON");
    }

    std::vector<std::string> argv_store(args.begin(), args.end());
    argv_store[0] = "hjs " + command;
    std::vector<char*> argv;
    for (auto& s : argv_store) {
        argv.push_back(s.data());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << usage();
        return kExitUsage;
    }

    try {
        RunConfig cfg = parse_config(common.config);
        if (horizon) {
            cfg.horizon = *horizon;
        }
        if (paths) {
            cfg.n_paths = *paths;
        }
        if (seed) {
            cfg.seed = *seed;
        }
        if (grid_dt) {
            cfg.integrator.grid_dt = *grid_dt;
        }
        if (format) {
            try {
                cfg.format = parse_path_format(*format);
            } catch (const std::invalid_argument& e) {
                throw ValidationError("format", e.what());
            }
        }
        if (scan_radius) {
            cfg.scan_radius = *scan_radius;
        }
        if (points) {
            cfg.points = *points;
        }
        if (burn_in) {
            cfg.burn_in = *burn_in;
        }
        if (g) {
            cfg.test_function = *g;
        }
        if (times) {
            cfg.times = parse_times(*times);
        }
        if (bins) {
            cfg.bins = *bins;
        }
        if (start_a) {
            cfg.start_a = parse_state(*start_a, cfg.model.dimension(), "start_a");
        }
        if (start_b) {
            cfg.start_b = parse_state(*start_b, cfg.model.dimension(), "start_b");
        }
        validate(cfg);

        const fs::path target(common.out);
        if (command == "simulate") {
            return cmd_simulate(cfg, target, out);
        }
        if (target.has_parent_path()) {
            fs::create_directories(target.parent_path());
        }
        if (command == "check-stability") {
            return cmd_check_stability(cfg, target, out);
        }
        if (command == "ergodic-test") {
            return cmd_ergodic_test(cfg, target, out);
        }
        return cmd_mixing_test(cfg, target, out);
    } catch (const ValidationError& e) {
        report_error(err, "validation", e.what(), e.field());
    } catch (const EventLimitExceeded& e) {
        report_error(err, "event_limit", e.what());
    } catch (const ConvergenceError& e) {
        report_error(err, "convergence", e.what());
    } catch (const std::exception& e) {
        report_error(err, "runtime", e.what());
    }
    return kExitError;
}

} // namespace hjs::cli
