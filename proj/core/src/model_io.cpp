#include "hjs/model_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hjs {

namespace {

const Json& member(const Json& j, const char* key, const std::string& field) {
    if (!j.is_object()) {
        throw ValidationError(field, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw ValidationError(field + "." + key, "missing");
    }
    return *it;
}

double number(const Json& j, const std::string& field) {
    if (!j.is_number()) {
        throw ValidationError(field, "expected a number");
    }
    return j.get<double>();
}

double number_at(const Json& j, const char* key, const std::string& field) {
    return number(member(j, key, field), field + "." + key);
}

double number_or(const Json& j, const char* key, const std::string& field, double fallback) {
    return j.contains(key) ? number_at(j, key, field) : fallback;
}

std::string type_of(const Json& j, const std::string& field) {
    const Json& t = member(j, "type", field);
    if (!t.is_string()) {
        throw ValidationError(field + ".type", "expected a string");
    }
    return t.get<std::string>();
}

[[noreturn]] void unknown_type(const std::string& field, const std::string& type) {
    throw ValidationError(field + ".type", "unknown type \"" + type + "\"");
}

RateFunction rate_from_json(const Json& j, const std::string& field) {
    const std::string type = type_of(j, field);
    if (type == "affine_clipped") {
        return AffineClipped{number_at(j, "floor", field), number_at(j, "intercept", field),
                             number_at(j, "slope", field)};
    }
    if (type == "sigmoid") {
        return Sigmoid{number_at(j, "max", field), number_at(j, "steepness", field),
                       number_or(j, "center", field, 0.0)};
    }
    if (type == "constant") {
        return ConstantRate{number_at(j, "level", field)};
    }
    unknown_type(field, type);
}

Json rate_to_json(const RateFunction& f) {
    return std::visit(
        [](const auto& r) -> Json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, AffineClipped>) {
                return {{"type", "affine_clipped"},
                        {"floor", r.floor},
                        {"intercept", r.intercept},
                        {"slope", r.slope}};
            } else if constexpr (std::is_same_v<T, Sigmoid>) {
                return {{"type", "sigmoid"},
                        {"max", r.max_rate},
                        {"steepness", r.steepness},
                        {"center", r.center}};
            } else {
                return {{"type", "constant"}, {"level", r.level}};
            }
        },
        f);
}

DriftSpec drift_from_json(const Json& j, const std::string& field) {
    const std::string type = type_of(j, field);
    if (type == "linear") {
        return LinearDrift{number_at(j, "beta", field), number_or(j, "offset", field, 0.0)};
    }
    if (type == "bounded_smooth") {
        return BoundedSmoothDrift{number_at(j, "amplitude", field), number_at(j, "scale", field),
                                  number_or(j, "offset", field, 0.0)};
    }
    unknown_type(field, type);
}

Json drift_to_json(const DriftSpec& b) {
    if (const auto* l = std::get_if<LinearDrift>(&b)) {
        return {{"type", "linear"}, {"beta", l->beta}, {"offset", l->offset}};
    }
    const auto& s = std::get<BoundedSmoothDrift>(b);
    return {{"type", "bounded_smooth"},
            {"amplitude", s.amplitude},
            {"scale", s.scale},
            {"offset", s.offset}};
}

DiffusionSpec diffusion_from_json(const Json& j, const std::string& field) {
    const std::string type = type_of(j, field);
    if (type == "constant") {
        return ConstantDiffusion{number_at(j, "s", field)};
    }
    if (type == "smooth_bounded") {
        return SmoothBoundedDiffusion{number_at(j, "s0", field), number_at(j, "s1", field)};
    }
    unknown_type(field, type);
}

Json diffusion_to_json(const DiffusionSpec& s) {
    if (const auto* c = std::get_if<ConstantDiffusion>(&s)) {
        return {{"type", "constant"}, {"s", c->s}};
    }
    const auto& b = std::get<SmoothBoundedDiffusion>(s);
    return {{"type", "smooth_bounded"}, {"s0", b.s0}, {"s1", b.s1}};
}

JumpMap jump_from_json(const Json& j, const std::string& field) {
    const std::string type = type_of(j, field);
    if (type == "constant") {
        return ConstantJump{number_at(j, "value", field)};
    }
    if (type == "linear_damping") {
        return LinearDamping{number_at(j, "eta", field)};
    }
    if (type == "power_bounded") {
        return PowerBounded{number_at(j, "C", field), number_at(j, "eta", field)};
    }
    unknown_type(field, type);
}

Json jump_to_json(const JumpMap& a) {
    return std::visit(
        [](const auto& m) -> Json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ConstantJump>) {
                return {{"type", "constant"}, {"value", m.value}};
            } else if constexpr (std::is_same_v<T, LinearDamping>) {
                return {{"type", "linear_damping"}, {"eta", m.eta}};
            } else {
                return {{"type", "power_bounded"}, {"C", m.scale}, {"eta", m.eta}};
            }
        },
        a);
}

// Nested rows, or a flat row-major array of M * M numbers.
Matrix square_from_json(const Json& j, std::size_t m, const std::string& field) {
    if (j.is_array() && !j.empty() && j[0].is_number()) {
        if (j.size() != m * m) {
            throw ValidationError(field, "dimension mismatch: expected " + std::to_string(m * m) +
                                             " entries, got " + std::to_string(j.size()));
        }
        Matrix out(m, m);
        for (std::size_t k = 0; k < j.size(); ++k) {
            out.values()[k] = number(j[k], field + "[" + std::to_string(k / m) + "][" +
                                               std::to_string(k % m) + "]");
        }
        return out;
    }
    return matrix_from_json(j, field);
}

} // namespace

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row.push_back(m(i, j));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& field) {
    if (!j.is_array()) {
        throw ValidationError(field, "expected an array of rows");
    }
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    if (rows > 0) {
        if (!j[0].is_array()) {
            throw ValidationError(field + "[0]", "expected an array");
        }
        cols = j[0].size();
    }
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string row_field = field + "[" + std::to_string(i) + "]";
        if (!j[i].is_array()) {
            throw ValidationError(row_field, "expected an array");
        }
        if (j[i].size() != cols) {
            throw ValidationError(row_field, "ragged matrix");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(i, c) = number(j[i][c], row_field + "[" + std::to_string(c) + "]");
        }
    }
    return m;
}

Json state_to_json(const State& z) {
    return {{"x", z.x}, {"y", matrix_to_json(z.y)}};
}

State state_from_json(const Json& j, std::size_t dimension, const std::string& field) {
    State z;
    z.x = number_at(j, "x", field);
    if (j.contains("y")) {
        z.y = square_from_json(j.at("y"), dimension, field + ".y");
        if (dimension == 0 && z.y.rows() == 0) {
            z.y = Matrix(0, 0);
        }
    } else {
        z.y = Matrix(dimension, dimension, 0.0);
    }
    if (z.y.rows() != dimension || z.y.cols() != dimension) {
        throw ValidationError(field + ".y", "must be M x M");
    }
    if (!std::isfinite(z.x)) {
        throw ValidationError(field + ".x", "must be finite");
    }
    return z;
}

ModelSpec model_from_json(const Json& j) {
    if (!j.is_object()) {
        throw ValidationError("model", "expected an object");
    }
    ModelSpec model;
    const Json& rates = member(j, "rates", "model");
    if (!rates.is_array()) {
        throw ValidationError("rates", "expected an array");
    }
    for (std::size_t i = 0; i < rates.size(); ++i) {
        model.rates.push_back(rate_from_json(rates[i], "rates[" + std::to_string(i) + "]"));
    }
    const std::size_t m = model.rates.size();
    if (j.contains("M")) {
        const Json& declared = j.at("M");
        if (!declared.is_number_unsigned()) {
            throw ValidationError("M", "expected a nonnegative integer");
        }
        if (declared.get<std::size_t>() != m) {
            throw ValidationError("rates", "dimension mismatch: M = " +
                                               std::to_string(declared.get<std::size_t>()) +
                                               " but " + std::to_string(m) +
                                               " rate functions given");
        }
    }

    const Json& kernel = member(j, "kernel", "model");
    model.kernel.c = square_from_json(member(kernel, "c", "kernel"), m, "kernel.c");
    model.kernel.alpha = square_from_json(member(kernel, "alpha", "kernel"), m, "kernel.alpha");
    if (m == 0) {
        model.kernel.c = Matrix(0, 0);
        model.kernel.alpha = Matrix(0, 0);
    }

    const Json& coeff = member(j, "coefficients", "model");
    model.coefficients.drift = drift_from_json(member(coeff, "drift", "coefficients"),
                                               "coefficients.drift");
    model.coefficients.diffusion = diffusion_from_json(
        member(coeff, "diffusion", "coefficients"), "coefficients.diffusion");
    model.coefficients.jump =
        coeff.contains("jump") ? jump_from_json(coeff.at("jump"), "coefficients.jump")
                               : JumpMap{ConstantJump{0.0}};

    if (j.contains("initial")) {
        const Json& init = j.at("initial");
        model.initial.x = number_or(init, "x", "initial", 0.0);
        model.initial.y = init.contains("y") ? square_from_json(init.at("y"), m, "initial.y")
                                             : Matrix(m, m, 0.0);
        if (m == 0) {
            model.initial.y = Matrix(0, 0);
        }
    } else {
        model.initial = State{0.0, Matrix(m, m, 0.0)};
    }
    validate(model);
    return model;
}

Json model_to_json(const ModelSpec& model) {
    Json rates = Json::array();
    for (const auto& f : model.rates) {
        rates.push_back(rate_to_json(f));
    }
    return {{"M", model.dimension()},
            {"rates", rates},
            {"kernel",
             {{"c", matrix_to_json(model.kernel.c)},
              {"alpha", matrix_to_json(model.kernel.alpha)}}},
            {"coefficients",
             {{"drift", drift_to_json(model.coefficients.drift)},
              {"diffusion", diffusion_to_json(model.coefficients.diffusion)},
              {"jump", jump_to_json(model.coefficients.jump)}}},
            {"initial", state_to_json(model.initial)}};
}

ModelSpec load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("model", "cannot open " + path.string());
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("model", std::string("malformed JSON: ") + e.what());
    }
    return model_from_json(j);
}

Json integrator_to_json(const IntegratorConfig& cfg) {
    Json j{{"grid_dt", cfg.grid_dt}};
    if (const auto* em = std::get_if<EulerMaruyama>(&cfg.scheme)) {
        j["scheme"] = "euler_maruyama";
        j["step"] = em->step;
    } else {
        j["scheme"] = "exact_ou";
    }
    return j;
}

IntegratorConfig integrator_from_json(const Json& j, const std::string& field) {
    IntegratorConfig cfg;
    if (!j.is_object()) {
        throw ValidationError(field, "expected an object");
    }
    cfg.grid_dt = number_or(j, "grid_dt", field, cfg.grid_dt);
    if (j.contains("scheme")) {
        if (!j.at("scheme").is_string()) {
            throw ValidationError(field + ".scheme", "expected a string");
        }
        const auto scheme = j.at("scheme").get<std::string>();
        if (scheme == "euler_maruyama") {
            cfg.scheme = EulerMaruyama{number_or(j, "step", field, EulerMaruyama{}.step)};
        } else if (scheme == "exact_ou") {
            cfg.scheme = ExactOU{};
        } else {
            throw ValidationError(field + ".scheme", "unknown scheme \"" + scheme + "\"");
        }
    }
    return cfg;
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int k = 0; k < len; ++k) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", digest[k]);
        hex += buf;
    }
    return hex;
}

std::string json_digest(const Json& j) {
    return sha256_hex(j.dump());
}

std::string model_digest(const ModelSpec& model) {
    return json_digest(model_to_json(model));
}

} // namespace hjs
