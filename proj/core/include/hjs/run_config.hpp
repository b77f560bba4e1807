#pragma once

#include "hjs/diffusion.hpp"
#include "hjs/model.hpp"
#include "hjs/model_io.hpp"
#include "hjs/path_io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hjs {

std::string tool_version();

/// Everything a CLI run depends on. The model is always held inline;
/// `model_path` only records where it came from.
struct RunConfig {
    std::string model_path;
    ModelSpec model;
    IntegratorConfig integrator;
    double horizon = 100.0;
    std::size_t n_paths = 1;
    std::uint64_t seed = 1;
    /// Used when `burn_in` is unset.
    double burn_in_fraction = 0.1;
    std::optional<double> burn_in;
    std::size_t bins = 30;
    std::vector<double> times;
    PathFormat format = PathFormat::Jsonl;
    double scan_radius = 20.0;
    std::size_t points = 10'000;
    std::string test_function = "x";
    std::optional<State> start_a;
    std::optional<State> start_b;
    /// Polynomial-frame Lyapunov exponent; chosen automatically when unset.
    std::optional<double> poly_m;

    double effective_burn_in() const noexcept {
        return burn_in.value_or(burn_in_fraction * horizon);
    }
    bool operator==(const RunConfig&) const = default;
};

/// Checks run-shape invariants; throws ValidationError naming the field.
void validate(const RunConfig& config);

/// Parses a run config. "model" is either an inline model object or a path
/// relative to `base_dir`. A document with a top-level "rates" key is taken
/// to be a bare model with every run parameter at its default. When no
/// integrator scheme is given, the exact OU transition is used if the
/// coefficients allow it and Euler-Maruyama otherwise.
RunConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
RunConfig parse_config(const std::filesystem::path& path);

Json config_to_json(const RunConfig& config);

/// SHA-256 of the canonical config serialization.
std::string config_digest(const RunConfig& config);

struct RunManifest {
    std::string command;
    std::string config_digest;
    std::string model_digest;
    std::string tool_version;
    double wall_clock_seconds = 0.0;
    std::vector<std::uint64_t> path_seeds;
    std::vector<std::string> outputs;
};

Json manifest_to_json(const RunManifest& manifest);

/// Writes to a temporary sibling and renames it over `path`, so readers
/// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

} // namespace hjs
