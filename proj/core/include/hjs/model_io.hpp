#pragma once

#include "hjs/diffusion.hpp"
#include "hjs/model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace hjs {

using Json = nlohmann::json;

/// Parses and validates a model. Missing keys, wrong types and invariant
/// violations all raise ValidationError naming the field.
ModelSpec model_from_json(const Json& j);
Json model_to_json(const ModelSpec& model);

ModelSpec load_model(const std::filesystem::path& path);

Json matrix_to_json(const Matrix& m);
/// Nested rows; `field` is used in error messages.
Matrix matrix_from_json(const Json& j, const std::string& field);

Json state_to_json(const State& z);
/// {"x": .., "y": [[..]]}; y may be omitted for M = 0 or to mean zeros.
State state_from_json(const Json& j, std::size_t dimension, const std::string& field);

Json integrator_to_json(const IntegratorConfig& cfg);
IntegratorConfig integrator_from_json(const Json& j, const std::string& field);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 of the canonical serialization (sorted keys, shortest
/// round-trip number formatting), identical on every platform.
std::string json_digest(const Json& j);
std::string model_digest(const ModelSpec& model);

} // namespace hjs
