#pragma once

#include "hjs/model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hjs {

/// One accepted jump. `component` is zero-based; files store it one-based.
struct Event {
    double time = 0.0;
    std::size_t component = 0;
    bool operator==(const Event&) const = default;
};

enum class SampleKind : std::uint8_t {
    Grid = 0,      ///< multiple of grid_dt
    PreJump = 1,   ///< value just before an event
    PostJump = 2,  ///< value just after an event
    Terminal = 3,  ///< horizon, when it is off the grid
};

/// Diffusion skeleton in structure-of-arrays layout: per sample the time,
/// x, and the M row sums of y (the arguments of the rate functions).
class Skeleton {
public:
    Skeleton() = default;
    explicit Skeleton(std::size_t dimension) : dimension_(dimension) {}

    void push(double t, double x, std::span<const double> row_sums, SampleKind kind);
    void reserve(std::size_t n);

    std::size_t size() const noexcept { return time_.size(); }
    bool empty() const noexcept { return time_.empty(); }
    std::size_t dimension() const noexcept { return dimension_; }

    double time(std::size_t k) const noexcept { return time_[k]; }
    double x(std::size_t k) const noexcept { return x_[k]; }
    SampleKind kind(std::size_t k) const noexcept { return kind_[k]; }
    std::span<const double> row_sums(std::size_t k) const noexcept {
        return {row_sums_.data() + k * dimension_, dimension_};
    }

    std::span<const double> times() const noexcept { return time_; }
    std::span<const double> xs() const noexcept { return x_; }

    bool operator==(const Skeleton&) const = default;

private:
    std::size_t dimension_ = 0;
    std::vector<double> time_;
    std::vector<double> x_;
    std::vector<double> row_sums_;
    std::vector<SampleKind> kind_;
};

/// One realised trajectory of Z on [0, horizon].
struct Path {
    std::vector<Event> events;
    Skeleton skeleton;
    double horizon = 0.0;
    std::uint64_t seed = 0;
    std::string model_hash;
    State final_state;
    /// Full states at SimulationOptions::observation_times, in order.
    std::vector<State> observations;
    /// Number of thinning candidates drawn (accepted + rejected).
    std::size_t candidates = 0;

    bool operator==(const Path&) const = default;
};

} // namespace hjs
