#pragma once

#include "hjs/diffusion.hpp"
#include "hjs/model.hpp"
#include "hjs/path.hpp"
#include "hjs/random.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hjs {

/// Circuit breaker: too many events on one path, which almost always means
/// a supercritical kernel (rho(H) >= 1).
class EventLimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BoundPolicy {
    /// Lipschitz envelope only.
    Lipschitz,
    /// min(Lipschitz envelope, refined bound) when every f_i is nondecreasing.
    Tightest,
};

struct SimulationOptions {
    bool record_skeleton = true;
    std::size_t max_events = 10'000'000;
    /// Times in [0, horizon] at which to store the full state.
    std::vector<double> observation_times;
    BoundPolicy bound = BoundPolicy::Lipschitz;
    /// Starting state; the model's initial state when empty.
    std::optional<State> start;
};

/// Result of one thinning search from a given clock.
struct NextEvent {
    /// Event time, or the horizon when nothing was accepted before it.
    double time = 0.0;
    /// Zero-based component, nullopt when the horizon was reached.
    std::optional<std::size_t> component;
    std::size_t candidates = 0;
};

/// Local-bound thinning: propose exponential waiting times at rate B(y),
/// flow y to the candidate, accept component i with probability lambda_i/B
/// (one uniform partitions [0, 1) in component order, the remainder is the
/// rejection mass), and recompute B at the flowed state after a rejection.
/// `y` is the memory state at `clock`.
NextEvent next_event(const ModelSpec& model, const Matrix& y, double clock, double horizon,
                     RandomStream& rng, BoundPolicy policy = BoundPolicy::Lipschitz);

/// Exact event-driven simulation of Z on [0, horizon]. Fully determined by
/// its arguments: thinning draws come from stream 0 of `seed` and Brownian
/// increments from stream 1.
Path simulate_path(const ModelSpec& model, double horizon, const IntegratorConfig& cfg,
                   std::uint64_t seed, const SimulationOptions& options = {});

/// The dominating linear process N* with intensity initial + increment * N*_{t-}.
struct DominatingProcess {
    double initial = 0.0;
    double increment = 0.0;
    double intensity_after(std::size_t dominating_events) const noexcept {
        return initial + increment * static_cast<double>(dominating_events);
    }
};

/// initial = Lipschitz envelope at the starting y (or `initial_bound`,
/// which must not be smaller), increment = M * max_i gamma_i * max_ij |c_ij|.
DominatingProcess dominating_process(const ModelSpec& model, const Matrix& y0,
                                     std::optional<double> initial_bound = std::nullopt);

/// Literal construction through N*: simulate the pure-birth dominating
/// process and label each of its points with a component (or none) using
/// probabilities f_i(.)/lambda*. Same law as simulate_path; much slower.
/// `max_events` caps the number of dominating points.
Path simulate_path_reference(const ModelSpec& model, double horizon, const IntegratorConfig& cfg,
                             std::uint64_t seed, const SimulationOptions& options = {},
                             std::optional<double> initial_bound = std::nullopt);

/// Final state only, no skeleton. Used by Monte Carlo estimators that need
/// millions of short runs.
State simulate_state(const ModelSpec& model, const State& start, double horizon,
                     const IntegratorConfig& cfg, std::uint64_t seed);

/// Independent paths with seeds mix_seed(master_seed, index), run on
/// `threads` workers. The result does not depend on `threads`.
std::vector<Path> simulate_ensemble(const ModelSpec& model, double horizon,
                                    const IntegratorConfig& cfg, std::uint64_t master_seed,
                                    std::size_t n_paths, const SimulationOptions& options = {},
                                    std::size_t threads = 0);

} // namespace hjs
