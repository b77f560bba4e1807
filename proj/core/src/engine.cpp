#include "hjs/engine.hpp"

#include "hjs/intensity.hpp"
#include "hjs/model_io.hpp"
#include "hjs/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace hjs {

namespace {

constexpr std::uint32_t kEventStream = 0;
constexpr std::uint32_t kNoiseStream = 1;
// Accepted slack between the summed intensities and the proposal rate.
constexpr double kBoundSlack = 1e-9;

double proposal_rate(const ModelSpec& model, const Matrix& y, BoundPolicy policy) {
    double bound = dominating_bound(model, y);
    if (policy == BoundPolicy::Tightest) {
        if (const auto refined = refined_bound(model, y)) {
            bound = std::min(bound, *refined);
        }
    }
    return bound;
}

// Splits [0, rate) in component order; returns nullopt for the rejection mass.
std::optional<std::size_t> pick_component(std::span<const double> lambda, double rate, double u) {
    double total = 0.0;
    for (double l : lambda) {
        total += l;
    }
    if (total > rate * (1.0 + kBoundSlack)) {
        throw std::logic_error("thinning: intensities exceed the proposal rate (" +
                               std::to_string(total) + " > " + std::to_string(rate) + ")");
    }
    const double target = u * rate;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        cumulative += lambda[i];
        if (target < cumulative) {
            return i;
        }
    }
    return std::nullopt;
}

struct PathSink {
    Path& path;
    std::vector<double> sums;
    bool record;

    PathSink(Path& p, std::size_t m, bool record_skeleton)
        : path(p), sums(m), record(record_skeleton) {}

    void sample(double t, double x, const Matrix& y, SampleKind kind) {
        if (!record) {
            return;
        }
        row_sums(y, sums);
        path.skeleton.push(t, x, sums, kind);
    }
    void observe(double x, const Matrix& y) { path.observations.push_back(State{x, y}); }
    void event(double t, std::size_t j) { path.events.push_back(Event{t, j}); }
};

struct NullSink {
    void sample(double, double, const Matrix&, SampleKind) {}
    void observe(double, const Matrix&) {}
    void event(double, std::size_t) {}
};

// Owns X between events: advances it through grid and observation stops
// while Y is read off the exact flow from the last post-jump anchor.
template <class Sink>
class DiffusionTracker {
public:
    DiffusionTracker(const ModelSpec& model, const IntegratorConfig& cfg, double x0,
                     double horizon, bool use_grid, std::span<const double> observation_times,
                     RandomStream& noise, Sink& sink)
        : model_(model),
          cfg_(cfg),
          horizon_(horizon),
          use_grid_(use_grid),
          observations_(observation_times),
          noise_(noise),
          sink_(sink),
          x_(x0) {}

    double x() const noexcept { return x_; }
    void set_x(double x) noexcept { x_ = x; }
    double last_sample_time() const noexcept { return last_sample_; }

    void advance_to(double target, const Matrix& anchor, double anchor_time) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        for (;;) {
            double grid = inf;
            if (use_grid_) {
                grid = static_cast<double>(grid_index_) * cfg_.grid_dt;
                if (grid > horizon_) {
                    grid = inf;
                }
            }
            const double obs = next_obs_ < observations_.size() ? observations_[next_obs_] : inf;
            const double stop = std::min(grid, obs);
            if (stop > target) {
                break;
            }
            move_x(stop);
            flow_y_into(model_.kernel, anchor, stop - anchor_time, scratch_);
            if (grid == stop) {
                sample(stop, scratch_, SampleKind::Grid);
                ++grid_index_;
            }
            if (obs == stop) {
                sink_.observe(x_, scratch_);
                ++next_obs_;
            }
        }
        move_x(target);
    }

    void sample(double t, const Matrix& y, SampleKind kind) {
        sink_.sample(t, x_, y, kind);
        last_sample_ = t;
    }

private:
    void move_x(double t) {
        if (t > t_x_) {
            x_ = advance_diffusion(x_, t - t_x_, model_.coefficients, cfg_, noise_);
            t_x_ = t;
        }
    }

    const ModelSpec& model_;
    const IntegratorConfig& cfg_;
    double horizon_;
    bool use_grid_;
    std::span<const double> observations_;
    RandomStream& noise_;
    Sink& sink_;
    double x_;
    double t_x_ = 0.0;
    std::size_t grid_index_ = 0;
    std::size_t next_obs_ = 0;
    double last_sample_ = -1.0;
    Matrix scratch_;
};

void check_horizon(double horizon) {
    if (!(std::isfinite(horizon) && horizon >= 0.0)) {
        throw std::invalid_argument("simulation horizon must be finite and >= 0");
    }
}

std::vector<double> checked_observations(const SimulationOptions& options, double horizon) {
    std::vector<double> obs = options.observation_times;
    for (double t : obs) {
        if (!(t >= 0.0 && t <= horizon)) {
            throw std::invalid_argument("observation time outside [0, horizon]");
        }
    }
    if (!std::is_sorted(obs.begin(), obs.end())) {
        throw std::invalid_argument("observation times must be sorted");
    }
    return obs;
}

// Shared bookkeeping of both engines once an event time and label are known.
template <class Sink>
struct JumpApplier {
    const ModelSpec& model;
    DiffusionTracker<Sink>& tracker;
    Sink& sink;
    Matrix& anchor;
    double& anchor_time;
    std::size_t& accepted;
    std::size_t max_events;

    void operator()(double tau, const Matrix& y_tau, std::size_t j) {
        if (accepted >= max_events) {
            throw EventLimitExceeded("event limit of " + std::to_string(max_events) +
                                     " reached; the kernel is likely supercritical");
        }
        tracker.advance_to(tau, anchor, anchor_time);
        tracker.sample(tau, y_tau, SampleKind::PreJump);
        tracker.set_x(apply_x_jump(tracker.x(), model.coefficients.jump));
        anchor = y_tau;
        apply_jump_inplace(model.kernel, anchor, j);
        anchor_time = tau;
        tracker.sample(tau, anchor, SampleKind::PostJump);
        sink.event(tau, j);
        ++accepted;
    }
};

template <class Sink>
State finish(const ModelSpec& model, DiffusionTracker<Sink>& tracker, const Matrix& anchor,
             double anchor_time, double horizon) {
    tracker.advance_to(horizon, anchor, anchor_time);
    Matrix y_end = flow_y(model.kernel, anchor, horizon - anchor_time);
    if (tracker.last_sample_time() < horizon) {
        tracker.sample(horizon, y_end, SampleKind::Terminal);
    }
    return State{tracker.x(), std::move(y_end)};
}

template <class Sink>
State run_local_thinning(const ModelSpec& model, const State& start, double horizon,
                         const IntegratorConfig& cfg, std::uint64_t seed, bool use_grid,
                         std::span<const double> observations, std::size_t max_events,
                         BoundPolicy policy, Sink& sink, std::size_t& candidates) {
    RandomStream events(seed, kEventStream);
    RandomStream noise(seed, kNoiseStream);
    DiffusionTracker<Sink> tracker(model, cfg, start.x, horizon, use_grid, observations, noise,
                                   sink);

    Matrix anchor = start.y;
    double anchor_time = 0.0;
    std::size_t accepted = 0;
    JumpApplier<Sink> jump{model, tracker, sink, anchor, anchor_time, accepted, max_events};
    Matrix y_tau;

    for (;;) {
        const NextEvent next = next_event(model, anchor, anchor_time, horizon, events, policy);
        candidates += next.candidates;
        if (!next.component) {
            break;
        }
        flow_y_into(model.kernel, anchor, next.time - anchor_time, y_tau);
        jump(next.time, y_tau, *next.component);
    }
    return finish(model, tracker, anchor, anchor_time, horizon);
}

} // namespace

void Skeleton::push(double t, double x, std::span<const double> row_sums, SampleKind kind) {
    time_.push_back(t);
    x_.push_back(x);
    row_sums_.insert(row_sums_.end(), row_sums.begin(), row_sums.end());
    kind_.push_back(kind);
}

void Skeleton::reserve(std::size_t n) {
    time_.reserve(n);
    x_.reserve(n);
    row_sums_.reserve(n * dimension_);
    kind_.reserve(n);
}

NextEvent next_event(const ModelSpec& model, const Matrix& y, double clock, double horizon,
                     RandomStream& rng, BoundPolicy policy) {
    if (!all_finite(y)) {
        throw std::invalid_argument("next_event: state is not finite");
    }
    const std::size_t m = model.dimension();
    NextEvent result;
    Matrix y_now = y;
    std::vector<double> lambda(m);
    double t = clock;
    for (;;) {
        flow_y_into(model.kernel, y, t - clock, y_now);
        const double rate = proposal_rate(model, y_now, policy);
        if (!(std::isfinite(rate) && rate > 0.0)) {
            throw std::runtime_error("next_event: dominating bound is not finite and positive");
        }
        double tau = t + rng.exponential(rate);
        if (tau <= t) {
            tau = std::nextafter(t, std::numeric_limits<double>::infinity());
        }
        if (tau > horizon) {
            result.time = horizon;
            return result;
        }
        ++result.candidates;
        flow_y_into(model.kernel, y, tau - clock, y_now);
        intensities_into(model, y_now, lambda);
        const auto picked = pick_component(lambda, rate, rng.uniform());
        t = tau;
        if (picked) {
            result.time = tau;
            result.component = picked;
            return result;
        }
    }
}

Path simulate_path(const ModelSpec& model, double horizon, const IntegratorConfig& cfg,
                   std::uint64_t seed, const SimulationOptions& options) {
    check_horizon(horizon);
    validate(cfg, model.coefficients);
    const std::vector<double> obs = checked_observations(options, horizon);
    const State& start = options.start ? *options.start : model.initial;

    Path path;
    path.horizon = horizon;
    path.seed = seed;
    path.model_hash = model_digest(model);
    path.skeleton = Skeleton(model.dimension());
    if (options.record_skeleton) {
        path.skeleton.reserve(static_cast<std::size_t>(horizon / cfg.grid_dt) + 2);
    }
    PathSink sink(path, model.dimension(), options.record_skeleton);
    path.final_state = run_local_thinning(model, start, horizon, cfg, seed, options.record_skeleton,
                                          obs, options.max_events, options.bound, sink,
                                          path.candidates);
    return path;
}

State simulate_state(const ModelSpec& model, const State& start, double horizon,
                     const IntegratorConfig& cfg, std::uint64_t seed) {
    check_horizon(horizon);
    NullSink sink;
    std::size_t candidates = 0;
    return run_local_thinning(model, start, horizon, cfg, seed, false, {},
                              std::numeric_limits<std::size_t>::max(), BoundPolicy::Lipschitz,
                              sink, candidates);
}

DominatingProcess dominating_process(const ModelSpec& model, const Matrix& y0,
                                     std::optional<double> initial_bound) {
    const double envelope = dominating_bound(model, y0);
    DominatingProcess dp;
    dp.initial = envelope;
    if (initial_bound) {
        if (!(*initial_bound >= envelope)) {
            throw std::invalid_argument(
                "dominating_process: initial bound is below the Lipschitz envelope");
        }
        dp.initial = *initial_bound;
    }
    double gamma_bar = 0.0;
    for (const auto& f : model.rates) {
        gamma_bar = std::max(gamma_bar, lipschitz_constant(f));
    }
    double c_bar = 0.0;
    for (double c : model.kernel.c.values()) {
        c_bar = std::max(c_bar, std::abs(c));
    }
    dp.increment = static_cast<double>(model.dimension()) * gamma_bar * c_bar;
    return dp;
}

Path simulate_path_reference(const ModelSpec& model, double horizon, const IntegratorConfig& cfg,
                             std::uint64_t seed, const SimulationOptions& options,
                             std::optional<double> initial_bound) {
    check_horizon(horizon);
    validate(cfg, model.coefficients);
    const std::vector<double> obs = checked_observations(options, horizon);
    const State& start = options.start ? *options.start : model.initial;
    const DominatingProcess dominating = dominating_process(model, start.y, initial_bound);

    Path path;
    path.horizon = horizon;
    path.seed = seed;
    path.model_hash = model_digest(model);
    path.skeleton = Skeleton(model.dimension());
    PathSink sink(path, model.dimension(), options.record_skeleton);

    RandomStream events(seed, kEventStream);
    RandomStream noise(seed, kNoiseStream);
    DiffusionTracker<PathSink> tracker(model, cfg, start.x, horizon, options.record_skeleton, obs,
                                       noise, sink);
    Matrix anchor = start.y;
    double anchor_time = 0.0;
    std::size_t accepted = 0;
    JumpApplier<PathSink> jump{model,       tracker, sink, anchor, anchor_time,
                               accepted,    std::numeric_limits<std::size_t>::max()};

    std::vector<double> lambda(model.dimension());
    Matrix y_tau;
    std::size_t dominating_count = 0;
    double clock = 0.0;
    for (;;) {
        const double rate = dominating.intensity_after(dominating_count);
        double tau = clock + events.exponential(rate);
        if (tau <= clock) {
            tau = std::nextafter(clock, std::numeric_limits<double>::infinity());
        }
        if (tau > horizon) {
            break;
        }
        if (dominating_count >= options.max_events) {
            throw EventLimitExceeded("dominating process exceeded " +
                                     std::to_string(options.max_events) + " points");
        }
        ++dominating_count;
        flow_y_into(model.kernel, anchor, tau - anchor_time, y_tau);
        intensities_into(model, y_tau, lambda);
        const auto picked = pick_component(lambda, rate, events.uniform());
        clock = tau;
        if (picked) {
            jump(tau, y_tau, *picked);
        }
    }
    path.candidates = dominating_count;
    path.final_state = finish(model, tracker, anchor, anchor_time, horizon);
    return path;
}

std::vector<Path> simulate_ensemble(const ModelSpec& model, double horizon,
                                    const IntegratorConfig& cfg, std::uint64_t master_seed,
                                    std::size_t n_paths, const SimulationOptions& options,
                                    std::size_t threads) {
    std::vector<Path> paths(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t i) {
        paths[i] = simulate_path(model, horizon, cfg, mix_seed(master_seed, i), options);
    });
    return paths;
}

} // namespace hjs
