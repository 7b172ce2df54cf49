#include "swarmdec/ssa.hpp"

#include <cstdio>

#include "swarmdec/error.hpp"

namespace swarmdec {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    // splitmix64 finalizer over a golden-ratio stride.
    std::uint64_t x = base + 0x9E3779B97F4A7C15ull * (stream + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

void SimConfig::validate() const {
    if (!(rule_rate >= 0.0) || !std::isfinite(rule_rate)) throw DomainError("rule rate must be finite and >= 0");
    if (!(noise_rate >= 0.0) || !std::isfinite(noise_rate)) throw DomainError("noise rate must be finite and >= 0");
    if (!max_events && !t_max) throw DomainError("either an event cap or a time horizon is required");
    if (max_events && *max_events == 0) throw DomainError("event cap must be positive");
    if (t_max && !(*t_max > 0.0)) throw DomainError("time horizon must be positive");
}

Propensities propensities(const SwarmState& state, const SimConfig& config) {
    Propensities p;
    p.group_event = config.rule_rate * state.n_agents();
    p.noise_x1_to_x2 = config.noise_rate * state.count_x1();
    p.noise_x2_to_x1 = config.noise_rate * state.count_x2();
    p.total = p.group_event + p.noise_x1_to_x2 + p.noise_x2_to_x1;
    return p;
}

const char* csv_name(EventKind kind) noexcept {
    switch (kind) {
        case EventKind::GroupRule: return "rule";
        case EventKind::NoiseX1ToX2: return "noise12";
        case EventKind::NoiseX2ToX1: return "noise21";
        case EventKind::NullDraw: return "null";
    }
    return "?";
}

int draw_group_composition(const SwarmState& state, int group_size, Rng& rng) {
    if (group_size > state.n_agents()) throw DomainError("group size exceeds swarm size");
    int remaining_x1 = state.count_x1();
    int remaining = state.n_agents();
    int drawn_x1 = 0;
    for (int i = 0; i < group_size; ++i) {
        // Agent index uniform over the remaining pool; the first remaining_x1
        // indices hold X1.
        if (rng.uniform() * remaining < remaining_x1) {
            ++drawn_x1;
            --remaining_x1;
        }
        --remaining;
    }
    return drawn_x1;
}

StepResult sample_event(const SwarmState& state, const RuleSet& rules, const Propensities& props, Rng& rng) {
    if (!(props.total > 0.0)) throw FrozenSystemError("total propensity is zero");
    const double u = rng.uniform() * props.total;

    const bool pick_group = props.group_event > 0.0 &&
                            (u < props.group_event || (props.noise_x1_to_x2 <= 0.0 && props.noise_x2_to_x1 <= 0.0));
    if (pick_group) {
        const int g = rules.group_size();
        const int k = draw_group_composition(state, g, rng);
        if (k == 0 || k == g) return StepResult{0.0, EventKind::NullDraw, k, state};
        return StepResult{0.0, EventKind::GroupRule, k, apply_rule(state, k, g, rules.polarity_for(k))};
    }
    const bool pick_x1_to_x2 = props.noise_x1_to_x2 > 0.0 &&
                               (u < props.group_event + props.noise_x1_to_x2 || props.noise_x2_to_x1 <= 0.0);
    if (pick_x1_to_x2) {
        return StepResult{0.0, EventKind::NoiseX1ToX2, -1, apply_noise_flip(state, FlipDirection::X1ToX2)};
    }
    return StepResult{0.0, EventKind::NoiseX2ToX1, -1, apply_noise_flip(state, FlipDirection::X2ToX1)};
}

StepResult step(const SwarmState& state, const RuleSet& rules, const SimConfig& config, Rng& rng) {
    if (rules.group_size() > state.n_agents()) throw DomainError("group size exceeds swarm size");
    const Propensities props = propensities(state, config);
    if (!(props.total > 0.0)) throw FrozenSystemError("total propensity is zero");
    const double dt = rng.exponential(props.total);
    StepResult result = sample_event(state, rules, props, rng);
    result.dt = dt;
    return result;
}

Trajectory simulate(const SwarmState& initial, const RuleSet& rules, const SimConfig& config,
                    std::uint64_t seed) {
    config.validate();
    if (rules.group_size() > initial.n_agents()) throw DomainError("group size exceeds swarm size");

    Trajectory traj{initial, seed, {}, initial, 0.0, {}, 0.0};
    Rng rng(seed);
    SwarmState state = initial;
    double t = 0.0;
    std::uint64_t n_events = 0;
    auto at_consensus = [](const SwarmState& s) { return s.count_x1() == 0 || s.count_x1() == s.n_agents(); };

    while (true) {
        if (config.max_events && n_events >= *config.max_events) break;
        if (config.stop_on_consensus && at_consensus(state)) break;

        const Propensities props = propensities(state, config);
        if (!(props.total > 0.0)) throw FrozenSystemError("total propensity is zero");
        const double dt = rng.exponential(props.total);
        if (config.t_max && t + dt > *config.t_max) {
            traj.z_time_integral += z_of(state) * (*config.t_max - t);
            t = *config.t_max;
            break;
        }
        const StepResult ev = sample_event(state, rules, props, rng);
        traj.z_time_integral += z_of(state) * dt;
        t += dt;
        state = ev.state;
        ++n_events;

        switch (ev.kind) {
            case EventKind::GroupRule: ++traj.counts.group_rule; break;
            case EventKind::NoiseX1ToX2: ++traj.counts.noise_x1_to_x2; break;
            case EventKind::NoiseX2ToX1: ++traj.counts.noise_x2_to_x1; break;
            case EventKind::NullDraw: ++traj.counts.null_draw; break;
        }
        if (ev.kind != EventKind::NullDraw || config.record_null_draws) {
            traj.events.push_back(TrajectoryEvent{t, ev.kind, ev.k, state.count_x1()});
        }
    }
    traj.final_state = state;
    traj.final_time = t;
    return traj;
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::string out = "time,event,k,count_x1,z\n";
    char buf[160];
    const int n = trajectory.initial_state.n_agents();
    for (const TrajectoryEvent& e : trajectory.events) {
        char kbuf[16] = "";
        if (e.k >= 0) std::snprintf(kbuf, sizeof kbuf, "%d", e.k);
        std::snprintf(buf, sizeof buf, "%.17g,%s,%s,%d,%.17g\n", e.time, csv_name(e.kind), kbuf,
                      e.count_x1_after, lattice_z(n, e.count_x1_after));
        out += buf;
    }
    return out;
}

}  // namespace swarmdec
