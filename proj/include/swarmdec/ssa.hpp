#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "swarmdec/core_model.hpp"

namespace swarmdec {

/// Seeded 64-bit generator with platform-independent real-valued draws.
///
/// The standard distributions are implementation-defined, so uniform and
/// exponential variates are derived directly from the engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
    }

    double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

    std::uint64_t next_u64() noexcept { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Well-mixed 64-bit seed derivation for a sub-stream (e.g. one K value).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

struct SimConfig {
    double rule_rate = 0.5;  ///< group events per agent per unit time
    double noise_rate = 0.0; ///< spontaneous flips per agent per unit time
    std::optional<std::uint64_t> max_events = 100000;
    std::optional<double> t_max;
    bool record_null_draws = false;
    /// End the run on reaching K = 0 or K = N.
    bool stop_on_consensus = false;

    /// Per-agent flip rate that yields a -epsilon*z drift term.
    static double noise_rate_for(const NoiseSpec& noise) noexcept { return noise.epsilon / 2.0; }

    void validate() const;
};

struct Propensities {
    double group_event = 0.0;
    double noise_x1_to_x2 = 0.0;
    double noise_x2_to_x1 = 0.0;
    double total = 0.0;
};

Propensities propensities(const SwarmState& state, const SimConfig& config);

enum class EventKind : std::uint8_t { GroupRule, NoiseX1ToX2, NoiseX2ToX1, NullDraw };

const char* csv_name(EventKind kind) noexcept;

struct StepResult {
    double dt;
    EventKind kind;
    int k;  ///< drawn composition, -1 for noise flips
    SwarmState state;
};

/// Number of X1 agents among G drawn uniformly without replacement.
int draw_group_composition(const SwarmState& state, int group_size, Rng& rng);

/// Chooses the next event without advancing time.
StepResult sample_event(const SwarmState& state, const RuleSet& rules, const Propensities& props, Rng& rng);

/// One Gillespie direct-method step.
StepResult step(const SwarmState& state, const RuleSet& rules, const SimConfig& config, Rng& rng);

struct TrajectoryEvent {
    double time;
    EventKind kind;
    int k;
    int count_x1_after;
};

struct EventCounts {
    std::uint64_t group_rule = 0;
    std::uint64_t noise_x1_to_x2 = 0;
    std::uint64_t noise_x2_to_x1 = 0;
    std::uint64_t null_draw = 0;

    std::uint64_t total() const noexcept { return group_rule + noise_x1_to_x2 + noise_x2_to_x1 + null_draw; }
};

struct Trajectory {
    SwarmState initial_state;
    std::uint64_t seed = 0;
    std::vector<TrajectoryEvent> events;
    SwarmState final_state;
    /// Time at which the run ended (t_max when the horizon was hit).
    double final_time = 0.0;
    EventCounts counts;
    /// Dwell-time integral of z over [0, final_time].
    double z_time_integral = 0.0;

    double time_average_z() const noexcept {
        return final_time > 0.0 ? z_time_integral / final_time : z_of(initial_state);
    }
};

Trajectory simulate(const SwarmState& initial, const RuleSet& rules, const SimConfig& config,
                    std::uint64_t seed);

/// Trajectory CSV: header `time,event,k,count_x1,z`, 17 significant digits.
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace swarmdec
