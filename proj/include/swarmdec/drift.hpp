#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "swarmdec/core_model.hpp"
#include "swarmdec/hypergeom.hpp"
#include "swarmdec/ssa.hpp"

namespace swarmdec {

enum class DriftSource { Analytic, Empirical };

struct DriftPoint {
    double z;
    double dzdt;
    /// Monte Carlo standard error of dzdt; 0 for analytic points.
    double std_error = 0.0;
};

struct DriftCurve {
    int n_agents = 0;
    int group_size = 0;
    std::string rules_label;
    double epsilon = 0.0;
    DriftSource source = DriftSource::Analytic;
    std::uint64_t samples_per_point = 0;
    std::vector<DriftPoint> points;
};

/// Sum over k of signed_weight * P(X=k) at lattice point K.
double rule_drift(int n_agents, const RuleSet& rules, int count_x1);

/// Drift contributed by noise alone: -epsilon * z.
double noise_drift(const NoiseSpec& noise, double z) noexcept;

/// Mean-field drift -epsilon*z + sum_k w_k P(X=k), with K = state_of_z(N, z).
double analytic_drift(int n_agents, const RuleSet& rules, const NoiseSpec& noise, double z);

/// Same on the K-lattice, where no rounding is involved.
double analytic_drift_at(int n_agents, const RuleSet& rules, const NoiseSpec& noise, int count_x1);

/// Analytic drift on a uniform grid of `grid_points` z values over [-1, 1].
DriftCurve analytic_drift_curve(int n_agents, const RuleSet& rules, const NoiseSpec& noise, int grid_points);

/// Monte Carlo drift at every K = 0..N from single-event samples.
///
/// Group events fire at config.rule_rate * N; noise flips at epsilon/2 per
/// agent (config.noise_rate is ignored). Each K owns an RNG stream seeded from
/// (seed, K), so results do not depend on thread scheduling.
DriftCurve empirical_drift(int n_agents, const RuleSet& rules, const NoiseSpec& noise,
                           const SimConfig& config, std::uint64_t samples_per_state, std::uint64_t seed);

PmfTable rule_firing_probabilities(int n_agents, int group_size, int count_x1);

/// Frequency of each composition k over `draws` group draws at fixed K.
PmfTable empirical_firing_probabilities(int n_agents, int group_size, int count_x1,
                                        std::uint64_t draws, std::uint64_t seed);

/// Empirical firing frequencies at every K = 0..N, one RNG stream per K.
std::vector<PmfTable> empirical_firing_lattice(int n_agents, int group_size, std::uint64_t draws,
                                               std::uint64_t seed);

enum class Stability { Stable, Unstable, Marginal };

const char* to_string(Stability s) noexcept;

struct FixedPoint {
    double z_star;
    Stability stability;
    double bracket_lo;
    double bracket_hi;
};

inline constexpr int kDefaultGridPoints = 2001;
inline constexpr double kBisectionWidth = 1e-9;
inline constexpr double kMarginalSlope = 1e-10;

/// Roots of the analytic drift in ascending z, including z = +-1 when the
/// boundary drift vanishes.
std::vector<FixedPoint> find_fixed_points(int n_agents, const RuleSet& rules, const NoiseSpec& noise,
                                          int grid_points = kDefaultGridPoints);

/// True when drift(rules_b) is the exact negation (<= 1 ulp) of drift(rules_a)
/// on the K-lattice at zero noise. Throws ComplementMismatchError unless b is
/// the polarity complement of a.
bool negate_check(const RuleSet& rules_a, const RuleSet& rules_b, int n_agents);

/// Distance in units in the last place between two finite doubles.
std::uint64_t ulp_distance(double a, double b) noexcept;

/// Worker count used by the parallel estimators.
unsigned worker_threads() noexcept;

}  // namespace swarmdec
