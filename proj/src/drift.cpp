#include "swarmdec/drift.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "swarmdec/error.hpp"

namespace swarmdec {

namespace {

void check_pairing(int n_agents, const RuleSet& rules) {
    if (rules.group_size() > n_agents) {
        throw DomainError("group size " + std::to_string(rules.group_size()) + " exceeds swarm size " +
                          std::to_string(n_agents));
    }
}

int sign_of(double v) noexcept { return (v > 0.0) - (v < 0.0); }

// Runs fn(i) for i in [0, count) on the worker pool. Each index is written by
// exactly one worker, so callers store results by index.
template <typename Fn>
void parallel_for(int count, Fn&& fn) {
    const unsigned workers = std::min<unsigned>(worker_threads(), static_cast<unsigned>(std::max(count, 1)));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                try {
                    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next.store(count);
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

unsigned worker_threads() noexcept { return std::max(1u, std::thread::hardware_concurrency()); }

double rule_drift(int n_agents, const RuleSet& rules, int count_x1) {
    check_pairing(n_agents, rules);
    const int g = rules.group_size();
    double sum = 0.0;
    for (int k = 1; k < g; ++k) {
        const int w = signed_weight(k, g, rules.polarity_for(k));
        sum += w * pmf(n_agents, count_x1, g, k);
    }
    return sum;
}

double noise_drift(const NoiseSpec& noise, double z) noexcept { return -noise.epsilon * z; }

double analytic_drift_at(int n_agents, const RuleSet& rules, const NoiseSpec& noise, int count_x1) {
    const SwarmState s(n_agents, count_x1);
    return noise_drift(noise, z_of(s)) + rule_drift(n_agents, rules, count_x1);
}

double analytic_drift(int n_agents, const RuleSet& rules, const NoiseSpec& noise, double z) {
    const SwarmState s = state_of_z(n_agents, z);
    return noise_drift(noise, z) + rule_drift(n_agents, rules, s.count_x1());
}

DriftCurve analytic_drift_curve(int n_agents, const RuleSet& rules, const NoiseSpec& noise, int grid_points) {
    if (grid_points < 2) throw DomainError("drift grid needs at least 2 points");
    DriftCurve curve;
    curve.n_agents = n_agents;
    curve.group_size = rules.group_size();
    curve.rules_label = rules.label();
    curve.epsilon = noise.epsilon;
    curve.source = DriftSource::Analytic;
    curve.points.reserve(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i) {
        const double z = (i == grid_points - 1) ? 1.0 : -1.0 + 2.0 * i / (grid_points - 1);
        curve.points.push_back(DriftPoint{z, analytic_drift(n_agents, rules, noise, z)});
    }
    return curve;
}

DriftCurve empirical_drift(int n_agents, const RuleSet& rules, const NoiseSpec& noise,
                           const SimConfig& config, std::uint64_t samples_per_state, std::uint64_t seed) {
    check_pairing(n_agents, rules);
    if (samples_per_state < 1) throw DomainError("need at least one sample per state");
    SimConfig cfg = config;
    cfg.noise_rate = SimConfig::noise_rate_for(noise);

    DriftCurve curve;
    curve.n_agents = n_agents;
    curve.group_size = rules.group_size();
    curve.rules_label = rules.label();
    curve.epsilon = noise.epsilon;
    curve.source = DriftSource::Empirical;
    curve.samples_per_point = samples_per_state;
    curve.points.resize(static_cast<std::size_t>(n_agents) + 1, DriftPoint{0.0, 0.0});

    parallel_for(n_agents + 1, [&](int k_state) {
        const SwarmState state(n_agents, k_state);
        const Propensities props = propensities(state, cfg);
        DriftPoint& out = curve.points[static_cast<std::size_t>(k_state)];
        out.z = z_of(state);
        if (!(props.total > 0.0)) return;

        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k_state)));
        std::int64_t sum = 0;
        std::uint64_t nonzero = 0;
        for (std::uint64_t i = 0; i < samples_per_state; ++i) {
            const int dk = sample_event(state, rules, props, rng).state.count_x1() - k_state;
            sum += dk;
            nonzero += static_cast<std::uint64_t>(dk != 0);
        }
        const double n = static_cast<double>(samples_per_state);
        const double mean = static_cast<double>(sum) / n;
        // dK is in {-1, 0, 1}, so sum of squares is the count of nonzero steps.
        const double var = samples_per_state > 1
                               ? (static_cast<double>(nonzero) - n * mean * mean) / (n - 1.0)
                               : 0.0;
        const double scale = 2.0 * props.total / n_agents;
        out.dzdt = scale * mean;
        out.std_error = scale * std::sqrt(std::max(var, 0.0) / n);
    });
    return curve;
}

PmfTable rule_firing_probabilities(int n_agents, int group_size, int count_x1) {
    return pmf_table(n_agents, count_x1, group_size);
}

PmfTable empirical_firing_probabilities(int n_agents, int group_size, int count_x1,
                                        std::uint64_t draws, std::uint64_t seed) {
    if (draws < 1) throw DomainError("need at least one draw");
    const SwarmState state(n_agents, count_x1);
    if (group_size < 1 || group_size > n_agents) throw DomainError("group size outside [1, N]");
    std::vector<std::uint64_t> hits(static_cast<std::size_t>(group_size) + 1, 0);
    Rng rng(seed);
    for (std::uint64_t i = 0; i < draws; ++i) {
        ++hits[static_cast<std::size_t>(draw_group_composition(state, group_size, rng))];
    }
    PmfTable table;
    table.group_size = group_size;
    table.probabilities.reserve(hits.size());
    for (auto h : hits) table.probabilities.push_back(static_cast<double>(h) / static_cast<double>(draws));
    return table;
}

std::vector<PmfTable> empirical_firing_lattice(int n_agents, int group_size, std::uint64_t draws,
                                               std::uint64_t seed) {
    std::vector<PmfTable> out(static_cast<std::size_t>(n_agents) + 1);
    parallel_for(n_agents + 1, [&](int k_state) {
        out[static_cast<std::size_t>(k_state)] = empirical_firing_probabilities(
            n_agents, group_size, k_state, draws, derive_seed(seed, static_cast<std::uint64_t>(k_state)));
    });
    return out;
}

const char* to_string(Stability s) noexcept {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
    }
    return "?";
}

std::vector<FixedPoint> find_fixed_points(int n_agents, const RuleSet& rules, const NoiseSpec& noise,
                                          int grid_points) {
    if (grid_points < 3) throw DomainError("fixed-point grid needs at least 3 points");
    check_pairing(n_agents, rules);
    auto drift = [&](double z) { return analytic_drift(n_agents, rules, noise, z); };

    const DriftCurve curve = analytic_drift_curve(n_agents, rules, noise, grid_points);
    const auto& pts = curve.points;
    const int last = grid_points - 1;

    std::vector<int> nonzero;
    for (int i = 0; i <= last; ++i) {
        if (pts[static_cast<std::size_t>(i)].dzdt != 0.0) nonzero.push_back(i);
    }
    std::vector<FixedPoint> roots;
    if (nonzero.empty()) return roots;

    auto z_at = [&](int i) { return pts[static_cast<std::size_t>(i)].z; };
    auto d_at = [&](int i) { return pts[static_cast<std::size_t>(i)].dzdt; };

    // z = -1: stable when the drift just inside points back toward it.
    if (nonzero.front() > 0) {
        const Stability s = d_at(nonzero.front()) < 0.0 ? Stability::Stable : Stability::Unstable;
        roots.push_back(FixedPoint{-1.0, s, -1.0, z_at(nonzero.front() - 1)});
    }

    for (std::size_t j = 1; j < nonzero.size(); ++j) {
        const int a = nonzero[j - 1];
        const int b = nonzero[j];
        const int sa = sign_of(d_at(a));
        const int sb = sign_of(d_at(b));
        const bool zero_run = b > a + 1;

        if (sa == sb) {
            if (zero_run) {
                // Drift touches zero without crossing.
                roots.push_back(FixedPoint{0.5 * (z_at(a + 1) + z_at(b - 1)), Stability::Marginal,
                                           z_at(a + 1), z_at(b - 1)});
            }
            continue;
        }

        double lo = z_at(a);
        double hi = z_at(b);
        double z_star;
        if (zero_run) {
            z_star = 0.5 * (z_at(a + 1) + z_at(b - 1));
        } else {
            double d_lo = d_at(a);
            double d_hi = d_at(b);
            while (hi - lo >= kBisectionWidth) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                const double dm = drift(mid);
                if (dm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (sign_of(dm) == sign_of(d_lo)) {
                    lo = mid;
                    d_lo = dm;
                } else {
                    hi = mid;
                    d_hi = dm;
                }
            }
            z_star = 0.5 * (lo + hi);
            (void)d_hi;
        }
        Stability s = sa > 0 ? Stability::Stable : Stability::Unstable;
        if (hi > lo) {
            const double slope = (drift(hi) - drift(lo)) / (hi - lo);
            if (std::abs(slope) < kMarginalSlope) s = Stability::Marginal;
        }
        roots.push_back(FixedPoint{z_star, s, lo, hi});
    }

    if (nonzero.back() < last) {
        const Stability s = d_at(nonzero.back()) > 0.0 ? Stability::Stable : Stability::Unstable;
        roots.push_back(FixedPoint{1.0, s, z_at(nonzero.back() + 1), 1.0});
    }
    return roots;
}

std::uint64_t ulp_distance(double a, double b) noexcept {
    if (a == b) return 0;
    auto ordered = [](double v) {
        const auto bits = std::bit_cast<std::int64_t>(v);
        return bits < 0 ? std::numeric_limits<std::int64_t>::min() - bits : bits;
    };
    const std::int64_t ia = ordered(a);
    const std::int64_t ib = ordered(b);
    return ia > ib ? static_cast<std::uint64_t>(ia) - static_cast<std::uint64_t>(ib)
                   : static_cast<std::uint64_t>(ib) - static_cast<std::uint64_t>(ia);
}

bool negate_check(const RuleSet& rules_a, const RuleSet& rules_b, int n_agents) {
    if (!(rules_b == rules_a.complemented())) {
        throw ComplementMismatchError("'" + rules_b.label() + "' is not the complement of '" +
                                      rules_a.label() + "'");
    }
    const NoiseSpec quiet(0.0);
    for (int k = 0; k <= n_agents; ++k) {
        const double da = analytic_drift_at(n_agents, rules_a, quiet, k);
        const double db = analytic_drift_at(n_agents, rules_b, quiet, k);
        if (ulp_distance(da, -db) > 1) return false;
    }
    return true;
}

}  // namespace swarmdec
