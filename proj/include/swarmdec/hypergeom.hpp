#pragma once

#include <vector>

namespace swarmdec {

/// P(X = k) for k = 0..G at one swarm state.
struct PmfTable {
    int group_size = 0;
    std::vector<double> probabilities;

    double operator[](int k) const { return probabilities.at(static_cast<std::size_t>(k)); }
    double sum() const noexcept;
};

/// Hypergeometric probability of drawing k X1-agents in a group of G taken
/// without replacement from N agents, K of which hold X1.
///
/// Exact 128-bit binomials for N <= 64, log-space accumulation above that.
/// Out-of-support k gives exactly 0.
double pmf(int n_agents, int count_x1, int group_size, int k);

PmfTable pmf_table(int n_agents, int count_x1, int group_size);

/// Enumerates every G-subset of N agents (the first K being X1) and counts
/// those holding exactly k X1. Validation oracle; N <= 24.
double pmf_bruteforce(int n_agents, int count_x1, int group_size, int k);

inline constexpr int kBruteforceMaxAgents = 24;

}  // namespace swarmdec
