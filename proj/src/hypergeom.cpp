#include "swarmdec/hypergeom.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "swarmdec/error.hpp"

namespace swarmdec {

namespace {

__extension__ typedef unsigned __int128 u128;

constexpr int kExactMaxAgents = 64;

void check_args(int n, int big_k, int g, int k) {
    if (n < 1) throw DomainError("population size must be positive");
    if (big_k < 0 || big_k > n) throw DomainError("success count outside [0, N]");
    if (g < 1 || g > n) throw DomainError("group size outside [1, N]");
    if (k < 0 || k > g) throw DomainError("k outside [0, G]");
}

// C(n, j) exactly; every intermediate value is C(n-j+i, i) <= C(64, 32).
u128 choose_exact(int n, int j) {
    j = std::min(j, n - j);
    u128 acc = 1;
    for (int i = 1; i <= j; ++i) {
        acc = acc * static_cast<u128>(n - j + i) / static_cast<u128>(i);
    }
    return acc;
}

double to_double(u128 v) {
    const auto hi = static_cast<std::uint64_t>(v >> 64);
    const auto lo = static_cast<std::uint64_t>(v);
    return std::ldexp(static_cast<double>(hi), 64) + static_cast<double>(lo);
}

// log C(n, j). Short products are summed term by term, which is markedly more
// accurate than differencing large lgamma values.
double log_choose(int n, int j) {
    j = std::min(j, n - j);
    if (j <= 32) {
        double acc = 0.0;
        for (int i = 1; i <= j; ++i) {
            acc += std::log(static_cast<double>(n - j + i) / i);
        }
        return acc;
    }
    return std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0);
}

}  // namespace

double PmfTable::sum() const noexcept {
    return std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
}

double pmf(int n_agents, int count_x1, int group_size, int k) {
    check_args(n_agents, count_x1, group_size, k);
    const int n_x2 = n_agents - count_x1;
    if (k > count_x1 || group_size - k > n_x2) return 0.0;

    if (n_agents <= kExactMaxAgents) {
        const u128 num = choose_exact(count_x1, k) * choose_exact(n_x2, group_size - k);
        const u128 den = choose_exact(n_agents, group_size);
        if (num == den) return 1.0;
        // Reduce first so that both parts convert to double exactly where possible.
        u128 a = num, b = den;
        while (b != 0) {
            const u128 t = a % b;
            a = b;
            b = t;
        }
        return to_double(num / a) / to_double(den / a);
    }
    const double log_p = (log_choose(count_x1, k) + log_choose(n_x2, group_size - k)) -
                         log_choose(n_agents, group_size);
    return std::exp(log_p);
}

PmfTable pmf_table(int n_agents, int count_x1, int group_size) {
    check_args(n_agents, count_x1, group_size, 0);
    PmfTable table;
    table.group_size = group_size;
    table.probabilities.resize(static_cast<std::size_t>(group_size) + 1);
    for (int k = 0; k <= group_size; ++k) {
        table.probabilities[static_cast<std::size_t>(k)] = pmf(n_agents, count_x1, group_size, k);
    }
    return table;
}

double pmf_bruteforce(int n_agents, int count_x1, int group_size, int k) {
    if (n_agents > kBruteforceMaxAgents) {
        throw SizeError("brute-force enumeration limited to N <= " +
                        std::to_string(kBruteforceMaxAgents));
    }
    check_args(n_agents, count_x1, group_size, k);
    // Agents 0..K-1 hold X1.
    const std::uint32_t x1_mask = count_x1 == 0 ? 0u : ((1u << count_x1) - 1u);
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
    for (std::uint32_t subset = 0; subset < (1u << n_agents); ++subset) {
        if (std::popcount(subset) != group_size) continue;
        ++total;
        if (std::popcount(subset & x1_mask) == k) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace swarmdec
