#include "swarmdec/core_model.hpp"

#include <algorithm>
#include <cmath>

#include "swarmdec/error.hpp"

namespace swarmdec {

SwarmState::SwarmState(int n_agents, int count_x1) : n_(n_agents), k_(count_x1) {
    if (n_agents <= 0 || n_agents % 2 == 0) {
        throw DomainError("swarm size must be a positive odd integer, got " +
                          std::to_string(n_agents));
    }
    if (count_x1 < 0 || count_x1 > n_agents) {
        throw InvariantError("count_x1 " + std::to_string(count_x1) + " outside [0, " +
                             std::to_string(n_agents) + "]");
    }
}

char polarity_char(RulePolarity p) noexcept { return p == RulePolarity::Majority ? 'M' : 'm'; }

RulePolarity complement(RulePolarity p) noexcept {
    return p == RulePolarity::Majority ? RulePolarity::Minority : RulePolarity::Majority;
}

bool is_valid_group_size(int group_size) noexcept { return group_size >= 3 && group_size % 2 == 1; }

RuleSet::RuleSet(int group_size, std::vector<RulePolarity> polarities)
    : group_size_(group_size), polarities_(std::move(polarities)) {
    if (!is_valid_group_size(group_size)) {
        throw DomainError("group size must be odd and >= 3, got " + std::to_string(group_size));
    }
    if (polarities_.size() != static_cast<std::size_t>((group_size - 1) / 2)) {
        throw DomainError("group size " + std::to_string(group_size) + " needs " +
                          std::to_string((group_size - 1) / 2) + " polarities, got " +
                          std::to_string(polarities_.size()));
    }
}

RulePolarity RuleSet::polarity_for(int k) const {
    if (k < 1 || k > group_size_ - 1) {
        throw DomainError("no rule for composition k=" + std::to_string(k));
    }
    return polarities_[static_cast<std::size_t>(std::min(k, group_size_ - k) - 1)];
}

std::string RuleSet::label() const {
    std::string out;
    out.reserve(polarities_.size());
    for (auto p : polarities_) out.push_back(polarity_char(p));
    return out;
}

RuleSet RuleSet::complemented() const {
    std::vector<RulePolarity> flipped(polarities_.size());
    std::transform(polarities_.begin(), polarities_.end(), flipped.begin(),
                   [](RulePolarity p) { return complement(p); });
    return RuleSet(group_size_, std::move(flipped));
}

NoiseSpec::NoiseSpec(double eps) : epsilon(eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw DomainError("noise level must be finite and non-negative");
    }
}

double z_of(const SwarmState& state) noexcept { return lattice_z(state.n_agents(), state.count_x1()); }

double lattice_z(int n_agents, int count_x1) noexcept {
    return 2.0 * count_x1 / n_agents - 1.0;
}

SwarmState state_of_z(int n_agents, double z) {
    if (!(std::abs(z) <= 1.0)) {
        throw DomainError("z must lie in [-1, 1]");
    }
    if (n_agents <= 0 || n_agents % 2 == 0) {
        throw DomainError("swarm size must be a positive odd integer");
    }
    // std::round rounds half away from zero; the argument is never negative here.
    const double raw = std::round(n_agents * (z + 1.0) / 2.0);
    const int k = static_cast<int>(std::clamp(raw, 0.0, static_cast<double>(n_agents)));
    return SwarmState(n_agents, k);
}

int signed_weight(int k, int group_size, RulePolarity polarity) {
    if (k < 0 || k > group_size) {
        throw DomainError("composition k=" + std::to_string(k) + " outside [0, " +
                          std::to_string(group_size) + "]");
    }
    if (k == 0 || k == group_size) return 0;
    const int direction = (2 * k > group_size) ? 1 : -1;
    return polarity == RulePolarity::Majority ? direction : -direction;
}

SwarmState apply_rule(const SwarmState& state, int k, int group_size, RulePolarity polarity) {
    const int next = state.count_x1() + signed_weight(k, group_size, polarity);
    if (next < 0 || next > state.n_agents()) {
        throw InvariantError("rule for k=" + std::to_string(k) + " infeasible at K=" +
                             std::to_string(state.count_x1()));
    }
    return SwarmState(state.n_agents(), next);
}

SwarmState apply_noise_flip(const SwarmState& state, FlipDirection direction) {
    if (direction == FlipDirection::X1ToX2) {
        if (state.count_x1() < 1) throw InfeasibleFlipError("no X1 agent to flip");
        return SwarmState(state.n_agents(), state.count_x1() - 1);
    }
    if (state.count_x1() > state.n_agents() - 1) throw InfeasibleFlipError("no X2 agent to flip");
    return SwarmState(state.n_agents(), state.count_x1() + 1);
}

std::vector<RuleSet> enumerate_rulesets(int group_size) {
    if (!is_valid_group_size(group_size)) {
        throw DomainError("group size must be odd and >= 3, got " + std::to_string(group_size));
    }
    const int slots = (group_size - 1) / 2;
    if (slots > 20) throw DomainError("group size too large to enumerate");
    std::vector<RuleSet> out;
    out.reserve(std::size_t{1} << slots);
    // Bit i (from the most significant slot) set means Minority; 'M' < 'm' so
    // counting upward yields lexicographic order.
    for (unsigned mask = 0; mask < (1u << slots); ++mask) {
        std::vector<RulePolarity> pol(static_cast<std::size_t>(slots));
        for (int i = 0; i < slots; ++i) {
            const bool minority = (mask >> (slots - 1 - i)) & 1u;
            pol[static_cast<std::size_t>(i)] = minority ? RulePolarity::Minority : RulePolarity::Majority;
        }
        out.emplace_back(group_size, std::move(pol));
    }
    return out;
}

}  // namespace swarmdec
