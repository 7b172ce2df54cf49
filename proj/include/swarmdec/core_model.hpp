#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace swarmdec {

/// Macroscopic swarm state: N agents, K of which hold opinion X1.
///
/// The swarm is well mixed, so (N, K) is the complete state. N is odd so that
/// no group drawn from it can tie. Construction validates both invariants.
class SwarmState {
public:
    SwarmState(int n_agents, int count_x1);

    int n_agents() const noexcept { return n_; }
    int count_x1() const noexcept { return k_; }
    int count_x2() const noexcept { return n_ - k_; }

    double fraction_x1() const noexcept { return static_cast<double>(k_) / n_; }
    double fraction_x2() const noexcept { return 1.0 - fraction_x1(); }

    friend bool operator==(const SwarmState&, const SwarmState&) = default;

private:
    int n_;
    int k_;
};

enum class RulePolarity : std::uint8_t { Majority, Minority };

char polarity_char(RulePolarity p) noexcept;
RulePolarity complement(RulePolarity p) noexcept;

/// Group size G plus one polarity per minority count m = 1..(G-1)/2.
///
/// Compositions k and G-k read the same slot, so every RuleSet is mirror
/// symmetric by construction.
class RuleSet {
public:
    RuleSet(int group_size, std::vector<RulePolarity> polarities);

    int group_size() const noexcept { return group_size_; }
    const std::vector<RulePolarity>& polarities() const noexcept { return polarities_; }

    /// Polarity of the rule applied to a group holding k agents of X1.
    /// Requires 1 <= k <= G-1.
    RulePolarity polarity_for(int k) const;

    /// Polarity string such as "MMm" (index 0 is minority count 1).
    std::string label() const;

    /// Every slot flipped Majority <-> Minority.
    RuleSet complemented() const;

    friend bool operator==(const RuleSet&, const RuleSet&) = default;

private:
    int group_size_;
    std::vector<RulePolarity> polarities_;
};

/// Noise level epsilon of the -epsilon*z drift term.
struct NoiseSpec {
    double epsilon = 0.0;

    explicit NoiseSpec(double eps = 0.0);
};

enum class FlipDirection : std::uint8_t { X1ToX2, X2ToX1 };

double z_of(const SwarmState& state) noexcept;

/// K = round(N (z+1)/2), half away from zero, clamped to [0, N].
SwarmState state_of_z(int n_agents, double z);

/// z value of lattice point K for a swarm of N agents.
double lattice_z(int n_agents, int count_x1) noexcept;

/// Sign of the change in K when the rule for composition k fires.
int signed_weight(int k, int group_size, RulePolarity polarity);

SwarmState apply_rule(const SwarmState& state, int k, int group_size, RulePolarity polarity);
SwarmState apply_noise_flip(const SwarmState& state, FlipDirection direction);

/// All 2^((G-1)/2) rule sets in lexicographic label order, 'M' before 'm'.
std::vector<RuleSet> enumerate_rulesets(int group_size);

bool is_valid_group_size(int group_size) noexcept;

}  // namespace swarmdec
