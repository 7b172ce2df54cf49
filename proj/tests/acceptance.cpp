// Acceptance suite: one line per criterion, exit status 1 if any fails.
//
//   acceptance [--workdir DIR] [--only N]...

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "reference_listings.hpp"
#include "swarmdec/cli.hpp"
#include "swarmdec/drift.hpp"
#include "swarmdec/hypergeom.hpp"
#include "swarmdec/schema_dsl.hpp"
#include "swarmdec/ssa.hpp"

namespace fs = std::filesystem;
using namespace swarmdec;

namespace {

constexpr int kAgents = 101;

struct Verdict {
    bool passed;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

RuleSet rules7(const std::string& label) { return parse_polarity_string(label, 7); }

Verdict pmf_oracle_equivalence() {
    double worst = 0.0;
    for (int n : {7, 10, 12, 16}) {
        for (int g : {3, 5, 7}) {
            if (g > n) continue;
            for (int big_k = 0; big_k <= n; ++big_k) {
                for (int k = 0; k <= g; ++k) {
                    worst = std::max(worst, std::abs(pmf(n, big_k, g, k) - pmf_bruteforce(n, big_k, g, k)));
                }
            }
        }
    }
    return {worst <= 1e-12, "max |pmf - bruteforce| = " + fmt("%.3g", worst) + " (tol 1e-12)"};
}

Verdict normalization_and_mean() {
    double worst_sum = 0.0, worst_mean = 0.0;
    for (int g : {5, 7}) {
        for (int big_k = 0; big_k <= kAgents; ++big_k) {
            const PmfTable t = pmf_table(kAgents, big_k, g);
            double mean = 0.0;
            for (int k = 0; k <= g; ++k) mean += k * t[k];
            worst_sum = std::max(worst_sum, std::abs(t.sum() - 1.0));
            worst_mean = std::max(worst_mean, std::abs(mean - static_cast<double>(g) * big_k / kAgents));
        }
    }
    return {worst_sum <= 1e-12 && worst_mean <= 1e-10,
            "max |sum-1| = " + fmt("%.3g", worst_sum) + " (tol 1e-12), max |mean-GK/N| = " +
                fmt("%.3g", worst_mean) + " (tol 1e-10)"};
}

Verdict noise_superposition() {
    std::uint64_t worst = 0;
    int violations = 0, total = 0;
    std::string where;
    for (const RuleSet& rs : enumerate_rulesets(7)) {
        for (double eps : {0.05, 0.1}) {
            for (int big_k = 0; big_k <= kAgents; ++big_k) {
                const double z = lattice_z(kAgents, big_k);
                const double lhs = analytic_drift(kAgents, rs, NoiseSpec(eps), z) + eps * z;
                const double rhs = analytic_drift(kAgents, rs, NoiseSpec(0.0), z);
                const std::uint64_t d = ulp_distance(lhs, rhs);
                ++total;
                if (d > 1) {
                    ++violations;
                    where = rs.label() + " eps=" + fmt("%g", eps) + " K=" + std::to_string(big_k);
                }
                worst = std::max(worst, d);
            }
        }
    }
    std::string detail = "max ulp distance = " + std::to_string(worst) + " (tol 1), " + std::to_string(violations) +
                         "/" + std::to_string(total) + " lattice points over";
    if (violations) detail += "; last at " + where;
    return {violations == 0, detail};
}

Verdict pure_noise_drift() {
    const double eps = 0.1;
    const NoiseSpec noise(eps);
    const bool exact = noise_drift(noise, 1.0) == -eps && noise_drift(noise, -1.0) == eps &&
                       noise_drift(NoiseSpec(0.05), 1.0) == -0.05 && noise_drift(NoiseSpec(0.05), -1.0) == 0.05;

    SimConfig cfg;
    cfg.rule_rate = 0.0;
    const DriftCurve emp = empirical_drift(kAgents, rules7("MMM"), noise, cfg, 100'000, 2014);
    double worst_sigmas = 0.0;
    int outside = 0;
    for (int big_k = 0; big_k <= kAgents; ++big_k) {
        const DriftPoint& p = emp.points[static_cast<std::size_t>(big_k)];
        const double expected = noise_drift(noise, lattice_z(kAgents, big_k));
        const double dev = std::abs(p.dzdt - expected);
        // At z = +-1 every flip goes one way, the standard error is 0 and only
        // floating-point rounding separates the estimate from -eps*z.
        const double tol = 3.0 * p.std_error + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(expected);
        if (dev > tol) ++outside;
        if (p.std_error > 0.0) worst_sigmas = std::max(worst_sigmas, dev / p.std_error);
    }
    return {exact && outside == 0,
            std::string("analytic extremes ") + (exact ? "exact" : "NOT exact") + ", empirical worst deviation " +
                fmt("%.2f", worst_sigmas) + " SE, " + std::to_string(outside) + " points beyond 3 SE"};
}

Verdict complement_negation() {
    const std::pair<const char*, const char*> pairs[] = {{"MMM", "mmm"}, {"MMm", "mmM"}, {"MmM", "mMm"}, {"Mmm", "mMM"}};
    std::string failed;
    for (const auto& [a, b] : pairs) {
        if (!negate_check(rules7(a), rules7(b), kAgents)) failed += std::string(" ") + a + "/" + b;
    }
    return {failed.empty(), failed.empty() ? "4 pairs negate within 1 ulp on the K-lattice" : "failed:" + failed};
}

std::string describe(const std::vector<FixedPoint>& roots) {
    std::string s;
    for (const auto& r : roots) s += " " + fmt("%.3g", r.z_star) + ":" + to_string(r.stability);
    return s;
}

Verdict fixed_point_structure() {
    const auto maj = find_fixed_points(kAgents, rules7("MMM"), NoiseSpec(0.0), 2001);
    const auto mino = find_fixed_points(kAgents, rules7("mmm"), NoiseSpec(0.0), 2001);
    const double near_zero = 2.0 / kAgents;  // one lattice step
    const bool maj_ok = maj.size() == 3 && maj[0].z_star == -1.0 && maj[0].stability == Stability::Stable &&
                        std::abs(maj[1].z_star) < near_zero && maj[1].stability == Stability::Unstable &&
                        maj[2].z_star == 1.0 && maj[2].stability == Stability::Stable;
    const bool min_ok = mino.size() == 3 && mino[0].z_star == -1.0 && mino[0].stability == Stability::Unstable &&
                        std::abs(mino[1].z_star) < near_zero && mino[1].stability == Stability::Stable &&
                        mino[2].z_star == 1.0 && mino[2].stability == Stability::Unstable;
    return {maj_ok && min_ok, "MMM {" + describe(maj) + " } mmm {" + describe(mino) + " }"};
}

Verdict noise_pushes_inside() {
    const auto roots = find_fixed_points(kAgents, rules7("MMM"), NoiseSpec(0.1), 2001);
    int stable = 0;
    bool inside = true;
    for (const auto& r : roots) {
        if (r.stability != Stability::Stable) continue;
        ++stable;
        inside = inside && std::abs(r.z_star) < 1.0 - 1.0 / kAgents;
    }
    return {stable > 0 && inside, "roots {" + describe(roots) + " }, bound |z*| < " + fmt("%.6f", 1.0 - 1.0 / kAgents)};
}

Verdict empirical_vs_analytic() {
    const RuleSet rs = rules7("MMm");
    const NoiseSpec noise(0.05);
    const DriftCurve emp = empirical_drift(kAgents, rs, noise, SimConfig{}, 100'000, 8);
    double worst = 0.0;
    for (int big_k = 0; big_k <= kAgents; ++big_k) {
        worst = std::max(worst, std::abs(emp.points[static_cast<std::size_t>(big_k)].dzdt -
                                         analytic_drift_at(kAgents, rs, noise, big_k)));
    }
    return {worst < 0.02, "sup |empirical - analytic| = " + fmt("%.5f", worst) + " (tol 0.02)"};
}

Verdict firing_probabilities() {
    const PmfTable analytic = rule_firing_probabilities(kAgents, 7, 51);
    const PmfTable emp = empirical_firing_probabilities(kAgents, 7, 51, 1'000'000, 42);
    double worst = 0.0;
    for (int k = 0; k <= 7; ++k) worst = std::max(worst, std::abs(emp[k] - analytic[k]));
    return {worst < 5e-3, "max per-k deviation = " + fmt("%.2e", worst) + " (tol 5e-3)"};
}

Verdict ssa_absorption() {
    SimConfig cfg;
    cfg.max_events = 1'000'000;
    const RuleSet rs = rules7("MMM");
    int absorbed = 0;
    int left = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Trajectory t = simulate(SwarmState(kAgents, 51), rs, cfg, seed);
        bool hit = false;
        int at = -1;
        for (const auto& e : t.events) {
            if (hit && e.count_x1_after != at) {
                ++left;
                break;
            }
            if (!hit && (e.count_x1_after == 0 || e.count_x1_after == kAgents)) {
                hit = true;
                at = e.count_x1_after;
            }
        }
        const int final_k = t.final_state.count_x1();
        if (hit && final_k == at) ++absorbed;
    }
    return {absorbed == 100 && left == 0,
            std::to_string(absorbed) + "/100 trajectories absorbed at |z|=1, " + std::to_string(left) + " left it"};
}

Verdict parser_round_trip() {
    int checked = 0;
    std::string bad;
    for (int g : {3, 5, 7, 9}) {
        for (const RuleSet& rs : enumerate_rulesets(g)) {
            const ReactionSchema schema = schema_of_ruleset(rs);
            const ReactionSchema back = parse_schema(format_schema(schema));
            if (!(back == schema) || !(ruleset_of_schema(back) == rs)) bad += " " + rs.label();
            ++checked;
        }
    }
    int listings_ok = 0;
    for (const auto& [label, text] : listings::group7()) {
        const ReactionSchema parsed = parse_schema(text);
        if (ruleset_of_schema(parsed).label() == label &&
            format_schema(schema_of_ruleset(rules7(label))) == listings::ascii(text)) {
            ++listings_ok;
        } else {
            bad += " listing:" + label;
        }
    }
    return {bad.empty() && listings_ok == 8,
            std::to_string(checked) + " rule sets round-trip, " + std::to_string(listings_ok) +
                "/8 reference group-7 listings match" + (bad.empty() ? "" : "; mismatches:" + bad)};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Verdict determinism(const fs::path& workdir) {
    fs::create_directories(workdir);
    struct Case {
        std::string name;
        std::vector<std::string> args;
        std::vector<std::string> files;
    };
    const std::vector<Case> cases = {
        {"drift", {"drift", "--rules", "MmM", "--epsilon", "0.05", "--empirical", "--samples", "5000", "--seed", "1"},
         {"drift.csv", "drift.empirical.csv"}},
        {"probs", {"probs", "--empirical", "--samples", "5000", "--seed", "2"}, {"probs.csv", "probs.empirical.csv"}},
        {"simulate", {"simulate", "--rules", "Mmm", "--epsilon", "0.1", "--events", "50000", "--seed", "3", "--record-null"},
         {"simulate.csv"}},
        {"fixed-points", {"fixed-points", "--rules", "MMm", "--epsilon", "0.1", "--grid", "2001"}, {"fixed-points.json"}},
        {"rulesets", {"rulesets", "--group", "9"}, {"rulesets.txt"}},
        {"validate", {"validate"}, {"validate.json"}},
    };
    std::string failed;
    for (const Case& c : cases) {
        std::vector<std::string> captured[2];
        std::string stdout_text[2];
        for (int round = 0; round < 2; ++round) {
            for (const auto& f : c.files) fs::remove(workdir / f);
            std::vector<std::string> args = {"swarmdec"};
            args.insert(args.end(), c.args.begin(), c.args.end());
            args.push_back("--out");
            args.push_back((workdir / c.files.front()).string());
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            if (code != cli::kExitOk) failed += " " + c.name + "(exit " + std::to_string(code) + ")";
            stdout_text[round] = out.str();
            for (const auto& f : c.files) captured[round].push_back(slurp(workdir / f));
        }
        if (captured[0] != captured[1] || stdout_text[0] != stdout_text[1]) failed += " " + c.name;
        for (const auto& text : captured[0]) {
            if (text.empty()) failed += " " + c.name + "(empty)";
        }
    }
    return {failed.empty(), failed.empty() ? "6 commands byte-identical across repeated runs" : "differs:" + failed};
}

}  // namespace

int main(int argc, char** argv) {
    fs::path workdir = fs::temp_directory_path() / "swarmdec_acceptance";
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--workdir" && i + 1 < argc) {
            workdir = argv[++i];
        } else if (a == "--only" && i + 1 < argc) {
            only.insert(std::stoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--workdir DIR] [--only N]...\n", argv[0]);
            return 2;
        }
    }

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"pmf oracle equivalence", pmf_oracle_equivalence},
        {"normalization and mean identities", normalization_and_mean},
        {"noise superposition within 1 ulp", noise_superposition},
        {"pure-noise drift", pure_noise_drift},
        {"complement negation", complement_negation},
        {"fixed-point structure at zero noise", fixed_point_structure},
        {"noise pushes critical points inside", noise_pushes_inside},
        {"empirical vs analytic drift", empirical_vs_analytic},
        {"empirical firing probabilities", firing_probabilities},
        {"SSA absorption", ssa_absorption},
        {"parser round trip", parser_round_trip},
        {"determinism", [&] { return determinism(workdir); }},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v{false, ""};
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %02d %-38s %s (%.1fs)\n", v.passed ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                    v.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !v.passed;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
