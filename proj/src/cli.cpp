#include "swarmdec/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "swarmdec/drift.hpp"
#include "swarmdec/hypergeom.hpp"
#include "swarmdec/schema_dsl.hpp"
#include "swarmdec/ssa.hpp"

namespace swarmdec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// formatting and files

std::string format_shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string provenance_line(const ExperimentConfig& config, std::string_view rules_label) {
    std::string line = "# swarmdec ";
    line += kVersion;
    line += " agents=" + std::to_string(config.n_agents);
    line += " group=" + std::to_string(config.group_size);
    line += " rules=";
    line += rules_label.empty() ? std::string_view("-") : rules_label;
    line += " epsilon=" + format_shortest(config.epsilon);
    line += " seed=" + std::to_string(config.seed);
    line += '\n';
    return line;
}

void write_file_atomic(const fs::path& path, std::string_view contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
        f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        f.flush();
        if (!f) throw IoError("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

fs::path empirical_sibling(const fs::path& path) {
    fs::path out = path;
    if (out.extension() == ".csv") out.replace_extension();
    out += ".empirical.csv";
    return out;
}

// ---------------------------------------------------------------------------
// configuration

RuleSet ExperimentConfig::resolve_rules() const {
    if (rules && schema_path) throw ConfigError("--rules and --schema are mutually exclusive");
    if (schema_path) {
        std::ifstream f(*schema_path, std::ios::binary);
        if (!f) throw IoError("cannot read schema file '" + *schema_path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        RuleSet rs = ruleset_of_schema(parse_schema(ss.str()));
        if (rs.group_size() != group_size) {
            throw ConfigError("schema group size " + std::to_string(rs.group_size()) +
                              " does not match --group " + std::to_string(group_size));
        }
        return rs;
    }
    if (!rules) throw ConfigError("a rule set is required (--rules or --schema)");
    return parse_polarity_string(*rules, group_size);
}

void ExperimentConfig::validate_population() const {
    if (n_agents < 1 || n_agents % 2 == 0) {
        throw ConfigError("--agents must be a positive odd integer, got " + std::to_string(n_agents));
    }
    if (!is_valid_group_size(group_size)) {
        throw ConfigError("--group must be odd and >= 3, got " + std::to_string(group_size));
    }
    if (group_size > n_agents) {
        throw ConfigError("--group " + std::to_string(group_size) + " exceeds --agents " +
                          std::to_string(n_agents));
    }
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("--epsilon must be >= 0");
    if (!(rule_rate >= 0.0) || !std::isfinite(rule_rate)) throw ConfigError("--rule-rate must be >= 0");
    if (grid < 3) throw ConfigError("--grid must be at least 3");
    if (samples < 1) throw ConfigError("--samples must be positive");
}

namespace {

// One binding per flag. `flag` is the CLI name, `key` the --config JSON key.
struct Binding {
    std::string flag;
    std::string key;
    CLI::Option* option = nullptr;
    std::function<void()> commit;               // flag value -> config
    std::function<void(const json&)> from_json; // config file value -> config
};

template <typename T>
T json_as(const json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

class CommandLine {
public:
    explicit CommandLine(ExperimentConfig& cfg) : cfg_(cfg) {}

    void add_common(CLI::App* sub, bool with_rules) {
        auto& b = bindings_[sub];
        add_value(sub, b, "--agents", "agents", cfg_.n_agents, "Swarm size N (odd)");
        add_value(sub, b, "--group", "group", cfg_.group_size, "Group size G (odd, >= 3)");
        if (with_rules) {
            add_opt(sub, b, "--rules", "rules", cfg_.rules, "Polarity string, e.g. MMm");
            add_opt(sub, b, "--schema", "schema", cfg_.schema_path, "Reaction schema file");
        }
        add_value(sub, b, "--epsilon", "epsilon", cfg_.epsilon, "Noise level");
        add_value(sub, b, "--rule-rate", "rule-rate", cfg_.rule_rate, "Group events per agent per unit time");
        add_value(sub, b, "--seed", "seed", cfg_.seed, "RNG seed (default: $SWARMDEC_SEED or 0)");
        add_opt(sub, b, "--out", "out", cfg_.out, "Output path (default: standard output)");
        add_value(sub, b, "--grid", "grid", cfg_.grid, "Number of z grid points");
        add_value(sub, b, "--samples", "samples", cfg_.samples, "Monte Carlo samples per lattice point");
        add_opt(sub, b, "--events", "events", cfg_.events, "Event cap for simulate");
        add_opt(sub, b, "--t-max", "t-max", cfg_.t_max, "Time horizon for simulate");
        add_flag(sub, b, "--empirical", "empirical", cfg_.empirical, "Also write Monte Carlo estimates");
        add_flag(sub, b, "--plot-script", "plot-script", cfg_.plot_script, "Also write a gnuplot script");
        add_opt(sub, b, "--init-z", "init-z", cfg_.init_z, "Initial z for simulate");
        add_opt(sub, b, "--init-k", "init-k", cfg_.init_k, "Initial X1 count for simulate");
        add_flag(sub, b, "--record-null", "record-null", cfg_.record_null, "Record null draws in trajectories");
        add_flag(sub, b, "--stop-on-consensus", "stop-on-consensus", cfg_.stop_on_consensus,
                 "End simulate at z = +-1");
        sub->add_option("--config", config_path_, "JSON file with the same keys as the flags");
    }

    /// Applies env, config file and flags for the subcommand that ran.
    void resolve(CLI::App* sub) {
        if (const char* env = std::getenv("SWARMDEC_SEED"); env && *env) {
            std::uint64_t v = 0;
            const auto res = std::from_chars(env, env + std::strlen(env), v);
            if (res.ec != std::errc() || *res.ptr != '\0') throw ConfigError("SWARMDEC_SEED is not an integer");
            cfg_.seed = v;
        }
        auto& binds = bindings_.at(sub);
        if (!config_path_.empty()) {
            std::ifstream f(config_path_, std::ios::binary);
            if (!f) throw IoError("cannot read config file '" + config_path_ + "'");
            json doc;
            try {
                doc = json::parse(f);
            } catch (const json::exception& e) {
                throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
            }
            if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");
            for (const auto& [key, value] : doc.items()) {
                std::string norm = key;
                std::replace(norm.begin(), norm.end(), '_', '-');
                auto it = std::find_if(binds.begin(), binds.end(), [&](const Binding& b) { return b.key == norm; });
                if (it == binds.end()) throw ConfigError("unknown config key '" + key + "'");
                it->from_json(value);
            }
        }
        for (auto& b : binds) {
            if (b.option->count() > 0) b.commit();
        }
    }

private:
    template <typename T>
    void add_value(CLI::App* sub, std::vector<Binding>& binds, const std::string& flag, const std::string& key,
                   T& target, const std::string& help) {
        auto holder = std::make_shared<T>(target);
        Binding b{flag, key, sub->add_option(flag, *holder, help), nullptr, nullptr};
        b.commit = [holder, &target] { target = *holder; };
        b.from_json = [&target, key](const json& v) { target = json_as<T>(v, key); };
        binds.push_back(std::move(b));
    }

    template <typename T>
    void add_opt(CLI::App* sub, std::vector<Binding>& binds, const std::string& flag, const std::string& key,
                 std::optional<T>& target, const std::string& help) {
        auto holder = std::make_shared<T>();
        Binding b{flag, key, sub->add_option(flag, *holder, help), nullptr, nullptr};
        b.commit = [holder, &target] { target = *holder; };
        b.from_json = [&target, key](const json& v) {
            if (v.is_null()) {
                target.reset();
            } else {
                target = json_as<T>(v, key);
            }
        };
        binds.push_back(std::move(b));
    }

    void add_flag(CLI::App* sub, std::vector<Binding>& binds, const std::string& flag, const std::string& key,
                  bool& target, const std::string& help) {
        Binding b{flag, key, sub->add_flag(flag, help), nullptr, nullptr};
        b.commit = [&target] { target = true; };
        b.from_json = [&target, key](const json& v) { target = json_as<bool>(v, key); };
        binds.push_back(std::move(b));
    }

    ExperimentConfig& cfg_;
    std::string config_path_;
    std::map<CLI::App*, std::vector<Binding>> bindings_;
};

// Writes `contents` to --out, or to `out` when no path was given.
void emit(const ExperimentConfig& cfg, std::string_view contents, std::ostream& out) {
    if (cfg.out) {
        write_file_atomic(*cfg.out, contents);
    } else {
        out << contents;
    }
}

std::string drift_csv(const ExperimentConfig& cfg, const DriftCurve& curve) {
    std::string text = provenance_line(cfg, curve.rules_label);
    text += "z,dzdt\n";
    for (const DriftPoint& p : curve.points) {
        text += format_g17(p.z);
        text += ',';
        text += format_g17(p.dzdt);
        text += '\n';
    }
    return text;
}

std::string probs_header(int group_size) {
    std::string h = "z";
    for (int k = 0; k <= group_size; ++k) h += ",p" + std::to_string(k);
    return h + '\n';
}

std::string probs_row(double z, const PmfTable& t) {
    std::string row = format_g17(z);
    for (double p : t.probabilities) {
        row += ',';
        row += format_g17(p);
    }
    return row + '\n';
}

void write_plot_script(const ExperimentConfig& cfg, const std::string& title, const std::string& plot_cmd) {
    if (!cfg.plot_script) return;
    if (!cfg.out) throw ConfigError("--plot-script requires --out");
    std::string gp = "# gnuplot script generated by swarmdec " + std::string(kVersion) + "\n";
    gp += "set datafile separator ','\nset key autotitle columnhead\n";
    gp += "set title '" + title + "'\nset xlabel 'z'\nset grid\n";
    gp += plot_cmd + "\n";
    write_file_atomic(fs::path(*cfg.out + ".gp"), gp);
}

std::string optional_rules_label(const ExperimentConfig& cfg) {
    if (cfg.rules || cfg.schema_path) return cfg.resolve_rules().label();
    return "-";
}

int cmd_drift(const ExperimentConfig& cfg, std::ostream& out) {
    cfg.validate_population();
    const RuleSet rules = cfg.resolve_rules();
    const NoiseSpec noise(cfg.epsilon);
    if (cfg.empirical && !cfg.out) throw ConfigError("--empirical requires --out");

    emit(cfg, drift_csv(cfg, analytic_drift_curve(cfg.n_agents, rules, noise, cfg.grid)), out);
    if (cfg.empirical) {
        SimConfig sim;
        sim.rule_rate = cfg.rule_rate;
        const DriftCurve emp = empirical_drift(cfg.n_agents, rules, noise, sim, cfg.samples, cfg.seed);
        write_file_atomic(empirical_sibling(*cfg.out), drift_csv(cfg, emp));
    }
    if (cfg.plot_script) {
        std::string cmd = "plot '" + fs::path(*cfg.out).filename().string() + "' using 1:2 with lines title 'analytic'";
        if (cfg.empirical) {
            cmd += ", '" + empirical_sibling(*cfg.out).filename().string() +
                   "' using 1:2 with points title 'empirical'";
        }
        write_plot_script(cfg, "drift, rules " + rules.label(), cmd);
    }
    return kExitOk;
}

int cmd_probs(const ExperimentConfig& cfg, std::ostream& out) {
    cfg.validate_population();
    const std::string label = optional_rules_label(cfg);
    if (cfg.empirical && !cfg.out) throw ConfigError("--empirical requires --out");

    std::string text = provenance_line(cfg, label) + probs_header(cfg.group_size);
    for (int k = 0; k <= cfg.n_agents; ++k) {
        text += probs_row(lattice_z(cfg.n_agents, k), rule_firing_probabilities(cfg.n_agents, cfg.group_size, k));
    }
    emit(cfg, text, out);

    if (cfg.empirical) {
        const auto tables = empirical_firing_lattice(cfg.n_agents, cfg.group_size, cfg.samples, cfg.seed);
        std::string emp = provenance_line(cfg, label) + probs_header(cfg.group_size);
        for (int k = 0; k <= cfg.n_agents; ++k) {
            emp += probs_row(lattice_z(cfg.n_agents, k), tables[static_cast<std::size_t>(k)]);
        }
        write_file_atomic(empirical_sibling(*cfg.out), emp);
    }
    if (cfg.plot_script) {
        std::string cmd = "plot for [c=2:" + std::to_string(cfg.group_size + 2) + "] '" +
                          fs::path(*cfg.out).filename().string() + "' using 1:c with lines";
        write_plot_script(cfg, "firing probabilities, G=" + std::to_string(cfg.group_size), cmd);
    }
    return kExitOk;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out) {
    cfg.validate_population();
    const RuleSet rules = cfg.resolve_rules();
    if (cfg.init_z && cfg.init_k) throw ConfigError("--init-z and --init-k are mutually exclusive");

    int k0 = 0;
    if (cfg.init_k) {
        if (*cfg.init_k < 0 || *cfg.init_k > cfg.n_agents) throw ConfigError("--init-k outside [0, agents]");
        k0 = *cfg.init_k;
    } else {
        const double z0 = cfg.init_z.value_or(0.0);
        if (!(std::abs(z0) <= 1.0)) throw ConfigError("--init-z must lie in [-1, 1]");
        k0 = state_of_z(cfg.n_agents, z0).count_x1();
    }

    SimConfig sim;
    sim.rule_rate = cfg.rule_rate;
    sim.noise_rate = SimConfig::noise_rate_for(NoiseSpec(cfg.epsilon));
    sim.t_max = cfg.t_max;
    sim.max_events = cfg.events;
    if (!cfg.events && !cfg.t_max) sim.max_events = 100000;
    sim.record_null_draws = cfg.record_null;
    sim.stop_on_consensus = cfg.stop_on_consensus;
    try {
        sim.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }

    const Trajectory traj = simulate(SwarmState(cfg.n_agents, k0), rules, sim, cfg.seed);
    if (cfg.out) write_file_atomic(*cfg.out, provenance_line(cfg, rules.label()) + trajectory_csv(traj));

    json summary = {
        {"rules", rules.label()},
        {"seed", cfg.seed},
        {"initial_count_x1", k0},
        {"final_count_x1", traj.final_state.count_x1()},
        {"final_z", z_of(traj.final_state)},
        {"final_time", traj.final_time},
        {"time_average_z", traj.time_average_z()},
        {"events",
         {{"rule", traj.counts.group_rule},
          {"noise12", traj.counts.noise_x1_to_x2},
          {"noise21", traj.counts.noise_x2_to_x1},
          {"null", traj.counts.null_draw},
          {"total", traj.counts.total()}}},
    };
    out << summary.dump() << '\n';
    return kExitOk;
}

json fixed_points_json(const std::vector<FixedPoint>& roots) {
    json arr = json::array();
    for (const FixedPoint& fp : roots) {
        arr.push_back({{"z", fp.z_star}, {"stability", to_string(fp.stability)}, {"bracket", {fp.bracket_lo, fp.bracket_hi}}});
    }
    return arr;
}

int cmd_fixed_points(const ExperimentConfig& cfg, std::ostream& out) {
    cfg.validate_population();
    const RuleSet rules = cfg.resolve_rules();
    const auto roots = find_fixed_points(cfg.n_agents, rules, NoiseSpec(cfg.epsilon), cfg.grid);
    const std::string body = fixed_points_json(roots).dump(2) + '\n';
    if (cfg.out) {
        write_file_atomic(*cfg.out, provenance_line(cfg, rules.label()) + body);
    } else {
        out << body;
    }
    return kExitOk;
}

int cmd_rulesets(const ExperimentConfig& cfg, std::ostream& out) {
    if (!is_valid_group_size(cfg.group_size)) {
        throw ConfigError("--group must be odd and >= 3, got " + std::to_string(cfg.group_size));
    }
    std::string text = provenance_line(cfg, "-");
    const auto all = enumerate_rulesets(cfg.group_size);
    text += "# " + std::to_string(all.size()) + " rule sets for group size " + std::to_string(cfg.group_size) + "\n";
    for (const RuleSet& rs : all) {
        text += "\n# rules " + rs.label() + "\n";
        text += format_schema(schema_of_ruleset(rs));
    }
    emit(cfg, text, out);
    return kExitOk;
}

// Oracle cross-checks. Each entry reports the worst error seen.
json run_validation(const ExperimentConfig& cfg, bool& all_passed) {
    json checks = json::array();
    auto record = [&](const std::string& name, bool passed, double worst, double tolerance) {
        checks.push_back({{"name", name}, {"passed", passed}, {"max_error", worst}, {"tolerance", tolerance}});
        all_passed = all_passed && passed;
    };

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
    record("pmf_vs_bruteforce", worst <= 1e-12, worst, 1e-12);

    worst = 0.0;
    for (int big_k = 0; big_k <= cfg.n_agents; ++big_k) {
        worst = std::max(worst, std::abs(pmf_table(cfg.n_agents, big_k, cfg.group_size).sum() - 1.0));
    }
    record("pmf_normalization", worst <= 1e-12, worst, 1e-12);

    const auto all = enumerate_rulesets(cfg.group_size);
    worst = 0.0;
    for (const RuleSet& rs : all) {
        for (double eps : {0.0, cfg.epsilon}) {
            for (int big_k = 0; big_k <= cfg.n_agents; ++big_k) {
                const double a = analytic_drift_at(cfg.n_agents, rs, NoiseSpec(eps), big_k);
                const double b = analytic_drift_at(cfg.n_agents, rs, NoiseSpec(eps), cfg.n_agents - big_k);
                worst = std::max(worst, std::abs(a + b));
            }
        }
    }
    record("drift_antisymmetry", worst <= 1e-12, worst, 1e-12);

    bool negation_ok = true;
    for (std::size_t i = 0; i < all.size() / 2; ++i) {
        negation_ok = negation_ok && negate_check(all[i], all[all.size() - 1 - i], cfg.n_agents);
    }
    record("complement_negation", negation_ok, negation_ok ? 0.0 : 1.0, 0.0);

    // The residual is one rounding of S - eps*z, so it is measured in ulps of
    // the larger operand; the count in ulps of S alone is reported too.
    double worst_scaled = 0.0;
    std::uint64_t worst_ulp = 0;
    for (const RuleSet& rs : all) {
        for (double eps : {0.05, 0.1}) {
            for (int big_k = 0; big_k <= cfg.n_agents; ++big_k) {
                const double z = lattice_z(cfg.n_agents, big_k);
                const double with = analytic_drift(cfg.n_agents, rs, NoiseSpec(eps), z) + eps * z;
                const double without = analytic_drift(cfg.n_agents, rs, NoiseSpec(0.0), z);
                const double scale = std::max(std::abs(without), std::abs(eps * z));
                const double ulp = std::nextafter(scale, INFINITY) - scale;
                worst_scaled = std::max(worst_scaled, std::abs(with - without) / ulp);
                worst_ulp = std::max(worst_ulp, ulp_distance(with, without));
            }
        }
    }
    record("noise_superposition", worst_scaled <= 1.0, worst_scaled, 1.0);
    checks.back()["max_ulps_of_result"] = worst_ulp;

    return json{{"passed", all_passed}, {"checks", checks}};
}

int cmd_validate(const ExperimentConfig& cfg, std::ostream& out) {
    cfg.validate_population();
    bool ok = true;
    const json report = run_validation(cfg, ok);
    const std::string body = report.dump(2) + '\n';
    out << body;
    if (cfg.out) write_file_atomic(*cfg.out, provenance_line(cfg, "-") + body);
    return ok ? kExitOk : kExitValidation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    ExperimentConfig cfg;
    CommandLine cmdline(cfg);

    CLI::App app{"swarmdec: binary collective decision-making swarm, simulated and analysed"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    struct Command {
        CLI::App* sub;
        int (*fn)(const ExperimentConfig&, std::ostream&);
    };
    std::vector<Command> commands = {
        {app.add_subcommand("drift", "Analytic drift curve (optionally with Monte Carlo estimate)"), cmd_drift},
        {app.add_subcommand("probs", "Rule firing probabilities per lattice point"), cmd_probs},
        {app.add_subcommand("simulate", "Gillespie trajectory"), cmd_simulate},
        {app.add_subcommand("fixed-points", "Fixed points of the analytic drift"), cmd_fixed_points},
        {app.add_subcommand("rulesets", "List every symmetric rule set for a group size"), cmd_rulesets},
        {app.add_subcommand("validate", "Run the oracle cross-checks"), cmd_validate},
    };
    for (auto& c : commands) {
        const std::string name = c.sub->get_name();
        cmdline.add_common(c.sub, name != "rulesets" && name != "validate");
    }

    std::vector<std::string> reversed(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(reversed.begin(), reversed.end());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kExitOk;
    } catch (const CLI::Success&) {
        const CLI::App* shown = &app;
        for (const auto& c : commands) {
            if (c.sub->parsed()) shown = c.sub;
        }
        out << shown->help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    for (auto& c : commands) {
        if (!c.sub->parsed()) continue;
        try {
            cmdline.resolve(c.sub);
            return c.fn(cfg, out);
        } catch (const IoError& e) {
            err << "error: " << e.what() << '\n';
            return kExitIo;
        } catch (const Error& e) {
            err << "error: " << e.what() << '\n';
            return kExitConfig;
        }
    }
    return kExitConfig;
}

}  // namespace swarmdec::cli
