#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swarmdec/core_model.hpp"
#include "swarmdec/error.hpp"

namespace swarmdec::cli {

inline constexpr std::string_view kVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitIo = 3,
    kExitValidation = 4,
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Settings shared by every subcommand. Flags override the --config file,
/// which overrides SWARMDEC_SEED, which overrides the built-in defaults.
struct ExperimentConfig {
    int n_agents = 101;
    int group_size = 7;
    std::optional<std::string> rules;        ///< polarity string
    std::optional<std::string> schema_path;  ///< reaction schema file
    double epsilon = 0.0;
    double rule_rate = 0.5;
    std::uint64_t seed = 0;
    std::optional<std::string> out;
    int grid = 201;
    std::uint64_t samples = 10000;
    std::optional<std::uint64_t> events;
    std::optional<double> t_max;
    bool empirical = false;
    bool plot_script = false;
    std::optional<double> init_z;
    std::optional<int> init_k;
    bool record_null = false;
    bool stop_on_consensus = false;

    /// Resolves --rules / --schema into a RuleSet valid for this swarm.
    RuleSet resolve_rules() const;
    void validate_population() const;
};

/// `# swarmdec <version> agents=.. group=.. rules=.. epsilon=.. seed=..`
std::string provenance_line(const ExperimentConfig& config, std::string_view rules_label);

/// Shortest decimal that round-trips.
std::string format_shortest(double v);
/// 17 significant digits.
std::string format_g17(double v);

/// Writes via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// `foo.csv` -> `foo.empirical.csv`.
std::filesystem::path empirical_sibling(const std::filesystem::path& path);

/// Entry point shared by the executable and the tests. argv[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace swarmdec::cli
