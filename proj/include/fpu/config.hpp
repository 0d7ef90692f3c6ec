#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpu/fpu_md.hpp"

namespace fpu {

enum class Subcommand { kernels, constants, op, modes, resolvent, correlation, md_correlation, md_spread, validate };

// Command-line spelling ("operator", "md-correlation", ...).
std::string to_string(Subcommand s);
std::optional<Subcommand> parse_subcommand(const std::string& name);
const std::vector<std::string>& subcommand_names();

// Carries the key or flag that caused it; the CLI maps it to exit code 1.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& key, const std::string& message)
        : std::invalid_argument(key + ": " + message), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct RunConfig {
    Subcommand subcommand = Subcommand::constants;
    int grid_n = 1024;
    double grading_p = 3.0;
    // Known names: assembly, quadrature, regularized.
    std::map<std::string, double> tolerances = {{"assembly", 1e-10}, {"quadrature", 1e-9}, {"regularized", 1e-7}};
    double lambda_min = 1e-6;
    double lambda_max = 1e-4;
    double t_min = 1e2;
    double t_max = 1e4;
    int points = 21;
    MDConfig md;
    std::string output_dir = ".";

    double tol(const std::string& name) const;
    // Throws ConfigError naming the first out-of-range key.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

// Every config-file key, in serialization order. The subcommand is not a key.
const std::vector<std::string>& config_keys();

// Assigns one key from its text value; throws ConfigError for unknown keys
// or unparsable values. No range check.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

// `key = value` lines, `#` starts a comment. Keys apply on top of `base`.
RunConfig parse_config(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::string& path, RunConfig base = {});
// All keys, numbers with 17 significant digits; parse_config inverts it.
std::string serialize_config(const RunConfig& cfg);

}  // namespace fpu
