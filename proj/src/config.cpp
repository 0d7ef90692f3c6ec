#include "fpu/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fpu {

namespace {

const std::vector<std::pair<Subcommand, std::string>>& subcommand_table() {
    static const std::vector<std::pair<Subcommand, std::string>> table = {
        {Subcommand::kernels, "kernels"},
        {Subcommand::constants, "constants"},
        {Subcommand::op, "operator"},
        {Subcommand::modes, "modes"},
        {Subcommand::resolvent, "resolvent"},
        {Subcommand::correlation, "correlation"},
        {Subcommand::md_correlation, "md-correlation"},
        {Subcommand::md_spread, "md-spread"},
        {Subcommand::validate, "validate"},
    };
    return table;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
        throw ConfigError(key, "expected a real number, got '" + v + "'");
    return x;
}

long long to_integer(const std::string& key, const std::string& v) {
    long long x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key, "expected an integer, got '" + v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    long long x = to_integer(key, v);
    if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(key, "integer out of range");
    return static_cast<int>(x);
}

std::string real_text(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string to_string(Subcommand s) {
    for (const auto& [k, name] : subcommand_table())
        if (k == s) return name;
    return "?";
}

std::optional<Subcommand> parse_subcommand(const std::string& name) {
    for (const auto& [k, n] : subcommand_table())
        if (n == name) return k;
    return std::nullopt;
}

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& e : subcommand_table()) v.push_back(e.second);
        return v;
    }();
    return names;
}

double RunConfig::tol(const std::string& name) const {
    auto it = tolerances.find(name);
    if (it == tolerances.end()) throw ConfigError("tol." + name, "no such tolerance");
    return it->second;
}

void RunConfig::validate() const {
    if (grid_n < 16 || grid_n > 8192 || grid_n % 2 != 0) throw ConfigError("grid_n", "must be even and in [16, 8192]");
    if (!(grading_p >= 1.0 && grading_p <= 6.0)) throw ConfigError("grading_p", "must lie in [1, 6]");
    for (const auto& [name, v] : tolerances)
        if (!(v >= 1e-14 && v <= 1e-2)) throw ConfigError("tol." + name, "must lie in [1e-14, 1e-2]");
    if (!(lambda_min > 0.0)) throw ConfigError("lambda_min", "must be positive");
    if (!(lambda_max > lambda_min)) throw ConfigError("lambda_max", "must exceed lambda_min");
    if (!(t_min > 0.0)) throw ConfigError("t_min", "must be positive");
    if (!(t_max > t_min)) throw ConfigError("t_max", "must exceed t_min");
    if (points < 5 || points > 100000) throw ConfigError("points", "must lie in [5, 100000]");
    if (md.n > (1 << 22)) throw ConfigError("md.n", "must not exceed 4194304");
    if (md.n_traj > 1000000) throw ConfigError("md.n_traj", "must not exceed 1000000");
    try {
        md.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("md", e.what());
    }
    if (output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
    // Keeps the value representable in the file format.
    if (output_dir.find_first_of("#\n\r") != std::string::npos || trim(output_dir) != output_dir)
        throw ConfigError("output_dir", "must not contain '#', line breaks or surrounding blanks");
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "grid_n",    "grading_p", "tol.assembly", "tol.quadrature", "tol.regularized", "lambda_min",
        "lambda_max", "t_min",    "t_max",        "points",         "md.n",            "md.beta",
        "md.temperature", "md.dt", "md.t_max",    "md.n_traj",      "md.seed",         "md.sample_dt",
        "md.origin_dt", "output_dir"};
    return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    const std::string& v = value;
    if (key == "grid_n") cfg.grid_n = to_int(key, v);
    else if (key == "grading_p") cfg.grading_p = to_real(key, v);
    else if (key == "tol.assembly" || key == "tol.quadrature" || key == "tol.regularized")
        cfg.tolerances[key.substr(4)] = to_real(key, v);
    else if (key == "lambda_min") cfg.lambda_min = to_real(key, v);
    else if (key == "lambda_max") cfg.lambda_max = to_real(key, v);
    else if (key == "t_min") cfg.t_min = to_real(key, v);
    else if (key == "t_max") cfg.t_max = to_real(key, v);
    else if (key == "points") cfg.points = to_int(key, v);
    else if (key == "md.n") cfg.md.n = to_int(key, v);
    else if (key == "md.beta") cfg.md.beta = to_real(key, v);
    else if (key == "md.temperature") cfg.md.temperature = to_real(key, v);
    else if (key == "md.dt") cfg.md.dt = to_real(key, v);
    else if (key == "md.t_max") cfg.md.t_max = to_real(key, v);
    else if (key == "md.n_traj") cfg.md.n_traj = to_int(key, v);
    else if (key == "md.seed") {
        std::uint64_t s = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
        if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
            throw ConfigError(key, "expected an unsigned 64-bit integer, got '" + v + "'");
        cfg.md.seed = s;
    } else if (key == "md.sample_dt") cfg.md.sample_dt = to_real(key, v);
    else if (key == "md.origin_dt") cfg.md.origin_dt = to_real(key, v);
    else if (key == "output_dir") cfg.output_dir = v;
    else throw ConfigError(key, "unknown key");
}

RunConfig parse_config(const std::string& text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        set_config_value(base, key, value);
    }
    return base;
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "grid_n = " << cfg.grid_n << "\n";
    os << "grading_p = " << real_text(cfg.grading_p) << "\n";
    os << "tol.assembly = " << real_text(cfg.tol("assembly")) << "\n";
    os << "tol.quadrature = " << real_text(cfg.tol("quadrature")) << "\n";
    os << "tol.regularized = " << real_text(cfg.tol("regularized")) << "\n";
    os << "lambda_min = " << real_text(cfg.lambda_min) << "\n";
    os << "lambda_max = " << real_text(cfg.lambda_max) << "\n";
    os << "t_min = " << real_text(cfg.t_min) << "\n";
    os << "t_max = " << real_text(cfg.t_max) << "\n";
    os << "points = " << cfg.points << "\n";
    os << "md.n = " << cfg.md.n << "\n";
    os << "md.beta = " << real_text(cfg.md.beta) << "\n";
    os << "md.temperature = " << real_text(cfg.md.temperature) << "\n";
    os << "md.dt = " << real_text(cfg.md.dt) << "\n";
    os << "md.t_max = " << real_text(cfg.md.t_max) << "\n";
    os << "md.n_traj = " << cfg.md.n_traj << "\n";
    os << "md.seed = " << cfg.md.seed << "\n";
    os << "md.sample_dt = " << real_text(cfg.md.sample_dt) << "\n";
    os << "md.origin_dt = " << real_text(cfg.md.origin_dt) << "\n";
    os << "output_dir = " << cfg.output_dir << "\n";
    return os.str();
}

}  // namespace fpu
