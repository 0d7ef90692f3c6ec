#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpu/cli.hpp"
#include "fpu/config.hpp"

using namespace fpu;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("fpukin_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("constants subcommand reports the reference constants") {
    fs::path dir = scratch_dir("constants");
    Run r = run({"constants", "--out", dir.string()});
    REQUIRE(r.code == kExitOk);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["w0"].get<double>() == doctest::Approx(8.90330139617844302626712651531).epsilon(1e-13));
    CHECK(j["c0"].get<double>() == doctest::Approx(0.533782279847026446633155861125).epsilon(1e-13));
    CHECK(j["gamma_2_5"].get<double>() == doctest::Approx(2.21815954375768822305905402191).epsilon(1e-13));
    CHECK(j["c0_over_gamma"].get<double>() == doctest::Approx(0.240641968856202721238193371306).epsilon(1e-13));
    CHECK(fs::exists(dir / "constants.csv"));
    CHECK(nlohmann::json::parse(slurp(dir / "constants.json")) == j);
}

TEST_CASE("kernels output is byte-identical on rerun") {
    fs::path dir = scratch_dir("kernels");
    Run a = run({"kernels", "--points", "7", "--out", dir.string()});
    REQUIRE(a.code == kExitOk);
    std::string first = slurp(dir / "kernels.csv");
    Run b = run({"kernels", "--points", "7", "--out", dir.string()});
    REQUIRE(b.code == kExitOk);
    CHECK(slurp(dir / "kernels.csv") == first);
    CHECK(a.out == b.out);
    std::istringstream lines(first);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) ++count;
    CHECK(count == 8);
    auto j = nlohmann::json::parse(a.out);
    CHECK(std::abs(j["ratio_rel_dev"].get<double>()) < 5e-3);
    CHECK(j["reflection_max_rel_dev"].get<double>() < 1e-8);
}

TEST_CASE("config text round-trips through serialization") {
    RunConfig c = parse_config("# comment\ngrid_n = 512\ngrading_p=2.5\ntol.assembly = 1e-9\nmd.seed = 18446744073709551615\n"
                               "md.beta = 0.25\noutput_dir = results/run one\n");
    CHECK(c.grid_n == 512);
    CHECK(c.grading_p == 2.5);
    CHECK(c.tol("assembly") == 1e-9);
    CHECK(c.md.seed == 18446744073709551615ull);
    CHECK(c.output_dir == "results/run one");
    RunConfig back = parse_config(serialize_config(c));
    CHECK(back == c);
    CHECK(parse_config(serialize_config(RunConfig{})) == RunConfig{});
}

TEST_CASE("config errors name the offending key") {
    try {
        parse_config("grid_nn = 12\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "grid_nn");
    }
    CHECK_THROWS_AS(parse_config("grid_n\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("grid_n = 12x\n"), ConfigError);
    RunConfig odd = parse_config("grid_n = 1023\n");
    CHECK_THROWS_AS(odd.validate(), ConfigError);
    RunConfig window = parse_config("lambda_min = 1e-3\nlambda_max = 1e-4\n");
    CHECK_THROWS_AS(window.validate(), ConfigError);
    RunConfig md = parse_config("md.dt = 0.07\n");
    CHECK_THROWS_AS(md.validate(), ConfigError);
}

TEST_CASE("usage errors exit with status 1 and name the flag") {
    Run unknown = run({"frobnicate"});
    CHECK(unknown.code == kExitUsage);
    Run bad = run({"kernels", "--grid-n", "abc"});
    CHECK(bad.code == kExitUsage);
    CHECK(bad.err.find("--grid-n") != std::string::npos);
    Run range = run({"kernels", "--grading-p", "9"});
    CHECK(range.code == kExitUsage);
    CHECK(range.err.find("--grading-p") != std::string::npos);
    Run missing = run({});
    CHECK(missing.code == kExitUsage);
    Run help = run({"--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("md-spread") != std::string::npos);

    fs::path dir = scratch_dir("badconfig");
    std::ofstream(dir / "bad.cfg") << "bogus_key = 1\n";
    Run cfg = run({"constants", "--config", (dir / "bad.cfg").string()});
    CHECK(cfg.code == kExitUsage);
    CHECK(cfg.err.find("bogus_key") != std::string::npos);
}

TEST_CASE("flags override the config file") {
    fs::path dir = scratch_dir("override");
    std::ofstream(dir / "run.cfg") << "points = 9\noutput_dir = " << (dir / "from_file").string() << "\n";
    Run r = run({"kernels", "--config", (dir / "run.cfg").string(), "--points", "5"});
    REQUIRE(r.code == kExitOk);
    CHECK(nlohmann::json::parse(r.out)["points"].get<int>() == 5);
    CHECK(fs::exists(dir / "from_file" / "kernels.csv"));
}

TEST_CASE("unresolvable scan window is a usage error") {
    fs::path dir = scratch_dir("window");
    Run r = run({"resolvent", "--grid-n", "64", "--grading-p", "1", "--out", dir.string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("--grid-n") != std::string::npos);
}

TEST_CASE("installed binary runs and reports exit codes") {
    fs::path dir = scratch_dir("binary");
    std::string cmd = std::string(FPUKIN_CLI_PATH) + " constants --out " + dir.string() + " > " + (dir / "o.txt").string();
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "o.txt"))["c0"].get<double>() ==
          doctest::Approx(0.533782279847026446633155861125).epsilon(1e-13));
    std::string bad = std::string(FPUKIN_CLI_PATH) + " nope 2> /dev/null";
    int status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(status) == kExitUsage);
}
