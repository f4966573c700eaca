#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "snlab/cli.hpp"
#include "snlab/errors.hpp"

using namespace snlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("snlab_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int code = -1;
    std::string out, err;
};

Run run_binary(const std::string& args, const fs::path& dir, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(SNLAB_CLI_PATH) + " " + args + " >" + (dir / "stdout").string() +
                            " 2>" + (dir / "stderr").string();
    int st = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.out = slurp(dir / "stdout");
    r.err = slurp(dir / "stderr");
    return r;
}

std::string value_of(const std::string& out, const std::string& key) {
    std::istringstream is(out);
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
    }
    return "<missing>";
}

const char* kStep = "# kind=step d=1\nt,v\n0,0\n0.5,1\n";
const char* kRamp = "# kind=pl d=1\nt,v\n0,0\n0.4,0\n0.6,1\n";

}  // namespace

TEST_CASE("minimal config keeps every other default") {
    ExperimentConfig c = parse_config("[model]\nvariant = iid\nalpha = 0.8\n");
    REQUIRE(c.n_grid == std::vector<std::size_t>{100, 1000, 10000});
    REQUIRE(std::get<IidModel>(c.model).rv.alpha == 0.8);
    REQUIRE(c.seed == 42);
    REQUIRE(c.tolerance("fidi_ks") == 0.06);
    // the echo lists defaulted fields too
    const std::string echo = config_to_text(c);
    REQUIRE(echo.find("n_grid = [100, 1000, 10000]") != std::string::npos);
    REQUIRE(echo.find("replicates = 2000") != std::string::npos);
}

TEST_CASE("config echo parses back to the same config") {
    for (const char* text : {"", "[model]\nvariant = linear\nalpha = 1.5\np = 0.7\nphi = [1, -0.5, 0.25]\n",
                             "[model]\nvariant = squared_garch\nomega = 1e-6\na1 = 0.5\nb1 = 0.3\n"
                             "[run]\nn_grid = [50, 500]\nkappa = 0.4\n[tolerances]\nfidi_ks = 0.1\n"}) {
        ExperimentConfig a = parse_config(text);
        ExperimentConfig b = parse_config(config_to_text(a));
        REQUIRE(dump_json(config_to_json(a)) == dump_json(config_to_json(b)));
    }
}

TEST_CASE("config errors name the key and the line") {
    auto message = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    std::string m = message("[model]\nvariant = iid\nalpha = 2.5\n");
    REQUIRE(m.find("line 3") != std::string::npos);
    REQUIRE(m.find("model.alpha") != std::string::npos);
    REQUIRE(m.find("(0,2)") != std::string::npos);

    m = message("[run]\nreplicates = 100\nrepliactes = 5\n");
    REQUIRE(m.find("line 3") != std::string::npos);
    REQUIRE(m.find("run.repliactes") != std::string::npos);

    m = message("[run]\nu = 0.1x\n");
    REQUIRE(m.find("line 2") != std::string::npos);
    REQUIRE(m.find("run.u") != std::string::npos);

    REQUIRE(message("[tolerances]\nnot_a_tolerance = 1\n").find("tolerances.not_a_tolerance") != std::string::npos);
    REQUIRE(message("[other]\n").find("unknown section") != std::string::npos);
    REQUIRE(message("[run]\nseed = 1\nseed = 2\n").find("duplicate") != std::string::npos);
    REQUIRE(message("[model]\nvariant = iid\nphi = [1, 2]\n").find("model.phi") != std::string::npos);
    REQUIRE(message("[run]\nn_grid = [100, 10.5]\n").find("run.n_grid") != std::string::npos);
    REQUIRE(message("[run]\nn_grid = [100\n").find("unterminated") != std::string::npos);
    REQUIRE(message("[run]\nreplicates = 0\n") != "no error");
}

TEST_CASE("seed precedence: default < env < file < override < flag") {
    REQUIRE(parse_config("").seed == 42);
    REQUIRE(parse_config("", {}, 5).seed == 5);
    REQUIRE(parse_config("[run]\nseed = 3\n", {}, 5).seed == 3);
    REQUIRE(parse_config("[run]\nseed = 3\n", {"run.seed=7"}, 5).seed == 7);
    REQUIRE(parse_config("[run]\nseed = 3\n", {"run.seed=7"}, 5, 11).seed == 11);
    // full 64-bit seeds survive
    REQUIRE(parse_config("[run]\nseed = 18446744073709551615\n").seed == 18446744073709551615ULL);
    ExperimentConfig c = parse_config("", {"model.alpha=1.2", "tolerances.hill_abs=0.5"});
    REQUIRE(std::get<IidModel>(c.model).rv.alpha == 1.2);
    REQUIRE(c.tolerance("hill_abs") == 0.5);
    REQUIRE_THROWS_AS(parse_config("", {"seed=7"}), ParseError);
    REQUIRE_THROWS_AS(parse_config("", {"run.bogus=7"}), ParseError);
}

TEST_CASE("series CSV reader") {
    std::istringstream a("i,x,sigma2\n0,1.5,1\n1,-2,1\n");
    REQUIRE(read_series_csv(a) == std::vector<double>{1.5, -2.0});
    std::istringstream b("# comment\n3\n\n4\n");
    REQUIRE(read_series_csv(b) == std::vector<double>{3.0, 4.0});
    std::istringstream c("1\n2\nabc\n");
    try {
        read_series_csv(c);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        REQUIRE(e.line() == 3);
    }
    std::istringstream d("1,2\n3,4\n");
    REQUIRE_THROWS_AS(read_series_csv(d), ParseError);
}

TEST_CASE("m1dist: identical paths and the step-ramp pair") {
    fs::path dir = scratch("m1");
    write(dir / "step.csv", kStep);
    write(dir / "ramp.csv", kRamp);
    Run r = run_binary("m1dist " + (dir / "step.csv").string() + " " + (dir / "step.csv").string(), dir);
    REQUIRE(r.code == 0);
    REQUIRE(value_of(r.out, "uniform") == "0");
    REQUIRE(value_of(r.out, "j1") == "0");
    REQUIRE(std::stod(value_of(r.out, "m1")) <= 1e-9);
    REQUIRE(std::stod(value_of(r.out, "weak_m1")) <= 1e-9);

    // jump at 1/2 against a ramp over [0.4, 0.6]: uniform 1/2, M1 1/12, J1 undefined
    r = run_binary("m1dist " + (dir / "step.csv").string() + " " + (dir / "ramp.csv").string(), dir);
    REQUIRE(r.code == 0);
    REQUIRE(std::stod(value_of(r.out, "uniform")) == Catch::Approx(0.5).margin(1e-12));
    const double m1 = std::stod(value_of(r.out, "m1"));
    REQUIRE(m1 >= 1.0 / 12.0 - 1e-12);
    REQUIRE(m1 <= 1.0 / 12.0 + 1e-5);
    REQUIRE(std::stod(value_of(r.out, "weak_m1")) == Catch::Approx(m1).margin(1e-12));
    REQUIRE(value_of(r.out, "j1") == "nan");
}

TEST_CASE("m1dist error exit codes") {
    fs::path dir = scratch("m1err");
    write(dir / "a.csv", kStep);
    write(dir / "two.csv", "# kind=step d=2\nt,v1,v2\n0,0,0\n0.5,1,1\n");
    write(dir / "bad.csv", "# kind=step d=1\nt,v\n0,0\n0.5,oops\n");
    Run r = run_binary("m1dist " + (dir / "a.csv").string() + " " + (dir / "two.csv").string(), dir);
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("dimension") != std::string::npos);
    r = run_binary("m1dist " + (dir / "a.csv").string() + " " + (dir / "bad.csv").string(), dir);
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("line 4") != std::string::npos);
    r = run_binary("m1dist " + (dir / "a.csv").string() + " " + (dir / "missing.csv").string(), dir);
    REQUIRE(r.code == 3);
    r = run_binary("m1dist " + (dir / "a.csv").string(), dir);
    REQUIRE(r.code == 2);
    r = run_binary("", dir);
    REQUIRE(r.code == 2);
}

TEST_CASE("config handling through the binary") {
    fs::path dir = scratch("cfg");
    Run r = run_binary("limits -c " + (dir / "nope.ini").string(), dir);
    REQUIRE(r.code == 3);

    write(dir / "bad.ini", "[model]\nvariant = iid\nalpha = 2.5\n");
    r = run_binary("limits -c " + (dir / "bad.ini").string(), dir);
    REQUIRE(r.code == 2);
    REQUIRE(r.err.find("model.alpha") != std::string::npos);
    REQUIRE(r.err.find("line 3") != std::string::npos);

    write(dir / "seed.ini", "[run]\nseed = 3\ntriple_mc = 10000\n");
    r = run_binary("limits -c " + (dir / "seed.ini").string() + " run.seed=7", dir, "SEED=5");
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("# seed = 7\n") != std::string::npos);
    REQUIRE(r.out.find("# n_grid = [100, 1000, 10000]\n") != std::string::npos);
    r = run_binary("limits -c " + (dir / "seed.ini").string() + " run.seed=7 --seed 9", dir, "SEED=5");
    REQUIRE(r.out.find("# seed = 9\n") != std::string::npos);
    r = run_binary("limits run.triple_mc=10000", dir, "SEED=5");
    REQUIRE(r.out.find("# seed = 5\n") != std::string::npos);
    REQUIRE(r.out.find("stable={") != std::string::npos);
}

TEST_CASE("converge exits 1 on an impossible tolerance") {
    fs::path dir = scratch("conv");
    write(dir / "small.ini",
          "[run]\nn_grid = [100, 200]\nreplicates = 200\nlimit_draws = 200\ntriple_mc = 10000\n"
          "[tolerances]\nfidi_ks = 0\n");
    Run r = run_binary("converge -c " + (dir / "small.ini").string() + " -o " + (dir / "out").string(), dir);
    REQUIRE(r.code == 1);
    REQUIRE(r.err.find("FAIL fidi_ks_l1") != std::string::npos);
    REQUIRE(fs::exists(dir / "out" / "report.jsonl"));
}

TEST_CASE("simulate and estimate write their artifacts") {
    fs::path dir = scratch("sim");
    Run r = run_binary("simulate -n 2000 -o " + (dir / "s").string() + " model.alpha=0.8", dir);
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(dir / "s" / "series.csv"));
    REQUIRE(fs::exists(dir / "s" / "ln.csv"));
    REQUIRE(value_of(r.out, "n") == "2000");
    r = run_binary("estimate --data " + (dir / "s" / "series.csv").string() + " -o " + (dir / "e").string(), dir);
    REQUIRE(r.code == 0);
    REQUIRE(value_of(r.out, "n") == "2000");
    REQUIRE(fs::exists(dir / "e" / "estimate.json"));
    const double a = std::stod(value_of(r.out, "alpha_hat"));
    REQUIRE(a > 0.5);
    REQUIRE(a < 1.1);
}
