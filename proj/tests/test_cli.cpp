// End-to-end tests of the command-line tool: exit codes, output formats,
// manifest contents, registry round trips and byte-level reproducibility.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Runs the tool in `dir` (created fresh relative paths land there) and
// captures exit code, stdout and stderr.
CmdResult run_cli(const std::string& args, const fs::path& dir) {
    fs::create_directories(dir);
    const fs::path out = dir / "_stdout.txt";
    const fs::path err = dir / "_stderr.txt";
    const std::string cmd = "cd '" + dir.string() + "' && '" + PARISIAN_CLI_PATH + "' " + args +
                            " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    CmdResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::path("/tmp/parisian_test_cli") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("exit codes: help 0, misuse 2, missing constant 3") {
    const fs::path dir = fresh_dir("exit_codes");
    CHECK(run_cli("--help", dir).code == 0);
    CHECK(run_cli("pickands --help", dir).code == 0);
    CHECK(run_cli("", dir).code == 2);                                   // no subcommand
    CHECK(run_cli("piterbarg --a 1 --b 1 --bogus 3", dir).code == 2);    // unknown flag
    CHECK(run_cli("piterbarg --b 1", dir).code == 2);                    // missing required
    CHECK(run_cli("pickands --H 0 --L 1 --n 100", dir).code == 2);       // domain error
    CHECK(run_cli("pickands --H 0.5 --sweep-L 0:2:0.3 --n 100", dir).code == 2);  // bad tiling
    CHECK(run_cli("pickands --H 0.3 --tau 0.02 --tau 0.01 --n 100", dir).code == 2);
    CHECK(run_cli("pickands --H 0.3 --bias-sweep --n 100", dir).code == 2);  // needs H = 0.5
    CHECK(run_cli("piterbarg --a 1 --b 1 --L 0 --n 100 --save", dir).code == 2);  // no registry

    const CmdResult missing =
        run_cli("asymptotics --c1 2 --c2 1 --q1 1 --q2 2 --H 0.5 --T 1 --u 10", dir);
    CHECK(missing.code == 3);
    CHECK(missing.err.find("piterbarg window=4.5") != std::string::npos);
    CHECK(missing.err.find("--simulate-constants") != std::string::npos);
}

TEST_CASE("piterbarg: closed form echoed at L=0, sweep CSV has bounds") {
    const fs::path dir = fresh_dir("piterbarg");
    const CmdResult single = run_cli("piterbarg --a 1 --b 1 --L 0 --n 400 --seed 1", dir);
    CHECK(single.code == 0);
    CHECK(single.out.find("closed form") != std::string::npos);
    CHECK(single.out.find("2.66666666667") != std::string::npos);

    const CmdResult sweep = run_cli(
        "piterbarg --a 1 --b 2 --sweep-L 0:1:0.5 --n 300 --tau 0.02 --seed 4 --out pit.csv",
        dir);
    CHECK(sweep.code == 0);
    const auto rows = lines_of(slurp(dir / "pit.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "L,a,b,estimate,std_error,lower,upper,M,tau,n,seed");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double L, a, b, est, se, lo, hi;
        CHECK(std::sscanf(rows[i].c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &L, &a, &b, &est, &se,
                          &lo, &hi) == 7);
        CHECK(a == 1.0);
        CHECK(b == 2.0);
        CHECK(lo < hi);
        CHECK(est > 0.0);
    }
}

TEST_CASE("pickands: 9-point sweep CSV with exact column at H=0.5") {
    const fs::path dir = fresh_dir("pickands_sweep");
    const CmdResult r = run_cli(
        "pickands --H 0.5 --sweep-L 0:2:0.25 --n 300 --tau 0.02 --seed 2 --out f1.csv", dir);
    CHECK(r.code == 0);
    const auto rows = lines_of(slurp(dir / "f1.csv"));
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == "H,L,estimate,std_error,exact_if_known,lower_bound,M,tau,eta,n,seed");
    CHECK(rows[1].rfind("0.5,0,", 0) == 0);
    CHECK(rows[9].rfind("0.5,2,", 0) == 0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        // exact_if_known is filled at H = 0.5, lower_bound stays "-" by default
        std::istringstream in(rows[i]);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(in, field, ',')) fields.push_back(field);
        REQUIRE(fields.size() == 11);
        CHECK(fields[4] != "-");
        CHECK(fields[5] == "-");
    }

    // At H != 0.5 there is no exact value; --lower-bound fills the bound column.
    const CmdResult r2 = run_cli(
        "pickands --H 0.3 --L 0.5 --n 200 --tau 0.05 --eta 0.05 --lower-bound --out h3.csv",
        dir);
    CHECK(r2.code == 0);
    const auto rows2 = lines_of(slurp(dir / "h3.csv"));
    REQUIRE(rows2.size() == 2);
    std::istringstream in(rows2[1]);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(in, field, ',')) fields.push_back(field);
    REQUIRE(fields.size() == 11);
    CHECK(fields[4] == "-");
    CHECK(fields[5] != "-");
    CHECK(std::stod(fields[5]) > 0.0);
    CHECK(std::stod(fields[5]) < std::stod(fields[2]));
}

TEST_CASE("pickands bias-sweep: one row per tau with signed bias") {
    const fs::path dir = fresh_dir("bias_sweep");
    const CmdResult r = run_cli(
        "pickands --H 0.5 --L 0.5 --bias-sweep --tau 0.04 --tau 0.02 --n 400 --seed 3 "
        "--out bias.csv",
        dir);
    CHECK(r.code == 0);
    const auto rows = lines_of(slurp(dir / "bias.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "tau,estimate,std_error,exact,bias,M,n,seed");
    double tau, est, se, exact, bias;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::sscanf(rows[i].c_str(), "%lf,%lf,%lf,%lf,%lf", &tau, &est, &se, &exact,
                          &bias) == 5);
        CHECK(exact == doctest::Approx(0.2834587751).epsilon(1e-9));
        CHECK(bias == doctest::Approx(est - exact).epsilon(1e-12));
    }
}

TEST_CASE("asymptotics: JSON carries regime, effective window and drift") {
    const fs::path dir = fresh_dir("asym_json");
    const CmdResult r = run_cli(
        "asymptotics --c1 2 --c2 1 --q1 1 --q2 2 --H 0.5 --T 1 --u 10 --n 400 --seed 9 "
        "--simulate-constants --json",
        dir);
    REQUIRE(r.code == 0);
    const json obj = json::parse(r.out);
    CHECK(obj.at("regime") == "Interior");
    CHECK(obj.at("dominant") == 0);
    CHECK(obj.at("formula_id") == "interior drifted-sup window");
    CHECK(obj.at("u") == 10.0);
    CHECK(obj.at("value").get<double>() > 0.0);
    CHECK(obj.at("T_prime").get<double>() == doctest::Approx(4.5).epsilon(1e-12));
    REQUIRE(obj.at("drift").size() == 2);
    CHECK(obj.at("drift")[0].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-12));
    REQUIRE(obj.at("constants").size() == 1);
    const json& c = obj.at("constants")[0];
    CHECK(c.at("source") == "simulated");
    CHECK(c.at("descriptor").at("kind") == "piterbarg");
    CHECK(c.at("descriptor").at("window").get<double>() == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(c.at("value").get<double>() > 0.0);

    // --out writes the same object to a file.
    const CmdResult r2 = run_cli(
        "asymptotics --c1 2 --c2 1 --q1 1 --q2 2 --H 0.5 --T 0 --u 5 --json --out res.json",
        dir);
    REQUIRE(r2.code == 0);
    const json from_file = json::parse(slurp(dir / "res.json"));
    CHECK(from_file.at("formula_id") == "interior drifted-sup closed form");
    CHECK(from_file.at("T_prime").is_null());  // closed form: no simulated constant consulted
    CHECK(from_file == json::parse(r2.out));
}

TEST_CASE("asymptotics: quota-share input and one-dim mode") {
    const fs::path dir = fresh_dir("asym_modes");
    // Quota-share triple (x, rho, delta) mapping to c=(4,2), q=(2,4) at u_ref=1.
    const CmdResult qs = run_cli(
        "asymptotics --x1 0.5 --x2 2 --rho1 1 --rho2 1 --delta1 0.25 --delta2 0.5 "
        "--u-ref 1 --H 0.5 --T 0 --u 3 --json",
        dir);
    REQUIRE(qs.code == 0);
    const json a = json::parse(qs.out);
    const CmdResult direct = run_cli(
        "asymptotics --c1 4 --c2 2 --q1 2 --q2 4 --H 0.5 --T 0 --u 3 --json", dir);
    REQUIRE(direct.code == 0);
    const json b = json::parse(direct.out);
    CHECK(a.at("value") == b.at("value"));
    CHECK(a.at("regime") == b.at("regime"));

    const CmdResult od =
        run_cli("asymptotics --one-dim --c 1 --q 0.5 --H 0.5 --T 0.2 --u 2 --json", dir);
    REQUIRE(od.code == 0);
    const json o = json::parse(od.out);
    CHECK(o.at("mode") == "one-dim");
    CHECK(o.at("formula_id") == "one-dim brownian exact");
    CHECK(o.at("value").get<double>() > 0.0);

    CHECK(run_cli("asymptotics --one-dim --x1 1 --u 2", dir).code == 2);
    CHECK(run_cli("asymptotics --x1 0.5 --rho1 1 --delta1 0.25 --u 3", dir).code == 2);
}

TEST_CASE("mc-ruin: CSV columns, gate refusal, --force override") {
    const fs::path dir = fresh_dir("mc_ruin");
    const CmdResult r = run_cli(
        "mc-ruin --one-dim --c 1 --q 0.5 --H 0.5 --T 0 --u 0.5 --u 0.75 --n 800 --seed 5 "
        "--step 0.01 --horizon 6 --simulate-constants --out mc.csv",
        dir);
    CHECK(r.code == 0);
    const auto rows = lines_of(slurp(dir / "mc.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "u,T,H,p_hat,ci95,n,horizon,step,seed");
    double u, T, H, p, ci;
    CHECK(std::sscanf(rows[1].c_str(), "%lf,%lf,%lf,%lf,%lf", &u, &T, &H, &p, &ci) == 5);
    CHECK(u == 0.5);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
    CHECK(ci > 0.0);

    // Expected hits ~ n * exp(-2 c q u^2) far below 10 at u = 6: refuse...
    const CmdResult refuse = run_cli(
        "mc-ruin --one-dim --c 1 --q 1 --H 0.5 --T 0 --u 6 --n 500 --step 0.05 --horizon 4 "
        "--simulate-constants",
        dir);
    CHECK(refuse.code == 2);
    CHECK(refuse.err.find("refusing") != std::string::npos);
    CHECK(refuse.err.find("--force") != std::string::npos);
    // ...but run under --force (zero hits produce a warning, not an error).
    const CmdResult forced = run_cli(
        "mc-ruin --one-dim --c 1 --q 1 --H 0.5 --T 0 --u 6 --n 500 --step 0.05 --horizon 4 "
        "--simulate-constants --force --json",
        dir);
    CHECK(forced.code == 0);
    const json obj = json::parse(forced.out);
    CHECK(obj.at("results")[0].at("hits") == 0);

    // Without any constant source the gate is skipped with a warning.
    const CmdResult ungated = run_cli(
        "mc-ruin --c1 2 --c2 1 --q1 1 --q2 2 --H 0.3 --T 0 --u 0.5 --n 300 --step 0.02 "
        "--horizon 4",
        dir);
    CHECK(ungated.code == 0);
    CHECK(ungated.err.find("feasibility gate skipped") != std::string::npos);
}

TEST_CASE("mc-ruin: --u-sweep expands inclusively") {
    const fs::path dir = fresh_dir("mc_sweep");
    const CmdResult r = run_cli(
        "mc-ruin --one-dim --c 1 --q 0.5 --H 0.5 --T 0 --u-sweep 0.5:1:0.25 --n 300 "
        "--seed 8 --step 0.02 --horizon 5 --simulate-constants --out s.csv",
        dir);
    CHECK(r.code == 0);
    const auto rows = lines_of(slurp(dir / "s.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].rfind("0.5,", 0) == 0);
    CHECK(rows[3].rfind("1,", 0) == 0);
}

TEST_CASE("run_manifest.json sits next to the output and names the run") {
    const fs::path dir = fresh_dir("manifest");
    fs::create_directories(dir / "sub");
    const CmdResult r = run_cli(
        "pickands --H 0.5 --L 0.5 --n 200 --tau 0.02 --seed 6 --out sub/x.csv", dir);
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(dir / "sub/run_manifest.json"));
    const json m = json::parse(slurp(dir / "sub/run_manifest.json"));
    CHECK(m.at("command") == "pickands");
    CHECK(m.at("tool_version") == "0.1.0");
    CHECK(m.at("seed") == 6);
    CHECK(m.at("wall_time_seconds").get<double>() >= 0.0);
    CHECK(m.at("parameters").at("H") == 0.5);
    CHECK(m.at("parameters").at("n") == 200);
    REQUIRE(m.at("outputs").size() == 1);
    CHECK(m.at("outputs")[0] == "sub/x.csv");
    bool has_subcommand = false;
    for (const auto& a : m.at("argv"))
        if (a == "pickands") has_subcommand = true;
    CHECK(has_subcommand);

    // stdout-only runs still leave a manifest in the working directory.
    const CmdResult r2 = run_cli("piterbarg --a 1 --b 1 --L 0.5 --n 200 --seed 6", dir);
    REQUIRE(r2.code == 0);
    CHECK(fs::exists(dir / "run_manifest.json"));
}

TEST_CASE("reruns with one seed reproduce output files byte for byte") {
    const fs::path d1 = fresh_dir("repro_a");
    const fs::path d2 = fresh_dir("repro_b");
    const std::string cmd =
        "pickands --H 0.7 --sweep-L 0:1:0.5 --n 300 --tau 0.02 --seed 77 --out out.csv";
    REQUIRE(run_cli(cmd, d1).code == 0);
    REQUIRE(run_cli(cmd + " --threads 2", d2).code == 0);
    const std::string a = slurp(d1 / "out.csv");
    CHECK(a == slurp(d2 / "out.csv"));
    CHECK(!a.empty());

    const std::string mc =
        "mc-ruin --c1 2 --c2 1 --q1 1 --q2 2 --H 0.5 --T 0.2 --u 0.8 --n 400 --seed 12 "
        "--step 0.02 --horizon 5 --simulate-constants --force --out mc.csv";
    REQUIRE(run_cli(mc, d1).code == 0);
    REQUIRE(run_cli(mc + " --threads 3", d2).code == 0);
    CHECK(slurp(d1 / "mc.csv") == slurp(d2 / "mc.csv"));
}

TEST_CASE("registry: --save stores records, asymptotics caches and replays") {
    const fs::path dir = fresh_dir("registry");
    const CmdResult save = run_cli(
        "piterbarg --a 1 --b 2 --L 0.5 --n 200 --tau 0.02 --seed 3 --save --registry reg.txt",
        dir);
    CHECK(save.code == 0);
    const auto stored = lines_of(slurp(dir / "reg.txt"));
    REQUIRE(stored.size() == 1);
    CHECK(stored[0].find(" piterbarg ") != std::string::npos);

    // PARISIAN_REGISTRY provides the path when --registry is absent.
    const CmdResult env_save = run_cli(
        "pickands --H 0.3 --L 0.5 --n 100 --tau 0.05 --save", dir / "env");
    CHECK(env_save.code == 2);  // env var not set: refused
    fs::create_directories(dir / "env");
    const std::string with_env =
        "PARISIAN_REGISTRY=envreg.txt '" + std::string(PARISIAN_CLI_PATH) +
        "' pickands --H 0.3 --L 0.5 --n 100 --tau 0.05 --save >/dev/null 2>&1";
    const std::string cmd = "cd '" + (dir / "env").string() + "' && " + with_env;
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(dir / "env" / "envreg.txt"));

    // Simulate-and-store, then replay from the cache with identical settings.
    const std::string asym =
        "asymptotics --c1 2 --c2 1 --q1 1 --q2 2 --H 0.5 --T 1 --u 10 --n 300 --seed 21 "
        "--registry asym_reg.txt --json";
    const CmdResult first = run_cli(asym, dir);
    REQUIRE(first.code == 0);
    const json f = json::parse(first.out);
    CHECK(f.at("constants")[0].at("source") == "simulated");
    const CmdResult second = run_cli(asym, dir);
    REQUIRE(second.code == 0);
    const json s = json::parse(second.out);
    CHECK(s.at("constants")[0].at("source") == "cached");
    CHECK(s.at("value") == f.at("value"));
    // cache-only succeeds on the stored constant, fails on an unseen one
    const CmdResult cached = run_cli(asym + " --cache-only", dir);
    CHECK(cached.code == 0);
    const CmdResult miss = run_cli(
        "asymptotics --c1 2 --c2 1 --q1 1 --q2 2 --H 0.5 --T 2 --u 10 --n 300 --seed 21 "
        "--registry asym_reg.txt --cache-only",
        dir);
    CHECK(miss.code == 3);
}
