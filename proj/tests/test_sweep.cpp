#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "thermalink/solvers.hpp"
#include "thermalink/sweep.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace thermalink;

namespace {

std::string csv_of(const std::vector<ResultRecord>& records) {
    std::ostringstream os;
    write_csv(os, records);
    return os.str();
}

// Run the CLI binary (path via THERMALINK_CLI) and return its exit code.
int run_cli(const std::string& args, std::string* output = nullptr) {
    const char* cli = std::getenv("THERMALINK_CLI");
    REQUIRE(cli != nullptr);
    const std::string cmd = std::string(cli) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::string out;
    while (fgets(buf, sizeof(buf), pipe)) out += buf;
    const int status = pclose(pipe);
    if (output) *output = out;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing is strict") {
    CHECK_THROWS_AS(parse_sweep_spec("not json"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep_spec(R"({"routf": "markov"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep_spec(R"({"params": {"gamme1": 2.0}})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep_spec(R"({"route": "warp"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep_spec(R"({"schema_version": 2})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep_spec(R"({"axes": [{"param": "bogus", "min": 0, "max": 1, "points": 2}]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep_spec(R"({"format": "xml"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sweep_spec(R"({"solver": {"n_trej": 10}})"), std::invalid_argument);

    const SweepSpec spec = parse_sweep_spec(R"({
        "schema_version": 1,
        "route": "markov",
        "params": {"gamma1": 1.0, "gamma2": 1.0, "n_th": 1.0, "kappa": 0.3},
        "seed": 42,
        "format": "json"
    })");
    CHECK(spec.route == Route::Markov);
    CHECK(spec.params.n_th == 1.0);
    CHECK(spec.seed == 42);
}

TEST_CASE("axis value generation") {
    AxisSpec lin{"n_th", "linear", 0.0, 10.0, 6};
    const auto lv = lin.values();
    CHECK(lv.size() == 6);
    CHECK(lv.front() == 0.0);
    CHECK(lv.back() == 10.0);
    CHECK(lv[1] == doctest::Approx(2.0));

    AxisSpec log{"kappa", "log", 1e-3, 1.0, 4};
    const auto gv = log.values();
    CHECK(gv.front() == doctest::Approx(1e-3));
    CHECK(gv[1] == doctest::Approx(1e-2).epsilon(1e-12));
    CHECK(gv.back() == doctest::Approx(1.0));

    AxisSpec bad{"kappa", "log", -1.0, 1.0, 3};
    CHECK_THROWS_AS(bad.values(), std::invalid_argument);
}

TEST_CASE("run_steady dispatch") {
    SweepSpec spec;
    spec.route = Route::Markov;
    spec.params.n_th = 1.0;
    const ResultRecord markov = run_steady(spec);
    CHECK(markov.p00 == doctest::Approx(4.0 / 9.0).epsilon(1e-10));
    CHECK(markov.pT == doctest::Approx(2.0 / 9.0).epsilon(1e-10));
    CHECK(markov.concurrence == 0.0);

    spec.route = Route::Quasistatic;
    spec.params.n_th = 0.0;
    CHECK(run_steady(spec).concurrence == 0.0);

    // cross-route agreement exercised through the dispatch layer
    spec.params.kappa = 0.01;
    spec.params.n_th = 2.0;
    spec.route = Route::Cfrac;
    const ResultRecord cfrac = run_steady(spec);
    spec.route = Route::Exact;
    const ResultRecord exact = run_steady(spec);
    CHECK(std::abs(cfrac.concurrence - exact.concurrence) < 1e-6);
    CHECK(exact.residual < 1e-8);
    CHECK(exact.n_max > 0);
}

TEST_CASE("run_steady covers every route") {
    SweepSpec spec;
    spec.params.kappa = 0.05;
    spec.params.n_th = 2.0;
    spec.seed = 3;

    spec.route = Route::Bourret;
    const ResultRecord bour = run_steady(spec);
    CHECK(bour.p00 + bour.pT + bour.pS + bour.p11 == doctest::Approx(1.0).epsilon(1e-10));

    spec.route = Route::PhaseDiffusion;
    const ResultRecord pd = run_steady(spec);
    CHECK(pd.p00 + pd.pT + pd.pS + pd.p11 == doctest::Approx(1.0).epsilon(1e-8));

    spec.route = Route::Stochastic;
    spec.solver.n_traj = 200;
    spec.solver.t_end = 15.0;
    const ResultRecord st = run_steady(spec);
    CHECK(st.mc_error > 0.0);
    CHECK(st.p00 + st.pT + st.pS + st.p11 == doctest::Approx(1.0).epsilon(1e-6));
    const ResultRecord st2 = run_steady(spec);
    CHECK(st.pS == st2.pS);  // same seed, same result

    spec.route = Route::Bidirectional;
    spec.params.kappa = 0.01;
    spec.params.delta1 = 0.5;
    spec.params.delta2 = -0.5;
    spec.params.k0z1 = 2.0 * M_PI;
    spec.params.k0z2 = 4.0 * M_PI;
    const ResultRecord bid = run_steady(spec);
    CHECK(bid.n_max > 0);
    CHECK(bid.pS > 0.0);
}

TEST_CASE("sweep grids are deterministic and worker-independent") {
    SweepSpec spec;
    spec.route = Route::Bourret;
    spec.params.n_th = 2.0;
    spec.axes = {{"kappa", "log", 1e-3, 0.3, 7}, {"n_th", "linear", 1.0, 3.0, 3}};
    spec.seed = 9;
    spec.workers = 1;
    const SweepResult one = run_sweep(spec);
    spec.workers = 2;
    const SweepResult two = run_sweep(spec);
    REQUIRE(one.records.size() == 21);
    CHECK(one.failed == 0);
    CHECK(csv_of(one.records) == csv_of(two.records));

    // row-major order: the first axis varies slowest
    CHECK(one.records[0].params.kappa == doctest::Approx(1e-3));
    CHECK(one.records[0].params.n_th == doctest::Approx(1.0));
    CHECK(one.records[1].params.n_th == doctest::Approx(2.0));
    CHECK(one.records[3].params.kappa == doctest::Approx(one.records[0].params.kappa * std::pow(300.0, 1.0 / 6.0)).epsilon(1e-9));

    // single-point sweep equals run_steady
    SweepSpec single = spec;
    single.axes = {{"n_th", "linear", 2.0, 2.0, 1}};
    single.workers = 1;
    const SweepResult sr = run_sweep(single);
    REQUIRE(sr.records.size() == 1);
    SweepSpec direct = single;
    direct.seed = sr.records[0].seed;  // per-point seed derivation
    const ResultRecord rs = run_steady(direct);
    CHECK(sr.records[0].concurrence == rs.concurrence);
    CHECK(sr.records[0].pS == rs.pS);
}

TEST_CASE("flux axis sets the occupation through the current bandwidth") {
    SweepSpec spec;
    spec.route = Route::Quasistatic;
    spec.params.kappa = 0.01;
    spec.axes = {{"phi", "linear", 0.125, 0.125, 1}};
    const SweepResult res = run_sweep(spec);
    REQUIRE(res.records.size() == 1);
    CHECK(res.records[0].params.n_th == doctest::Approx(2.0 * 0.125 / 0.01));
    CHECK(res.records[0].concurrence == doctest::Approx(0.40365263767680715).epsilon(1e-10));
}

TEST_CASE("partial sweep failures are recorded and do not abort the run") {
    SweepSpec spec;
    spec.route = Route::Exact;
    spec.params.kappa = 0.3;
    spec.params.fock_cutoff = 8;  // too small once n_th grows
    spec.axes = {{"n_th", "linear", 0.0, 6.0, 4}};
    const SweepResult res = run_sweep(spec);
    REQUIRE(res.records.size() == 4);
    CHECK(res.failed > 0);
    CHECK(res.failed < 4);
    bool found_error = false, found_ok = false;
    for (const auto& r : res.records) {
        if (!r.error.empty()) found_error = true;
        if (r.error.empty() && std::abs(r.p00 + r.pT + r.pS + r.p11 - 1.0) < 1e-10)
            found_ok = true;
    }
    CHECK(found_error);
    CHECK(found_ok);
}

TEST_CASE("csv output format") {
    SweepSpec spec;
    spec.route = Route::Markov;
    spec.params.n_th = 1.0;
    const ResultRecord rec = run_steady(spec);
    const std::string csv = csv_of({rec});
    CHECK(csv.find(csv_header()) == 0);
    CHECK(csv.find("markov") != std::string::npos);
    CHECK(csv.find("0.44444444444444") != std::string::npos);  // 17 significant digits
    CHECK(csv.find(kEngineVersion) != std::string::npos);
    // header carries symbol and unit for every numeric column
    CHECK(csv_header().find("kappa[angfreq]") != std::string::npos);
    CHECK(csv_header().find("rho_S[-]") != std::string::npos);
}

TEST_CASE("json output round-trips the record") {
    SweepSpec spec;
    spec.route = Route::Bourret;
    spec.params.kappa = 0.05;
    spec.params.n_th = 2.0;
    std::ostringstream os;
    write_json(os, {run_steady(spec)});
    const std::string text = os.str();
    CHECK(text.find("\"route\": \"bourret\"") != std::string::npos);
    CHECK(text.find("\"engine_version\"") != std::string::npos);
    CHECK(text.find("\"rho_S\"") != std::string::npos);
}

TEST_CASE("worker count environment override") {
    setenv("THERMALINK_WORKERS", "3", 1);
    CHECK(worker_count_from_env(0) == 3);
    CHECK(worker_count_from_env(8) == 3);
    unsetenv("THERMALINK_WORKERS");
    CHECK(worker_count_from_env(5) == 5);
}

TEST_CASE("cli: steady solve and exit codes") {
    std::string out;
    CHECK(run_cli("steady --route markov --set n_th=1", &out) == 0);
    CHECK(out.find("markov") != std::string::npos);
    CHECK(out.find("0.44444444444444") != std::string::npos);

    CHECK(run_cli("steady --config /nonexistent.json") == 1);
    CHECK(run_cli("steady --route warp") == 1);
    CHECK(run_cli("bogus-subcommand") == 1);

    // solver failures surface as exit code 2
    CHECK(run_cli("steady --route exact --set n_th=4 --set fock_cutoff=6") == 2);
}

TEST_CASE("cli: sweep with partial failure exits 3 and emits every row") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "thermalink_test_sweep";
    fs::create_directories(dir);
    const fs::path cfg = dir / "partial.json";
    {
        std::ofstream f(cfg);
        f << R"({"route": "exact",
                 "params": {"kappa": 0.3, "fock_cutoff": 8},
                 "axes": [{"param": "n_th", "min": 0.0, "max": 6.0, "points": 4}],
                 "out": ")" << (dir / "partial.csv").string() << R"("})";
    }
    CHECK(run_cli("sweep --config " + cfg.string()) == 3);
    std::ifstream in(dir / "partial.csv");
    REQUIRE(in.good());
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 5);  // header + 4 records
}

TEST_CASE("cli: byte-identical sweep output across reruns and worker counts") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "thermalink_test_sweep";
    fs::create_directories(dir);
    const fs::path cfg = dir / "det.json";
    {
        std::ofstream f(cfg);
        f << R"({"route": "bourret",
                 "params": {"n_th": 2.0},
                 "seed": 7,
                 "axes": [{"param": "kappa", "scale": "log", "min": 0.001, "max": 0.3, "points": 9}]})";
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    CHECK(run_cli("sweep --config " + cfg.string() + " --workers 1 --out " +
                  (dir / "a.csv").string()) == 0);
    CHECK(run_cli("sweep --config " + cfg.string() + " --workers 2 --out " +
                  (dir / "b.csv").string()) == 0);
    CHECK(run_cli("sweep --config " + cfg.string() + " --workers 2 --out " +
                  (dir / "c.csv").string()) == 0);
    const std::string a = slurp(dir / "a.csv");
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "b.csv"));
    CHECK(a == slurp(dir / "c.csv"));
}

TEST_CASE("cli: evolve and trajectory emit time series") {
    std::string out;
    CHECK(run_cli("evolve --route exact --set n_th=0.5 --set kappa=0.3 --t-end 3 --points 5",
                  &out) == 0);
    CHECK(out.find("t[1/angfreq]") == 0);
    CHECK(run_cli("trajectory --set n_th=2 --set kappa=0.1 --t-end 2 --seed 11", &out) == 0);
    CHECK(out.find("abs_alpha") != std::string::npos);
}

TEST_CASE("cli: figure bundle") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "thermalink_test_fig";
    fs::create_directories(dir);
    std::string out;
    CHECK(run_cli("figure fig2d --out-dir " + dir.string(), &out) == 0);
    CHECK(out.find("fig2d_exact.csv") != std::string::npos);
    CHECK(fs::exists(dir / "fig2d_exact.csv"));
    CHECK(fs::exists(dir / "fig2d_bourret.csv"));
    CHECK(run_cli("figure no-such-figure") == 1);
}
