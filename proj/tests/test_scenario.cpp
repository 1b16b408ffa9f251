#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddrec/scenario.hpp"

using namespace ddrec;

namespace {

const char* kMinimal = "[params]\ntau_n = 1\n";

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("config defaults") {
    const auto cfg = parse_config(kMinimal);
    CHECK(cfg.stepper.dt == doctest::Approx(1e-3));
    CHECK(cfg.n_cells == 200);
    CHECK(cfg.stepper.t_end == doctest::Approx(20.0));
    CHECK(cfg.stepper.output_every == 10);
    CHECK(cfg.initial_family == "constant");
    CHECK(cfg.eps_sweep.empty());
}

TEST_CASE("config errors carry the key path") {
    CHECK_THROWS_WITH_AS(parse_config("[params]\neps = -1\n"),
                         doctest::Contains("params.eps"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[params]\nbogus = 3\n"),
                         doctest::Contains("params.bogus"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[stepper]\ndt = 1e-3\n"),
                         doctest::Contains("params"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[grid]\nn_cells = 1\n[params]\n"),
                         doctest::Contains("grid.n_cells"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[initial]\nfamily = blob\n[params]\n"),
                         doctest::Contains("initial.family"), ConfigError);
    CHECK_THROWS_AS(parse_config("[params]\ntau_n = abc\n"), ConfigError);
}

TEST_CASE("eps sweep parsing routes zero to the SRH branch") {
    const auto cfg = parse_config("[params]\neps0 = 1\n[sweep]\neps = 1, 0.1, 0\n");
    REQUIRE(cfg.eps_sweep.size() == 3);
    CHECK(cfg.eps_sweep[2] == 0.0);
    CHECK_THROWS_WITH_AS(parse_config("[params]\neps0 = 1\n[sweep]\neps = 2\n"),
                         doctest::Contains("sweep.eps"), ConfigError);
}

TEST_CASE("initial catalog") {
    const auto grid = build_grid(10);
    auto cfg = parse_config(kMinimal);
    const auto params = make_params(cfg, grid, 0.1);

    cfg.initial_family = "zero_patch";
    auto st = make_initial_state(cfg, params, grid);
    CHECK(min_value(st.n) == 0.0);
    CHECK(min_value(st.p) == 0.0);
    CHECK(max_value(st.ntr) == 1.0);
    CHECK(min_value(st.ntr) == 0.0);

    // omitted ntr defaults to the quasi-equilibrium manifold
    cfg.initial_family = "step";
    st = make_initial_state(cfg, params, grid);
    const Field expect = ntr_quasi_equilibrium(st.n, st.p, params);
    for (int i = 0; i < grid.n_cells; ++i)
        CHECK(st.ntr[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("csv round-trip at 17 significant digits") {
    std::vector<DiagnosticsRow> rows(3);
    rows[0].t = 0.1;
    rows[0].E = 1.0 / 3.0;
    rows[0].D = 1e-300;
    rows[1].t = 0.2;
    rows[1].E_rel = 0.1234567890123456789;
    rows[2].singular = true;
    rows[2].maxp = 7e88;

    const std::string path = "/tmp/ddrec_test_roundtrip.csv";
    write_diagnostics_csv(path, rows);
    const std::string text = slurp(path);
    CHECK(text.rfind("t,nbar,pbar,ntrbar,mass,E,D,E_rel,l1_n,l1_p,l1_ntr,ckp,maxn,maxp,singular_flag\n", 0) == 0);

    const auto back = read_diagnostics_csv(path);
    REQUIRE(back.size() == 3);
    CHECK(back[0].E == rows[0].E);  // bit-exact through %.17g
    CHECK(back[0].D == rows[0].D);
    CHECK(back[1].E_rel == rows[1].E_rel);
    CHECK(back[2].maxp == rows[2].maxp);
    CHECK(back[2].singular);
    std::remove(path.c_str());
}

TEST_CASE("run_scenario determinism and limit table") {
    auto cfg = parse_config(
        "[params]\neps0 = 1\n[grid]\nn_cells = 40\n"
        "[stepper]\ndt = 2e-3\nt_end = 0.5\noutput_every = 25\n"
        "[initial]\nfamily = step\namp_n = 2\n"
        "[potential]\nfamily = cosine_well\namp_n = 1\namp_p = 1\n"
        "[sweep]\neps = 0.5, 0\noutput = /tmp/ddrec_test_run\n");
    const auto rep1 = run_scenario(cfg);
    CHECK(rep1.violation_count == 0);
    REQUIRE(rep1.runs.size() == 2);
    REQUIRE(rep1.limit_table.size() == 1);
    CHECK(rep1.limit_table[0].second > 0.0);
    const std::string csv1 = slurp(rep1.runs[0].csv_path);
    const auto rep2 = run_scenario(cfg);
    CHECK(slurp(rep2.runs[0].csv_path) == csv1);  // byte-identical rerun
    std::filesystem::remove_all("/tmp/ddrec_test_run");
}

TEST_CASE("equilibrium start reports already converged") {
    auto cfg = parse_config(
        "[params]\neps = 0.2\n[grid]\nn_cells = 20\n"
        "[stepper]\ndt = 1e-2\nt_end = 0.2\noutput_every = 5\n"
        "[sweep]\noutput = /tmp/ddrec_test_eqrun\n");
    // constant family with amp = reference densities and flat potential is the equilibrium
    cfg.initial_family = "constant";
    cfg.amp_n = 1.0;
    cfg.amp_p = 1.0;
    const auto rep = run_scenario(cfg);
    REQUIRE(rep.runs.size() == 1);
    CHECK(rep.runs[0].already_converged);
    CHECK(!rep.runs[0].fit.has_value());
    CHECK(rep.violation_count == 0);
    std::filesystem::remove_all("/tmp/ddrec_test_eqrun");
}

TEST_CASE("run_verification produces one summary row per check") {
    auto cfg = parse_config(
        "[params]\neps = 0.1\neps0 = 1\n[grid]\nn_cells = 24\n"
        "[sweep]\nseed = 3\noutput = /tmp/ddrec_test_verify\n");
    const auto rep = run_verification(cfg, 50);
    CHECK(rep.checks.size() == 8);  // 1 eps + 7 fixed checks
    for (const auto& c : rep.checks) {
        CHECK(c.samples > 0);
        CHECK(c.violations == 0);
        CHECK(std::isfinite(c.sup_ratio));
    }
    CHECK(std::filesystem::exists("/tmp/ddrec_test_verify/verification.csv"));
    std::filesystem::remove_all("/tmp/ddrec_test_verify");
    CHECK_THROWS_AS(run_verification(cfg, 0), ConfigError);
}
