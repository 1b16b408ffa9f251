#include <doctest.h>

#include <cmath>

#include "ddrec/entropy.hpp"
#include "ddrec/verify.hpp"

using namespace ddrec;

namespace {

constexpr double kLn2 = 0.6931471805599453;

SimParams flat_params(const Grid1D& grid, double eps) {
    SimParams p;
    p.eps = eps;
    p.eps0 = std::max(eps, 1.0);
    p.potentials = make_potentials(grid, PotentialFamily::Constant, 0.0, 0.0);
    return p;
}

} // namespace

TEST_CASE("trap potential closed form") {
    CHECK(trap_potential(0.5) == doctest::Approx(0.0));
    CHECK(trap_potential(0.0) == doctest::Approx(kLn2).epsilon(1e-14));
    CHECK(trap_potential(1.0) == doctest::Approx(kLn2).epsilon(1e-14));
    CHECK(trap_potential(0.0) + trap_potential(1.0) ==
          doctest::Approx(2 * kLn2).epsilon(1e-14));
    for (double x : {0.1, 0.25, 0.7, 0.95}) CHECK(trap_potential(x) >= 0.0);
    CHECK_THROWS_AS(trap_potential(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(trap_potential(1.1), std::invalid_argument);
}

TEST_CASE("entropy hand values") {
    const auto grid = build_grid(8);
    const auto params = flat_params(grid, 0.3);
    State st;
    st.n = Field(grid, 1.0);
    st.p = Field(grid, 1.0);
    st.ntr = Field(grid, 0.5);
    CHECK(entropy(st, params) == doctest::Approx(0.0));

    st.n = Field(grid, 0.0);  // 0 ln 0 convention: bracket contributes 1
    CHECK(entropy(st, params) == doctest::Approx(1.0).epsilon(1e-14));

    // eps = 0 entropy equals the two-species functional exactly
    const auto p0 = flat_params(grid, 0.0);
    st.n = Field(grid, 2.0);
    st.p = Field(grid, 0.7);
    CHECK(entropy(st, p0) == entropy_srh(st.n, st.p, p0));
}

TEST_CASE("production hand value and nonnegativity") {
    const auto grid = build_grid(8);
    const auto params = flat_params(grid, 0.5);
    State st;
    st.n = Field(grid, 2.0);
    st.p = Field(grid, 1.0);
    st.ntr = Field(grid, 0.5);
    const auto res = entropy_production(st, params);
    CHECK(res.value == doctest::Approx(0.5 * kLn2).epsilon(1e-13));
    CHECK(!res.singular);

    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        State rnd;
        rnd.n.grid = rnd.p.grid = rnd.ntr.grid = &grid;
        rnd.n.values.resize(grid.n_cells);
        rnd.p.values.resize(grid.n_cells);
        rnd.ntr.values.resize(grid.n_cells);
        for (int i = 0; i < grid.n_cells; ++i) {
            rnd.n[i] = rng.log_uniform(1e-3, 1e2);
            rnd.p[i] = rng.log_uniform(1e-3, 1e2);
            rnd.ntr[i] = rng.uniform(0.01, 0.99);
        }
        CHECK(entropy_production(rnd, params).value >= -1e-12);
    }
}

TEST_CASE("degenerate cells set the singular flag, production stays finite") {
    const auto grid = build_grid(4);
    const auto params = flat_params(grid, 1.0);
    State st;
    st.n = Field(grid, 0.0);
    st.p = Field(grid, 1.0);
    st.ntr = Field(grid, 1.0);
    const auto res = entropy_production(st, params);
    CHECK(res.singular);
    CHECK(std::isfinite(res.value));
}

TEST_CASE("production at equilibrium is zero") {
    const auto grid = build_grid(32);
    SimParams params = flat_params(grid, 0.2);
    params.potentials = make_potentials(grid, PotentialFamily::CosineWell, 1.0, 0.5);
    const auto eq = solve_equilibrium(params, 0.4);
    State st;
    st.n = eq.n_inf;
    st.p = eq.p_inf;
    st.ntr = Field(grid, eq.ntr_inf);
    CHECK(std::abs(entropy_production(st, params).value) < 1e-12);
    CHECK(std::abs(relative_entropy(st, eq, params)) < 1e-12);
    CHECK(std::abs(ckp_bound(st, eq, params)) < 1e-12);
}

TEST_CASE("relative entropy equals E - E_inf on the mass class") {
    const auto grid = build_grid(24);
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        SimParams params = flat_params(grid, trial % 2 ? 0.3 : 0.0);
        params.n0 = rng.log_uniform(0.3, 3.0);
        params.p0 = rng.log_uniform(0.3, 3.0);
        params.potentials = make_potentials(grid, PotentialFamily::CosineWell,
                                            rng.uniform(0.0, 1.5), rng.uniform(0.0, 1.5));
        State st;
        st.n.grid = st.p.grid = st.ntr.grid = &grid;
        st.n.values.resize(grid.n_cells);
        st.p.values.resize(grid.n_cells);
        st.ntr.values.resize(grid.n_cells);
        for (int i = 0; i < grid.n_cells; ++i) {
            st.n[i] = rng.log_uniform(0.05, 5.0);
            st.p[i] = rng.log_uniform(0.05, 5.0);
            st.ntr[i] = rng.uniform(0.05, 0.95);
        }
        const double M = state_mass(st, params);
        const auto eq = solve_equilibrium(params, M);

        State eq_state;
        eq_state.n = eq.n_inf;
        eq_state.p = eq.p_inf;
        eq_state.ntr = Field(grid, eq.ntr_inf);
        const double E = params.eps > 0 ? entropy(st, params)
                                        : entropy_srh(st.n, st.p, params);
        const double E_inf = params.eps > 0
                                 ? entropy(eq_state, params)
                                 : entropy_srh(eq_state.n, eq_state.p, params);
        CHECK(relative_entropy(st, eq, params) ==
              doctest::Approx(E - E_inf).epsilon(1e-10));
        CHECK(ckp_bound(st, eq, params) <=
              relative_entropy(st, eq, params) + 1e-10);
    }
}

TEST_CASE("ckp hand value") {
    // single species f = 2, g = 1: 3/(2*2 + 4*1) * 1 = 3/8 below 2 ln 2 - 1
    const double bound = 3.0 / (2.0 * 2.0 + 4.0 * 1.0);
    const double entropy_term = 2.0 * kLn2 - 1.0;
    CHECK(bound == doctest::Approx(0.375));
    CHECK(bound < entropy_term);
}

TEST_CASE("l1 mass cap") {
    const auto grid = build_grid(4);
    auto params = flat_params(grid, 0.5);
    CHECK(l1_mass_cap(params, 0.0) == doctest::Approx(2.5));
    CHECK(l1_mass_cap(params, 4.0) == doctest::Approx(5.5));
}

TEST_CASE("srh production identity and hand value") {
    const auto grid = build_grid(16);
    const auto params = flat_params(grid, 0.0);
    Field n(grid, 2.0), p(grid, 1.0);
    CHECK(production_srh(n, p, params).value == doctest::Approx(0.2 * kLn2).epsilon(1e-13));

    Rng rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        Field rn(grid), rp(grid);
        for (int i = 0; i < grid.n_cells; ++i) {
            rn[i] = rng.log_uniform(1e-2, 1e2);
            rp[i] = rng.log_uniform(1e-2, 1e2);
        }
        const double d0 = production_srh(rn, rp, params).value;
        State st;
        st.n = rn;
        st.p = rp;
        st.ntr = ntr_quasi_equilibrium(rn, rp, params);
        const double d = entropy_production(st, params).value;
        CHECK(d0 == doctest::Approx(d).epsilon(1e-10));
    }
}

TEST_CASE("decay fit on synthetic exponentials") {
    std::vector<DiagnosticsRow> rows;
    for (int k = 0; k <= 200; ++k) {
        DiagnosticsRow r;
        r.t = 0.1 * k;
        r.E_rel = std::exp(-2.0 * r.t);
        rows.push_back(r);
    }
    auto fit = fit_decay_rate(rows);
    REQUIRE(fit.has_value());
    CHECK(fit->K == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(fit->r2 >= 1.0 - 1e-9);
    CHECK(fit->t_lo < fit->t_hi);

    for (auto& r : rows) r.E_rel = 5.0 * std::exp(-0.3 * r.t);
    fit = fit_decay_rate(rows);
    REQUIRE(fit.has_value());
    CHECK(fit->K == doctest::Approx(0.3).epsilon(1e-6));

    // equilibrium trajectory: window too short
    for (auto& r : rows) r.E_rel = 1e-12;
    CHECK(!fit_decay_rate(rows).has_value());
}
