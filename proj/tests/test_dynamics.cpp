#include <doctest.h>

#include <cmath>

#include "ddrec/dynamics.hpp"
#include "ddrec/verify.hpp"

using namespace ddrec;

namespace {

SimParams make_flat(const Grid1D& grid, double eps, double tau_n = 1, double tau_p = 1,
                    double n0 = 1, double p0 = 1) {
    SimParams p;
    p.tau_n = tau_n;
    p.tau_p = tau_p;
    p.n0 = n0;
    p.p0 = p0;
    p.eps = eps;
    p.eps0 = std::max(eps, 1.0);
    p.potentials = make_potentials(grid, PotentialFamily::Constant, 0.0, 0.0);
    return p;
}

State random_state(const Grid1D& grid, Rng& rng) {
    State st;
    st.n.grid = st.p.grid = st.ntr.grid = &grid;
    st.n.values.resize(grid.n_cells);
    st.p.values.resize(grid.n_cells);
    st.ntr.values.resize(grid.n_cells);
    for (int i = 0; i < grid.n_cells; ++i) {
        st.n[i] = rng.log_uniform(1e-2, 5.0);
        st.p[i] = rng.log_uniform(1e-2, 5.0);
        st.ntr[i] = rng.uniform(0.01, 0.99);
    }
    return st;
}

double sup_diff(const Field& a, const Field& b) {
    double m = 0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("rate hand values") {
    const auto grid = build_grid(4);
    const auto params = make_flat(grid, 1);
    Field n(grid, 2.0), p(grid, 3.0), half(grid, 0.5), one(grid, 1.0), zero(grid, 0.0);

    CHECK(rate_Rn(Field(grid, 1.0), half, params)[0] == doctest::Approx(0.0));
    CHECK(rate_Rn(n, half, params)[0] == doctest::Approx(-0.5));
    CHECK(rate_Rn(n, one, params)[0] == doctest::Approx(1.0));
    CHECK(rate_Rp(Field(grid, 1.0), half, params)[0] == doctest::Approx(0.0));
    CHECK(rate_Rp(p, half, params)[0] == doctest::Approx(-1.0));
    CHECK(rate_Rp(p, zero, params)[0] == doctest::Approx(1.0));
}

TEST_CASE("quasi-equilibrium trap level") {
    const auto grid = build_grid(8);
    auto params = make_flat(grid, 0);
    Field one(grid, 1.0);
    CHECK(ntr_quasi_equilibrium(one, one, params)[0] == doctest::Approx(0.5));

    params.tau_n = 2;
    params.tau_p = 1;
    Field zero(grid, 0.0);
    CHECK(ntr_quasi_equilibrium(zero, zero, params)[0] == doctest::Approx(2.0 / 3.0));

    // defining relation R_n = R_p, and the SRH rate equals both
    Rng rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        auto p2 = make_flat(grid, 0, rng.log_uniform(0.2, 5.0), rng.log_uniform(0.2, 5.0),
                            rng.log_uniform(0.2, 5.0), rng.log_uniform(0.2, 5.0));
        Field n(grid), p(grid);
        for (int i = 0; i < grid.n_cells; ++i) {
            n[i] = rng.log_uniform(1e-3, 1e2);
            p[i] = rng.log_uniform(1e-3, 1e2);
        }
        const Field ntr = ntr_quasi_equilibrium(n, p, p2);
        const Field Rn = rate_Rn(n, ntr, p2);
        const Field Rp = rate_Rp(p, ntr, p2);
        const Field R = rate_srh(n, p, p2);
        for (int i = 0; i < grid.n_cells; ++i) {
            CHECK(ntr[i] > 0);
            CHECK(ntr[i] < 1);
            CHECK(std::abs(Rn[i] - Rp[i]) < 1e-12 * (1 + std::abs(Rn[i])));
            CHECK(std::abs(R[i] - Rn[i]) < 1e-12 * (1 + std::abs(R[i])));
        }
    }
}

TEST_CASE("srh rate hand values") {
    const auto grid = build_grid(4);
    const auto params = make_flat(grid, 0);
    Field one(grid, 1.0), zero(grid, 0.0);
    CHECK(rate_srh(one, one, params)[0] == doctest::Approx(0.0));
    CHECK(rate_srh(zero, zero, params)[0] == doctest::Approx(0.5));
}

TEST_CASE("trap implicit update: frozen single-cell oracle") {
    // n = p = 1, ntr = 0.2, tau = 1, eps = 1, dt = 0.1 -> exact affine update 2/7
    const auto grid = build_grid(2);
    const auto params = make_flat(grid, 1);
    Field n(grid, 1.0), p(grid, 1.0), ntr(grid, 0.2);
    const Field out = trap_update_implicit(ntr, n, p, params, 0.1);
    CHECK(out[0] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("step conserves mass and preserves the box") {
    const auto grid = build_grid(50);
    Rng rng(7);
    StepperConfig cfg;
    cfg.dt = 1e-2;
    for (double eps : {1.0, 0.1, 0.01}) {
        SimParams params = make_flat(grid, eps, 1.0, 2.0);
        params.potentials = make_potentials(grid, PotentialFamily::CosineWell, 1.0, 0.5);
        State st = random_state(grid, rng);
        const double m0 = state_mass(st, params);
        for (int k = 0; k < 50; ++k) {
            st = step(st, params, cfg);
            CHECK(std::abs(state_mass(st, params) - m0) < 1e-11);
            CHECK(min_value(st.n) >= 0.0);
            CHECK(min_value(st.p) >= 0.0);
            CHECK(min_value(st.ntr) >= 0.0);
            CHECK(max_value(st.ntr) <= 1.0);
        }
    }
}

TEST_CASE("step_srh conserves nbar - pbar and nonnegativity") {
    const auto grid = build_grid(50);
    Rng rng(8);
    StepperConfig cfg;
    cfg.dt = 1e-2;
    SimParams params = make_flat(grid, 0, 2.0, 1.0, 1.5, 0.5);
    params.potentials = make_potentials(grid, PotentialFamily::DoubleWell, 1.0, 1.0);
    State st = random_state(grid, rng);
    const double m0 = state_mass(st, params);
    for (int k = 0; k < 100; ++k) {
        st = step_srh(st, params, cfg);
        CHECK(std::abs(state_mass(st, params) - m0) < 1e-11);
        CHECK(min_value(st.n) >= 0.0);
        CHECK(min_value(st.p) >= 0.0);
    }
}

TEST_CASE("equilibrium is a discrete fixed point") {
    const auto grid = build_grid(64);
    StepperConfig cfg;
    for (double eps : {0.0, 0.1, 1.0}) {
        SimParams params = make_flat(grid, eps, 1.0, 2.0, 1.0, 2.0);
        params.potentials = make_potentials(grid, PotentialFamily::CosineWell, 1.0, 1.0);
        const auto eq = solve_equilibrium(params, 0.3);
        State st;
        st.n = eq.n_inf;
        st.p = eq.p_inf;
        st.ntr = Field(grid, eq.ntr_inf);
        for (int k = 0; k < 10; ++k)
            st = eps > 0 ? step(st, params, cfg) : step_srh(st, params, cfg);
        CHECK(sup_diff(st.n, eq.n_inf) < 1e-12);
        CHECK(sup_diff(st.p, eq.p_inf) < 1e-12);
        if (eps > 0) {
            Field flat(grid, eq.ntr_inf);
            CHECK(sup_diff(st.ntr, flat) < 1e-12);
        }
    }
}

TEST_CASE("srh homogeneous trajectory matches an RK4 ODE oracle") {
    // flat potential + uniform data: the PDE collapses to two scalar ODEs
    const auto grid = build_grid(16);
    const auto params = make_flat(grid, 0, 1.0, 2.0, 1.0, 1.5);
    StepperConfig cfg;
    cfg.dt = 1e-3;

    double n = 2.0, p = 0.5;
    const auto rhs = [&](double nn, double pp, double& dn, double& dp) {
        const double R = (1.0 - nn * pp / (params.n0 * params.p0)) /
                         (params.tau_n * (1.0 + pp / params.p0) +
                          params.tau_p * (1.0 + nn / params.n0));
        dn = R;
        dp = R;
    };
    const double t_end = 1.0;
    const int n_sub = 100;  // RK4 at dt/100
    const double hh = cfg.dt / n_sub;
    State st;
    st.n = Field(grid, 2.0);
    st.p = Field(grid, 0.5);
    st.ntr = Field(grid, 0.5);
    const int steps = static_cast<int>(std::round(t_end / cfg.dt));
    for (int k = 0; k < steps; ++k) {
        st = step_srh(st, params, cfg);
        for (int s = 0; s < n_sub; ++s) {
            double k1n, k1p, k2n, k2p, k3n, k3p, k4n, k4p;
            rhs(n, p, k1n, k1p);
            rhs(n + 0.5 * hh * k1n, p + 0.5 * hh * k1p, k2n, k2p);
            rhs(n + 0.5 * hh * k2n, p + 0.5 * hh * k2p, k3n, k3p);
            rhs(n + hh * k3n, p + hh * k3p, k4n, k4p);
            n += hh / 6.0 * (k1n + 2 * k2n + 2 * k3n + k4n);
            p += hh / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
        }
    }
    // backward Euler is first order: O(dt) agreement
    CHECK(std::abs(st.n[0] - n) < 5 * cfg.dt);
    CHECK(std::abs(st.p[0] - p) < 5 * cfg.dt);
    CHECK(std::abs(st.n[0] - n) > 0);  // not bit-identical, genuinely different schemes
}

TEST_CASE("simulate observer cadence") {
    const auto grid = build_grid(10);
    const auto params = make_flat(grid, 0.5);
    State st;
    st.n = Field(grid, 1.0);
    st.p = Field(grid, 1.0);
    st.ntr = Field(grid, 0.5);

    StepperConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 0.0;
    int calls = 0;
    auto traj = simulate(st, params, cfg, [&](const State&, int) { ++calls; });
    CHECK(calls == 0);
    CHECK(traj.steps_taken == 0);

    cfg.t_end = 1.0;
    cfg.output_every = 3;
    calls = 0;
    std::vector<int> indices;
    traj = simulate(st, params, cfg, [&](const State&, int k) {
        ++calls;
        indices.push_back(k);
    });
    CHECK(traj.steps_taken == 10);
    CHECK(indices.front() == 0);
    CHECK(indices.back() == 10);
    CHECK(calls == 5);  // steps 0, 3, 6, 9, 10
}

TEST_CASE("dt refinement converges with order >= 0.9") {
    const auto grid = build_grid(32);
    SimParams params = make_flat(grid, 0.1);
    params.potentials = make_potentials(grid, PotentialFamily::CosineWell, 1.0, 0.5);
    Rng rng(99);
    const State init = random_state(grid, rng);

    const auto run_to = [&](double dt) {
        StepperConfig cfg;
        cfg.dt = dt;
        cfg.t_end = 0.5;
        return simulate(init, params, cfg).final_state;
    };
    const State ref = run_to(1e-3 / 16.0);
    double prev_err = -1;
    std::vector<double> errs;
    for (double dt : {4e-3, 2e-3, 1e-3}) {
        const State sol = run_to(dt);
        errs.push_back(l1_distance(sol.n, ref.n) + l1_distance(sol.p, ref.p));
    }
    const double order01 = std::log2(errs[0] / errs[1]);
    const double order12 = std::log2(errs[1] / errs[2]);
    CHECK(order01 >= 0.9);
    CHECK(order12 >= 0.9);
    (void)prev_err;
}
