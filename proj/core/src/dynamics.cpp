#include "ddrec/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace ddrec {

namespace {

// Solve (I - dt*L_mu + dt*diag(c)) x = rhs by the Thomas algorithm, where
// L_mu is the no-flux two-point flux divergence with edge weights
// sqrt(mu_i mu_{i+1}). The matrix is an M-matrix for c >= 0, so x >= 0
// whenever rhs >= 0.
Field implicit_diffusion_solve(const Field& rhs, const Field& mu,
                               const Field& c, double dt) {
    const int n = rhs.size();
    const double h = rhs.grid->h;
    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0);

    for (int i = 0; i < n; ++i) diag[i] = 1.0 + dt * c[i];
    for (int e = 1; e < n; ++e) {
        const double w = dt * std::sqrt(mu[e - 1] * mu[e]) / (h * h);
        diag[e - 1] += w / mu[e - 1];
        diag[e] += w / mu[e];
        sup[e - 1] = -w / mu[e];
        sub[e] = -w / mu[e - 1];
    }

    std::vector<double> cp(n, 0.0), dp(n, 0.0);
    cp[0] = sup[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (int i = 1; i < n; ++i) {
        const double m = diag[i] - sub[i] * cp[i - 1];
        cp[i] = sup[i] / m;
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / m;
    }
    Field x(*rhs.grid);
    x[n - 1] = dp[n - 1];
    for (int i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
}

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void check_finite(const State& s, const char* where) {
    if (!all_finite(s.n) || !all_finite(s.p) ||
        (s.ntr.size() > 0 && !all_finite(s.ntr)))
        throw std::runtime_error(std::string("solver breakdown (non-finite values) in ") + where);
}

} // namespace

Field rate_Rn(const Field& n, const Field& ntr, const SimParams& params) {
    Field r(*n.grid);
    for (int i = 0; i < n.size(); ++i) {
        const double mun = params.potentials.mu_n[i];
        r[i] = (ntr[i] - n[i] * (1.0 - ntr[i]) / (params.n0 * mun)) / params.tau_n;
    }
    return r;
}

Field rate_Rp(const Field& p, const Field& ntr, const SimParams& params) {
    Field r(*p.grid);
    for (int i = 0; i < p.size(); ++i) {
        const double mup = params.potentials.mu_p[i];
        r[i] = (1.0 - ntr[i] - p[i] * ntr[i] / (params.p0 * mup)) / params.tau_p;
    }
    return r;
}

Field ntr_quasi_equilibrium(const Field& n, const Field& p, const SimParams& params) {
    Field r(*n.grid);
    for (int i = 0; i < n.size(); ++i) {
        const double nn = n[i] / (params.n0 * params.potentials.mu_n[i]);
        const double pp = p[i] / (params.p0 * params.potentials.mu_p[i]);
        r[i] = (params.tau_n + params.tau_p * nn) /
               (params.tau_n + params.tau_p + params.tau_n * pp + params.tau_p * nn);
    }
    return r;
}

Field rate_srh(const Field& n, const Field& p, const SimParams& params) {
    Field r(*n.grid);
    for (int i = 0; i < n.size(); ++i) {
        const double nn = n[i] / (params.n0 * params.potentials.mu_n[i]);
        const double pp = p[i] / (params.p0 * params.potentials.mu_p[i]);
        r[i] = (1.0 - nn * pp) /
               (params.tau_n * (1.0 + pp) + params.tau_p * (1.0 + nn));
    }
    return r;
}

Field trap_update_implicit(const Field& ntr, const Field& n, const Field& p,
                           const SimParams& params, double dt) {
    Field out(*ntr.grid);
    for (int i = 0; i < ntr.size(); ++i) {
        const double nn = n[i] / (params.n0 * params.potentials.mu_n[i]);
        const double pp = p[i] / (params.p0 * params.potentials.mu_p[i]);
        // R_p - R_n = A + B ntr, B <= 0
        const double A = 1.0 / params.tau_p + nn / params.tau_n;
        const double negB = (1.0 + pp) / params.tau_p + (1.0 + nn) / params.tau_n;
        out[i] = (params.eps * ntr[i] + dt * A) / (params.eps + dt * negB);
    }
    return out;
}

State step(const State& state, const SimParams& params, const StepperConfig& cfg) {
    if (!(params.eps > 0)) throw std::invalid_argument("step: requires eps > 0");
    const double dt = cfg.dt;
    const Grid1D& g = *state.n.grid;
    const Field& mun = params.potentials.mu_n;
    const Field& mup = params.potentials.mu_p;

    Field n_cur = state.n, p_cur = state.p, ntr_new = state.ntr;
    constexpr int kMaxSweeps = 200;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        ntr_new = trap_update_implicit(state.ntr, n_cur, p_cur, params, dt);

        Field cn(g), sn(g), cp(g), sp(g);
        for (int i = 0; i < g.n_cells; ++i) {
            cn[i] = (1.0 - ntr_new[i]) / (params.tau_n * params.n0 * mun[i]);
            sn[i] = state.n[i] + dt * ntr_new[i] / params.tau_n;
            cp[i] = ntr_new[i] / (params.tau_p * params.p0 * mup[i]);
            sp[i] = state.p[i] + dt * (1.0 - ntr_new[i]) / params.tau_p;
        }
        Field n_next = implicit_diffusion_solve(sn, mun, cn, dt);
        Field p_next = implicit_diffusion_solve(sp, mup, cp, dt);

        const double delta = std::max(max_abs_diff(n_next, n_cur),
                                      max_abs_diff(p_next, p_cur));
        n_cur = std::move(n_next);
        p_cur = std::move(p_next);
        if (delta < cfg.linear_tol) break;
    }

    State out{state.t + dt, std::move(n_cur), std::move(p_cur), std::move(ntr_new)};
    check_finite(out, "step");
    return out;
}

State step_srh(const State& state, const SimParams& params, const StepperConfig& cfg) {
    if (params.eps != 0) throw std::invalid_argument("step_srh: requires eps = 0");
    const double dt = cfg.dt;
    const Grid1D& g = *state.n.grid;
    const Field& mun = params.potentials.mu_n;
    const Field& mup = params.potentials.mu_p;

    Field n_cur = state.n, p_cur = state.p;
    constexpr int kMaxSweeps = 200;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        Field cn(g), sn(g), cp(g), sp(g);
        for (int i = 0; i < g.n_cells; ++i) {
            const double nref = params.n0 * mun[i];
            const double pref = params.p0 * mup[i];
            const double den = params.tau_n * (1.0 + p_cur[i] / pref) +
                               params.tau_p * (1.0 + n_cur[i] / nref);
            // R = 1/den - n p / (nref pref den); own factor implicit
            cn[i] = p_cur[i] / (nref * pref * den);
            sn[i] = state.n[i] + dt / den;
            cp[i] = n_cur[i] / (nref * pref * den);
            sp[i] = state.p[i] + dt / den;
        }
        Field n_next = implicit_diffusion_solve(sn, mun, cn, dt);
        Field p_next = implicit_diffusion_solve(sp, mup, cp, dt);

        const double delta = std::max(max_abs_diff(n_next, n_cur),
                                      max_abs_diff(p_next, p_cur));
        n_cur = std::move(n_next);
        p_cur = std::move(p_next);
        if (delta < cfg.linear_tol) break;
    }

    State out{state.t + dt, std::move(n_cur), std::move(p_cur), state.ntr};
    check_finite(out, "step_srh");
    return out;
}

double state_mass(const State& state, const SimParams& params) {
    double m = cell_average(state.n) - cell_average(state.p);
    if (params.eps > 0) m += params.eps * cell_average(state.ntr);
    return m;
}

Trajectory simulate(const State& initial, const SimParams& params,
                    const StepperConfig& cfg, const StepObserver& observe) {
    const long n_steps = std::lround(cfg.t_end / cfg.dt);
    Trajectory traj;
    traj.final_state = initial;
    if (n_steps <= 0) return traj;

    if (observe) observe(traj.final_state, 0);
    for (long k = 1; k <= n_steps; ++k) {
        traj.final_state = (params.eps > 0)
                               ? step(traj.final_state, params, cfg)
                               : step_srh(traj.final_state, params, cfg);
        traj.steps_taken = static_cast<int>(k);
        if (observe && (k % cfg.output_every == 0 || k == n_steps))
            observe(traj.final_state, static_cast<int>(k));
    }
    return traj;
}

} // namespace ddrec
