#include "ddrec/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ddrec {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// n ln(n/ref) - (n - ref) with the 0 ln 0 convention; >= 0 for ref > 0
double boltzmann_bracket(double n, double ref) {
    if (n <= 0.0) return ref;
    return n * std::log(n / ref) - (n - ref);
}

double clamped_log(double arg, bool& singular) {
    if (!(arg >= 1e-300)) {
        singular = true;
        arg = 1e-300;
    } else if (arg > 1e300) {
        singular = true;
        arg = 1e300;
    }
    return std::log(arg);
}

// sum over edges of mu_e (u_{i+1} - u_i)^2 / (h u_mean) with u = f/mu and
// u_mean the logarithmic mean; discrete form of the |J|^2/f flux integral.
double flux_production(const Field& f, const Field& mu, bool& singular) {
    const int n = f.size();
    const double h = f.grid->h;
    double s = 0.0;
    for (int e = 1; e < n; ++e) {
        const double ul = f[e - 1] / mu[e - 1];
        const double ur = f[e] / mu[e];
        const double du = ur - ul;
        if (du == 0.0) continue;
        double umean;
        if (ul > 0.0 && ur > 0.0) {
            umean = du / (std::log(ur) - std::log(ul));
        } else {
            // an endpoint sits at zero density; the integrand is unbounded
            singular = true;
            umean = std::max(0.5 * (ul + ur), 1e-300);
        }
        const double mu_e = std::sqrt(mu[e - 1] * mu[e]);
        s += mu_e * du * du / (h * umean);
    }
    return s;
}

} // namespace

double trap_potential(double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("trap_potential: x must be in [0,1]");
    return xlogx(x) + xlogx(1.0 - x) + std::log(2.0);
}

double entropy(const State& state, const SimParams& params) {
    const Field& mun = params.potentials.mu_n;
    const Field& mup = params.potentials.mu_p;
    double s = 0.0;
    for (int i = 0; i < state.n.size(); ++i) {
        s += boltzmann_bracket(state.n[i], params.n0 * mun[i]);
        s += boltzmann_bracket(state.p[i], params.p0 * mup[i]);
        if (params.eps > 0) s += params.eps * trap_potential(state.ntr[i]);
    }
    return state.n.grid->h * s;
}

ProductionResult entropy_production(const State& state, const SimParams& params) {
    const Field& mun = params.potentials.mu_n;
    const Field& mup = params.potentials.mu_p;
    ProductionResult res;
    res.value += flux_production(state.n, mun, res.singular);
    res.value += flux_production(state.p, mup, res.singular);

    const Field Rn = rate_Rn(state.n, state.ntr, params);
    const Field Rp = rate_Rp(state.p, state.ntr, params);
    const double h = state.n.grid->h;
    double reac = 0.0;
    for (int i = 0; i < state.n.size(); ++i) {
        const double ntr = state.ntr[i];
        const double argn = state.n[i] * (1.0 - ntr) / (params.n0 * mun[i] * ntr);
        const double argp = state.p[i] * ntr / (params.p0 * mup[i] * (1.0 - ntr));
        reac -= Rn[i] * clamped_log(argn, res.singular);
        reac -= Rp[i] * clamped_log(argp, res.singular);
    }
    res.value += h * reac;
    return res;
}

ProductionResult flux_dissipation(const Field& f, const Field& mu) {
    ProductionResult res;
    res.value = flux_production(f, mu, res.singular);
    return res;
}

double entropy_srh(const Field& n, const Field& p, const SimParams& params) {
    double s = 0.0;
    for (int i = 0; i < n.size(); ++i) {
        s += boltzmann_bracket(n[i], params.n0 * params.potentials.mu_n[i]);
        s += boltzmann_bracket(p[i], params.p0 * params.potentials.mu_p[i]);
    }
    return n.grid->h * s;
}

ProductionResult production_srh(const Field& n, const Field& p, const SimParams& params) {
    const Field& mun = params.potentials.mu_n;
    const Field& mup = params.potentials.mu_p;
    ProductionResult res;
    res.value += flux_production(n, mun, res.singular);
    res.value += flux_production(p, mup, res.singular);

    const Field R = rate_srh(n, p, params);
    const double h = n.grid->h;
    double reac = 0.0;
    for (int i = 0; i < n.size(); ++i) {
        const double arg = n[i] * p[i] / (params.n0 * mun[i] * params.p0 * mup[i]);
        reac -= R[i] * clamped_log(arg, res.singular);
    }
    res.value += h * reac;
    return res;
}

double relative_entropy(const State& state, const EquilibriumState& eq,
                        const SimParams& params) {
    double s = 0.0;
    const double lam = std::log(eq.ntr_inf / (1.0 - eq.ntr_inf));
    const double phi_inf = trap_potential(eq.ntr_inf);
    for (int i = 0; i < state.n.size(); ++i) {
        s += boltzmann_bracket(state.n[i], eq.n_inf[i]);
        s += boltzmann_bracket(state.p[i], eq.p_inf[i]);
        if (params.eps > 0) {
            const double ntr = state.ntr[i];
            s += params.eps * (trap_potential(ntr) - phi_inf - lam * (ntr - eq.ntr_inf));
        }
    }
    return state.n.grid->h * s;
}

double ckp_bound(const State& state, const EquilibriumState& eq,
                 const SimParams& params) {
    const double nbar = cell_average(state.n);
    const double pbar = cell_average(state.p);
    const double nibar = cell_average(eq.n_inf);
    const double pibar = cell_average(eq.p_inf);
    const double dn = l1_distance(state.n, eq.n_inf);
    const double dp = l1_distance(state.p, eq.p_inf);
    double b = 3.0 / (2.0 * nbar + 4.0 * nibar) * dn * dn +
               3.0 / (2.0 * pbar + 4.0 * pibar) * dp * dp;
    if (params.eps > 0) {
        double dtr = 0.0;
        for (int i = 0; i < state.ntr.size(); ++i)
            dtr += std::abs(state.ntr[i] - eq.ntr_inf);
        dtr *= state.ntr.grid->h;
        b += 2.0 * params.eps * dtr * dtr;
    }
    return b;
}

double l1_mass_cap(const SimParams& params, double E_initial) {
    const double mn = params.n0 * cell_average(params.potentials.mu_n);
    const double mp = params.p0 * cell_average(params.potentials.mu_p);
    return 2.5 * std::max(mn, mp) + 0.75 * E_initial;
}

std::optional<DecayFit> fit_decay_rate(const std::vector<DiagnosticsRow>& rows) {
    if (rows.size() < 2) return std::nullopt;
    const double upper = rows.front().E_rel / 10.0;
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 1; i < rows.size(); ++i) {
        const double e = rows[i].E_rel;
        if (e >= 1e-10 && e <= upper) pts.emplace_back(rows[i].t, std::log(e));
    }
    if (pts.size() < 10) return std::nullopt;

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double m = static_cast<double>(pts.size());
    for (auto [x, y] : pts) {
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    }
    const double varx = sxx - sx * sx / m;
    const double vary = syy - sy * sy / m;
    const double cov = sxy - sx * sy / m;
    DecayFit fit;
    fit.K = -cov / varx;
    fit.r2 = vary > 0 ? (cov * cov) / (varx * vary) : 1.0;
    fit.t_lo = pts.front().first;
    fit.t_hi = pts.back().first;
    fit.points = static_cast<int>(pts.size());
    return fit;
}

DiagnosticsRow make_diagnostics_row(const State& state, const EquilibriumState& eq,
                                    const SimParams& params) {
    DiagnosticsRow row;
    row.t = state.t;
    row.nbar = cell_average(state.n);
    row.pbar = cell_average(state.p);
    row.mass = state_mass(state, params);
    row.maxn = max_value(state.n);
    row.maxp = max_value(state.p);

    const Field ntr_diag = (params.eps > 0)
                               ? state.ntr
                               : ntr_quasi_equilibrium(state.n, state.p, params);
    row.ntrbar = cell_average(ntr_diag);

    if (params.eps > 0) {
        row.E = entropy(state, params);
        const ProductionResult d = entropy_production(state, params);
        row.D = d.value;
        row.singular = d.singular;
    } else {
        row.E = entropy_srh(state.n, state.p, params);
        const ProductionResult d = production_srh(state.n, state.p, params);
        row.D = d.value;
        row.singular = d.singular;
    }
    row.E_rel = relative_entropy(state, eq, params);
    row.l1_n = l1_distance(state.n, eq.n_inf);
    row.l1_p = l1_distance(state.p, eq.p_inf);
    double dtr = 0.0;
    for (int i = 0; i < ntr_diag.size(); ++i) dtr += std::abs(ntr_diag[i] - eq.ntr_inf);
    row.l1_ntr = ntr_diag.grid->h * dtr;
    row.ckp = ckp_bound(state, eq, params);
    return row;
}

} // namespace ddrec
