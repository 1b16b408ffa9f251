#include "ddrec/verify.hpp"

#include <cmath>
#include <stdexcept>

namespace ddrec {

Rng::Rng(std::uint64_t seed) {
    // splitmix64 scramble so nearby seeds give unrelated streams
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    s_ = (z ^ (z >> 31)) | 1ull;
}

double Rng::uniform() {
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    const std::uint64_t x = s_ * 0x2545f4914f6cdd1dull;
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
}

double l2_norm_sq(const Field& f) {
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += f[i] * f[i];
    return f.grid->h * s;
}

double variance_norm_sq(const Field& f) {
    const double fbar = cell_average(f);
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        const double d = f[i] - fbar;
        s += d * d;
    }
    return f.grid->h * s;
}

double gradient_norm_sq(const Field& f) {
    double s = 0.0;
    for (int e = 1; e < f.size(); ++e) {
        const double d = f[e] - f[e - 1];
        s += d * d;
    }
    return s / f.grid->h;
}

AdmissibleState sample_admissible(const SimParams& params, const Grid1D& grid,
                                  double M, double M1, std::uint64_t seed) {
    if (!(M1 > 0.0)) throw std::invalid_argument("sample_admissible: M1 must be positive");
    Rng rng(seed);
    const double delta = 1e-3;
    for (int attempt = 0; attempt < 100; ++attempt) {
        AdmissibleState adm;
        adm.M = M;
        adm.state.t = 0.0;
        adm.state.ntr.grid = &grid;
        adm.state.ntr.values.resize(grid.n_cells);
        for (int i = 0; i < grid.n_cells; ++i)
            adm.state.ntr[i] = rng.uniform(delta, 1.0 - delta);

        // feasible nbar interval given the drawn ntr: pbar in (0, M1]
        const double floor_nbar = M - params.eps * cell_average(adm.state.ntr);
        const double lo = std::max(1e-4 * M1, floor_nbar + 1e-6 * M1);
        const double hi = std::min(0.5 * M1, M1 + floor_nbar);
        if (!(hi > lo)) continue;

        adm.state.n.grid = &grid;
        adm.state.n.values.resize(grid.n_cells);
        double nsum = 0.0;
        for (int i = 0; i < grid.n_cells; ++i) {
            adm.state.n[i] = rng.log_uniform(1e-3, 1.0);
            nsum += adm.state.n[i];
        }
        const double nbar_target = rng.log_uniform(lo, hi);
        const double nscale = nbar_target / (grid.h * nsum);
        for (int i = 0; i < grid.n_cells; ++i) adm.state.n[i] *= nscale;

        const double pbar = nbar_target + params.eps * cell_average(adm.state.ntr) - M;
        if (pbar <= 0.0 || pbar > M1) continue;

        adm.state.p.grid = &grid;
        adm.state.p.values.resize(grid.n_cells);
        double psum = 0.0;
        for (int i = 0; i < grid.n_cells; ++i) {
            adm.state.p[i] = rng.log_uniform(1e-3, 1.0);
            psum += adm.state.p[i];
        }
        const double pscale = pbar / (grid.h * psum);
        for (int i = 0; i < grid.n_cells; ++i) adm.state.p[i] *= pscale;
        return adm;
    }
    throw std::runtime_error("sample_admissible: mass constraint infeasible after 100 attempts");
}

double eep_ratio(const AdmissibleState& adm, const EquilibriumState& eq,
                 const SimParams& params) {
    const double erel = relative_entropy(adm.state, eq, params);
    const double d = entropy_production(adm.state, params).value;
    if (!(d > 1e-14))
        throw std::domain_error("eep_ratio: production below tolerance");
    return erel / d;
}

CheckPair homogeneous_eep_check(double a, double b, double c, double d,
                                const SimParams& params, double M) {
    const double munbar = cell_average(params.potentials.mu_n);
    const double mupbar = cell_average(params.potentials.mu_p);
    const double res1 =
        params.n0 * munbar * a * a - params.p0 * mupbar * b * b + params.eps * c * c - M;
    const double res2 = c * c + d * d - 1.0;
    if (std::abs(res1) > 1e-10 || std::abs(res2) > 1e-10)
        throw std::invalid_argument("homogeneous_eep_check: constraint residual too large");

    const EquilibriumState eq = solve_equilibrium(params, M);
    const double nu = std::sqrt(eq.n_star / params.n0);
    const double pi = std::sqrt(eq.p_star / params.p0);
    const double nutr = std::sqrt(eq.ntr_inf);
    CheckPair out;
    out.lhs = (a - nu) * (a - nu) + (b - pi) * (b - pi) + (c - nutr) * (c - nutr);
    out.rhs = (a * d - c) * (a * d - c) + (b * c - d) * (b * c - d);
    return out;
}

QuadState quad_from_state(const AdmissibleState& adm, const SimParams& params) {
    const Grid1D* g = adm.state.n.grid;
    QuadState q;
    q.a.grid = q.b.grid = q.c.grid = q.d.grid = g;
    const int nc = g->n_cells;
    q.a.values.resize(nc);
    q.b.values.resize(nc);
    q.c.values.resize(nc);
    q.d.values.resize(nc);
    for (int i = 0; i < nc; ++i) {
        q.a[i] = std::sqrt(adm.state.n[i] / (params.n0 * params.potentials.mu_n[i]));
        q.b[i] = std::sqrt(adm.state.p[i] / (params.p0 * params.potentials.mu_p[i]));
        q.c[i] = std::sqrt(adm.state.ntr[i]);
        q.d[i] = std::sqrt(1.0 - adm.state.ntr[i]);
    }
    return q;
}

namespace {

Field cellwise(const Field& x, const Field& y, double (*op)(double, double)) {
    Field out;
    out.grid = x.grid;
    out.values.resize(x.size());
    for (int i = 0; i < x.size(); ++i) out[i] = op(x[i], y[i]);
    return out;
}

double mul(double x, double y) { return x * y; }

// h sum (x_i y_i - z_i)^2, the reaction-defect norm
double defect_norm_sq(const Field& x, const Field& y, const Field& z) {
    double s = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double d = x[i] * y[i] - z[i];
        s += d * d;
    }
    return x.grid->h * s;
}

} // namespace

CheckPair inhomogeneous_eep_check(const QuadState& q, const SimParams& params, double M) {
    const Field& mun = params.potentials.mu_n;
    const Field& mup = params.potentials.mu_p;
    const Field a2 = cellwise(q.a, q.a, mul);
    const Field b2 = cellwise(q.b, q.b, mul);
    const Field c2 = cellwise(q.c, q.c, mul);
    const Field d2 = cellwise(q.d, q.d, mul);
    const double wa2 = cell_average(cellwise(mun, a2, mul));
    const double wb2 = cell_average(cellwise(mup, b2, mul));
    const double res1 =
        params.n0 * wa2 - params.p0 * wb2 + params.eps * cell_average(c2) - M;
    const double res2 = cell_average(c2) + cell_average(d2) - 1.0;
    if (std::abs(res1) > 1e-10 || std::abs(res2) > 1e-10)
        throw std::invalid_argument("inhomogeneous_eep_check: constraint residual too large");

    const EquilibriumState eq = solve_equilibrium(params, M);
    const double nu = std::sqrt(eq.n_star / params.n0);
    const double pi = std::sqrt(eq.p_star / params.p0);
    const double nutr = std::sqrt(eq.ntr_inf);

    CheckPair out;
    const double sa = std::sqrt(cell_average(a2)) - nu;
    const double sb = std::sqrt(cell_average(b2)) - pi;
    double cterm = 0.0;
    for (int i = 0; i < q.c.size(); ++i) {
        const double d = q.c[i] - nutr;
        cterm += d * d;
    }
    out.lhs = sa * sa + sb * sb + q.c.grid->h * cterm;
    out.rhs = defect_norm_sq(q.a, q.d, q.c) + defect_norm_sq(q.b, q.c, q.d) +
              gradient_norm_sq(q.a) + gradient_norm_sq(q.b) +
              variance_norm_sq(q.a) + variance_norm_sq(q.b) +
              variance_norm_sq(q.c) + variance_norm_sq(q.d);
    return out;
}

DiffusionTransferResult indirect_diffusion_check(const QuadState& q) {
    for (int i = 0; i < q.c.size(); ++i) {
        if (std::abs(q.c[i] * q.c[i] + q.d[i] * q.d[i] - 1.0) > 1e-12)
            throw std::invalid_argument("indirect_diffusion_check: c^2 + d^2 != 1");
    }
    DiffusionTransferResult r;
    r.lhs_c = variance_norm_sq(q.c);
    r.rhs_c = 4.0 * (defect_norm_sq(q.b, q.c, q.d) + variance_norm_sq(q.b));
    r.lhs_d = variance_norm_sq(q.d);
    r.rhs_d = 4.0 * (defect_norm_sq(q.a, q.d, q.c) + variance_norm_sq(q.a));
    return r;
}

CheckPair flux_lemma_check(const Field& f, const Field& g) {
    Field ratio, sq;
    ratio.grid = sq.grid = f.grid;
    ratio.values.resize(f.size());
    sq.values.resize(f.size());
    for (int i = 0; i < f.size(); ++i) {
        if (!(g[i] > 0.0)) throw std::invalid_argument("flux_lemma_check: g must be positive");
        if (f[i] < 0.0) throw std::invalid_argument("flux_lemma_check: f must be nonnegative");
        ratio[i] = f[i] / g[i];
        sq[i] = std::sqrt(ratio[i]);
    }
    CheckPair out;
    const double mism = cell_average(f) / cell_average(g) - cell_average(ratio);
    out.lhs = mism * mism;
    out.rhs = gradient_norm_sq(sq);
    return out;
}

CheckPair logsob_ratio_check(const Field& n, const SimParams& params) {
    const Field& mun = params.potentials.mu_n;
    const double nbar = cell_average(n);
    const double mubar = cell_average(mun);
    double s = 0.0;
    for (int i = 0; i < n.size(); ++i) {
        if (!(n[i] > 0.0)) throw std::invalid_argument("logsob_ratio_check: n must be positive");
        s += n[i] * std::log((n[i] / nbar) * (mubar / mun[i]));
    }
    CheckPair out;
    out.lhs = n.grid->h * s;
    out.rhs = flux_dissipation(n, mun).value;
    return out;
}

ReactionDominationResult reaction_domination_check(const AdmissibleState& adm,
                                                   const SimParams& params) {
    const State& st = adm.state;
    for (int i = 0; i < st.n.size(); ++i) {
        if (!(st.n[i] > 0.0 && st.p[i] > 0.0 && st.ntr[i] > 0.0 && st.ntr[i] < 1.0))
            throw std::invalid_argument("reaction_domination_check: interior state required");
    }
    const Field& mun = params.potentials.mu_n;
    const Field& mup = params.potentials.mu_p;
    const Field Rn = rate_Rn(st.n, st.ntr, params);
    const Field Rp = rate_Rp(st.p, st.ntr, params);
    const double h = st.n.grid->h;

    ReactionDominationResult out;
    double ln = 0, rn = 0, lp = 0, rp = 0;
    for (int i = 0; i < st.n.size(); ++i) {
        const double xn = st.n[i] * (1.0 - st.ntr[i]) / (params.n0 * mun[i]);
        const double dn = std::sqrt(xn) - std::sqrt(st.ntr[i]);
        ln += dn * dn;
        rn -= params.tau_n * Rn[i] * std::log(xn / st.ntr[i]);

        const double xp = st.p[i] * st.ntr[i] / (params.p0 * mup[i]);
        const double dp = std::sqrt(xp) - std::sqrt(1.0 - st.ntr[i]);
        lp += dp * dp;
        rp -= params.tau_p * Rp[i] * std::log(xp / (1.0 - st.ntr[i]));
    }
    out.n_side = {h * ln, h * rn};
    out.p_side = {h * lp, h * rp};
    return out;
}

double mass_identity_check(const AdmissibleState& adm, const EquilibriumState& eq,
                           const SimParams& params) {
    const double nbar = cell_average(adm.state.n);
    const double pbar = cell_average(adm.state.p);
    const double ntrbar = cell_average(adm.state.ntr);
    const double nbar_inf = cell_average(eq.n_inf);
    const double pbar_inf = cell_average(eq.p_inf);
    return (nbar - nbar_inf) * std::log(eq.n_star / params.n0) +
           (pbar - pbar_inf) * std::log(eq.p_star / params.p0) -
           params.eps * (ntrbar - eq.ntr_inf) *
               std::log((1.0 - eq.ntr_inf) / eq.ntr_inf);
}

} // namespace ddrec
