#include "ddrec/equilibrium.hpp"

#include <cmath>
#include <stdexcept>

namespace ddrec {

void SimParams::validate() const {
    if (!(tau_n > 0) || !(tau_p > 0)) throw std::invalid_argument("tau_n, tau_p must be > 0");
    if (!(n0 > 0) || !(p0 > 0)) throw std::invalid_argument("n0, p0 must be > 0");
    if (eps < 0) throw std::invalid_argument("eps must be >= 0");
    if (!(eps0 > 0) && eps > 0) throw std::invalid_argument("eps0 must be > 0");
    if (eps > eps0) throw std::invalid_argument("eps must be <= eps0");
}

EquilibriumBounds equilibrium_bounds(const SimParams& params, double M) {
    const double mun = cell_average(params.potentials.mu_n);
    const double mup = cell_average(params.potentials.mu_p);
    const double q = params.n0 * params.p0 * mup / mun;
    EquilibriumBounds b;
    b.beta = (std::abs(M) + params.eps0) / mun + std::sqrt(q);
    b.alpha = q / b.beta;
    return b;
}

EquilibriumState solve_equilibrium(const SimParams& params, double M) {
    params.validate();
    const double mun = cell_average(params.potentials.mu_n);
    const double mup = cell_average(params.potentials.mu_p);
    const double n0 = params.n0, p0 = params.p0, eps = params.eps;

    auto f = [&](double x) {
        double v = x * mun - n0 * p0 * mup / x - M;
        if (eps > 0) v += eps * x / (x + n0);
        return v;
    };

    EquilibriumBounds b = equilibrium_bounds(params, M);
    double lo = b.alpha / 10.0, hi = b.beta * 10.0;
    if (!(f(lo) <= 0.0 && f(hi) >= 0.0))
        throw std::runtime_error("solve_equilibrium: bracket failure");

    // f is strictly increasing on (0, inf); bisect to relative 1e-13
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * lo; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }

    EquilibriumState eq;
    eq.n_star = 0.5 * (lo + hi);
    eq.p_star = n0 * p0 / eq.n_star;
    eq.ntr_inf = eq.n_star / (eq.n_star + n0);
    eq.M = M;
    const Grid1D& g = *params.potentials.mu_n.grid;
    eq.n_inf = Field(g);
    eq.p_inf = Field(g);
    for (int i = 0; i < g.n_cells; ++i) {
        eq.n_inf[i] = eq.n_star * params.potentials.mu_n[i];
        eq.p_inf[i] = eq.p_star * params.potentials.mu_p[i];
    }
    return eq;
}

double equilibrium_mass(const EquilibriumState& eq, const SimParams& params) {
    const double mun = cell_average(params.potentials.mu_n);
    const double mup = cell_average(params.potentials.mu_p);
    return eq.n_star * mun - eq.p_star * mup + params.eps * eq.ntr_inf;
}

} // namespace ddrec
