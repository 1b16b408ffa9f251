#include "ddrec/meshfield.hpp"

#include <algorithm>
#include <cmath>

namespace ddrec {

Grid1D build_grid(int n_cells) {
    if (n_cells < 2) throw std::invalid_argument("build_grid: n_cells must be >= 2");
    Grid1D g;
    g.n_cells = n_cells;
    g.h = 1.0 / n_cells;
    g.centers.resize(n_cells);
    for (int i = 0; i < n_cells; ++i) g.centers[i] = (i + 0.5) * g.h;
    return g;
}

bool all_finite(const Field& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

double cell_average(const Field& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return f.grid->h * s;
}

double l1_distance(const Field& f, const Field& g) {
    if (f.grid != g.grid) throw std::invalid_argument("l1_distance: grid mismatch");
    double s = 0.0;
    for (int i = 0; i < f.size(); ++i) s += std::abs(f[i] - g[i]);
    return f.grid->h * s;
}

double sup_norm(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double min_value(const Field& f) {
    return *std::min_element(f.values.begin(), f.values.end());
}

double max_value(const Field& f) {
    return *std::max_element(f.values.begin(), f.values.end());
}

Field discrete_flux_divergence(const Field& f, const Field& mu) {
    const int n = f.size();
    const double h = f.grid->h;
    for (int i = 0; i < n; ++i)
        if (!(mu[i] > 0.0))
            throw std::invalid_argument("discrete_flux_divergence: mu must be positive");

    Field div(*f.grid);
    // interior edge fluxes; boundary fluxes are zero
    std::vector<double> flux(n + 1, 0.0);
    for (int e = 1; e < n; ++e) {
        const double mu_e = std::sqrt(mu[e - 1] * mu[e]);
        const double u_l = f[e - 1] / mu[e - 1];
        const double u_r = f[e] / mu[e];
        flux[e] = mu_e * (u_r - u_l) / h;
    }
    for (int i = 0; i < n; ++i) div[i] = (flux[i + 1] - flux[i]) / h;
    return div;
}

PotentialFamily potential_family_from_string(const std::string& name) {
    if (name == "constant") return PotentialFamily::Constant;
    if (name == "cosine_well") return PotentialFamily::CosineWell;
    if (name == "double_well") return PotentialFamily::DoubleWell;
    if (name == "piecewise_linear") return PotentialFamily::PiecewiseLinear;
    throw std::invalid_argument("unknown potential family: " + name);
}

std::string to_string(PotentialFamily fam) {
    switch (fam) {
        case PotentialFamily::Constant: return "constant";
        case PotentialFamily::CosineWell: return "cosine_well";
        case PotentialFamily::DoubleWell: return "double_well";
        case PotentialFamily::PiecewiseLinear: return "piecewise_linear";
    }
    return "?";
}

double potential_value(PotentialFamily fam, double amplitude, double x) {
    constexpr double pi = 3.14159265358979323846;
    switch (fam) {
        case PotentialFamily::Constant:
            return amplitude;
        case PotentialFamily::CosineWell:
            // single well at x = 1/2, maximum at the boundary
            return 0.5 * amplitude * (1.0 + std::cos(2.0 * pi * x));
        case PotentialFamily::DoubleWell:
            // wells at x = 1/4 and 3/4
            return 0.5 * amplitude * (1.0 + std::cos(4.0 * pi * x));
        case PotentialFamily::PiecewiseLinear:
            return amplitude * std::abs(2.0 * x - 1.0);
    }
    return 0.0;
}

PotentialPair make_potentials(const Grid1D& g, PotentialFamily fam,
                              double amp_n, double amp_p) {
    PotentialPair pp;
    pp.V_n = Field::from_fn(g, [&](double x) { return potential_value(fam, amp_n, x); });
    pp.V_p = Field::from_fn(g, [&](double x) { return potential_value(fam, amp_p, x); });
    pp.mu_n = Field(g);
    pp.mu_p = Field(g);
    for (int i = 0; i < g.n_cells; ++i) {
        pp.mu_n[i] = std::exp(-pp.V_n[i]);
        pp.mu_p[i] = std::exp(-pp.V_p[i]);
    }
    pp.V = std::max(sup_norm(pp.V_n), sup_norm(pp.V_p));
    return pp;
}

} // namespace ddrec
