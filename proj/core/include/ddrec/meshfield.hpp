// Uniform 1D mesh on [0,1], cell-averaged fields, potentials, discrete
// averages/norms and the conservative two-point flux operator.
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddrec {

struct Grid1D {
    int n_cells = 0;
    double h = 0.0;
    std::vector<double> centers;
};

// n_cells >= 2; domain is [0,1] so h = 1/n_cells.
Grid1D build_grid(int n_cells);

struct Field {
    const Grid1D* grid = nullptr;
    std::vector<double> values;

    Field() = default;
    Field(const Grid1D& g, double fill = 0.0) : grid(&g), values(g.n_cells, fill) {}

    int size() const { return static_cast<int>(values.size()); }
    double& operator[](int i) { return values[i]; }
    double operator[](int i) const { return values[i]; }

    template <class Fun>
    static Field from_fn(const Grid1D& g, Fun f) {
        Field out(g);
        for (int i = 0; i < g.n_cells; ++i) out.values[i] = f(g.centers[i]);
        return out;
    }
};

bool all_finite(const Field& f);

// h * sum(f_i); equals the integral of the piecewise-constant reconstruction.
double cell_average(const Field& f);

// h * sum |f_i - g_i|
double l1_distance(const Field& f, const Field& g);

double sup_norm(const Field& f);
double min_value(const Field& f);
double max_value(const Field& f);

// Cellwise divergence of the two-point flux F_{i+1/2} =
// mu_{i+1/2} ((f/mu)_{i+1} - (f/mu)_i)/h with zero flux at both boundaries.
// Edge weight mu_{i+1/2} is the geometric mean sqrt(mu_i mu_{i+1}); conserves
// sum(f) exactly and vanishes whenever f/mu is cellwise constant.
Field discrete_flux_divergence(const Field& f, const Field& mu);

// Named potential families evaluated at cell centers. All amplitudes >= 0
// give confining shapes (maximum toward the boundary or flat).
enum class PotentialFamily { Constant, CosineWell, DoubleWell, PiecewiseLinear };

PotentialFamily potential_family_from_string(const std::string& name);
std::string to_string(PotentialFamily fam);
double potential_value(PotentialFamily fam, double amplitude, double x);

struct PotentialPair {
    Field V_n;
    Field V_p;
    Field mu_n;   // e^{-V_n}
    Field mu_p;   // e^{-V_p}
    double V = 0; // max(sup|V_n|, sup|V_p|)
};

PotentialPair make_potentials(const Grid1D& g, PotentialFamily fam,
                              double amp_n, double amp_p);

} // namespace ddrec
