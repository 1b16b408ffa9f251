// Stationary states: the unique constants (n*, p*, n_tr_inf) selected by
// n* p* = n0 p0 and the conserved charge, with explicit uniform bracket bounds.
#pragma once

#include "ddrec/meshfield.hpp"

namespace ddrec {

struct SimParams {
    double tau_n = 1.0;
    double tau_p = 1.0;
    double n0 = 1.0;
    double p0 = 1.0;
    double eps = 1.0;   // 0 selects the quasi-stationary branch
    double eps0 = 1.0;  // sweep cap, eps <= eps0
    PotentialPair potentials;

    void validate() const;
};

struct EquilibriumState {
    double n_star = 0;
    double p_star = 0;
    double ntr_inf = 0;  // meaningful also for eps = 0 (limit value)
    Field n_inf;         // n* e^{-V_n}
    Field p_inf;         // p* e^{-V_p}
    double M = 0;
};

// Explicit bracket for n*: beta = (|M| + eps0)/mu_n_bar + sqrt(n0 p0 mu_p_bar / mu_n_bar),
// alpha = (n0 p0 mu_p_bar / mu_n_bar) / beta. Valid uniformly in eps in [0, eps0].
struct EquilibriumBounds {
    double alpha = 0;
    double beta = 0;
};
EquilibriumBounds equilibrium_bounds(const SimParams& params, double M);

// Bisection for the root of n* mu_n_bar - n0 p0 mu_p_bar / n* + eps n*/(n* + n0) = M
// (trap term dropped when eps = 0). Relative tolerance 1e-13 on n*.
EquilibriumState solve_equilibrium(const SimParams& params, double M);

// n* mu_n_bar - p* mu_p_bar + eps * ntr_inf; round-trips the input M.
double equilibrium_mass(const EquilibriumState& eq, const SimParams& params);

} // namespace ddrec
