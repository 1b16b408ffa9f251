// Time integration of the PDE-ODE system (eps > 0) and of its
// quasi-stationary limit (eps = 0), plus the reaction-rate evaluations.
#pragma once

#include <functional>
#include <vector>

#include "ddrec/equilibrium.hpp"
#include "ddrec/meshfield.hpp"

namespace ddrec {

struct State {
    double t = 0.0;
    Field n;
    Field p;
    Field ntr;  // ignored when eps = 0
};

struct StepperConfig {
    double dt = 1e-3;
    double t_end = 20.0;
    int output_every = 10;
    double linear_tol = 1e-12;
};

// R_n = (1/tau_n) (ntr - n (1 - ntr) / (n0 mu_n))
Field rate_Rn(const Field& n, const Field& ntr, const SimParams& params);
// R_p = (1/tau_p) (1 - ntr - p ntr / (p0 mu_p))
Field rate_Rp(const Field& p, const Field& ntr, const SimParams& params);

// Trapped-state level solving R_n = R_p pointwise; always in (0,1).
Field ntr_quasi_equilibrium(const Field& n, const Field& p, const SimParams& params);

// Shockley-Read-Hall rate; equals R_n = R_p evaluated at ntr_quasi_equilibrium.
Field rate_srh(const Field& n, const Field& p, const SimParams& params);

// Exact implicit update of the trap ODE at frozen (n, p):
// eps (ntr' - ntr)/dt = A + B ntr' with A, B cellwise from (n, p).
Field trap_update_implicit(const Field& ntr, const Field& n, const Field& p,
                           const SimParams& params, double dt);

// One backward-Euler step of the coupled system, eps > 0. The nonlinear
// coupling is resolved by Gauss-Seidel sweeps (trap ODE exactly, n and p by
// tridiagonal solves with the own-species-linear reaction part implicit)
// until the iterates change by less than linear_tol. At convergence the
// same reaction values enter all three equations, so the charge
// n_bar - p_bar + eps ntr_bar is conserved to the iteration tolerance.
State step(const State& state, const SimParams& params, const StepperConfig& cfg);

// Same structure for eps = 0 with the single SRH rate entering both
// equations; conserves n_bar - p_bar.
State step_srh(const State& state, const SimParams& params, const StepperConfig& cfg);

double state_mass(const State& state, const SimParams& params);

// Invoked after every accepted step; return value unused.
using StepObserver = std::function<void(const State&, int /*step_index*/)>;

struct Trajectory {
    State final_state;
    int steps_taken = 0;
};

// Advance to t_end (eps >= 0 selects the stepper), invoking the observer at
// step 0 and then every cfg.output_every steps and at the final step.
Trajectory simulate(const State& initial, const SimParams& params,
                    const StepperConfig& cfg, const StepObserver& observe = {});

} // namespace ddrec
