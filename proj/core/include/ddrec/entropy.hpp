// Discrete entropy / entropy-production pair, relative entropy, the
// Pinsker-type lower bound, L1 mass cap, and exponential decay-rate fitting.
#pragma once

#include <optional>
#include <vector>

#include "ddrec/dynamics.hpp"
#include "ddrec/equilibrium.hpp"

namespace ddrec {

struct DiagnosticsRow {
    double t = 0;
    double nbar = 0, pbar = 0, ntrbar = 0;
    double mass = 0;
    double E = 0, D = 0, E_rel = 0;
    double l1_n = 0, l1_p = 0, l1_ntr = 0;
    double ckp = 0;
    double maxn = 0, maxp = 0;
    bool singular = false;  // some production log was clamped
};

struct DecayFit {
    double K = 0;   // fitted rate, slope magnitude of ln E_rel
    double r2 = 0;
    double t_lo = 0, t_hi = 0;
    int points = 0;
};

// Antiderivative of ln(s/(1-s)) from 1/2:
// Phi(x) = x ln x + (1-x) ln(1-x) + ln 2, with 0 ln 0 = 0. Phi >= 0 on [0,1].
double trap_potential(double x);

// E = integral of the two Boltzmann brackets plus eps * Phi(ntr); >= 0.
double entropy(const State& state, const SimParams& params);

struct ProductionResult {
    double value = 0;
    bool singular = false;
};

// Flux terms use edge weight mu_{i+1/2} = sqrt(mu_i mu_{i+1}) and the
// logarithmic mean of u = f/mu across the edge. Log arguments are clamped to
// [1e-300, 1e300]; clamping sets the singular flag instead of erroring.
ProductionResult entropy_production(const State& state, const SimParams& params);

// The discrete |J|^2/f flux term alone (log-mean edge density).
ProductionResult flux_dissipation(const Field& f, const Field& mu);

// eps = 0 functionals: E0 drops the Phi term; D0 uses the single SRH rate.
double entropy_srh(const Field& n, const Field& p, const SimParams& params);
ProductionResult production_srh(const Field& n, const Field& p, const SimParams& params);

// E(state) - E(equilibrium) evaluated through the direct relative formula;
// agrees with the difference of entropies on the conservation class.
double relative_entropy(const State& state, const EquilibriumState& eq,
                        const SimParams& params);

// 3/(2 nbar + 4 nbar_inf) ||n - n_inf||_1^2 + p-analogue
// + 2 eps ||ntr - ntr_inf||_1^2; a lower bound for relative_entropy.
double ckp_bound(const State& state, const EquilibriumState& eq,
                 const SimParams& params);

// M1 = (5/2) max(n0 mu_n_bar, p0 mu_p_bar) + (3/4) E_initial
double l1_mass_cap(const SimParams& params, double E_initial);

// Least-squares line through (t, ln E_rel) on the window where
// E_rel in [1e-10, E_rel(first)/10], first output excluded.
// Returns nothing when fewer than 10 usable rows exist.
std::optional<DecayFit> fit_decay_rate(const std::vector<DiagnosticsRow>& rows);

// Full per-output record; uses the eps = 0 functionals when params.eps == 0
// (ntr diagnostics then refer to the quasi-stationary trap level).
DiagnosticsRow make_diagnostics_row(const State& state, const EquilibriumState& eq,
                                    const SimParams& params);

} // namespace ddrec
