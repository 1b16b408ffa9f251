// Sampling-based checks of the functional inequalities behind the
// entropy-entropy production estimate, with empirical constant estimation.
#pragma once

#include <cstdint>
#include <optional>

#include "ddrec/entropy.hpp"

namespace ddrec {

struct AdmissibleState {
    State state;
    double M = 0;
};

struct CheckPair {
    double lhs = 0;
    double rhs = 0;
};

// Deterministic per-seed sampler of the hypothesis class: n, p >= 0,
// ntr in [delta, 1-delta], nbar - pbar + eps ntrbar = M, nbar, pbar <= M1.
// Throws when M cannot be realized within 100 redraws.
AdmissibleState sample_admissible(const SimParams& params, const Grid1D& grid,
                                  double M, double M1, std::uint64_t seed);

// (E - E_inf) / D for an admissible state; requires D above tolerance.
// Suprema over samples estimate the entropy-entropy production constant.
double eep_ratio(const AdmissibleState& adm, const EquilibriumState& eq,
                 const SimParams& params);

// Scalar four-variable inequality:
// lhs = (a - nu)^2 + (b - pi)^2 + (c - nu_tr)^2, rhs = (ad-c)^2 + (bc-d)^2.
// Inputs must satisfy n0 mu_n_bar a^2 - p0 mu_p_bar b^2 + eps c^2 = M and
// c^2 + d^2 = 1 (residuals above 1e-10 are rejected).
CheckPair homogeneous_eep_check(double a, double b, double c, double d,
                                const SimParams& params, double M);

struct QuadState {
    Field a, b, c, d;  // c^2 + d^2 = 1 cellwise
};

// Field version: lhs = (sqrt(mean a^2) - nu)^2 + (sqrt(mean b^2) - pi)^2
// + ||c - nu_tr||^2; rhs adds reaction defects, gradient and variance terms.
CheckPair inhomogeneous_eep_check(const QuadState& q, const SimParams& params, double M);

struct DiffusionTransferResult {
    double lhs_c = 0, rhs_c = 0;  // ||c - cbar||^2 vs 4(||bc-d||^2 + ||b-bbar||^2)
    double lhs_d = 0, rhs_d = 0;  // ||d - dbar||^2 vs 4(||ad-c||^2 + ||a-abar||^2)
};
DiffusionTransferResult indirect_diffusion_check(const QuadState& q);

// lhs = (fbar/gbar - mean(f/g))^2, rhs = ||grad sqrt(f/g)||^2
CheckPair flux_lemma_check(const Field& f, const Field& g);

// lhs = integral of n ln(n~/mu~), rhs = discrete flux term of the production.
CheckPair logsob_ratio_check(const Field& n, const SimParams& params);

struct ReactionDominationResult {
    CheckPair n_side;  // ||sqrt(n ntr'/(n0 mu_n)) - sqrt(ntr)||^2 vs -tau_n int R_n ln(...)
    CheckPair p_side;
};
ReactionDominationResult reaction_domination_check(const AdmissibleState& adm,
                                                   const SimParams& params);

// Residual of the averaged conservation identity
// (nbar - nbar_inf) ln(n*/n0) + (pbar - pbar_inf) ln(p*/p0)
//   - eps (ntrbar - ntr_inf) ln((1-ntr_inf)/ntr_inf).
double mass_identity_check(const AdmissibleState& adm, const EquilibriumState& eq,
                           const SimParams& params);

// Quad variables of an admissible state:
// (sqrt(n/(n0 mu_n)), sqrt(p/(p0 mu_p)), sqrt(ntr), sqrt(1-ntr)).
QuadState quad_from_state(const AdmissibleState& adm, const SimParams& params);

// Discrete helpers shared by the checks.
double l2_norm_sq(const Field& f);                 // h sum f_i^2
double variance_norm_sq(const Field& f);           // h sum (f_i - fbar)^2
double gradient_norm_sq(const Field& f);           // sum (f_{i+1}-f_i)^2 / h

// Small deterministic generator (splitmix-seeded xorshift) so sampled states
// are reproducible across compilers.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);
    double uniform();                       // [0,1)
    double uniform(double lo, double hi);
    double log_uniform(double lo, double hi);
  private:
    std::uint64_t s_;
};

} // namespace ddrec
