#pragma once

#include "dyadic/exponents.hpp"
#include "dyadic/measure.hpp"

namespace dyadic {

// Nonnegative coefficients lambda_Q, sparse over cubes. Cubes absent from
// the map carry coefficient 0.
struct CubeCoefficients {
  CubeMap values;

  double at(CubeId q) const {
    auto it = values.find(q);
    return it == values.end() ? 0.0 : it->second;
  }
};

// A cube-indexed vector (g_Q), possibly signed, sparse over cubes.
struct CubeVector {
  CubeMap values;

  double at(CubeId q) const {
    auto it = values.find(q);
    return it == values.end() ? 0.0 : it->second;
  }
};

void validate_coefficients(const Grid& g, const CubeCoefficients& lambda);
void validate_cube_vector(const Grid& g, const CubeVector& v);

// Enforces the convention lambda_Q = 0 whenever sigma(Q) = 0; returns the
// number of coefficients that were dropped.
int coerce_coefficients(const Grid& g, CubeCoefficients& lambda,
                        const LeafMeasure& sigma);

// T(f)_Q = lambda_Q * integral of f over Q against sigma, one component per
// stored coefficient. f must be nonnegative unless allow_signed is set.
CubeVector apply_T(const Grid& g, const CubeCoefficients& lambda,
                   const LeafMeasure& sigma, const LeafFunction& f,
                   bool allow_signed = false);

// Same, but only the components with Q inside P.
CubeVector apply_T_local(const Grid& g, const CubeCoefficients& lambda,
                         const LeafMeasure& sigma, const LeafFunction& f,
                         CubeId P, bool allow_signed = false);

// Formal adjoint: (T* g)(x) = sum over Q containing x of
// lambda_Q * g_Q * mu(Q).
LeafFunction apply_T_star(const Grid& g, const CubeCoefficients& lambda,
                          const LeafMeasure& mu, const CubeVector& v);

// Pointwise (sum over Q containing x of |v_Q|^s)^{1/s}; sup over the chain
// when s = infinity.
LeafFunction ls_aggregate(const Grid& g, const CubeVector& v, double s);

// The mixed norm || (sum_{Q ni x} |v_Q|^s)^{1/s} ||_{L^q(mu)}.
double mixed_norm(const Grid& g, const CubeVector& v, double s, double q,
                  const LeafMeasure& mu);
double mixed_norm(const Grid& g, const CubeVector& v, const Exponents& e,
                  const LeafMeasure& mu);

// sup over t > 0 of t^q * mu(|h| > t); the sup is attained in the limit
// from below at one of the distinct values of |h|, so it equals the max
// over those values v of v^q * mu(|h| >= v).
double weak_norm(const LeafFunction& h, double q, const LeafMeasure& mu);

// mu(E)^{(alpha-q)/(alpha q)} * (integral over E of |h|^alpha dmu)^{1/alpha},
// for 0 < alpha < q. Throws empty_set when mu(E) = 0.
double kolmogorov_value(const LeafFunction& h, double q, double alpha,
                        const LeafMeasure& mu, const FractionalSet& set);

// || (sum_{Q ni x} |v_Q|^{s'})^{1/s'} ||_{L^infinity(mu)} with s' from e.
double linf_ls_norm(const Grid& g, const CubeVector& v, const Exponents& e,
                    const LeafMeasure& mu);

// <T(f), g>: sum over Q of lambda_Q (integral_Q f dsigma) g_Q mu(Q).
double pairing(const Grid& g, const CubeCoefficients& lambda,
               const LeafMeasure& sigma, const LeafMeasure& mu,
               const LeafFunction& f, const CubeVector& v,
               bool allow_signed = false);

// Pointwise sup over Q containing x of rho_Q (rho >= 0).
LeafFunction maximal_multiplier(const Grid& g, const CubeCoefficients& rho);

// Left side of the multiplier form of the estimate:
// || (sum_Q (rho_Q lambda_Q sigma(Q))^s chi_Q)^{1/s} ||_{L^q(mu)}.
double multiplier_lhs(const Grid& g, const CubeCoefficients& lambda,
                      const LeafMeasure& sigma, const CubeCoefficients& rho,
                      const Exponents& e, const LeafMeasure& mu);

// The coefficients of the scalar operator the s = q case reduces to:
// lambda_Q^s sigma(Q)^{s-1} (zero when sigma(Q) = 0). Requires s in [1, inf).
CubeCoefficients reduce_to_linear(const Grid& g, const CubeCoefficients& lambda,
                                  const LeafMeasure& sigma, double s);

// || sum_Q lambda_Q^q sigma(Q)^{q-1} mu(Q) chi_Q ||_{L^{(p/q)'}(sigma)},
// the two-measure characterization for s = q.
double s_eq_q_condition(const Grid& g, const CubeCoefficients& lambda,
                        const LeafMeasure& sigma, const LeafMeasure& mu,
                        double p, double q);

}  // namespace dyadic
