#pragma once

#include <cstdint>
#include <vector>

#include "dyadic/sparse.hpp"

namespace dyadic {

// How an extremal value was obtained.
enum class Method { closed_form, ascent, search };
const char* method_name(Method m);

// Shared knobs for the iterative maximizers. The deterministic start is
// always tried first; `restarts` additional random starts follow. Iteration
// stops when the best value gains less than rel_tol (relatively) over
// `patience` consecutive iterations, or at max_iterations.
struct AscentConfig {
  std::uint64_t seed = 0;
  int restarts = 8;
  int max_iterations = 600;
  double rel_tol = 1e-8;
  int patience = 50;
};

struct Cond1Term {
  CubeId cube;
  double numerator = 0;
  double denominator = 0;
  double value = 0;
  bool degenerate = false;  // zero denominator under a nonzero numerator
};

struct Cond1Report {
  double value = 0;          // l^r aggregate of the term ratios
  bool degenerate = false;
  bool family_sparse = true; // advisory check of the family against mu
  int skipped_components = 0;  // vector components under no family cube
  std::vector<Cond1Term> terms;
};

// First testing condition: group the components of v by their smallest
// enclosing family cube G, and aggregate
//   ||T*(v_G mu)||_{L^{p'}(sigma)} / (mu(G)^{1/q'} ||v_G||_{L^inf_{s'}(mu)})
// over G in l^r, 1/r = 1/q - 1/p. Terms with numerator and denominator both
// zero are dropped.
Cond1Report cond1_value(const Grid& g, const CubeCoefficients& lambda,
                        const LeafMeasure& sigma, const LeafMeasure& mu,
                        const Exponents& e, const CubeFamily& family,
                        const CubeVector& v);

// Second testing condition at fixed weights beta >= 0 on the family:
//   || sum_F beta_F sigma(F)^{-1/p} T(chi_F) ||_{L^q_{l^s}(mu)} / ||beta||_p.
// With use_tf_sigma the test functions T(chi_F) are replaced by the smaller
// localized versions T_F(sigma) (components restricted to Q inside F).
double cond2_value(const Grid& g, const CubeCoefficients& lambda,
                   const LeafMeasure& sigma, const LeafMeasure& mu,
                   const Exponents& e, const CubeFamily& family,
                   const CubeMap& beta, bool use_tf_sigma = false);

struct ConditionReport {
  double value = 0;
  Method method = Method::closed_form;
  CubeMap beta;             // best weights, when the search is over beta
  LeafFunction function;    // best test function, for the operator norm
  DisjointAllocation sets;  // best allocation, for the reduction condition
};

// sup of cond2_value over beta, by projective fixed-point ascent; families
// with at most four cubes also run an independent simplex grid search and
// the larger value wins.
ConditionReport cond2_constant(const Grid& g, const CubeCoefficients& lambda,
                               const LeafMeasure& sigma, const LeafMeasure& mu,
                               const Exponents& e, const CubeFamily& family,
                               const AscentConfig& config = {},
                               bool use_tf_sigma = false);

// The reduction-to-(q = 1) quantity at a fixed disjoint allocation:
//   || sum_Q (lambda_Q sigma(Q))^q mu(Q)^{q/s} mu(E_Q)^{1-q/s} sigma(Q)^{-1}
//        chi_Q ||_{L^{(p/q)'}(sigma)}.
double reduction_condition_value(const Grid& g, const CubeCoefficients& lambda,
                                 const LeafMeasure& sigma, const LeafMeasure& mu,
                                 const Exponents& e,
                                 const DisjointAllocation& sets);

// sup of reduction_condition_value over disjoint allocations, by mirror
// ascent over the per-leaf allocation simplices; instances with at most
// eight active leaves also run a discretized exhaustive search and the
// larger value wins. For s = q the value does not depend on the allocation
// and is returned in closed form.
ConditionReport reduction_condition_sup(const Grid& g,
                                        const CubeCoefficients& lambda,
                                        const LeafMeasure& sigma,
                                        const LeafMeasure& mu,
                                        const Exponents& e,
                                        const AscentConfig& config = {});

// Weak-type analogue of cond1_value on the set E (mu restricted to E,
// outer exponent r_alpha with 1/r_alpha = 1/alpha - 1/p, and the whole
// aggregate divided by mu(E)^{(q-alpha)/(q alpha)}). Requires 1 < alpha < q
// and mu(E) > 0.
Cond1Report weak_cond1_value(const Grid& g, const CubeCoefficients& lambda,
                             const LeafMeasure& sigma, const LeafMeasure& mu,
                             const Exponents& e, double alpha,
                             const FractionalSet& E, const CubeFamily& family,
                             const CubeVector& v);

// Weak-type analogue of cond2_value on E. The default norm is the printed
// one, L^q with inner exponent alpha over mu restricted to E; with
// alt_reading the norm is L^alpha with inner exponent s, matching the
// displayed restricted strong estimate.
double weak_cond2_value(const Grid& g, const CubeCoefficients& lambda,
                        const LeafMeasure& sigma, const LeafMeasure& mu,
                        const Exponents& e, double alpha,
                        const FractionalSet& E, const CubeFamily& family,
                        const CubeMap& beta, bool alt_reading = false,
                        bool use_tf_sigma = false);

struct DualityReport {
  double a1 = 0;           // integral of (sum_Q Lambda_Q^s chi_Q)^{1/s} dmu
  double numerator = 0;    // sum_Q Lambda_Q alpha*_Q
  double denominator = 0;  // Carleson-type norm of the witness
  double ratio = 0;        // numerator / denominator (0 when Lambda = 0)
  CubeMap alpha_star;
};

// The explicit witness for the duality between the aggregated potential and
// its predual allocation problem: alpha*_Q = Lambda_Q^{s-1} * integral over
// Q of (sum_R Lambda_R^s chi_R)^{-1/s'} dmu. Requires 1 < s < infinity.
DualityReport a1_a2_witness(const Grid& g, const CubeCoefficients& Lambda,
                            const LeafMeasure& mu, double s);

// ( sum_Q b_Q^q mu(E_Q)^{1-q/s} mu(Q)^{q/s} )^{1/q} for q <= s <= infinity,
// with x^0 = 1 at the endpoints.
double dorverbitsky_value(const Grid& g, const CubeCoefficients& b,
                          const LeafMeasure& mu, double q, double s,
                          const DisjointAllocation& sets);

// Best constant of the full estimate, sup over nonnegative f of
// ||T(f)||_{L^q_{l^s}(mu)} / ||f||_{L^p(sigma)}, by normalized fixed-point
// ascent with restarts. Throws zero_measure when sigma vanishes identically.
ConditionReport operator_norm(const Grid& g, const CubeCoefficients& lambda,
                              const LeafMeasure& sigma, const LeafMeasure& mu,
                              const Exponents& e,
                              const AscentConfig& config = {});

// Independent grid search over the nonnegative L^p(sigma) sphere (simplex
// discretization of f^p dsigma plus local transfer sweeps). Intended for
// instances with few active leaves; throws too_large beyond 64.
double operator_norm_bruteforce(const Grid& g, const CubeCoefficients& lambda,
                                const LeafMeasure& sigma, const LeafMeasure& mu,
                                const Exponents& e, int resolution = 16);

}  // namespace dyadic
