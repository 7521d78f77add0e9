#pragma once

#include "dyadic/sparse.hpp"

namespace dyadic {

// Parameters of the dyadic potential: fractional order alpha in (0, n) and
// aggregation power s > 0.
struct WolffParams {
  double alpha = 0;
  double s = 0;
};

void validate_wolff_params(const Grid& g, const WolffParams& w);

// Lebesgue measure on the grid: every leaf carries mass 2^{-n depth}.
LeafMeasure lebesgue_measure(const Grid& g);

// W(f)(x) = sum over cubes Q containing x of
//   ( integral_Q f dx / |Q|^{1 - alpha/n} )^s,
// with the integral against Lebesgue measure.
LeafFunction wolff_dyadic(const Grid& g, const LeafFunction& f,
                          const WolffParams& w);

// The same sum restricted to the cubes of the given family.
LeafFunction wolff_sparse(const Grid& g, const LeafFunction& f,
                          const WolffParams& w, const CubeFamily& family);

struct WolffFamilyReport {
  CubeFamily family;
  double domination_ratio = 0;  // max over leaves of dyadic / sparse
};

// Lebesgue stopping family of f (root plus maximal cubes whose average
// jumps past threshold times their stopping parent's), together with the
// pointwise domination ratio of the full potential by the sparse one.
// Throws zero_function when f vanishes identically.
WolffFamilyReport wolff_sparse_family(const Grid& g, const LeafFunction& f,
                                      const WolffParams& w,
                                      double threshold = 2.0);

// || sum_{Q in family} (|Q|^{alpha/n - 1} sigma(Q))^q mu(Q) sigma(Q)^{-1}
//      chi_Q ||_{L^{(p/q)'}(sigma)}.
double wolff_condition_value(const Grid& g, const LeafMeasure& sigma,
                             const LeafMeasure& mu, const Exponents& e,
                             const WolffParams& w, const CubeFamily& family);

}  // namespace dyadic
