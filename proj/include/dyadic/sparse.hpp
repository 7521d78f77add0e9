#pragma once

#include <optional>
#include <set>
#include <vector>

#include "dyadic/operator.hpp"

namespace dyadic {

// A finite set of cubes, usually sparse with respect to one of the measures.
struct CubeFamily {
  std::set<CubeId> cubes;

  bool contains(CubeId q) const { return cubes.count(q) != 0; }
  std::size_t size() const { return cubes.size(); }
};

void validate_family(const Grid& g, const CubeFamily& family);

// sup over cubes P with m(P) > 0 of (sum_{Q inside P} lambda_Q) / m(P).
// `infinite` is set when some P carries positive coefficient mass but
// m(P) = 0. `ratios` lists the ratio of every cube with m(P) > 0.
template <class S>
struct BasicCarlesonReport {
  bool infinite = false;
  S value{};
  CubeId witness{};
  std::vector<std::pair<CubeId, S>> ratios;
};
using CarlesonReport = BasicCarlesonReport<double>;

template <class S>
BasicCarlesonReport<S> carleson_constant(const Grid& g,
                                         const BasicCubeMap<S>& lambda,
                                         const BasicLeafMeasure<S>& m);

// Checks sum_{F' in family, F' inside P} m(F') <= c * m(P) for every P in
// the family.
template <class S>
struct BasicFamilyCheck {
  bool ok = true;
  bool infinite = false;  // some family cube P has m(P) = 0 under positive load
  S worst_ratio{};
  std::optional<CubeId> worst;
};
using FamilyCheck = BasicFamilyCheck<double>;

template <class S>
BasicFamilyCheck<S> family_carleson_check(const Grid& g, const CubeFamily& family,
                                          const BasicLeafMeasure<S>& m, const S& c);

// Walks the leaves in canonical order and selects mass `t` from `available`
// minus `exclude`, taking each leaf's free fraction in full and splitting
// the boundary leaf. The result is disjoint from `exclude` and has
// m-mass exactly t (up to the documented float slack). Throws
// mass_unavailable when the free mass is insufficient. In atomic mode only
// whole leaves are taken and the target may be overshot.
template <class S>
BasicFractionalSet<S> prefix_select(const Grid& g,
                                    const BasicFractionalSet<S>& available,
                                    const BasicLeafMeasure<S>& m, const S& t,
                                    const BasicFractionalSet<S>& exclude,
                                    bool atomic_mode = false);

template <class S>
struct BasicAllocationOutcome {
  bool feasible = true;
  BasicDisjointAllocation<S> allocation;
  std::optional<CubeId> infeasible_at;
};
using AllocationOutcome = BasicAllocationOutcome<double>;

// Bottom-up greedy allocation of pairwise disjoint sets E_Q inside Q with
// m(E_Q) = lambda_Q / C (at least lambda_Q / C in atomic mode). Feasible
// exactly when C dominates the Carleson constant of (lambda, m).
template <class S>
BasicAllocationOutcome<S> dor_allocate(const Grid& g,
                                       const BasicCubeMap<S>& lambda,
                                       const BasicLeafMeasure<S>& m, const S& C,
                                       bool atomic_mode = false);

template <class S>
struct BasicSparsenessResult {
  bool sparse = true;
  BasicDisjointAllocation<S> witness;   // disjoint major subsets when sparse
  std::optional<CubeId> failure;        // a cube whose demand cannot be met
};
using SparsenessResult = BasicSparsenessResult<double>;

// Decides whether the family admits pairwise disjoint subsets E_F inside F
// with m(E_F) >= delta * m(F), and produces them when it does.
template <class S>
BasicSparsenessResult<S> is_sigma_sparse(const Grid& g, const CubeFamily& family,
                                         const BasicLeafMeasure<S>& m,
                                         const S& delta = S{1} / S{2});

// Direct numerical search for
//   inf over disjoint allocations {E_Q} of sup_Q lambda_Q / m(E_Q),
// enumerating per-leaf splits of each leaf's mass among the supported cubes
// containing it on a grid of the given resolution, then polishing with
// finer per-leaf sweeps. Exists as an independent cross-check of
// carleson_constant; returns infinity when some lambda_Q > 0 sits on a
// cube of zero mass. Throws too_large when the state space exceeds the
// documented budget even at the coarsest resolution.
double lambda2_bruteforce(const Grid& g, const CubeCoefficients& lambda,
                          const LeafMeasure& m, int resolution = 16);

// Smallest family cube containing q; throws not_covered if there is none.
CubeId pi_family(const Grid& g, const CubeFamily& family, CubeId q);

// Maximal family cubes strictly inside parent.
std::vector<CubeId> family_children(const Grid& g, const CubeFamily& family,
                                    CubeId parent);

// parent minus the union of its family children.
FractionalSet family_exclusive_set(const Grid& g, const CubeFamily& family,
                                   CubeId parent);

// Stopping cubes of f with respect to m: starts at the root and repeatedly
// takes the maximal subcubes whose average jumps past threshold times the
// average over the current stopping parent. Requires m(root) > 0 and
// threshold > 1.
CubeFamily stopping_family(const Grid& g, const LeafFunction& f,
                           const LeafMeasure& m, double threshold = 2.0);

// sum over family cubes F with m(F) > 0 of m(F) * (average of f over F)^p.
double carleson_embedding_lhs(const Grid& g, const CubeFamily& family,
                              const LeafFunction& f, const LeafMeasure& m,
                              double p);

}  // namespace dyadic
