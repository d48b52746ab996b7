#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lakeoc/homotopy.hpp"

namespace lakeoc {

/// Whether two slice manifolds live on the same affine line, so their
/// objective values at shared initial states can be compared. Throws
/// SpecificationError on degenerate (coincident) anchors.
bool comparable(const SliceManifold& a, const SliceManifold& b,
                double tol = 1e-8);

/// An initial state with two distinct optimal paths of equal value.
struct IndifferencePoint {
  VectorXd xI;               // shared initial states
  PathSolution path1, path2;
  double objective = 0;
  double alpha = 0;          // position on the first run's anchor line
  bool heterogeneous = false;  // state spread above 1e-6
};

enum class CrossingStatus { Found, NoCrossing };

struct CrossingResult {
  CrossingStatus status = CrossingStatus::NoCrossing;
  IndifferencePoint point;  // meaningful when status == Found
};

/// Locate the objective crossing of two comparable continuation runs.
/// Both slice manifolds are reparameterized by the common line parameter
/// (the maximal initial monotone stretch of each run; stable manifolds can
/// fold back), the piecewise-linear objective curves are bracketed on the
/// overlap, and the crossing is polished by re-solving both stable paths
/// until the objective gap is below 1e-8. Non-overlapping parameter ranges
/// throw SpecificationError; a missing sign change returns NoCrossing,
/// which distinguishes threshold-only situations from failures.
CrossingResult find_indifference_point(const CanonicalModel& model,
                                       const ContinuationRun& run1,
                                       const Equilibrium& target1,
                                       const ContinuationRun& run2,
                                       const Equilibrium& target2,
                                       const HomotopyOptions& opts = {});

enum class StructureKind { Unique, Threshold, Indifference, Inconclusive };

struct StructureReport {
  StructureKind kind = StructureKind::Inconclusive;
  CrossingResult crossing;       // Found when kind == Indifference
  double threshold_objective = 0;  // non-SPP equilibrium value (Threshold)
  double continuity_gap = 0;     // worst one-sided objective mismatch
  std::string detail;
};

/// Classify the optimal structure along a common line of initial states.
/// `runs` are stable-path continuations toward SPP equilibria from the
/// census `equilibria` (targets are matched by state). One basin gives
/// unique; crossing objective curves with distinct initial controls give
/// an indifference point; stalled runs whose objective curves meet a
/// non-SPP equilibrium's value continuously (within 1e-4) give a
/// threshold. Anything else is reported inconclusive with a reason.
StructureReport classify_structure(const CanonicalModel& model,
                                   const std::vector<Equilibrium>& equilibria,
                                   const std::vector<ContinuationRun>& runs,
                                   const HomotopyOptions& opts = {});

/// Plot-ready (spatial norm of initial states, objective) pairs, one per
/// admissible slice record, in run order.
std::vector<std::pair<double, double>> objective_curve(
    const CanonicalModel& model, const SliceManifold& sm);

/// Independent objective evaluation: Simpson quadrature of the discounted
/// payoff along the path plus the discounted equilibrium tail. Used as a
/// cross-check of the Hamiltonian-based value H(X(0)) / rho.
double quadrature_objective(const CanonicalModel& model,
                            const PathSolution& path);

}  // namespace lakeoc
