#pragma once

#include <vector>

#include "lakeoc/bvp.hpp"
#include "lakeoc/equilibrium.hpp"

namespace lakeoc {

enum class RunEventKind { TargetHit, Stall, AdmissibilityViolation };

struct RunEvent {
  RunEventKind kind = RunEventKind::TargetHit;
  int step = 0;  // index into the step list
};

/// One point of a slice manifold: the initial canonical point of a stable
/// path, its position kappa on the anchor line, and the objective value.
struct SliceRecord {
  double kappa = 0;
  double arclength = 0;
  VectorXd X0;           // full initial point (states; costates)
  double objective = 0;  // H(X0) / rho
  bool admissible = true;
};

/// The curve of initial points swept out by one continuation run: a linear
/// cut through the stable manifold of the target equilibrium. kappa = 1
/// corresponds to X(0) states = x0 (plus the free-vector shift, if any).
struct SliceManifold {
  VectorXd x0, x1;  // anchor states of the continuation line
  std::vector<SliceRecord> records;
};

struct HomotopyStep {
  BvpMesh mesh;      // path on [0, 1]; rhs is scaled by the horizon
  VectorXd kappas;   // free parameters (kappa first, horizon last if free)
  double T = 0;      // horizon in effect at this step
  int newton_iters = 0;
  double step_width = 0;
};

enum class HomotopyVariant { Spp, NonSpp };

struct ContinuationRun {
  HomotopyVariant variant = HomotopyVariant::Spp;
  std::vector<HomotopyStep> steps;
  std::vector<RunEvent> events;
  SliceManifold slice;
  std::vector<VectorXd> free_vectors;  // NonSpp only
  bool target_reached = false;
  double horizon = 0;        // fixed truncation time of the run
  bool moving_horizon = false;
  double epsilon = 0;        // end-distance pin once the horizon is free
};

struct HomotopyOptions {
  double init_step = 0.5;
  double max_step = 1.0;
  double min_step = 1e-6;
  int max_steps = 100;
  double kappa_target = 1.0;
  double horizon = 0;         // 0: 10 / slowest stable decay rate
  // The asymptotic end condition is a linearization: fixed-horizon steps
  // whose end distance |X(1) - Xhat| exceeds this factor times 1 + |Xhat|
  // are rejected (shrinking the step). A free horizon pins the distance
  // instead, so the guard does not apply there.
  double end_distance_factor = 0.1;
  int initial_intervals = 20;
  BvpOptions bvp = {.newton_tol = 1e-10};
};

/// Homotopy of stable paths toward an SPP equilibrium: the initial-state
/// condition X(0) = x0 + (1 - kappa)(x1 - x0) with x1 the target's own
/// states slides from the equilibrium (kappa = 0) to x0 (kappa = 1). The
/// run starts from the exact constant equilibrium solution and proceeds by
/// Moore-Penrose predictor-corrector steps; it ends at the kappa target,
/// at max_steps, or at a stall.
ContinuationRun stable_path_homotopy(const CanonicalModel& model,
                                     const Equilibrium& target,
                                     const VectorXd& x0,
                                     const HomotopyOptions& opts = {});

/// Variant for a hyperbolic target whose stable subspace has dimension
/// n_s < n. The initial condition X(0) = x1 + (1 - kappa_0)(x0 - x1) +
/// sum_i kappa_i v_i gains n - n_s free shift directions, and the terminal
/// condition has n_u rows. Requires [(x0 - x1), v_1, ..., v_{n-n_s}] to
/// have full column rank, and x0 to equal the target's states (the run
/// starts from the constant equilibrium solution). With n_s = n and no
/// free vectors this is stable_path_homotopy with the anchors swapped.
ContinuationRun stable_path_homotopy_nonspp(
    const CanonicalModel& model, const Equilibrium& target,
    const VectorXd& x0, const VectorXd& x1,
    const std::vector<VectorXd>& free_vectors,
    const HomotopyOptions& opts = {});

/// Resume a run with the truncation time as an additional free parameter,
/// pinned by the end-distance condition |X(1) - Xhat| = epsilon. epsilon
/// defaults to the end distance at activation, so the activation step
/// needs no correction; it is recorded on the returned run. The returned
/// run holds only the continued portion (activation step first).
ContinuationRun enable_moving_horizon(const ContinuationRun& run,
                                      const CanonicalModel& model,
                                      const Equilibrium& target,
                                      const HomotopyOptions& opts = {});

/// A single converged stable path, as consumed by the indifference-point
/// continuation.
struct PathSolution {
  BvpMesh mesh;        // 2n-dimensional path on [0, 1]
  double T = 0;        // horizon (the rhs scale of the mesh)
  Equilibrium target;  // equilibrium the path converges to
};

/// The path of the final accepted step of a run.
PathSolution final_path(const ContinuationRun& run, const Equilibrium& target);

/// Continue a converged stable path along a new anchor line. The initial
/// states of `start` become the kappa = 0 anchor and x0 the kappa = 1
/// anchor, while the terminal condition keeps pinning the path to the
/// stable eigenspace of its target. This puts the swept slice manifold on
/// a line the target's own homotopy cannot reach directly, which is what
/// makes two manifolds comparable when their natural anchor lines differ.
ContinuationRun continue_stable_path(const CanonicalModel& model,
                                     const PathSolution& start,
                                     const VectorXd& x0,
                                     const HomotopyOptions& opts = {});

/// Re-solve a run's boundary value problem with the continuation
/// parameter pinned at kappa, starting Newton from the accepted step at
/// start_index. This evaluates the run's own slice manifold between (or
/// slightly beyond) its accepted steps, which is the value an objective
/// comparison needs; a fresh homotopy toward the same initial state could
/// land on a different manifold. Throws NumericalError when the pinned
/// problem has no nearby solution.
PathSolution solve_on_slice(const CanonicalModel& model,
                            const ContinuationRun& run,
                            const Equilibrium& target, double kappa,
                            std::size_t start_index,
                            const HomotopyOptions& opts = {});

struct IndifferenceStep {
  BvpMesh mesh;     // stacked (X1; X2) on [0, 1]
  double kappa1 = 0, kappa2 = 0;
  VectorXd xI;      // shared initial states
  double objective = 0;
  double hamiltonian_gap = 0;  // |H(X1(0)) - H(X2(0))|
  int newton_iters = 0;
};

struct IndifferenceRun {
  std::vector<IndifferenceStep> steps;
  std::vector<RunEvent> events;
  bool target_reached = false;
  double T1 = 0, T2 = 0;
};

/// Gradient of the maximized Hamiltonian, assembled from the canonical
/// equations: dH/dx = rho lambda - lambdadot and dH/dlambda = xdot (the
/// control derivatives drop out at the maximizer).
VectorXd hamiltonian_gradient(const CanonicalModel& model, const VectorXd& X);

/// Continue an indifference point from from_xI (where path1/path2 start)
/// toward to_xI. Both paths are deformed together under shared initial
/// states, equal Hamiltonians, the two asymptotic conditions, and the line
/// condition X1(0) = to_xI + (1 - kappa1)(from_xI - to_xI) + kappa2 V.
/// V must be linearly independent of from_xI - to_xI: the correction
/// leaves the anchor line, making up for the codimension of the stable
/// manifolds. Every accepted step is itself an indifference point.
IndifferenceRun continue_indifference_point(
    const CanonicalModel& model, const PathSolution& path1,
    const PathSolution& path2, const VectorXd& from_xI,
    const VectorXd& to_xI, const VectorXd& V,
    const HomotopyOptions& opts = {});

}  // namespace lakeoc
