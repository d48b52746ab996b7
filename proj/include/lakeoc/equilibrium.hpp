#pragma once

#include <limits>
#include <string>
#include <vector>

#include "lakeoc/model.hpp"
#include "lakeoc/spectral.hpp"

namespace lakeoc {

struct NewtonOptions {
  double tol = 1e-12;      // infinity norm of the rhs
  int max_iter = 100;
  int max_halvings = 20;   // line-search damping
};

/// A converged and classified canonical steady state.
struct Equilibrium {
  VectorXd X;  // stacked (states; costates)
  ModelParams params;
  double residual_norm = 0;
  SpectralData spectral;
  bool flat = false;       // all state components equal within 1e-8
  bool admissible = false;
  bool symmetric = false;  // profile equal to its spatial reflection

  VectorXd states() const { return X.head(X.size() / 2); }
  VectorXd costates() const { return X.tail(X.size() / 2); }
};

Equilibrium newton_solve(const CanonicalModel& model, const VectorXd& guess,
                         const NewtonOptions& opts = {});

/// Classify an already-converged point (no Newton iterations).
Equilibrium classify_equilibrium(const CanonicalModel& model,
                                 const VectorXd& X);

/// Lift a 0D canonical point (P, lambda) to the flat 1D point with states
/// all P and costates (lambda/2, lambda, ..., lambda, lambda/2). The lift
/// of a 0D equilibrium is a 1D equilibrium for any diffusion strength.
VectorXd lift_flat(const VectorXd& X0d, int N);

/// Multistart Newton over a grid of admissible guesses (0D census).
std::vector<Equilibrium> find_equilibria_0d(const Lake0D& model,
                                            double state_max = 6.0,
                                            int starts = 60);

enum class EventKind { Fold, BranchPoint };

struct BranchEvent {
  int index = 0;       // step after which the event was localized
  EventKind kind = EventKind::Fold;
  double param = 0;
  VectorXd X;          // localized point
  VectorXd tangent;    // extended tangent (X, param) at the event
};

/// One pseudo-arclength continuation curve of equilibria.
struct Branch {
  std::string parameter_name;
  std::vector<double> param_values;
  std::vector<VectorXd> points;
  std::vector<BranchEvent> events;
  bool stalled = false;
};

struct EqContinuationOptions {
  int max_points = 750;
  double max_step = 0.1;
  double init_step = 0.01;
  double min_step = 1e-8;
  double param_min = -std::numeric_limits<double>::infinity();
  double param_max = std::numeric_limits<double>::infinity();
  double newton_tol = 1e-10;
  double event_param_tol = 1e-6;  // bisection tolerance for events
  bool backward = false;
  // Optional extended-space direction for the first step (branch switching).
  VectorXd initial_direction;
};

/// Secant-predictor pseudo-arclength continuation in a named model
/// parameter, with fold detection (tangent parameter-component sign) and
/// branch-point detection (bordered-determinant sign).
Branch continue_equilibria(const CanonicalModel& model,
                           const Equilibrium& start,
                           const std::string& parameter,
                           const EqContinuationOptions& opts = {});

/// Step onto the branch bifurcating at a branch point: perturb along the
/// second null direction of the extended Jacobian and re-converge. The
/// returned direction seeds the continuation of the new branch.
struct BranchSwitch {
  Equilibrium equilibrium;
  VectorXd direction;  // extended-space direction away from the old branch
};
BranchSwitch switch_branch(const CanonicalModel& model,
                           const BranchEvent& branch_point,
                           const std::string& parameter,
                           double amplitude = 0.01);

/// All equilibria where the branches cross parameter = value, re-converged
/// by Newton at the exact value and de-duplicated.
std::vector<Equilibrium> equilibria_at(const CanonicalModel& model,
                                       const std::string& parameter,
                                       const std::vector<Branch>& branches,
                                       double value, double merge_tol = 1e-6);

struct CensusOptions {
  EqContinuationOptions continuation;
  double switch_amplitude = 0.01;
  int branch_depth = 3;   // how many generations of branch points to follow
  int bp_max_points = 1000;
  double bp_max_step = 0.05;
};

struct CensusResult {
  std::vector<Branch> branches;        // flat branches first
  std::vector<Equilibrium> equilibria; // at the requested parameter value
  int num_flat_branch_points = 0;      // events on the flat branches
  int num_flat_folds = 0;
};

/// Full 1D branch census: lift the 0D equilibria, continue the flat
/// branches in `parameter`, switch every branch point to the stated depth,
/// and slice all branches at the model's own parameter value.
CensusResult run_branch_census(const Lake1D& model,
                               const std::string& parameter,
                               const CensusOptions& opts = {});

}  // namespace lakeoc
