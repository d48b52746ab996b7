#pragma once

#include <functional>
#include <vector>

#include "lakeoc/model.hpp"

namespace lakeoc {

/// Two-point boundary value problem on [0, 1] with optional free scalar
/// parameters p and integral constraint rows. The ODE right-hand side
/// carries any time scaling itself (e.g. multiplication by the horizon).
struct BvpProblem {
  int dim = 0;         // ODE dimension
  int num_params = 0;  // free parameters

  std::function<VectorXd(double t, const VectorXd& X, const VectorXd& p)> f;
  std::function<MatrixXd(double t, const VectorXd& X, const VectorXd& p)>
      dfdX;
  // Optional when num_params == 0.
  std::function<MatrixXd(double t, const VectorXd& X, const VectorXd& p)>
      dfdp;

  /// Pointwise boundary conditions g(X(0), X(1), p) = 0.
  std::function<VectorXd(const VectorXd& Xa, const VectorXd& Xb,
                         const VectorXd& p)>
      bc;
  /// Jacobians of bc with respect to X(0), X(1) and p (in that order).
  std::function<std::tuple<MatrixXd, MatrixXd, MatrixXd>(
      const VectorXd& Xa, const VectorXd& Xb, const VectorXd& p)>
      dbc;

  /// Linear functional rows: integral of V(t)^T X(t) dt (trapezoid on the
  /// mesh) + c^T p = rhs. Appended after the bc rows; the last row is the
  /// one addressed by bvp_tangent.
  struct IntegralRow {
    std::function<VectorXd(double t)> weight;  // V(t), length dim
    VectorXd param_coeff;                      // length num_params
    double rhs = 0;
  };
  std::vector<IntegralRow> integral_rows;

  int num_bc() const;  // dim + num_params - integral_rows.size()
};

/// Discrete solution: node times in [0, 1], node values (dim x M), params.
struct BvpMesh {
  std::vector<double> t;
  MatrixXd Y;
  VectorXd p;

  static BvpMesh uniform(int intervals, const VectorXd& value,
                         const VectorXd& params = VectorXd());
};

struct BvpOptions {
  double newton_tol = 1e-8;   // max norm of the collocation system
  int max_newton = 16;
  int max_halvings = 8;
  double abs_tol = 1e-4;      // interpolant defect, absolute
  double rel_tol = 1e-3;      // interpolant defect, relative
  int max_nodes = 4000;
  int max_refinements = 12;
  bool adapt = true;
};

struct BvpResult {
  BvpMesh mesh;
  bool converged = false;
  int newton_iters = 0;       // on the final mesh
  double defect = 0;          // largest scaled interpolant defect
};

/// Solve by 3-stage Lobatto IIIA collocation (Simpson residuals with a
/// condensed midpoint), sparse Newton, and defect-driven mesh refinement.
/// Throws NonConvergenceError when Newton fails on every mesh.
BvpResult solve_bvp(const BvpProblem& problem, const BvpMesh& guess,
                    const BvpOptions& opts = {});

/// Piecewise quintic Hermite evaluation of a converged mesh at time t.
VectorXd eval_solution(const BvpProblem& problem, const BvpMesh& mesh,
                       double t);

/// Direction of the solution family when the last equation row is
/// released: solves J z = e_last, returned as (node directions, param
/// directions), normalized in the discrete 2-norm.
std::pair<MatrixXd, VectorXd> bvp_tangent(const BvpProblem& problem,
                                          const BvpMesh& mesh);

/// Trapezoid quadrature of a nodewise function over the mesh.
double mesh_integral(const BvpMesh& mesh,
                     const std::function<double(double, const VectorXd&)>& g);

}  // namespace lakeoc
