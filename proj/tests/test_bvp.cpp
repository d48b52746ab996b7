#include <cmath>

#include "doctest.h"
#include "lakeoc/bvp.hpp"
#include "lakeoc/equilibrium.hpp"
#include "lakeoc/model.hpp"

using namespace lakeoc;

namespace {

ModelParams scenario1(int N) {
  ModelParams p;
  p.rho = 0.03;
  p.c = 0.5;
  p.b = 0.65;
  p.D = 0.5;
  p.L = 2.0 * M_PI / 0.44;
  p.N = N;
  return p;
}

// Scalar growth problem X' = X, X(0) = 1, exact solution e^t.
BvpProblem growth_problem() {
  BvpProblem pr;
  pr.dim = 1;
  pr.f = [](double, const VectorXd& X, const VectorXd&) { return X; };
  pr.dfdX = [](double, const VectorXd&, const VectorXd&) {
    return MatrixXd::Identity(1, 1);
  };
  pr.bc = [](const VectorXd& Xa, const VectorXd&, const VectorXd&) {
    VectorXd g(1);
    g << Xa(0) - 1.0;
    return g;
  };
  pr.dbc = [](const VectorXd&, const VectorXd&, const VectorXd&) {
    return std::make_tuple(MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1),
                           MatrixXd::Zero(1, 0));
  };
  return pr;
}

double growth_error(int intervals) {
  BvpProblem pr = growth_problem();
  BvpOptions o;
  o.adapt = false;
  VectorXd one = VectorXd::Ones(1);
  BvpResult r = solve_bvp(pr, BvpMesh::uniform(intervals, one), o);
  double worst = 0;
  for (std::size_t i = 0; i < r.mesh.t.size(); ++i)
    worst = std::max(worst,
                     std::abs(r.mesh.Y(0, i) - std::exp(r.mesh.t[i])));
  return worst;
}

}  // namespace

TEST_CASE("scalar growth problem hits e") {
  BvpProblem pr = growth_problem();
  VectorXd one = VectorXd::Ones(1);
  BvpResult r = solve_bvp(pr, BvpMesh::uniform(20, one));
  CHECK(r.converged);
  CHECK(r.mesh.Y(0, r.mesh.t.size() - 1) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-8));
}

TEST_CASE("fourth order convergence on fixed meshes") {
  double e1 = growth_error(8);
  double e2 = growth_error(16);
  double order = std::log2(e1 / e2);
  CHECK(order > 3.5);
  CHECK(order < 4.5);
}

TEST_CASE("cubic right-hand side is integrated exactly") {
  // X' = t^3 has the Simpson-exact solution t^4/4.
  BvpProblem pr;
  pr.dim = 1;
  pr.f = [](double t, const VectorXd&, const VectorXd&) {
    VectorXd f(1);
    f << t * t * t;
    return f;
  };
  pr.dfdX = [](double, const VectorXd&, const VectorXd&) {
    return MatrixXd::Zero(1, 1);
  };
  pr.bc = [](const VectorXd& Xa, const VectorXd&, const VectorXd&) {
    return Xa;
  };
  pr.dbc = [](const VectorXd&, const VectorXd&, const VectorXd&) {
    return std::make_tuple(MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1),
                           MatrixXd::Zero(1, 0));
  };
  BvpOptions o;
  o.adapt = false;
  BvpResult r = solve_bvp(pr, BvpMesh::uniform(4, VectorXd::Zero(1)), o);
  for (std::size_t i = 0; i < r.mesh.t.size(); ++i)
    CHECK(std::abs(r.mesh.Y(0, i) - std::pow(r.mesh.t[i], 4) / 4) < 1e-14);
}

TEST_CASE("equilibrium solution needs no correction") {
  ModelParams p = scenario1(11);
  Lake1D m(p);
  Lake0D m0(scenario1(0));
  auto eq0 = find_equilibria_0d(m0);
  REQUIRE(eq0.size() == 3);
  Equilibrium eq = newton_solve(m, lift_flat(eq0[2].X, 11));

  BvpProblem pr;
  pr.dim = m.dim();
  pr.f = [&](double, const VectorXd& X, const VectorXd&) {
    return 10.0 * m.rhs(X);  // horizon-scaled canonical flow
  };
  pr.dfdX = [&](double, const VectorXd& X, const VectorXd&) {
    return (10.0 * m.jacobian(X)).eval();
  };
  VectorXd Xhat = eq.X;
  pr.bc = [Xhat](const VectorXd& Xa, const VectorXd&, const VectorXd&) {
    return (Xa - Xhat).eval();
  };
  int d = m.dim();
  pr.dbc = [d](const VectorXd&, const VectorXd&, const VectorXd&) {
    return std::make_tuple(MatrixXd::Identity(d, d), MatrixXd::Zero(d, d),
                           MatrixXd::Zero(d, 0));
  };
  BvpResult r = solve_bvp(pr, BvpMesh::uniform(20, eq.X));
  CHECK(r.converged);
  CHECK(r.newton_iters <= 1);
  for (std::size_t i = 0; i < r.mesh.t.size(); ++i)
    CHECK((r.mesh.Y.col(i) - eq.X).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("free parameter with an integral row") {
  // X' = p, X(0) = 0, integral of X = 1/4  =>  p = 1/2, X(t) = t/2.
  BvpProblem pr;
  pr.dim = 1;
  pr.num_params = 1;
  pr.f = [](double, const VectorXd&, const VectorXd& p) {
    VectorXd f(1);
    f << p(0);
    return f;
  };
  pr.dfdX = [](double, const VectorXd&, const VectorXd&) {
    return MatrixXd::Zero(1, 1);
  };
  pr.dfdp = [](double, const VectorXd&, const VectorXd&) {
    return MatrixXd::Identity(1, 1);
  };
  pr.bc = [](const VectorXd& Xa, const VectorXd&, const VectorXd&) {
    return Xa;
  };
  pr.dbc = [](const VectorXd&, const VectorXd&, const VectorXd&) {
    return std::make_tuple(MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1),
                           MatrixXd::Zero(1, 1));
  };
  BvpProblem::IntegralRow row;
  row.weight = [](double) { return VectorXd::Ones(1); };
  row.param_coeff = VectorXd::Zero(1);
  row.rhs = 0.25;
  pr.integral_rows.push_back(row);

  BvpResult r = solve_bvp(
      pr, BvpMesh::uniform(16, VectorXd::Zero(1), VectorXd::Zero(1)));
  CHECK(r.converged);
  CHECK(r.mesh.p(0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(eval_solution(pr, r.mesh, 0.6)(0) ==
        doctest::Approx(0.3).epsilon(1e-8));

  // Releasing the integral row moves the family along d/dc (X, p) =
  // (2t, 2) up to normalization.
  auto [Zn, zp] = bvp_tangent(pr, r.mesh);
  REQUIRE(zp.size() == 1);
  double scale = zp(0) / 2.0;
  for (std::size_t i = 0; i < r.mesh.t.size(); ++i)
    CHECK(Zn(0, i) == doctest::Approx(2 * r.mesh.t[i] * scale).epsilon(1e-6));
}

TEST_CASE("re-solving a converged mesh is idempotent") {
  BvpProblem pr = growth_problem();
  VectorXd one = VectorXd::Ones(1);
  BvpResult r1 = solve_bvp(pr, BvpMesh::uniform(10, one));
  BvpResult r2 = solve_bvp(pr, r1.mesh);
  CHECK(r2.newton_iters == 0);
  CHECK(r1.mesh.t.size() == r2.mesh.t.size());
  CHECK((r1.mesh.Y - r2.mesh.Y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mesh refines around a sharp interior layer") {
  // X' = a sech^2(a (t - 1/2)): a steep tanh step at t = 1/2.
  double a = 60.0;
  BvpProblem pr;
  pr.dim = 1;
  pr.f = [a](double t, const VectorXd&, const VectorXd&) {
    double c = std::cosh(a * (t - 0.5));
    VectorXd f(1);
    f << a / (c * c);
    return f;
  };
  pr.dfdX = [](double, const VectorXd&, const VectorXd&) {
    return MatrixXd::Zero(1, 1);
  };
  pr.bc = [a](const VectorXd& Xa, const VectorXd&, const VectorXd&) {
    VectorXd g(1);
    g << Xa(0) + std::tanh(a / 2);
    return g;
  };
  pr.dbc = [](const VectorXd&, const VectorXd&, const VectorXd&) {
    return std::make_tuple(MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1),
                           MatrixXd::Zero(1, 0));
  };
  BvpResult r = solve_bvp(pr, BvpMesh::uniform(20, VectorXd::Zero(1)));
  CHECK(r.converged);
  CHECK(r.defect <= 1.0);
  int inside = 0, outside = 0;
  for (double t : r.mesh.t) (std::abs(t - 0.5) < 0.1 ? inside : outside)++;
  // Equal-width windows: [0.4, 0.6] is one fifth of the domain but should
  // hold well over a fifth of the nodes.
  CHECK(inside * 4 > outside);
  // And the solution matches tanh.
  for (std::size_t i = 0; i < r.mesh.t.size(); ++i)
    CHECK(std::abs(r.mesh.Y(0, i) - std::tanh(a * (r.mesh.t[i] - 0.5))) <
          1e-3);
}
