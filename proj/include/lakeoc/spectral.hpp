#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "lakeoc/errors.hpp"

namespace lakeoc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Eigenstructure of a canonical-system Jacobian at an equilibrium.
struct SpectralData {
  std::vector<std::complex<double>> eigenvalues;  // length 2n
  int n_s = 0;  // dim of stable subspace (Re < -center_tol)
  int n_u = 0;  // dim of unstable subspace (Re > +center_tol)
  int n_c = 0;  // dim of center subspace
  MatrixXd stable_basis;          // 2n x n_s, orthonormal
  MatrixXd unstable_complement;   // 2n x (2n - n_s), orthonormal, F^T E^s = 0
  bool spp = false;               // n_s == n
  int defect = 0;                 // n_s - n
  int defect_printed = 0;         // n_s - n_u - n_c (diagnostic only)

  int n() const { return static_cast<int>(eigenvalues.size()) / 2; }
};

/// Classify the spectrum and invariant subspaces of a 2n x 2n Jacobian.
/// Uses an ordered real Schur decomposition (stable block first).
SpectralData classify(const MatrixXd& jacobian, double rho,
                      double center_tol = 1e-8);

struct RhoSymmetryReport {
  bool symmetric = false;
  double max_pairing_error = 0.0;
};

/// Check that the eigenvalues occur as rho/2 +- mu (symmetry about rho/2),
/// by greedy nearest-pair matching of the shifted multiset under negation.
RhoSymmetryReport check_rho_symmetry(const MatrixXd& jacobian, double rho,
                                     double tol = 1e-8);

struct SppConsistency {
  bool spp_by_count = false;
  bool spp_by_inequality = false;  // |Re eig - rho/2| > rho/2 for all
  bool agree = false;
  bool ambiguous = false;  // some eigenvalue within tol of the circle
};

/// Evaluate the saddle point property both by counting and by the
/// eigenvalue inequality, and report agreement.
SppConsistency spp_two_ways(const SpectralData& spectral, double rho,
                            double tol = 1e-10);

/// Orthonormal basis of the orthogonal complement of the stable subspace
/// (the asymptotic boundary-condition matrix F).
MatrixXd asymptotic_bc_matrix(const SpectralData& spectral);

/// Truncation horizon T = T0 / min over stable eigenvalues of |Re|.
double truncation_time(const SpectralData& spectral, double T0 = 10.0);

}  // namespace lakeoc
