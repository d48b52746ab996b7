#include "lakeoc/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lakeoc {

SpectralData classify(const MatrixXd& jacobian, double rho,
                      double center_tol) {
  (void)rho;
  const lapack_int m = static_cast<lapack_int>(jacobian.rows());
  if (jacobian.cols() != m || m % 2 != 0)
    throw DimensionError("classify expects a square matrix of even dimension");

  MatrixXd T = jacobian;  // overwritten with the Schur form
  MatrixXd Q(m, m);
  std::vector<double> wr(m), wi(m);
  lapack_int sdim = 0;
  lapack_int info =
      LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'N', nullptr, m, T.data(), m,
                    &sdim, wr.data(), wi.data(), Q.data(), m);
  if (info != 0)
    throw NumericalError("real Schur decomposition failed (dgees info=" +
                         std::to_string(info) + ")");

  // Reorder the stable cluster to the top-left.
  std::vector<lapack_logical> select(m);
  for (lapack_int i = 0; i < m; ++i) select[i] = wr[i] < -center_tol ? 1 : 0;
  lapack_int ns = 0;
  double s = 0, sep = 0;
  // job='B': the 'N' path trips a workspace-query bug in this LAPACKE.
  info = LAPACKE_dtrsen(LAPACK_COL_MAJOR, 'B', 'V', select.data(), m,
                        T.data(), m, Q.data(), m, wr.data(), wi.data(), &ns,
                        &s, &sep);
  if (info != 0)
    throw NumericalError("Schur reordering failed (dtrsen info=" +
                         std::to_string(info) + ", sep=" + std::to_string(sep) +
                         ")");

  SpectralData sd;
  sd.eigenvalues.resize(m);
  for (lapack_int i = 0; i < m; ++i)
    sd.eigenvalues[i] = {wr[i], wi[i]};
  sd.n_s = static_cast<int>(ns);
  for (lapack_int i = 0; i < m; ++i) {
    if (wr[i] > center_tol)
      ++sd.n_u;
    else if (wr[i] >= -center_tol)
      ++sd.n_c;
  }
  const int n = static_cast<int>(m) / 2;
  sd.stable_basis = Q.leftCols(sd.n_s);
  sd.unstable_complement = Q.rightCols(m - sd.n_s);
  sd.spp = sd.n_s == n;
  sd.defect = sd.n_s - n;
  sd.defect_printed = sd.n_s - sd.n_u - sd.n_c;
  return sd;
}

RhoSymmetryReport check_rho_symmetry(const MatrixXd& jacobian, double rho,
                                     double tol) {
  Eigen::EigenSolver<MatrixXd> es(jacobian, false);
  std::vector<std::complex<double>> mu;
  mu.reserve(jacobian.rows());
  for (Eigen::Index i = 0; i < jacobian.rows(); ++i)
    mu.push_back(es.eigenvalues()(i) - rho / 2.0);

  RhoSymmetryReport rep;
  while (!mu.empty()) {
    std::complex<double> a = mu.back();
    mu.pop_back();
    // Nearest partner to -a (a itself may self-pair when a ~ 0).
    double best = std::abs(a + a);
    std::ptrdiff_t best_j = -1;
    for (std::size_t j = 0; j < mu.size(); ++j) {
      double d = std::abs(mu[j] + a);
      if (d < best) {
        best = d;
        best_j = static_cast<std::ptrdiff_t>(j);
      }
    }
    if (best_j >= 0) mu.erase(mu.begin() + best_j);
    rep.max_pairing_error = std::max(rep.max_pairing_error, best);
  }
  rep.symmetric = rep.max_pairing_error < tol;
  return rep;
}

SppConsistency spp_two_ways(const SpectralData& spectral, double rho,
                            double tol) {
  SppConsistency r;
  r.spp_by_count = spectral.spp;
  r.spp_by_inequality = true;
  for (const auto& ev : spectral.eigenvalues) {
    double d = std::abs(ev.real() - rho / 2.0) - rho / 2.0;
    if (d <= 0) r.spp_by_inequality = false;
    if (std::abs(d) <= tol) r.ambiguous = true;
  }
  r.agree = r.spp_by_count == r.spp_by_inequality;
  return r;
}

MatrixXd asymptotic_bc_matrix(const SpectralData& spectral) {
  if (spectral.n_s == 0)
    throw NumericalError("no stable subspace: asymptotic BC undefined");
  return spectral.unstable_complement;
}

double truncation_time(const SpectralData& spectral, double T0) {
  if (spectral.n_s == 0)
    throw NumericalError("no stable subspace: truncation time undefined");
  double m = std::numeric_limits<double>::infinity();
  for (const auto& ev : spectral.eigenvalues)
    if (ev.real() < 0) m = std::min(m, std::abs(ev.real()));
  if (m < 1e-12)
    throw NumericalError("stable eigenvalue too close to the imaginary axis");
  return T0 / m;
}

}  // namespace lakeoc
