#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fluxband/params.hpp"

namespace fluxband {

/// Eigenpairs of a dense complex matrix, sorted by (Re, Im) of the value.
/// Right eigenvectors sit in the matching columns, each normalized to unit
/// 2-norm; residuals[i] = ||H*v_i - lambda_i*v_i||_2.  No orthogonality is
/// promised: the matrices here are non-normal.
struct EigenDecomposition {
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
  Eigen::VectorXd residuals;
};

/// Full eigendecomposition of a general complex square matrix (dim <= 2000).
///
/// Backed by a Schur-based dense solver.  Non-convergence raises
/// NumericalError, as does any eigenpair whose residual exceeds
/// 1e-9 * max(1, ||H||_inf); the backward-stable solver sits orders of
/// magnitude below that bound, so a violation means the input was broken
/// (NaN/Inf entries) rather than merely ill-conditioned.
inline EigenDecomposition eigendecompose(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("eigendecompose needs a square matrix");
  if (h.rows() < 1 || h.rows() > 2000)
    throw std::invalid_argument("eigendecompose handles dimensions 1..2000");
  if (!h.allFinite()) throw std::invalid_argument("matrix entries must be finite");

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(h, true);
  if (solver.info() != Eigen::Success)
    throw NumericalError("dense eigensolver failed to converge");

  const int n = static_cast<int>(h.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&ev](int a, int b) {
    if (ev(a).real() != ev(b).real()) return ev(a).real() < ev(b).real();
    return ev(a).imag() < ev(b).imag();
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  out.residuals.resize(n);
  const double h_norm = h.cwiseAbs().rowwise().sum().maxCoeff();
  const double bound = 1e-9 * std::max(1.0, h_norm);
  for (int i = 0; i < n; ++i) {
    out.eigenvalues(i) = ev(order[i]);
    Eigen::VectorXcd vec = solver.eigenvectors().col(order[i]);
    const double norm = vec.norm();
    if (norm == 0.0) throw NumericalError("eigensolver returned a zero eigenvector");
    vec /= norm;
    out.eigenvectors.col(i) = vec;
    out.residuals(i) = (h * vec - out.eigenvalues(i) * vec).norm();
    if (!(out.residuals(i) <= bound))
      throw NumericalError("eigenpair residual exceeds the accuracy contract");
  }
  return out;
}

/// Number of eigenvalues within tol of e0 (degenerate clusters are counted
/// by proximity, not by Jordan structure).
inline int eigenvalue_multiplicity(const EigenDecomposition& dec, Complex e0,
                                   double tol = 1e-6) {
  if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be >= 0");
  int count = 0;
  for (int i = 0; i < dec.eigenvalues.size(); ++i)
    if (std::abs(dec.eigenvalues(i) - e0) <= tol) ++count;
  return count;
}

}  // namespace fluxband
