#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "fluxband/cls.hpp"
#include "fluxband/spectral.hpp"

namespace fluxband {

/// Sampled solution of i d/dt psi = H psi.
///
/// times[i] pairs with states[i] and intensities[i] (per-site |psi|^2).
/// The first sample is t = 0 and, unless truncated, the last is t_final.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> states;
  std::vector<Eigen::VectorXd> intensities;
  /// Amplitudes crossed the overflow guard (1e150) and integration stopped
  /// early; the recorded samples are the valid prefix.
  bool overflow_truncated = false;
};

namespace detail {

constexpr double kOverflowGuard = 1e150;

inline void record_sample(Trajectory& tr, double t, const Eigen::VectorXcd& psi) {
  tr.times.push_back(t);
  tr.states.push_back(psi);
  tr.intensities.push_back(psi.cwiseAbs2());
}

}  // namespace detail

/// Fixed-step RK4 integration of the Schroedinger equation under a (generally
/// non-Hermitian) Hamiltonian, recording every stride-th step plus the final
/// time.
///
/// The step actually used is min(dt, 0.01 / max(1, ||H||_inf)), so stiff
/// gain/loss spectra cannot outrun the integrator; a trailing partial step
/// lands exactly on t_final.  Gain can grow amplitudes without bound: past
/// 1e150 (or on any non-finite value) the trajectory is truncated and
/// flagged instead of propagating overflow.
inline Trajectory evolve(const RealSpaceHamiltonian& h, const StateVector& psi0,
                         double t_final, double dt, int stride = 10) {
  if (h.matrix.rows() != psi0.amplitudes.size())
    throw std::invalid_argument("state and Hamiltonian dimensions differ");
  if (!(t_final >= 0.0)) throw std::invalid_argument("t_final must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");

  const double h_norm = h.matrix.cwiseAbs().rowwise().sum().maxCoeff();
  const double step = std::min(dt, 0.01 / std::max(1.0, h_norm));
  const Complex minus_i(0.0, -1.0);

  Trajectory tr;
  Eigen::VectorXcd psi = psi0.amplitudes;
  detail::record_sample(tr, 0.0, psi);
  if (t_final == 0.0) return tr;

  const auto rhs = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
    return minus_i * (h.matrix * x);
  };
  Eigen::VectorXcd k1, k2, k3, k4;
  const auto advance = [&](double dt_eff) {
    k1 = rhs(psi);
    k2 = rhs(psi + (0.5 * dt_eff) * k1);
    k3 = rhs(psi + (0.5 * dt_eff) * k2);
    k4 = rhs(psi + dt_eff * k3);
    psi += (dt_eff / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double peak = psi.cwiseAbs().maxCoeff();
    return std::isfinite(peak) && peak <= detail::kOverflowGuard;
  };

  const long n_full = static_cast<long>(std::floor(t_final / step));
  const double remainder = t_final - static_cast<double>(n_full) * step;
  for (long i = 1; i <= n_full; ++i) {
    if (!advance(step)) {
      tr.overflow_truncated = true;
      return tr;
    }
    const bool is_last = (i == n_full) && remainder <= 0.0;
    if (i % stride == 0 && !is_last)
      detail::record_sample(tr, static_cast<double>(i) * step, psi);
  }
  if (remainder > 0.0 && !advance(remainder)) {
    tr.overflow_truncated = true;
    return tr;
  }
  detail::record_sample(tr, t_final, psi);
  return tr;
}

/// Exact propagation psi(t) = V exp(-i*diag(e)*t) V^{-1} psi0 through a
/// precomputed eigendecomposition.
///
/// Refuses (NumericalError) eigenbases with 2-norm condition number above
/// 1e10: near an exceptional point V loses rank and this route is
/// meaningless; use evolve() there instead.
inline Eigen::VectorXcd eigenbasis_propagate(const EigenDecomposition& dec,
                                             const Eigen::VectorXcd& psi0, double t) {
  if (dec.eigenvectors.rows() != psi0.size())
    throw std::invalid_argument("state and eigenbasis dimensions differ");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dec.eigenvectors,
                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin > 1e10)
    throw NumericalError("eigenbasis condition number exceeds 1e10 (near-defective)");
  Eigen::VectorXcd coeff = svd.solve(psi0);
  const Complex minus_i(0.0, -1.0);
  for (int i = 0; i < coeff.size(); ++i)
    coeff(i) *= std::exp(minus_i * dec.eigenvalues(i) * t);
  return dec.eigenvectors * coeff;
}

/// Largest fraction of intensity found outside a set of support cells over
/// the whole trajectory: max_t sum_{j not in support} |psi_j|^2 / ||psi||^2.
/// An empty support set gives 1 by convention.
inline double intensity_outside_support(const Trajectory& tr,
                                        const std::set<int>& support_cells, int n_cells) {
  if (tr.times.empty()) throw std::invalid_argument("empty trajectory");
  double worst = 0.0;
  for (const Eigen::VectorXd& inten : tr.intensities) {
    if (inten.size() != 3 * n_cells)
      throw std::invalid_argument("trajectory does not match this cell count");
    double total = inten.sum();
    if (total == 0.0) continue;
    double inside = 0.0;
    for (int cell : support_cells) {
      if (cell < 1 || cell > n_cells) throw std::out_of_range("support cell outside 1..N");
      for (int s = 0; s < 3; ++s) inside += inten(3 * (cell - 1) + s);
    }
    worst = std::max(worst, (total - inside) / total);
  }
  return worst;
}

}  // namespace fluxband
