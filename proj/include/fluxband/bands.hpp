#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fluxband/cubic.hpp"

namespace fluxband {

/// Branch-tracked band energies over a uniform momentum grid.
///
/// k_grid covers (-pi, pi] in ascending order; bands[b][i] is the energy of
/// branch b at k_grid[i].  Branches are continuous in k rather than sorted at
/// each point, so a flat band stays in one branch across crossings.
struct BandStructure {
  std::vector<double> k_grid;
  std::array<std::vector<Complex>, 3> bands;
  LatticeParams params;
};

namespace detail {

inline const std::array<std::array<int, 3>, 6>& branch_permutations() {
  static const std::array<std::array<int, 3>, 6> perms = {{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  return perms;
}

// Assign the freshly solved triple to branches by minimizing total distance
// to the linear continuation of each branch (its previous value plus its
// last step).  Zeroth-order matching ties exactly at a transversal crossing,
// where the two assignments split the same total movement; the extrapolated
// target breaks that tie toward the branch that keeps its velocity.  Remaining
// near-ties fall to the assignment that moves the imaginary parts least,
// which keeps conjugate pairs from swapping where they collide on the real
// axis.
inline std::array<Complex, 3> match_branches(const std::array<Complex, 3>& prev,
                                             const std::array<Complex, 3>& next) {
  double best_cost = std::numeric_limits<double>::infinity();
  double best_im = std::numeric_limits<double>::infinity();
  std::array<Complex, 3> best = next;
  for (const auto& perm : branch_permutations()) {
    double cost = 0.0;
    double im_cost = 0.0;
    for (int b = 0; b < 3; ++b) {
      cost += std::abs(next[perm[b]] - prev[b]);
      im_cost += std::abs(next[perm[b]].imag() - prev[b].imag());
    }
    const double tie = 1e-12 * (1.0 + best_cost);
    if (cost < best_cost - tie || (cost <= best_cost + tie && im_cost < best_im)) {
      best_cost = std::min(cost, best_cost);
      best_im = im_cost;
      for (int b = 0; b < 3; ++b) best[b] = next[perm[b]];
    }
  }
  return best;
}

}  // namespace detail

/// Solve the band cubic on an n_k-point grid over (-pi, pi] and track the
/// three branches by continuity.
inline BandStructure band_structure(const LatticeParams& par, int n_k) {
  if (n_k < 2) throw std::invalid_argument("band_structure needs at least 2 k points");
  BandStructure bs;
  bs.params = par;
  bs.k_grid.resize(n_k);
  for (auto& band : bs.bands) band.resize(n_k);

  std::array<Complex, 3> prev{};
  std::array<Complex, 3> prev2{};
  for (int i = 0; i < n_k; ++i) {
    const double k = -M_PI + 2.0 * M_PI * (i + 1) / n_k;
    bs.k_grid[i] = k;
    std::array<Complex, 3> roots = solve_cubic(characteristic_cubic(par, k));
    if (i == 1) {
      roots = detail::match_branches(prev, roots);
    } else if (i > 1) {
      std::array<Complex, 3> predicted;
      for (int b = 0; b < 3; ++b) predicted[b] = prev[b] + (prev[b] - prev2[b]);
      roots = detail::match_branches(predicted, roots);
    }
    for (int b = 0; b < 3; ++b) bs.bands[b][i] = roots[b];
    prev2 = prev;
    prev = roots;
  }
  return bs;
}

/// Gain/loss rate and energy at which one band becomes exactly flat.
struct FlatBand {
  double gamma = 0.0;   ///< J * sin(phi)
  double energy = 0.0;  ///< -J * cos(phi)
  /// Set when gamma comes out negative (phi < 0): the condition is then
  /// unreachable for the gamma >= 0 lattices this engine represents.
  bool needs_negative_gamma = false;
};

/// The flux-tuned flat-band condition gamma = J*sin(phi), E = -J*cos(phi).
inline FlatBand flat_band_condition(double j, double phi) {
  if (j < 0.0) throw std::invalid_argument("J must be >= 0");
  FlatBand fb;
  fb.gamma = j * std::sin(phi);
  fb.energy = -j * std::cos(phi);
  fb.needs_negative_gamma = fb.gamma < 0.0;
  return fb;
}

/// 2-norm of (H(k) - E_fb) applied to the normalized antisymmetric cell state
/// (1, 0, -1)/sqrt(2), with E_fb = -J*cos(phi).  Analytically this equals
/// |gamma - J*sin(phi)| at every k, so it vanishes exactly on the flat-band
/// manifold and measures the distance from it otherwise.
inline double flat_band_residual(const LatticeParams& par, double k) {
  const BlochMatrix h = bloch_hamiltonian(par, k);
  const double inv_sqrt2 = 0.70710678118654752440;
  Eigen::Vector3cd f;
  f << Complex(inv_sqrt2), Complex(0.0), Complex(-inv_sqrt2);
  const Complex e_fb(-par.j_coupling * std::cos(par.phi), 0.0);
  return (h * f - e_fb * f).norm();
}

/// Spectrum of the isolated gain/loss A-C dimer and the eigenstate check
/// that underlies the flat band.
struct PtDimer {
  std::array<Complex, 2> energies{};  ///< +/- sqrt(J^2 - gamma^2), sorted by (Re, Im)
  /// Residual of the antisymmetric state (1, -1)/sqrt(2) against energy
  /// -J*cos(phi); equals |gamma - J*sin(phi)|.
  double antisymmetric_residual = 0.0;
};

/// Eigenvalues of [[i*gamma, J*e^{i*phi}], [J*e^{-i*phi}, -i*gamma]]: real
/// pair below the PT transition (gamma <= J), imaginary pair above it.
inline PtDimer pt_dimer_spectrum(double j, double gamma, double phi) {
  if (j < 0.0 || gamma < 0.0) throw std::invalid_argument("J and gamma must be >= 0");
  PtDimer d;
  const double rad = j * j - gamma * gamma;
  if (rad >= 0.0) {
    const double e = std::sqrt(rad);
    d.energies = {Complex(-e), Complex(e)};
  } else {
    const double e = std::sqrt(-rad);
    d.energies = {Complex(0.0, -e), Complex(0.0, e)};
  }
  d.antisymmetric_residual = std::abs(gamma - j * std::sin(phi));
  return d;
}

/// Worst-case distance of the spectrum from a candidate flat-band energy:
/// max over k of the distance from e_fb to the nearest branch.  Zero (to
/// roundoff) iff some branch is pinned at e_fb across the whole zone.
inline double flatness_deviation(const BandStructure& bs, Complex e_fb) {
  double worst = 0.0;
  for (std::size_t i = 0; i < bs.k_grid.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& band : bs.bands)
      nearest = std::min(nearest, std::abs(band[i] - e_fb));
    worst = std::max(worst, nearest);
  }
  return worst;
}

}  // namespace fluxband
