#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace fluxband {

using Complex = std::complex<double>;

/// Boundary condition of the chain of unit cells.
enum class Boundary { Periodic, Open };

/// Thrown when a numerical routine cannot meet its accuracy contract
/// (eigensolver non-convergence, ill-conditioned eigenbasis, overflow).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Couplings and geometry of the gain/loss cross-stitch lattice.
///
/// Each unit cell holds three sites: A carries gain +i*gamma, B is passive,
/// C carries loss -i*gamma.  A and C couple to B with strength v inside the
/// cell and with strength r/2 to the B sites of both neighboring cells.  A and
/// C couple directly through a complex hopping J*exp(+i*phi) on the A->C bond,
/// which threads a synthetic flux phi through each triangular plaquette.
///
/// Treat instances as immutable values; build them with make_lattice_params()
/// so the invariants below hold.
struct LatticeParams {
  double gamma = 0.0;      ///< gain/loss rate, >= 0
  double v = 0.0;          ///< intracell A-B and B-C coupling, >= 0
  double j_coupling = 0.0; ///< magnitude of the direct A-C coupling, >= 0
  double r = 1.0;          ///< intercell coupling scale, > 0 (each bond carries r/2)
  double phi = 0.0;        ///< synthetic flux, normalized to (-pi, pi]
  int n_cells = 1;         ///< number of unit cells N
  Boundary boundary = Boundary::Periodic;
};

namespace detail {

// Shared tolerances for recognizing the measure-zero parameter configurations.
// Exactly representable inputs land within a few ulp of these lines; genuinely
// off-line parameters sit many orders of magnitude outside the windows.
constexpr double kChiralTol = 1e-12;    // |cos(phi)| or J below this: chiral line
constexpr double kMergeTol = 1e-12;     // |cos(k)| within this of +/-1: merged pair
constexpr double kManifoldTol = 1e-12;  // |gamma - J*sin(phi)| scale tolerance

}  // namespace detail

/// Map an arbitrary angle to the principal window (-pi, pi].
inline double normalize_flux(double phi) {
  double x = std::fmod(phi + M_PI, 2.0 * M_PI);
  if (x <= 0.0) x += 2.0 * M_PI;
  return x - M_PI;
}

/// Throws std::invalid_argument unless every field satisfies its invariant.
inline void validate(const LatticeParams& p) {
  if (!(p.gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(p.v >= 0.0)) throw std::invalid_argument("v must be >= 0");
  if (!(p.j_coupling >= 0.0)) throw std::invalid_argument("J must be >= 0");
  if (!(p.r > 0.0)) throw std::invalid_argument("r must be > 0");
  if (!std::isfinite(p.gamma) || !std::isfinite(p.v) || !std::isfinite(p.j_coupling) ||
      !std::isfinite(p.r) || !std::isfinite(p.phi))
    throw std::invalid_argument("lattice parameters must be finite");
  if (p.phi <= -M_PI || p.phi > M_PI)
    throw std::invalid_argument("phi must lie in (-pi, pi]; use make_lattice_params");
  if (p.n_cells < 1) throw std::invalid_argument("n_cells must be >= 1");
  if (p.boundary == Boundary::Periodic && p.n_cells < 3)
    throw std::invalid_argument("periodic chains need at least 3 cells");
}

/// Validating constructor: normalizes phi into (-pi, pi] and checks ranges.
inline LatticeParams make_lattice_params(double gamma, double v, double j, double r,
                                         double phi, int n_cells,
                                         Boundary boundary = Boundary::Periodic) {
  LatticeParams p;
  p.gamma = gamma;
  p.v = v;
  p.j_coupling = j;
  p.r = r;
  p.phi = normalize_flux(phi);
  p.n_cells = n_cells;
  p.boundary = boundary;
  validate(p);
  return p;
}

}  // namespace fluxband
