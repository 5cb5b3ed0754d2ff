#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fluxband/real_space.hpp"

namespace fluxband {

/// Amplitudes of one unit cell, in (A, B, C) order.
struct CellTriple {
  Complex a{0.0, 0.0};
  Complex b{0.0, 0.0};
  Complex c{0.0, 0.0};
};

/// A state on the N-cell chain, stored in the (A1, B1, C1, A2, ...) basis.
struct StateVector {
  Eigen::VectorXcd amplitudes;
  int n_cells = 0;

  static StateVector zero(int n_cells) {
    StateVector s;
    s.n_cells = n_cells;
    s.amplitudes = Eigen::VectorXcd::Zero(3 * n_cells);
    return s;
  }

  CellTriple cell(int j) const {
    return {amplitudes(site_index(j, Site::A, n_cells)),
            amplitudes(site_index(j, Site::B, n_cells)),
            amplitudes(site_index(j, Site::C, n_cells))};
  }

  void set_cell(int j, const CellTriple& t) {
    amplitudes(site_index(j, Site::A, n_cells)) = t.a;
    amplitudes(site_index(j, Site::B, n_cells)) = t.b;
    amplitudes(site_index(j, Site::C, n_cells)) = t.c;
  }
};

namespace detail {

// Chirality test shared by the state constructors: the A-C corner phases
// cancel when J vanishes or the flux is a half quantum.
inline bool is_chiral_point(const LatticeParams& p) {
  return p.j_coupling <= kChiralTol || std::abs(std::cos(p.phi)) <= kChiralTol;
}

// e^{i*phi} with the real part forced to zero on the chiral line, so that
// exactly representable inputs produce exactly imaginary corners instead of
// an O(1e-16) residue from cos(phi).
inline Complex corner_phase(const LatticeParams& p) {
  if (std::abs(std::cos(p.phi)) <= kChiralTol)
    return Complex(0.0, p.phi > 0.0 ? 1.0 : -1.0);
  return std::exp(Complex(0.0, p.phi));
}

inline void require_flat_band(const LatticeParams& p, const char* who) {
  const double gamma_fb = p.j_coupling * std::sin(p.phi);
  const double scale = std::max(1.0, p.j_coupling);
  if (std::abs(p.gamma - gamma_fb) > kManifoldTol * scale)
    throw std::invalid_argument(std::string(who) +
                                " requires the flat-band condition gamma = J*sin(phi)");
}

}  // namespace detail

/// Energy of the localized flat-band states: exactly zero on the chiral
/// line, -J*cos(phi) otherwise.
inline double cls_energy(const LatticeParams& p) {
  if (detail::is_chiral_point(p)) return 0.0;
  return -p.j_coupling * std::cos(p.phi);
}

/// Core cell of the localized states.  On the chiral line this is
/// (1, (J*e^{i*phi} - i*gamma)/v, -1), an exact zero mode for every gamma;
/// off it the B amplitude must vanish and the flat-band condition is
/// required, giving (1, 0, -1).
inline CellTriple cls_core(const LatticeParams& p) {
  if (!(p.v > 0.0)) throw std::invalid_argument("cls_core requires v > 0");
  if (detail::is_chiral_point(p)) {
    const Complex corner = p.j_coupling * detail::corner_phase(p);
    return {Complex(1.0), (corner - Complex(0.0, p.gamma)) / p.v, Complex(-1.0)};
  }
  detail::require_flat_band(p, "cls_core");
  return {Complex(1.0), Complex(0.0), Complex(-1.0)};
}

/// Wing cell (r/(2v), 0, -r/(2v)) that terminates the core against the
/// intercell bonds.
inline CellTriple cls_wing(const LatticeParams& p) {
  if (!(p.v > 0.0)) throw std::invalid_argument("cls_wing requires v > 0");
  const double rho = 0.5 * p.r / p.v;
  return {Complex(rho), Complex(0.0), Complex(-rho)};
}

/// Two edge-mode shapes, named by their support width.
enum class EdgeModeVariant { TwoCell, ThreeCell };
enum class Side { Left, Right };

/// Normalize in place; rejects the zero vector.
inline void normalize(StateVector& s) {
  const double n = s.amplitudes.norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize a zero state");
  s.amplitudes /= n;
}

/// PT image of a state: reflect cells j -> N+1-j with A <-> C, then
/// conjugate.  An (antilinear) involution.
inline StateVector pt_partner(const StateVector& psi) {
  StateVector out = StateVector::zero(psi.n_cells);
  for (int j = 1; j <= psi.n_cells; ++j) {
    const CellTriple t = psi.cell(j);
    out.set_cell(psi.n_cells + 1 - j,
                 {std::conj(t.c), std::conj(t.b), std::conj(t.a)});
  }
  return out;
}

/// Boundary mode of the open chain, localized on the outermost cells.
///
/// The TwoCell variant places the core on cell 1 with one wing on cell 2;
/// the ThreeCell variant runs wing, core, wing across cells 1..3.  Right-side
/// modes are the PT images of the left-side ones.  Amplitudes are kept as
/// constructed (not normalized).  Requires open boundaries, v > 0 and, off
/// the chiral line, the flat-band condition.
inline StateVector edge_mode(const LatticeParams& p, EdgeModeVariant variant,
                             Side side = Side::Left) {
  if (p.boundary != Boundary::Open)
    throw std::invalid_argument("edge modes exist only on open chains");
  const int need = (variant == EdgeModeVariant::TwoCell) ? 2 : 3;
  if (p.n_cells < need)
    throw std::invalid_argument("edge mode support does not fit this chain");
  const CellTriple core = cls_core(p);
  const CellTriple wing = cls_wing(p);

  StateVector s = StateVector::zero(p.n_cells);
  if (variant == EdgeModeVariant::TwoCell) {
    s.set_cell(1, core);
    s.set_cell(2, wing);
  } else {
    s.set_cell(1, wing);
    s.set_cell(2, core);
    s.set_cell(3, wing);
  }
  if (side == Side::Right) s = pt_partner(s);
  return s;
}

/// Normalized flat-band eigenstate with per-cell weights zeta: amplitudes
/// (zeta_j, 0, -zeta_j)/sqrt(2*sum|zeta|^2).  Any such combination is an
/// exact eigenstate at energy -J*cos(phi) once gamma = J*sin(phi).
inline StateVector flat_band_superposition(const LatticeParams& p,
                                           const std::vector<Complex>& zeta) {
  if (static_cast<int>(zeta.size()) != p.n_cells)
    throw std::invalid_argument("need one weight per cell");
  detail::require_flat_band(p, "flat_band_superposition");
  double omega = 0.0;
  for (const Complex& z : zeta) omega += std::norm(z);
  if (omega == 0.0) throw std::invalid_argument("weights must not all vanish");
  const double scale = 1.0 / std::sqrt(2.0 * omega);
  StateVector s = StateVector::zero(p.n_cells);
  for (int j = 1; j <= p.n_cells; ++j) {
    const Complex a = zeta[j - 1] * scale;
    s.set_cell(j, {a, Complex(0.0), -a});
  }
  return s;
}

/// Interior compact localized state centered on a given cell.
///
/// Chiral line: wing, core, wing on cells (center-1, center, center+1) with
/// amplitudes as constructed, wrapping under periodic boundaries; an exact
/// zero mode for every gamma.  Off the chiral line: the single-cell
/// antisymmetric state (1, 0, -1)/sqrt(2) on the center cell, which requires
/// the flat-band condition and carries energy -J*cos(phi).  On open chains
/// the center must be an interior cell (2..N-1); use an edge mode at the
/// boundary.
inline StateVector inner_cls(const LatticeParams& p, int center) {
  if (center < 1 || center > p.n_cells)
    throw std::invalid_argument("center cell outside 1..N");
  if (p.boundary == Boundary::Open && (center < 2 || center > p.n_cells - 1))
    throw std::invalid_argument(
        "interior state excludes the boundary cells; use an edge mode there");
  if (detail::is_chiral_point(p)) {
    const auto wrap = [&p](int j) { return ((j - 1) % p.n_cells + p.n_cells) % p.n_cells + 1; };
    StateVector s = StateVector::zero(p.n_cells);
    s.set_cell(wrap(center - 1), cls_wing(p));
    s.set_cell(center, cls_core(p));
    s.set_cell(wrap(center + 1), cls_wing(p));
    return s;
  }
  std::vector<Complex> zeta(p.n_cells, Complex(0.0));
  zeta[center - 1] = Complex(1.0);
  return flat_band_superposition(p, zeta);
}

/// Relative eigenpair residual ||H*psi - e*psi|| / ||psi||.
inline double eigenstate_residual(const RealSpaceHamiltonian& h, const StateVector& psi,
                                  Complex e) {
  if (h.matrix.rows() != psi.amplitudes.size())
    throw std::invalid_argument("state and Hamiltonian dimensions differ");
  const double n = psi.amplitudes.norm();
  if (n == 0.0) throw std::invalid_argument("residual of the zero state is undefined");
  return (h.matrix * psi.amplitudes - e * psi.amplitudes).norm() / n;
}

}  // namespace fluxband
