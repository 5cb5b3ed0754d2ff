#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "fluxband/bloch.hpp"
#include "fluxband/params.hpp"

namespace fluxband {

/// Depressed cubic E^3 + p*E + q = 0.  The quadratic term vanishes for the
/// band problem because the Hamiltonian is traceless.
struct CubicCoefficients {
  Complex p{0.0, 0.0};
  Complex q{0.0, 0.0};
};

/// Coefficients of det(E*I - H(k)) for the three-band Bloch Hamiltonian:
///   p = -(2*s^2 + J^2 - gamma^2),  q = -2*s^2*J*cos(phi),  s = v + r*cos(k).
/// Both are real for every parameter set: the PT symmetry of H(k) forces a
/// real characteristic polynomial even when the spectrum is complex.
inline CubicCoefficients characteristic_cubic(const LatticeParams& par, double k) {
  const double s = bloch_coupling(par, k);
  const double j = par.j_coupling;
  const double p = -(2.0 * s * s + j * j - par.gamma * par.gamma);
  const double q = -2.0 * s * s * j * std::cos(par.phi);
  return {Complex(p), Complex(q)};
}

/// |E^3 + p*E + q| for a candidate root.
inline double cubic_residual(const CubicCoefficients& c, Complex e) {
  return std::abs((e * e + c.p) * e + c.q);
}

/// Scale against which root residuals are judged: max(1, |p|^{3/2}, |q|).
inline double cubic_scale(const CubicCoefficients& c) {
  return std::max({1.0, std::pow(std::abs(c.p), 1.5), std::abs(c.q)});
}

namespace detail {

// One or two guarded Newton corrections.  Steps that fail to reduce the
// residual are discarded, so clustered (near-multiple) roots keep their
// closed-form values instead of wandering.
inline Complex polish_root(Complex x, Complex p, Complex q) {
  for (int it = 0; it < 2; ++it) {
    const Complex f = (x * x + p) * x + q;
    const Complex df = 3.0 * x * x + p;
    if (std::abs(df) == 0.0) break;
    const Complex xn = x - f / df;
    if (std::abs((xn * xn + p) * xn + q) < std::abs(f))
      x = xn;
    else
      break;
  }
  return x;
}

inline double polish_root(double x, double p, double q) {
  for (int it = 0; it < 2; ++it) {
    const double f = (x * x + p) * x + q;
    const double df = 3.0 * x * x + p;
    if (df == 0.0) break;
    const double xn = x - f / df;
    if (std::abs((xn * xn + p) * xn + q) < std::abs(f))
      x = xn;
    else
      break;
  }
  return x;
}

inline bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace detail

/// Closed-form roots of E^3 + p*E + q = 0, polished by guarded Newton steps
/// and sorted by (Re, Im).
///
/// Real coefficients take a dedicated branch (trigonometric form when all
/// three roots are real, Cardano otherwise) so that the result is exactly one
/// real root plus a conjugate pair, or three exactly real roots.  Complex
/// coefficients fall back to the general Cardano formula with the cube root
/// chosen to avoid cancellation.  Residuals stay within
/// 1e-12 * max(1, |p|^{3/2}, |q|).
inline std::array<Complex, 3> solve_cubic(const CubicCoefficients& c) {
  std::array<Complex, 3> roots;

  if (c.p == Complex(0.0) && c.q == Complex(0.0)) {
    roots.fill(Complex(0.0));
    return roots;
  }

  if (c.p.imag() == 0.0 && c.q.imag() == 0.0) {
    const double p = c.p.real();
    const double q = c.q.real();
    const double q2 = 0.5 * q;
    const double p3 = p / 3.0;
    const double disc = q2 * q2 + p3 * p3 * p3;

    if (disc <= 0.0) {
      // Three real roots.  disc <= 0 forces p3 <= 0.
      const double m = std::sqrt(-p3);
      const double arg = std::clamp(-q2 / (m * m * m), -1.0, 1.0);
      const double theta = std::acos(arg);
      const double two_pi = 2.0 * M_PI;
      for (int i = 0; i < 3; ++i) {
        double x = 2.0 * m * std::cos((theta - two_pi * i) / 3.0);
        roots[i] = Complex(detail::polish_root(x, p, q));
      }
    } else {
      // One real root plus a conjugate pair.  Pick the cube whose sign
      // matches -q2 so the subtraction cannot cancel.
      const double sq = std::sqrt(disc);
      const double u3 = (q2 >= 0.0) ? (-q2 - sq) : (-q2 + sq);
      const double u = std::cbrt(u3);
      const double w = (u != 0.0) ? -p3 / u : 0.0;
      double x1 = detail::polish_root(u + w, p, q);
      const double half_sqrt3 = 0.86602540378443864676;
      Complex z(-0.5 * (u + w), half_sqrt3 * (u - w));
      z = detail::polish_root(z, Complex(p), Complex(q));
      roots = {Complex(x1), z, std::conj(z)};
    }
  } else {
    const Complex q2 = 0.5 * c.q;
    const Complex p3 = c.p / 3.0;
    const Complex sq = std::sqrt(q2 * q2 + p3 * p3 * p3);
    Complex u3 = -q2 - sq;
    if (std::abs(-q2 + sq) > std::abs(u3)) u3 = -q2 + sq;
    const Complex u = std::pow(u3, 1.0 / 3.0);
    const Complex w = (std::abs(u) != 0.0) ? -p3 / u : Complex(0.0);
    const Complex omega(-0.5, 0.86602540378443864676);
    const Complex omega2 = std::conj(omega);
    roots = {u + w, u * omega + w * omega2, u * omega2 + w * omega};
    for (auto& x : roots) x = detail::polish_root(x, c.p, c.q);
  }

  std::sort(roots.begin(), roots.end(), detail::lex_less);
  return roots;
}

}  // namespace fluxband
