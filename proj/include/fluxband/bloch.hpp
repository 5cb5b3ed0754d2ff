#pragma once

#include <Eigen/Dense>
#include <complex>

#include "fluxband/params.hpp"

namespace fluxband {

/// Momentum-space Hamiltonian of one unit cell, basis order (A, B, C).
using BlochMatrix = Eigen::Matrix3cd;

/// Effective coupling between B and the A/C pair at crystal momentum k.
/// The intracell bond contributes v and the two half-strength intercell
/// bonds interfere to r*cos(k).
inline double bloch_coupling(const LatticeParams& p, double k) {
  return p.v + p.r * std::cos(k);
}

/// Bloch Hamiltonian H(k).  Diagonal carries the gain/loss pair +/- i*gamma,
/// B couples symmetrically to A and C, and the A-C corner entries carry the
/// flux phase J*exp(+i*phi) on the (A,C) entry.
inline BlochMatrix bloch_hamiltonian(const LatticeParams& p, double k) {
  const double s = bloch_coupling(p, k);
  const Complex ig(0.0, p.gamma);
  const Complex corner = p.j_coupling * std::exp(Complex(0.0, p.phi));
  BlochMatrix h;
  h << ig, Complex(s), corner,
      Complex(s), Complex(0.0), Complex(s),
      std::conj(corner), Complex(s), -ig;
  return h;
}

/// Parity: swap the gain and loss sites, leave B fixed.
inline Eigen::Matrix3d parity_operator() {
  Eigen::Matrix3d p;
  p << 0, 0, 1,
      0, 1, 0,
      1, 0, 0;
  return p;
}

/// Chiral (sublattice) operator: parity combined with a sign flip on B.
inline Eigen::Matrix3d chiral_operator() {
  Eigen::Matrix3d c;
  c << 0, 0, 1,
      0, -1, 0,
      1, 0, 0;
  return c;
}

/// Max-norm test of P * conj(H) * P == H for an explicit matrix.
inline bool is_pt_symmetric(const BlochMatrix& h, double tol = 1e-12) {
  const Eigen::Matrix3d p = parity_operator();
  BlochMatrix d = p * h.conjugate() * p - h;
  return d.cwiseAbs().maxCoeff() <= tol;
}

/// PT test for the Bloch Hamiltonian at momentum k.  Holds for every
/// parameter set: gain and loss are balanced by construction.
inline bool is_pt_symmetric(const LatticeParams& p, double k, double tol = 1e-12) {
  return is_pt_symmetric(bloch_hamiltonian(p, k), tol);
}

/// Max-norm test of C * H * C == -H for an explicit matrix.
inline bool is_chiral_symmetric(const BlochMatrix& h, double tol = 1e-12) {
  const Eigen::Matrix3d c = chiral_operator();
  BlochMatrix d = c * h * c + h;
  return d.cwiseAbs().maxCoeff() <= tol;
}

/// Chiral test for the Bloch Hamiltonian at momentum k.  Holds only when the
/// A-C corner phases cancel: J == 0, or cos(phi) == 0 (half-quantum flux).
inline bool is_chiral_symmetric(const LatticeParams& p, double k, double tol = 1e-12) {
  return is_chiral_symmetric(bloch_hamiltonian(p, k), tol);
}

}  // namespace fluxband
