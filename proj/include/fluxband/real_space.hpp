#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "fluxband/params.hpp"

namespace fluxband {

/// Sites of one unit cell, in storage order.
enum class Site { A = 0, B = 1, C = 2 };

/// Row/column index of (cell, site) in the 3N-dimensional basis.
/// Cells are numbered 1..N throughout the public interface.
inline int site_index(int cell, Site s, int n_cells) {
  if (cell < 1 || cell > n_cells) throw std::out_of_range("cell index outside 1..N");
  return 3 * (cell - 1) + static_cast<int>(s);
}

/// Dense real-space Hamiltonian of an N-cell chain, basis (A1, B1, C1, A2, ...).
struct RealSpaceHamiltonian {
  Eigen::MatrixXcd matrix;
  int n_cells = 0;
  Boundary boundary = Boundary::Periodic;
};

/// Assemble the 3N x 3N Hamiltonian: +/- i*gamma on the A/C diagonals, the
/// A-C flux bond J*e^{i*phi} inside each cell, v bonds to the cell's own B,
/// and four half-strength r/2 bonds to the neighboring B sites (wrapping
/// under periodic boundaries, truncated at open ends).
inline RealSpaceHamiltonian real_space_hamiltonian(const LatticeParams& par) {
  validate(par);
  const int n = par.n_cells;
  const double half_r = 0.5 * par.r;
  const Complex ig(0.0, par.gamma);
  const Complex corner = par.j_coupling * std::exp(Complex(0.0, par.phi));

  RealSpaceHamiltonian h;
  h.n_cells = n;
  h.boundary = par.boundary;
  h.matrix = Eigen::MatrixXcd::Zero(3 * n, 3 * n);
  Eigen::MatrixXcd& m = h.matrix;

  const auto idx = [n](int cell, Site s) { return site_index(cell, s, n); };
  const auto bond = [&m](int i, int j, Complex t) {
    m(i, j) += t;
    m(j, i) += std::conj(t);
  };

  for (int cell = 1; cell <= n; ++cell) {
    m(idx(cell, Site::A), idx(cell, Site::A)) = ig;
    m(idx(cell, Site::C), idx(cell, Site::C)) = -ig;
    bond(idx(cell, Site::A), idx(cell, Site::C), corner);
    bond(idx(cell, Site::A), idx(cell, Site::B), Complex(par.v));
    bond(idx(cell, Site::C), idx(cell, Site::B), Complex(par.v));
    for (int step : {-1, 1}) {
      int nb = cell + step;
      if (nb < 1 || nb > n) {
        if (par.boundary == Boundary::Open) continue;
        nb = (nb < 1) ? n : 1;
      }
      bond(idx(cell, Site::A), idx(nb, Site::B), Complex(half_r));
      bond(idx(cell, Site::C), idx(nb, Site::B), Complex(half_r));
    }
  }
  return h;
}

/// Real-space parity: cell reflection j -> N+1-j combined with the A <-> C
/// swap.  Permutation matrix, an involution.
inline Eigen::MatrixXd real_space_parity(int n_cells) {
  if (n_cells < 1) throw std::invalid_argument("n_cells must be >= 1");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3 * n_cells, 3 * n_cells);
  for (int cell = 1; cell <= n_cells; ++cell) {
    const int mirror = n_cells + 1 - cell;
    p(site_index(mirror, Site::C, n_cells), site_index(cell, Site::A, n_cells)) = 1.0;
    p(site_index(mirror, Site::B, n_cells), site_index(cell, Site::B, n_cells)) = 1.0;
    p(site_index(mirror, Site::A, n_cells), site_index(cell, Site::C, n_cells)) = 1.0;
  }
  return p;
}

/// Real-space chiral operator: the parity permutation composed with the
/// per-cell sign structure diag(+1, -1, +1).  Anticommutes with the
/// Hamiltonian exactly when the Bloch chiral symmetry holds (J = 0 or
/// cos(phi) = 0); an involution.
inline Eigen::MatrixXd real_space_chiral(int n_cells) {
  if (n_cells < 1) throw std::invalid_argument("n_cells must be >= 1");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3 * n_cells, 3 * n_cells);
  for (int cell = 1; cell <= n_cells; ++cell) {
    const int mirror = n_cells + 1 - cell;
    c(site_index(mirror, Site::C, n_cells), site_index(cell, Site::A, n_cells)) = 1.0;
    c(site_index(mirror, Site::B, n_cells), site_index(cell, Site::B, n_cells)) = -1.0;
    c(site_index(mirror, Site::A, n_cells), site_index(cell, Site::C, n_cells)) = 1.0;
  }
  return c;
}

}  // namespace fluxband
