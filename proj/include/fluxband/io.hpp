#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <ostream>
#include <string>

#include "fluxband/bands.hpp"
#include "fluxband/cls.hpp"
#include "fluxband/dynamics.hpp"
#include "fluxband/spectral.hpp"

namespace fluxband {

/// Shortest reasonable decimal form with 15 significant digits ("%.15g"),
/// the format used by every numeric CSV column.
inline std::string format_g15(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

inline const char* site_label(Site s) {
  switch (s) {
    case Site::A: return "A";
    case Site::B: return "B";
    default: return "C";
  }
}

/// Rows ordered by k, then band index.
inline void write_bands_csv(std::ostream& os, const BandStructure& bs) {
  os << "k,band_index,re,im\n";
  for (std::size_t i = 0; i < bs.k_grid.size(); ++i)
    for (int b = 0; b < 3; ++b)
      os << format_g15(bs.k_grid[i]) << ',' << b << ','
         << format_g15(bs.bands[b][i].real()) << ','
         << format_g15(bs.bands[b][i].imag()) << '\n';
}

/// Eigenvalues in their stored (Re, Im)-sorted order.
inline void write_spectrum_csv(std::ostream& os, const EigenDecomposition& dec) {
  os << "index,re,im\n";
  for (int i = 0; i < dec.eigenvalues.size(); ++i)
    os << i << ',' << format_g15(dec.eigenvalues(i).real()) << ','
       << format_g15(dec.eigenvalues(i).imag()) << '\n';
}

/// One row per site, cells numbered from 1.
inline void write_state_csv(std::ostream& os, const StateVector& psi) {
  os << "cell,site,re,im\n";
  for (int j = 1; j <= psi.n_cells; ++j)
    for (Site s : {Site::A, Site::B, Site::C}) {
      const Complex amp = psi.amplitudes(site_index(j, s, psi.n_cells));
      os << j << ',' << site_label(s) << ',' << format_g15(amp.real()) << ','
         << format_g15(amp.imag()) << '\n';
    }
}

/// Per-site intensities for every recorded sample, ordered by time, cell, site.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, int n_cells) {
  os << "t,cell,site,intensity\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    for (int j = 1; j <= n_cells; ++j)
      for (Site s : {Site::A, Site::B, Site::C}) {
        const double val = tr.intensities[i](3 * (j - 1) + static_cast<int>(s));
        os << format_g15(tr.times[i]) << ',' << j << ',' << site_label(s) << ','
           << format_g15(val) << '\n';
      }
}

/// Text form of a complex matrix: one row per line, entries "re+imj"
/// separated by commas.
inline void write_matrix_csv(std::ostream& os, const Eigen::MatrixXcd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      const double im = m(i, j).imag();
      os << format_g15(m(i, j).real()) << (im < 0.0 ? '-' : '+')
         << format_g15(std::abs(im)) << 'j';
    }
    os << '\n';
  }
}

namespace detail {

inline void put_le_f64(std::ostream& os, double x) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof x);
  std::memcpy(&bits, &x, sizeof bits);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  os.write(bytes, 8);
}

}  // namespace detail

/// Raw binary form: a 16-byte header (two little-endian int64: rows, cols)
/// followed by row-major (re, im) float64 pairs, little-endian.
inline void write_matrix_binary(std::ostream& os, const Eigen::MatrixXcd& m) {
  const auto put_i64 = [&os](std::int64_t v) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(bytes, 8);
  };
  put_i64(m.rows());
  put_i64(m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      detail::put_le_f64(os, m(i, j).real());
      detail::put_le_f64(os, m(i, j).imag());
    }
}

}  // namespace fluxband
