#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fluxband/bands.hpp"

namespace fluxband {

/// Degeneracy order of a band-touching point.
enum class DegeneracyOrder { EP2, EP3, Diabolic };

/// A point in the zone where the flat band meets a dispersive band.
struct DegeneracyPoint {
  double k = 0.0;
  DegeneracyOrder order = DegeneracyOrder::EP2;
  Complex energy{0.0, 0.0};
  /// True when a +/-k pair has merged at k = 0 or |k| = pi.
  bool merged = false;
};

/// Where the flat band sits relative to the dispersive bands.
enum class FlatBandLocation { InsideGap, Intersecting, OutsideBands };

/// Outcome of the flux/coupling phase classification.
struct PhaseClassification {
  int ep_count = 0;  ///< number of distinct degeneracy momenta in (-pi, pi]
  FlatBandLocation location = FlatBandLocation::Intersecting;
  bool boundary_case = false;  ///< a +/-k pair sits exactly at k = 0 or pi
};

namespace detail {

struct EpMomenta {
  std::vector<DegeneracyPoint> points;  // ascending k, merged points once
  bool chiral = false;
};

// Closed-form degeneracy momenta on the flat-band manifold: solutions of
// (v + r cos k)^2 = (J cos phi)^2.  Shared by the locator and the phase
// classifier so that counting conventions cannot drift apart.
inline EpMomenta ep_momenta(double j, double phi, double v, double r) {
  EpMomenta out;
  const double u = j * std::cos(phi);
  out.chiral = (j <= kChiralTol) || (std::abs(std::cos(phi)) <= kChiralTol);
  const Complex energy(-u, 0.0);
  const DegeneracyOrder order = out.chiral ? DegeneracyOrder::EP3 : DegeneracyOrder::EP2;

  std::vector<double> targets;
  if (out.chiral)
    targets = {0.0};
  else
    targets = {u, -u};

  for (double t : targets) {
    const double c = (t - v) / r;
    if (c > 1.0 + kMergeTol || c < -1.0 - kMergeTol) continue;
    DegeneracyPoint pt;
    pt.order = order;
    pt.energy = energy;
    if (c >= 1.0 - kMergeTol) {
      pt.k = 0.0;
      pt.merged = true;
      out.points.push_back(pt);
    } else if (c <= -1.0 + kMergeTol) {
      pt.k = M_PI;
      pt.merged = true;
      out.points.push_back(pt);
    } else {
      const double k0 = std::acos(c);
      pt.k = -k0;
      out.points.push_back(pt);
      pt.k = k0;
      out.points.push_back(pt);
    }
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const DegeneracyPoint& a, const DegeneracyPoint& b) { return a.k < b.k; });
  return out;
}

}  // namespace detail

/// Degeneracy points of the flat band, in ascending k.
///
/// Requires the flat-band condition gamma = J*sin(phi) (rejects other
/// parameter sets).  Away from the chiral line the touchings are square-root
/// branch points (EP2); on it (J = 0 or cos(phi) = 0) the +/- branches of the
/// defining equation coincide and each solution is a cubic touching (EP3).
/// A pair that has merged at k = 0 or pi is reported once, flagged merged.
inline std::vector<DegeneracyPoint> find_exceptional_points(const LatticeParams& par) {
  const double gamma_fb = par.j_coupling * std::sin(par.phi);
  const double scale = std::max(1.0, par.j_coupling);
  if (std::abs(par.gamma - gamma_fb) > detail::kManifoldTol * scale)
    throw std::invalid_argument(
        "find_exceptional_points requires the flat-band condition gamma = J*sin(phi)");
  return detail::ep_momenta(par.j_coupling, par.phi, par.v, par.r).points;
}

/// Classify the flat-band phase from couplings alone (gamma is pinned to the
/// flat-band value by construction and does not enter).
///
/// With u = J*|cos(phi)|: u < r - v gives four EPs, |v - r| < u < v + r two,
/// u < v - r none (flat band inside the gap), u > v + r none (outside both
/// dispersive bands).  Equalities are the measure-zero merge lines, reported
/// with boundary_case set.  On the chiral line the two EP branches coincide
/// and every count halves.
inline PhaseClassification classify_phase(double j, double v, double r, double phi) {
  if (j < 0.0 || v < 0.0 || r <= 0.0)
    throw std::invalid_argument("classify_phase needs J >= 0, v >= 0, r > 0");
  const detail::EpMomenta ep = detail::ep_momenta(j, phi, v, r);
  PhaseClassification out;
  out.ep_count = static_cast<int>(ep.points.size());
  for (const auto& pt : ep.points) out.boundary_case = out.boundary_case || pt.merged;
  if (out.ep_count > 0) {
    out.location = FlatBandLocation::Intersecting;
  } else {
    const double u = std::abs(j * std::cos(phi));
    out.location =
        (u > v + r) ? FlatBandLocation::OutsideBands : FlatBandLocation::InsideGap;
  }
  return out;
}

/// Discriminant-style reality indicator of the band cubic at momentum k:
///   27*s^4*J^2*cos^2(phi) - (2*s^2 + J^2 - gamma^2)^3.
/// Zero iff the cubic has a repeated root; negative iff all three energies
/// are real and distinct; monotonically nondecreasing in gamma at fixed k.
inline double band_discriminant(const LatticeParams& par, double k) {
  const double s = bloch_coupling(par, k);
  const double j = par.j_coupling;
  const double cp = std::cos(par.phi);
  const double a = 2.0 * s * s + j * j - par.gamma * par.gamma;
  const double s2 = s * s;
  return 27.0 * s2 * s2 * j * j * cp * cp - a * a * a;
}

/// The two closed-form PT-threshold candidates, one per zone edge.
struct CriticalGamma {
  /// Threshold seeded at k = pi (s = v - r); NaN when out of domain.
  double minus = std::numeric_limits<double>::quiet_NaN();
  /// Threshold seeded at k = 0 (s = v + r); NaN when out of domain.
  double plus = std::numeric_limits<double>::quiet_NaN();
  bool minus_in_domain = false;
  bool plus_in_domain = false;
};

/// Closed-form gamma at which the spectrum first turns complex, evaluated at
/// the two zone-edge momenta:
///   gamma^2 = 2*(v -/+ r)^2 + J^2 - 3*cbrt((v -/+ r)^4 * J^2 * cos^2(phi)).
/// A negative radicand means that edge never reaches the threshold through
/// this expression; the value is reported as NaN with its flag cleared
/// rather than clamped.
inline CriticalGamma critical_gamma(double v, double r, double j, double phi) {
  if (j < 0.0 || v < 0.0 || r <= 0.0)
    throw std::invalid_argument("critical_gamma needs J >= 0, v >= 0, r > 0");
  CriticalGamma out;
  const double cp2 = std::cos(phi) * std::cos(phi);
  const auto edge = [&](double s) {
    const double s2 = s * s;
    return 2.0 * s2 + j * j - 3.0 * std::cbrt(s2 * s2 * j * j * cp2);
  };
  const double rad_minus = edge(v - r);
  const double rad_plus = edge(v + r);
  if (rad_minus >= 0.0) {
    out.minus = std::sqrt(rad_minus);
    out.minus_in_domain = true;
  }
  if (rad_plus >= 0.0) {
    out.plus = std::sqrt(rad_plus);
    out.plus_in_domain = true;
  }
  return out;
}

/// Momenta where the two dispersive bands of the J = 0, gamma = 0 lattice
/// touch the zero-energy flat band: cos(k) = -v/r.  Empty for v > r, the
/// single zone-edge point for v = r, a +/-k pair for v < r.
inline std::vector<double> diabolic_points(double v, double r) {
  if (v < 0.0 || r <= 0.0) throw std::invalid_argument("diabolic_points needs v >= 0, r > 0");
  const double c = -v / r;
  if (c < -1.0 - detail::kMergeTol) return {};
  if (c <= -1.0 + detail::kMergeTol) return {M_PI};
  const double k0 = std::acos(c);
  return {-k0, k0};
}

/// True when every branch energy is real to within tol.
inline bool is_spectrum_real(const BandStructure& bs, double tol = 1e-9) {
  for (const auto& band : bs.bands)
    for (const Complex& e : band)
      if (std::abs(e.imag()) > tol) return false;
  return true;
}

}  // namespace fluxband
