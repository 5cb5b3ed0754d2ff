// Scans a few coupling regimes of the gain/loss cross-stitch lattice and
// prints, for each, the flat-band tuning, how flat the tuned band actually
// is over the zone, where the degeneracy points sit, and the closed-form
// PT thresholds.

#include <cstdio>

#include "fluxband/fluxband.hpp"

using namespace fluxband;

namespace {

void scan(const char* label, double j, double phi, double v, double r) {
  const FlatBand fb = flat_band_condition(j, phi);
  const LatticeParams par = make_lattice_params(fb.gamma, v, j, r, phi, 3);
  const BandStructure bs = band_structure(par, 2001);

  std::printf("%s\n", label);
  std::printf("  J=%g phi=%g v=%g r=%g\n", j, phi, v, r);
  std::printf("  flat band: gamma=%.12g energy=%.12g\n", fb.gamma, fb.energy);
  std::printf("  flatness deviation over 2001 k points: %.3e\n",
              flatness_deviation(bs, Complex(fb.energy, 0.0)));

  const auto eps = find_exceptional_points(par);
  std::printf("  degeneracy points: %zu\n", eps.size());
  for (const auto& pt : eps)
    std::printf("    k=%+.10f order=%s%s\n", pt.k,
                pt.order == DegeneracyOrder::EP3 ? "EP3" : "EP2",
                pt.merged ? " (merged pair)" : "");

  const PhaseClassification pc = classify_phase(j, v, r, phi);
  const char* where = pc.location == FlatBandLocation::InsideGap      ? "inside the gap"
                      : pc.location == FlatBandLocation::Intersecting ? "intersecting"
                                                                      : "outside both bands";
  std::printf("  flat band is %s%s\n", where, pc.boundary_case ? " (boundary case)" : "");

  const CriticalGamma gc = critical_gamma(v, r, j, phi);
  if (gc.minus_in_domain)
    std::printf("  PT threshold at the zone edge: gamma_c = %.12g\n", gc.minus);
  if (gc.plus_in_domain)
    std::printf("  PT threshold at the zone center: gamma_c = %.12g\n", gc.plus);
  std::printf("\n");
}

}  // namespace

int main() {
  scan("four-point intersection (small J cos phi)", 0.3, 1.2, 0.2, 1.0);
  scan("two-point intersection", 1.0, M_PI / 3.0, 1.0, 1.0);
  scan("gapped flat band", 0.5, 0.2, 2.5, 1.0);
  scan("half-quantum flux (chiral line)", 1.0, 0.5 * M_PI, 1.5, 1.0);
  return 0;
}
