#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "../support/oracles.hpp"
#include "fluxband/cubic.hpp"

using namespace fluxband;

namespace {

std::vector<Complex> to_vec(const std::array<Complex, 3>& a) {
  return {a[0], a[1], a[2]};
}

}  // namespace

TEST_CASE("characteristic coefficients at reference parameter sets") {
  SECTION("free chain, k = pi/2") {
    const auto p = make_lattice_params(0.0, 1.0, 0.0, 1.0, 0.0, 3);
    const CubicCoefficients c = characteristic_cubic(p, 0.5 * M_PI);
    CHECK(std::abs(c.p - Complex(-2.0)) <= 1e-14);
    CHECK(std::abs(c.q) == 0.0);
  }
  SECTION("flux pi/3 at the zone center") {
    const auto p = make_lattice_params(std::sqrt(3.0) / 4.0, 1.0, 0.5, 1.0, M_PI / 3.0, 3);
    const CubicCoefficients c = characteristic_cubic(p, 0.0);
    CHECK(std::abs(c.p - Complex(-129.0 / 16.0)) <= 1e-13);
    CHECK(std::abs(c.q - Complex(-2.0)) <= 1e-13);
  }
  SECTION("vanishing B coupling leaves only the dimer terms") {
    const auto p = make_lattice_params(0.3, 1.0, 0.7, 1.0, 0.0, 3);
    const CubicCoefficients c = characteristic_cubic(p, M_PI);
    CHECK(std::abs(c.p - Complex(-(0.7 * 0.7 - 0.3 * 0.3))) <= 1e-15);
    CHECK(std::abs(c.q) == 0.0);
  }
}

TEST_CASE("coefficients match the trace and determinant of the Bloch matrix") {
  std::mt19937 rng(1001);
  std::uniform_real_distribution<double> ug(0.0, 2.0), uv(0.0, 3.0), uj(0.0, 2.0),
      ur(0.1, 2.0), uphi(-3.1, 3.1), uk(-M_PI, M_PI);
  for (int t = 0; t < 100; ++t) {
    const auto p = make_lattice_params(ug(rng), uv(rng), uj(rng), ur(rng), uphi(rng), 3);
    const double k = uk(rng);
    const CubicCoefficients c = characteristic_cubic(p, k);
    const BlochMatrix h = bloch_hamiltonian(p, k);
    const Complex tr2 = (h * h).trace();
    const Complex det = h.determinant();
    CHECK(std::abs(c.p + 0.5 * tr2) <= 1e-10 * (1.0 + std::abs(c.p)));
    CHECK(std::abs(c.q + det) <= 1e-10 * (1.0 + std::abs(c.q)));
    CHECK(c.p.imag() == 0.0);
    CHECK(c.q.imag() == 0.0);
  }
}

TEST_CASE("closed-form roots at hand-solvable coefficients") {
  SECTION("three distinct real roots") {
    const auto roots = solve_cubic({Complex(-1.0), Complex(0.0)});
    CHECK(std::abs(roots[0] - Complex(-1.0)) <= 1e-12);
    CHECK(std::abs(roots[1]) <= 1e-12);
    CHECK(std::abs(roots[2] - Complex(1.0)) <= 1e-12);
  }
  SECTION("cube roots of eight, sorted by (Re, Im)") {
    const auto roots = solve_cubic({Complex(0.0), Complex(-8.0)});
    const double s3 = std::sqrt(3.0);
    CHECK(std::abs(roots[0] - Complex(-1.0, -s3)) <= 1e-12);
    CHECK(std::abs(roots[1] - Complex(-1.0, s3)) <= 1e-12);
    CHECK(std::abs(roots[2] - Complex(2.0)) <= 1e-12);
  }
  SECTION("repeated root") {
    const auto roots = solve_cubic({Complex(-3.0), Complex(2.0)});
    CHECK(std::abs(roots[0] - Complex(-2.0)) <= 1e-9);
    CHECK(std::abs(roots[1] - Complex(1.0)) <= 1e-9);
    CHECK(std::abs(roots[2] - Complex(1.0)) <= 1e-9);
  }
  SECTION("triple zero") {
    const auto roots = solve_cubic({Complex(0.0), Complex(0.0)});
    for (const Complex& e : roots) CHECK(e == Complex(0.0));
  }
}

TEST_CASE("real coefficients produce a conjugate-closed, traceless root set") {
  std::mt19937 rng(2002);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int t = 0; t < 200; ++t) {
    const CubicCoefficients c{Complex(u(rng)), Complex(u(rng))};
    const auto roots = solve_cubic(c);
    CHECK(roots[0].imag() + roots[1].imag() + roots[2].imag() == 0.0);
    double big = 0.0;
    for (const Complex& e : roots) big = std::max(big, std::abs(e));
    CHECK(std::abs(roots[0] + roots[1] + roots[2]) <= 1e-12 * (1.0 + big));
    for (const Complex& e : roots) CHECK(cubic_residual(c, e) <= 1e-12 * cubic_scale(c));
  }
}

TEST_CASE("planted roots are recovered") {
  std::mt19937 rng(3003);
  std::uniform_real_distribution<double> u(-3.0, 3.0);

  SECTION("three real roots") {
    for (int t = 0; t < 100; ++t) {
      double r1, r2, r3;
      do {
        r1 = u(rng);
        r2 = u(rng);
        r3 = -r1 - r2;
      } while (std::abs(r1 - r2) < 0.3 || std::abs(r1 - r3) < 0.3 || std::abs(r2 - r3) < 0.3);
      const CubicCoefficients c{Complex(r1 * r2 + r1 * r3 + r2 * r3), Complex(-r1 * r2 * r3)};
      CHECK(oracle::multiset_distance(to_vec(solve_cubic(c)),
                                      {Complex(r1), Complex(r2), Complex(r3)}) <= 1e-9);
    }
  }

  SECTION("conjugate pair plus a real root") {
    for (int t = 0; t < 100; ++t) {
      const double a = u(rng);
      double b = u(rng);
      while (std::abs(b) < 0.3) b = u(rng);
      const CubicCoefficients c{Complex(b * b - 3.0 * a * a), Complex(2.0 * a * (a * a + b * b))};
      CHECK(oracle::multiset_distance(
                to_vec(solve_cubic(c)),
                {Complex(a, b), Complex(a, -b), Complex(-2.0 * a)}) <= 1e-9);
    }
  }

  SECTION("complex coefficients") {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
      Complex z1, z2, z3;
      do {
        z1 = Complex(d(rng), d(rng));
        z2 = Complex(d(rng), d(rng));
        z3 = -z1 - z2;
      } while (std::abs(z1 - z2) < 0.3 || std::abs(z1 - z3) < 0.3 || std::abs(z2 - z3) < 0.3);
      const CubicCoefficients c{z1 * z2 + z1 * z3 + z2 * z3, -z1 * z2 * z3};
      CHECK(oracle::multiset_distance(to_vec(solve_cubic(c)), {z1, z2, z3}) <= 1e-9);
      for (const Complex& e : solve_cubic(c)) CHECK(cubic_residual(c, e) <= 1e-12 * cubic_scale(c));
    }
  }
}

TEST_CASE("roots agree with an independent iterative solver") {
  std::mt19937 rng(4004);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 100; ++t) {
    Complex p, q;
    do {
      p = (t % 2 == 0) ? Complex(u(rng)) : Complex(u(rng), u(rng));
      q = (t % 2 == 0) ? Complex(u(rng)) : Complex(u(rng), u(rng));
    } while (std::abs(4.0 * p * p * p + 27.0 * q * q) < 1e-3);
    const auto mine = solve_cubic({p, q});
    const auto other = oracle::polynomial_roots({q, p, Complex(0.0), Complex(1.0)});
    CHECK(oracle::multiset_distance(to_vec(mine), other) <= 1e-8);
  }
}

TEST_CASE("the tuned band energy is always a root on the flat-band manifold") {
  std::mt19937 rng(5005);
  std::uniform_real_distribution<double> uj(0.0, 2.0), uphi(1e-6, M_PI - 1e-6),
      uv(0.0, 3.0), ur(0.05, 2.0), uk(-M_PI, M_PI);
  for (int t = 0; t < 200; ++t) {
    const double j = uj(rng);
    const double phi = uphi(rng);
    const auto p = make_lattice_params(j * std::sin(phi), uv(rng), j, ur(rng), phi, 3);
    const Complex e_fb(-j * std::cos(phi), 0.0);
    for (int m = 0; m < 50; ++m) {
      const auto roots = solve_cubic(characteristic_cubic(p, uk(rng)));
      double nearest = std::abs(roots[0] - e_fb);
      for (const Complex& e : roots) nearest = std::min(nearest, std::abs(e - e_fb));
      CHECK(nearest <= 1e-10);
    }
  }
}
