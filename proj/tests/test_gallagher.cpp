#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "geolab/errors.hpp"
#include "geolab/gallagher.hpp"
#include "geolab/spectral.hpp"
#include "oracles.hpp"

using namespace geolab;
using namespace oracles;
using std::numbers::pi;
using gk = boost::math::quadrature::gauss_kronrod<double, 61>;

namespace {

const ZeroTable& bundled() {
  static const ZeroTable table = load_zero_table_file(GEOLAB_DATA_DIR "/maass_spectral_parameters.txt");
  return table;
}

ExpSumSpec random_case(std::mt19937_64& rng, int max_terms) {
  std::uniform_real_distribution<double> theta(0.05, 0.95);
  std::uniform_real_distribution<double> log_u(std::log(0.01), std::log(10.0));
  const double th = theta(rng);
  const double U = std::exp(log_u(rng));
  return random_spec(rng, th, U, max_terms);
}

}  // namespace

TEST_CASE("spec construction") {
  CHECK_THROWS_AS(ExpSumSpec({}, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(ExpSumSpec({}, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(ExpSumSpec({}, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS(ExpSumSpec({{std::nan(""), {1, 0}}}, 0.5, 1.0), DomainError);
  const ExpSumSpec merged({{2.0, {1, 0}}, {-1.0, {0, 1}}, {2.0, {0.5, 0}}}, 0.5, 1.0);
  REQUIRE(merged.terms().size() == 2);
  CHECK(merged.terms()[0].nu == -1.0);
  CHECK(merged.terms()[1].c == std::complex<double>(1.5, 0));
}

TEST_CASE("trivial sums") {
  const ExpSumSpec empty({}, 0.3, 2.0);
  CHECK(lhs_integral(empty) == 0.0);
  CHECK(rhs_integral(empty) == 0.0);
  const ExpSumSpec zero({{1.0, {0, 0}}, {4.0, {0, 0}}}, 0.3, 2.0);
  CHECK(check_inequality(zero).lhs == 0.0);
  CHECK(check_inequality(zero).rhs == 0.0);
  CHECK(check_inequality(zero).holds);

  for (double nu : {-3.7, 0.0, 12.25}) {
    const ExpSumSpec one({{nu, {1, 0}}}, 0.3, 2.0);
    CHECK(lhs_integral(one) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(rhs_integral(one) == doctest::Approx(gallagher_factor(0.3) * 2.0 / 0.3).epsilon(1e-14));
  }
}

TEST_CASE("unit-window shape and its printed constant") {
  const double q = 1.0 / (4.0 * pi);
  const ExpSumSpec one({{0.0, {1, 0}}}, q, q);
  const double factor = std::pow(0.25 / std::sin(0.25), 2);
  CHECK(factor == doctest::Approx(1.0210963562892077).epsilon(1e-14));
  CHECK(rhs_integral(one) == doctest::Approx(factor).epsilon(1e-14));
  CHECK(lhs_integral(one) == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-14));
  CHECK(check_inequality(one).holds);
  // The alternative constant ((1/4)/sin(pi/4))^2 = 1/8 would fall below the
  // left side already for a single term.
  const double printed = std::pow(0.25 / std::sin(pi / 4.0), 2);
  CHECK(printed == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(printed < lhs_integral(one));
}

TEST_CASE("both sides match quadrature for up to 8 terms") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const ExpSumSpec spec = random_case(rng, 8);
    CAPTURE(trial);
    const double lhs = lhs_integral(spec);
    const double rhs = rhs_integral(spec);
    CHECK(lhs == doctest::Approx(lhs_quadrature(spec)).epsilon(1e-9));
    CHECK(rhs == doctest::Approx(rhs_quadrature(spec)).epsilon(1e-9));
    CHECK(rhs == doctest::Approx(rhs_overlap(spec)).epsilon(1e-9));
  }
}

TEST_CASE("inequality holds on 1000 random sums") {
  std::mt19937_64 rng(7);
  int held = 0;
  for (int i = 0; i < 1000; ++i) held += check_inequality(random_case(rng, 12)).holds ? 1 : 0;
  CHECK(held == 1000);
}

TEST_CASE("scaling and translation") {
  std::mt19937_64 rng(4);
  const std::complex<double> lambda(0.6, -1.7);
  for (int i = 0; i < 100; ++i) {
    const ExpSumSpec spec = random_case(rng, 10);
    std::vector<ExpSumTerm> scaled;
    std::vector<ExpSumTerm> shifted;
    for (const ExpSumTerm& t : spec.terms()) {
      scaled.push_back({t.nu, lambda * t.c});
      shifted.push_back({t.nu + 3.125, t.c});
    }
    const ExpSumSpec s(scaled, spec.theta(), spec.U());
    const ExpSumSpec m(shifted, spec.theta(), spec.U());
    const double l2 = std::norm(lambda);
    CHECK(lhs_integral(s) == doctest::Approx(l2 * lhs_integral(spec)).epsilon(1e-12));
    CHECK(rhs_integral(s) == doctest::Approx(l2 * rhs_integral(spec)).epsilon(1e-12));
    CHECK(lhs_integral(m) == doctest::Approx(lhs_integral(spec)).epsilon(1e-9));
    CHECK(rhs_integral(m) == doctest::Approx(rhs_integral(spec)).epsilon(1e-9));
  }
}

TEST_CASE("window application spec") {
  const int n = 6;
  const double T = 40.0;
  const ExpSumSpec spec = window_application_spec(bundled(), n, T);
  CHECK(spec.terms().size() == 2 * bundled().up_to(T).size());
  CHECK(spec.theta() / spec.U() == doctest::Approx(1.0));
  const GallagherCheck c = check_inequality(spec);
  CHECK(c.holds);
  CHECK(c.rhs == doctest::Approx(rhs_overlap(spec)).epsilon(1e-9));

  // dx/x = 2 pi du and x^2 runs over [e^{2n}, e^{2n+2}] on the window.
  const double ms = window_mean_square(n, T, bundled());
  const double transformed = 2.0 * pi * c.lhs;
  CHECK(std::exp(2.0 * n) * transformed <= ms);
  CHECK(ms <= std::exp(2.0 * n + 2.0) * transformed);
  CHECK(c.lhs == doctest::Approx(lhs_quadrature(spec)).epsilon(1e-9));
}

TEST_CASE("unit window square integral") {
  CHECK(unit_window_square_integral(ZeroTable{}, 50.0) == 0.0);
  const ZeroTable t = bundled().truncated(30.0);
  std::vector<double> r;
  std::vector<double> w;
  for (const SpectralZero& z : t.zeros()) {
    r.push_back(z.abs_rho());
    w.push_back(2.0 / z.abs_rho());
  }
  double overlap = 0.0;
  for (std::size_t j = 0; j < r.size(); ++j) {
    for (std::size_t k = 0; k < r.size(); ++k) overlap += w[j] * w[k] * std::max(0.0, 1.0 - std::abs(r[j] - r[k]));
  }
  CHECK(unit_window_square_integral(t, 30.0) == doctest::Approx(overlap).epsilon(1e-12));
}

TEST_CASE("coefficient CSV") {
  std::istringstream in("nu,re,im\n1.5,1,0\n-2,0.5,-0.25\n\n");
  const ExpSumSpec spec = read_coefficients_csv(in, 0.25, 1.0);
  REQUIRE(spec.terms().size() == 2);
  CHECK(spec.terms()[0].nu == -2.0);
  CHECK(spec.terms()[0].c == std::complex<double>(0.5, -0.25));
  std::istringstream bad_header("freq,re,im\n");
  CHECK_THROWS_AS(read_coefficients_csv(bad_header, 0.25, 1.0), ParseError);
  std::istringstream bad_row("nu,re,im\n1,2\n");
  CHECK_THROWS_AS(read_coefficients_csv(bad_row, 0.25, 1.0), ParseError);
  std::istringstream bad_theta("nu,re,im\n1,2,3\n");
  CHECK_THROWS_AS(read_coefficients_csv(bad_theta, 1.5, 1.0), DomainError);
}
