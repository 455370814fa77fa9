#pragma once
// Independent oracles shared by the unit tests and the acceptance run.
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <set>
#include <vector>

#include "geolab/class_numbers.hpp"
#include "geolab/gallagher.hpp"
#include "geolab/spectral.hpp"

namespace oracles {

using namespace geolab;

// Independent oracle: scan every (a, b) with |a|, b below sqrt(D), keep
// reduced forms by a long double test, then group them into cycles with a
// float-based right-neighbour map.
struct Oracle {
  std::vector<QuadraticForm> forms;
  std::int64_t classes = 0;
};

inline bool reduced_ld(std::int64_t a, std::int64_t b, long double root) {
  const long double aa = std::fabs(static_cast<long double>(a));
  return std::fabs(root - 2.0L * aa) < b && b < root;
}

inline QuadraticForm rho_ld(const QuadraticForm& f, std::int64_t D, long double root) {
  const std::int64_t m = 2 * std::llabs(f.c);
  // b' = -b mod 2|c| in (root - 2|c|, root)
  std::int64_t b = ((-f.b) % m + m) % m;
  while (b < root) b += m;
  while (b >= root) b -= m;
  return {f.c, b, (b * b - D) / (4 * f.c)};
}

inline Oracle oracle(std::int64_t D) {
  const long double root = std::sqrt(static_cast<long double>(D));
  const auto bound = static_cast<std::int64_t>(root) + 1;
  Oracle out;
  for (std::int64_t a = -bound; a <= bound; ++a) {
    if (a == 0) continue;
    for (std::int64_t b = 1; b <= bound; ++b) {
      const std::int64_t num = b * b - D;
      if (num % (4 * a) != 0) continue;
      if (reduced_ld(a, b, root)) out.forms.push_back({a, b, num / (4 * a)});
    }
  }
  std::sort(out.forms.begin(), out.forms.end());
  std::set<QuadraticForm> seen;
  for (const QuadraticForm& f : out.forms) {
    if (seen.count(f)) continue;
    ++out.classes;
    QuadraticForm g = f;
    do {
      seen.insert(g);
      g = rho_ld(g, D, root);
    } while (!(g == f));
  }
  return out;
}

// Term-by-term complex evaluation over both signs of gamma.
inline std::complex<double> naive_zero_sum(double x, double T, const ZeroTable& table) {
  std::complex<double> sum = 0;
  for (const SpectralZero& z : table.up_to(T)) {
    for (double g : {z.gamma, -z.gamma}) {
      const std::complex<double> rho(0.5, g);
      sum += static_cast<double>(z.multiplicity) * std::pow(std::complex<double>(x, 0.0), rho) / rho;
    }
  }
  return sum;
}

inline double quadrature_mean_square(int n, double T, const ZeroTable& table) {
  auto f = [&](double x) { return std::norm(naive_zero_sum(x, T, table)); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, std::exp(n), std::exp(n + 1.0), 25,
                                                                         1e-13);
}

// Gauss-Legendre panels no longer than a quarter period of the fastest
// beat frequency in |S(u)|^2.
inline double lhs_quadrature(const ExpSumSpec& spec) {
  const auto terms = spec.terms();
  if (terms.empty()) return 0.0;
  const double spread = std::max(1.0, terms.back().nu - terms.front().nu);
  const int panels = static_cast<int>(std::ceil(8.0 * spec.U() * spread)) + 1;
  const double h = 2.0 * spec.U() / panels;
  auto f = [&](double u) { return std::norm(spec.evaluate(u)); };
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    total += boost::math::quadrature::gauss<double, 30>::integrate(f, -spec.U() + i * h, -spec.U() + (i + 1) * h);
  }
  return total;
}

// Quadrature of the window sum between its jump points.
inline double rhs_quadrature(const ExpSumSpec& spec) {
  const double width = spec.theta() / spec.U();
  std::vector<double> cuts;
  for (const ExpSumTerm& t : spec.terms()) {
    cuts.push_back(t.nu);
    cuts.push_back(t.nu - width);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] == cuts[i]) continue;
    auto f = [&](double t) { return std::norm(spec.window_sum(t)); };
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 5, 1e-15);
  }
  const double s = spec.U() / spec.theta();
  return gallagher_factor(spec.theta()) * s * s * total;
}

// int |sum_{t <= nu <= t + w} c|^2 dt = sum_{j,k} c_j conj(c_k) max(0, w - |nu_j - nu_k|)
inline double rhs_overlap(const ExpSumSpec& spec) {
  const double width = spec.theta() / spec.U();
  const auto terms = spec.terms();
  double total = 0.0;
  for (const ExpSumTerm& a : terms) {
    for (const ExpSumTerm& b : terms) {
      total += (a.c * std::conj(b.c)).real() * std::max(0.0, width - std::abs(a.nu - b.nu));
    }
  }
  const double s = spec.U() / spec.theta();
  return gallagher_factor(spec.theta()) * s * s * total;
}

}  // namespace oracles
