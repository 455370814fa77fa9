#include "geolab/gallagher.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <string>

#include "geolab/csv.hpp"
#include "geolab/errors.hpp"
#include "geolab/spectral.hpp"
#include "geolab/summation.hpp"

namespace geolab {

using std::numbers::pi;

ExpSumSpec::ExpSumSpec(std::vector<ExpSumTerm> terms, double theta, double U) : theta_(theta), U_(U) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("ExpSumSpec: theta must lie in (0, 1)");
  if (!(U > 0.0) || !std::isfinite(U)) throw DomainError("ExpSumSpec: U must be positive");
  for (const ExpSumTerm& term : terms) {
    if (!std::isfinite(term.nu) || !std::isfinite(term.c.real()) || !std::isfinite(term.c.imag())) {
      throw DomainError("ExpSumSpec: non-finite frequency or coefficient");
    }
  }
  std::stable_sort(terms.begin(), terms.end(), [](const ExpSumTerm& a, const ExpSumTerm& b) { return a.nu < b.nu; });
  for (const ExpSumTerm& term : terms) {
    if (!terms_.empty() && terms_.back().nu == term.nu) {
      terms_.back().c += term.c;
    } else {
      terms_.push_back(term);
    }
  }
}

std::complex<double> ExpSumSpec::evaluate(double u) const {
  CompensatedComplexSum sum;
  for (const ExpSumTerm& term : terms_) sum.add(term.c * std::polar(1.0, 2.0 * pi * term.nu * u));
  return sum.value();
}

std::complex<double> ExpSumSpec::window_sum(double t) const {
  const double width = theta_ / U_;
  CompensatedComplexSum sum;
  for (const ExpSumTerm& term : terms_) {
    if (term.nu >= t && term.nu <= t + width) sum.add(term.c);
  }
  return sum.value();
}

double gallagher_factor(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("gallagher_factor: theta must lie in (0, 1)");
  const double r = pi * theta / std::sin(pi * theta);
  return r * r;
}

double lhs_integral(const ExpSumSpec& spec) {
  const auto terms = spec.terms();
  const double U = spec.U();
  CompensatedSum sum;
  for (std::size_t j = 0; j < terms.size(); ++j) {
    sum.add(std::norm(terms[j].c) * 2.0 * U);
    for (std::size_t k = j + 1; k < terms.size(); ++k) {
      const double delta = terms[j].nu - terms[k].nu;
      const double kernel = std::sin(2.0 * pi * delta * U) / (pi * delta);
      // (j,k) and (k,j) together contribute 2 Re(c_j conj(c_k)) K(delta)
      sum.add(2.0 * (terms[j].c * std::conj(terms[k].c)).real() * kernel);
    }
  }
  return std::max(0.0, sum.value());
}

double rhs_integral(const ExpSumSpec& spec) {
  const auto terms = spec.terms();
  if (terms.empty()) return 0.0;
  const double width = spec.theta() / spec.U();

  std::vector<double> breaks;
  breaks.reserve(2 * terms.size());
  for (const ExpSumTerm& term : terms) {
    breaks.push_back(term.nu);
    breaks.push_back(term.nu - width);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  // Between consecutive breakpoints the window [t, t + width] holds a fixed
  // set of frequencies: those with nu in [mid, mid + width].
  CompensatedSum integral;
  std::size_t first = 0;
  std::size_t last = 0;  // window is terms[first, last)
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    while (first < terms.size() && terms[first].nu < mid) ++first;
    if (last < first) last = first;
    while (last < terms.size() && terms[last].nu <= mid + width) ++last;
    if (first == last) continue;
    CompensatedComplexSum window;
    for (std::size_t j = first; j < last; ++j) window.add(terms[j].c);
    integral.add(std::norm(window.value()) * (breaks[i + 1] - breaks[i]));
  }
  const double scale = spec.U() / spec.theta();
  return gallagher_factor(spec.theta()) * scale * scale * integral.value();
}

GallagherCheck check_inequality(const ExpSumSpec& spec) {
  GallagherCheck out;
  out.lhs = lhs_integral(spec);
  out.rhs = rhs_integral(spec);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-9);
  return out;
}

ExpSumSpec random_spec(std::mt19937_64& rng, double theta, double U, int max_terms) {
  std::uniform_int_distribution<int> count(1, std::max(1, max_terms));
  std::uniform_real_distribution<double> freq(-50.0, 50.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = count(rng);
  std::vector<ExpSumTerm> terms;
  terms.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double nu = freq(rng);
    const double re = gauss(rng);
    const double im = gauss(rng);
    terms.push_back({nu, {re, im}});
  }
  return ExpSumSpec(std::move(terms), theta, U);
}

ExpSumSpec window_application_spec(const ZeroTable& table, int n, double T) {
  const double phase = n + 0.5;
  std::vector<ExpSumTerm> terms;
  for (const SpectralZero& z : table.up_to(T)) {
    for (const double g : {z.gamma, -z.gamma}) {
      const std::complex<double> c = static_cast<double>(z.multiplicity) * std::polar(1.0, phase * g) /
                                     std::complex<double>(0.5, g);
      terms.push_back({g, c});
    }
  }
  const double quarter_over_pi = 1.0 / (4.0 * pi);
  return ExpSumSpec(std::move(terms), quarter_over_pi, quarter_over_pi);
}

double unit_window_square_integral(const ZeroTable& table, double T) {
  const auto zeros = table.up_to(T);
  if (zeros.empty()) return 0.0;
  std::vector<double> radius;
  std::vector<double> weight;
  std::vector<double> breaks;
  for (const SpectralZero& z : zeros) {
    radius.push_back(z.abs_rho());
    weight.push_back(2.0 * z.multiplicity / z.abs_rho());
    breaks.push_back(radius.back() - 1.0);
    breaks.push_back(radius.back());
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  CompensatedSum integral;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double mid = 0.5 * (breaks[i] + breaks[i + 1]);
    CompensatedSum window;
    for (std::size_t j = 0; j < radius.size(); ++j) {
      if (radius[j] > mid && radius[j] <= mid + 1.0) window.add(weight[j]);
    }
    const double w = window.value();
    integral.add(w * w * (breaks[i + 1] - breaks[i]));
  }
  return integral.value();
}

ExpSumSpec read_coefficients_csv(std::istream& in, double theta, double U) {
  csv::expect_header(in, "nu,re,im");
  std::vector<ExpSumTerm> terms;
  std::string line;
  std::size_t line_number = 1;
  while (csv::next_row(in, line, line_number)) {
    const auto f = csv::split_line(line);
    if (f.size() != 3) throw ParseError(line_number, "expected 3 fields nu,re,im");
    terms.push_back({csv::parse_real(f[0], line_number),
                     {csv::parse_real(f[1], line_number), csv::parse_real(f[2], line_number)}});
  }
  return ExpSumSpec(std::move(terms), theta, U);
}

}  // namespace geolab
