#pragma once

// Both sides of Gallagher's mean-value inequality for a finite exponential
// sum S(u) = sum_nu c(nu) e^{2 pi i nu u}:
//
//   int_{-U}^{U} |S(u)|^2 du
//     <= (pi theta / sin(pi theta))^2 int |(U/theta) sum_{t <= nu <= t + theta/U} c(nu)|^2 dt,
//
// each evaluated in closed form rather than by quadrature.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

namespace geolab {

class ZeroTable;

struct ExpSumTerm {
  double nu = 0.0;
  std::complex<double> c;
};

class ExpSumSpec {
 public:
  // Sorts terms by frequency and merges equal frequencies by adding their
  // coefficients. Throws DomainError unless 0 < theta < 1 and U > 0.
  ExpSumSpec(std::vector<ExpSumTerm> terms, double theta, double U);

  std::span<const ExpSumTerm> terms() const noexcept { return terms_; }
  double theta() const noexcept { return theta_; }
  double U() const noexcept { return U_; }

  // S(u), for quadrature checks.
  std::complex<double> evaluate(double u) const;
  // The window sum sum_{t <= nu <= t + theta/U} c(nu).
  std::complex<double> window_sum(double t) const;

 private:
  std::vector<ExpSumTerm> terms_;
  double theta_;
  double U_;
};

// (pi theta / sin(pi theta))^2
double gallagher_factor(double theta);

// sum_{j,k} c_j conj(c_k) K(nu_j - nu_k), K(0) = 2U, K(d) = sin(2 pi d U) / (pi d).
double lhs_integral(const ExpSumSpec& spec);

// Sweep over the breakpoints {nu_j} and {nu_j - theta/U}, between which the
// window sum is constant.
double rhs_integral(const ExpSumSpec& spec);

struct GallagherCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;  // lhs <= rhs (1 + 1e-9)
};

GallagherCheck check_inequality(const ExpSumSpec& spec);

// Random spec: term count uniform in [1, max_terms], nu uniform in
// [-50, 50], c with independent standard normal parts.
ExpSumSpec random_spec(std::mt19937_64& rng, double theta, double U, int max_terms = 12);

// The window-mean-square application: frequencies gamma over both signs
// of the zeros with |gamma| <= T, coefficients e^{(n + 1/2) i gamma} / rho,
// theta = U = 1/(4 pi).
ExpSumSpec window_application_spec(const ZeroTable& table, int n, double T);

// int (sum_{t < |rho| <= t+1, |gamma| <= T} 1/|rho|)^2 dt over the real line,
// the quantity the application bounds by the Weyl law; exact, by sweeping
// the breakpoints |rho| - 1 and |rho|.
double unit_window_square_integral(const ZeroTable& table, double T);

// CSV with header nu,re,im.
ExpSumSpec read_coefficients_csv(std::istream& in, double theta, double U);

}  // namespace geolab
