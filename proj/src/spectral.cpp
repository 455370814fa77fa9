#include "geolab/spectral.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "geolab/csv.hpp"
#include "geolab/errors.hpp"
#include "geolab/summation.hpp"

namespace geolab {
namespace {

constexpr double kE = 2.718281828459045235;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

void require_above_e(double x, std::string_view who) {
  if (!(x > kE) || !std::isfinite(x)) {
    throw DomainError(std::string(who) + ": x must exceed e so that log log x > 0");
  }
}

// Zeros with |gamma| <= T in both signs, as (gamma, multiplicity).
std::vector<std::pair<double, double>> signed_zeros(const ZeroTable& table, double T) {
  const auto positive = table.up_to(T);
  std::vector<std::pair<double, double>> out;
  out.reserve(2 * positive.size());
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) out.emplace_back(-it->gamma, it->multiplicity);
  for (const SpectralZero& z : positive) out.emplace_back(z.gamma, z.multiplicity);
  return out;
}

}  // namespace

double SpectralZero::abs_rho() const noexcept { return std::sqrt(0.25 + gamma * gamma); }

ZeroTable::ZeroTable(std::vector<SpectralZero> zeros, std::string source)
    : zeros_(std::move(zeros)), source_(std::move(source)) {
  for (std::size_t i = 0; i < zeros_.size(); ++i) {
    const SpectralZero& z = zeros_[i];
    if (!(z.gamma > 0.0) || !std::isfinite(z.gamma)) throw DomainError("zero table: gamma must be positive");
    if (z.multiplicity < 1) throw DomainError("zero table: multiplicity must be >= 1");
    if (i > 0 && !(zeros_[i - 1].gamma < z.gamma)) {
      throw DomainError("zero table: gammas must be strictly ascending");
    }
  }
}

std::span<const SpectralZero> ZeroTable::up_to(double T) const {
  const auto end = std::upper_bound(zeros_.begin(), zeros_.end(), T,
                                    [](double t, const SpectralZero& z) { return t < z.gamma; });
  return {zeros_.data(), static_cast<std::size_t>(end - zeros_.begin())};
}

ZeroTable ZeroTable::truncated(double T) const {
  const auto kept = up_to(T);
  return ZeroTable(std::vector<SpectralZero>(kept.begin(), kept.end()), source_);
}

ZeroTable load_zero_table(std::istream& in, std::string source) {
  std::vector<SpectralZero> zeros;
  std::string raw;
  std::size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    std::istringstream fields(line);
    std::string gamma_text;
    std::string mult_text;
    std::string extra;
    fields >> gamma_text >> mult_text >> extra;
    if (!extra.empty()) throw ParseError(line_number, "expected '<gamma> [multiplicity]'");

    char* end = nullptr;
    errno = 0;
    const double gamma = std::strtod(gamma_text.c_str(), &end);
    if (end != gamma_text.c_str() + gamma_text.size() || errno == ERANGE || !std::isfinite(gamma)) {
      throw ParseError(line_number, "malformed gamma '" + gamma_text + "'");
    }
    if (!(gamma > 0.0)) throw ParseError(line_number, "gamma must be positive, got " + gamma_text);

    int multiplicity = 1;
    if (!mult_text.empty()) {
      const auto m = csv::parse_int(mult_text, line_number);
      if (m < 1 || m > 1'000'000) throw ParseError(line_number, "multiplicity must be a positive integer");
      multiplicity = static_cast<int>(m);
    }
    if (!zeros.empty() && !(zeros.back().gamma < gamma)) {
      throw ParseError(line_number, "gammas must be strictly ascending");
    }
    zeros.push_back({gamma, multiplicity});
  }
  return ZeroTable(std::move(zeros), std::move(source));
}

ZeroTable load_zero_table_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open zero table '" + path.string() + "'");
  return load_zero_table(in, path.string());
}

void require_coverage(const ZeroTable& table, double T, std::string_view who) {
  if (!table.empty() && T > table.max_gamma()) {
    throw CoverageError(std::string(who) + ": T = " + csv::format_real(T) + " exceeds zero table coverage " +
                        csv::format_real(table.max_gamma()));
  }
}

WeylDiagnostic weyl_check(const ZeroTable& table, double T) {
  if (!(T > 0.0)) throw DomainError("weyl_check: T must be positive");
  WeylDiagnostic out;
  if (table.empty()) return out;
  require_coverage(table, T, "weyl_check");
  for (const SpectralZero& z : table.up_to(T)) out.count += z.multiplicity;
  out.ratio = 12.0 * static_cast<double>(out.count) / (T * T);
  out.valid = out.ratio >= 0.5 && out.ratio <= 1.5;
  return out;
}

double unit_window_inverse_sum(const ZeroTable& table, double t) {
  if (table.empty()) return 0.0;
  // |rho| <= t + 1 implies gamma <= t + 1
  require_coverage(table, t + 1.0, "unit_window_inverse_sum");
  CompensatedSum sum;
  for (const SpectralZero& z : table.up_to(t + 1.0)) {
    const double r = z.abs_rho();
    if (r > t && r <= t + 1.0) sum.add(2.0 * z.multiplicity / r);
  }
  return sum.value();
}

double zero_sum(double x, double T, const ZeroTable& table) {
  if (!(x > 1.0)) throw DomainError("zero_sum: x must exceed 1");
  const double log_x = std::log(x);
  const double root_x = std::sqrt(x);
  CompensatedSum sum;
  for (const SpectralZero& z : table.up_to(T)) {
    const double phase = z.gamma * log_x;
    // Re(e^{i phase} / (1/2 + i gamma)) = (cos/2 + gamma sin) / (1/4 + gamma^2)
    const double re = (0.5 * std::cos(phase) + z.gamma * std::sin(phase)) / (0.25 + z.gamma * z.gamma);
    sum.add(2.0 * z.multiplicity * root_x * re);
  }
  return sum.value();
}

double truncation_cap(double x) {
  if (!(x > 1.0)) throw DomainError("truncation_cap: x must exceed 1");
  const double l = std::log(x);
  return std::sqrt(x) / (l * l);
}

TruncationChoice optimal_T(double x, double epsilon, bool capped, double scale) {
  require_above_e(x, "optimal_T");
  if (!(epsilon > 0.0)) throw DomainError("optimal_T: epsilon must be positive");
  if (!(scale > 0.0)) throw DomainError("optimal_T: scale must be positive");
  const double l = std::log(x);
  TruncationChoice out;
  out.epsilon = epsilon;
  out.capped = capped;
  out.uncapped_T = scale * std::cbrt(x) * l / std::pow(std::log(l), 1.0 / 3.0 + epsilon);
  if (capped) {
    const double cap = truncation_cap(x);
    out.T = std::max(1.0, std::min(out.uncapped_T, cap));
    out.cap_binding = out.T != out.uncapped_T;
  } else {
    out.T = std::max(1.0, out.uncapped_T);
  }
  return out;
}

ExplicitPsi explicit_psi(double x, const TruncationChoice& choice, const ZeroTable& table) {
  if (!(x > 1.0)) throw DomainError("explicit_psi: x must exceed 1");
  if (choice.capped) {
    const double cap = truncation_cap(x);
    if (!(choice.T >= 1.0 && choice.T <= cap)) {
      throw DomainError("explicit_psi: T = " + csv::format_real(choice.T) + " outside [1, " + csv::format_real(cap) +
                        "] required in capped mode");
    }
  }
  const double l = std::log(x);
  return {x + zero_sum(x, choice.T, table), x * l * l / choice.T};
}

double window_mean_square(int n, double T, const ZeroTable& table) {
  if (n < 1) throw DomainError("window_mean_square: n must be >= 1");
  const auto zeros = signed_zeros(table, T);
  if (zeros.empty()) return 0.0;
  const double lo = n;
  const double hi = n + 1.0;
  const double scale = std::exp(2.0 * lo);
  const double e2 = std::exp(2.0);
  CompensatedComplexSum sum;
  for (const auto& [gj, mj] : zeros) {
    const std::complex<double> rho_j(0.5, gj);
    for (const auto& [gk, mk] : zeros) {
      const std::complex<double> rho_k_conj(0.5, -gk);
      const double delta = gj - gk;
      // [x^{2 + i delta} / (2 + i delta)] from e^n to e^{n+1}, divided by e^{2n}
      const std::complex<double> antiderivative =
          (e2 * std::polar(1.0, delta * hi) - std::polar(1.0, delta * lo)) / std::complex<double>(2.0, delta);
      sum.add(mj * mk * antiderivative / (rho_j * rho_k_conj));
    }
  }
  const std::complex<double> total = sum.value();
  if (std::abs(total.imag()) > 1e-9 * std::abs(total.real())) {
    throw std::logic_error("window_mean_square: imaginary residual " + csv::format_real(total.imag()) +
                           " too large");
  }
  return scale * total.real();
}

double exceptional_threshold(double x, double T, double epsilon) {
  require_above_e(x, "exceptional_threshold");
  if (!(T >= 0.0)) throw DomainError("exceptional_threshold: T must be >= 0");
  const double l = std::log(x);
  return std::sqrt(x) * std::sqrt(T) * std::sqrt(l) * std::pow(std::log(l), 0.5 + 1.5 * epsilon);
}

ExceptionalReport window_exceptional_measure(int n, double T, double epsilon, const ZeroTable& table,
                                             int samples) {
  if (n < 2) throw DomainError("window_exceptional_measure: n must be >= 2");
  if (samples < 16) throw DomainError("window_exceptional_measure: samples must be >= 16");
  ExceptionalReport out;
  out.n = n;
  out.T = T;
  out.total_samples = samples;
  out.paper_bound = 1.0 / (n * std::pow(std::log(static_cast<double>(n)), 1.0 + 3.0 * epsilon));

  auto exceeds = [&](double u) {
    const double x = std::exp(u);
    return std::abs(zero_sum(x, T, table)) > exceptional_threshold(x, T, epsilon);
  };

  // Cell midpoints u_i = n + (i + 1/2) h in log coordinates.
  const double h = 1.0 / samples;
  std::vector<char> flag(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    flag[static_cast<std::size_t>(i)] = exceeds(n + (i + 0.5) * h) ? 1 : 0;
    out.exceeded_samples += flag[static_cast<std::size_t>(i)];
  }

  // Half-cells at both ends take the nearest sample. Between neighbouring
  // samples that agree the interval takes their common value; where they
  // disagree one bisection locates the crossing to a half interval, whose
  // midpoint is taken as the crossing.
  CompensatedSum measure;
  measure.add(0.5 * h * flag.front());
  measure.add(0.5 * h * flag.back());
  for (int i = 0; i + 1 < samples; ++i) {
    const int left = flag[static_cast<std::size_t>(i)];
    const int right = flag[static_cast<std::size_t>(i) + 1];
    if (left == right) {
      measure.add(h * left);
      continue;
    }
    const int mid = exceeds(n + (i + 1.0) * h) ? 1 : 0;
    const double half = 0.5 * h;
    // the half without a crossing is uniform; the other is split evenly
    if (mid == left) {
      measure.add(half * left + 0.5 * half * (left + right));
    } else {
      measure.add(0.5 * half * (left + right) + half * right);
    }
  }
  out.measure_estimate = std::clamp(measure.value(), 0.0, 1.0);
  return out;
}

}  // namespace geolab
