#pragma once

// Critical-line zeros rho = 1/2 + i*gamma of the Selberg zeta function of
// the modular surface, ingested as data, and the quantities built from them:
// the truncated explicit formula for psi, the unit-window inverse sums,
// the closed-form window mean square and the exceptional-set threshold.
//
// Tables hold cuspidal spectral parameters only, one sign of gamma; every
// sum over "|gamma| <= T" pairs gamma with -gamma. The zero at s = 1 is not
// stored: it is the main term x.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geolab {

struct SpectralZero {
  double gamma = 0.0;
  int multiplicity = 1;

  // |1/2 + i gamma|
  double abs_rho() const noexcept;
};

class ZeroTable {
 public:
  ZeroTable() = default;
  // Throws DomainError unless gammas are positive and strictly ascending
  // and multiplicities are >= 1.
  ZeroTable(std::vector<SpectralZero> zeros, std::string source);

  std::span<const SpectralZero> zeros() const noexcept { return zeros_; }
  const std::string& source() const noexcept { return source_; }
  bool empty() const noexcept { return zeros_.empty(); }
  std::size_t size() const noexcept { return zeros_.size(); }
  // 0 for an empty table.
  double max_gamma() const noexcept { return zeros_.empty() ? 0.0 : zeros_.back().gamma; }

  // Zeros with gamma <= T, ascending.
  std::span<const SpectralZero> up_to(double T) const;
  // Table restricted to gamma <= T.
  ZeroTable truncated(double T) const;

 private:
  std::vector<SpectralZero> zeros_;
  std::string source_;
};

// Text format: one `<gamma> [multiplicity]` per line, '#' starts a comment,
// blank lines ignored, gammas strictly ascending. Throws ParseError.
ZeroTable load_zero_table(std::istream& in, std::string source);
// Throws IoError if the file cannot be opened.
ZeroTable load_zero_table_file(const std::filesystem::path& path);

// Throws CoverageError naming `who` when a non-empty table stops below T.
// An empty table stands for "no zeros" and never fails this check.
void require_coverage(const ZeroTable& table, double T, std::string_view who);

struct WeylDiagnostic {
  std::int64_t count = 0;  // #{gamma <= T} with multiplicity
  double ratio = 0.0;      // 12 count / T^2
  bool valid = false;      // ratio in [0.5, 1.5]
};

WeylDiagnostic weyl_check(const ZeroTable& table, double T);

// Sum of multiplicity * 2/|rho| over zeros with t < |rho| <= t + 1.
double unit_window_inverse_sum(const ZeroTable& table, double t);

// sum_{|gamma| <= T} x^rho / rho, computed as sum over gamma > 0 of
// 2 sqrt(x) Re(x^{i gamma} / (1/2 + i gamma)).
double zero_sum(double x, double T, const ZeroTable& table);

struct TruncationChoice {
  double T = 1.0;
  double epsilon = 0.0;
  bool capped = true;        // the mode: clamp to the explicit formula's validity window
  bool cap_binding = false;  // the clamp changed the value
  double uncapped_T = 1.0;
};

// sqrt(x) / (log x)^2, the upper end of the explicit formula's T range.
double truncation_cap(double x);

// uncapped_T = scale * x^{1/3} log x / (log log x)^{1/3 + epsilon}.
// Throws DomainError for x <= e.
TruncationChoice optimal_T(double x, double epsilon, bool capped, double scale = 1.0);

struct ExplicitPsi {
  double value = 0.0;
  double error_budget = 0.0;  // x (log x)^2 / T
};

// x + zero_sum(x, T). In capped mode throws DomainError unless
// 1 <= T <= truncation_cap(x).
ExplicitPsi explicit_psi(double x, const TruncationChoice& choice, const ZeroTable& table);

// Integral over [e^n, e^{n+1}] of |sum_{|gamma| <= T} x^rho / rho|^2 dx in
// closed form, from the double sum over ordered pairs of zeros.
double window_mean_square(int n, double T, const ZeroTable& table);

// x^{1/2} T^{1/2} (log x)^{1/2} (log log x)^{1/2 + 3 epsilon / 2}
double exceptional_threshold(double x, double T, double epsilon);

struct ExceptionalReport {
  int n = 0;
  double T = 0.0;
  double measure_estimate = 0.0;  // logarithmic measure of A_n within [e^n, e^{n+1})
  double paper_bound = 0.0;       // 1 / (n (log n)^{1 + 3 epsilon})
  std::int64_t exceeded_samples = 0;
  std::int64_t total_samples = 0;
};

// Logarithmic measure of {x in [e^n, e^{n+1}) : |zero_sum(x, T)| > threshold}
// from `samples` log-uniform cell midpoints, with one bisection between
// neighbouring samples that disagree.
ExceptionalReport window_exceptional_measure(int n, double T, double epsilon, const ZeroTable& table,
                                             int samples);

}  // namespace geolab
