#pragma once

// Desk-scale runs of the error-term pipeline: exact counts against the
// main terms, the truncated zero sum against its exceptional threshold,
// per-window exceptional measures and the window mean-square grid. The
// asymptotic statements carry no explicit constants, so these runs report
// normalized values rather than asserting bounds.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "geolab/geodesic_counts.hpp"
#include "geolab/spectral.hpp"

namespace geolab {

struct ScanRow {
  double x = 0.0;
  std::int64_t pi = 0;
  double theta = 0.0;
  double psi = 0.0;
  double li = 0.0;
  double psi_residual = 0.0;  // psi - x
  double pi_residual = 0.0;   // pi - li
  double eq6_norm = 0.0;      // |psi - x| / (x^{2/3} log x (log log x)^{1/3 + eps})
  double thm_norm = 0.0;      // |pi - li| / (x^{2/3} (log log x)^{1/3 + eps})
  double T_used = 0.0;
  bool exceptional = false;   // |zero_sum(x, T_used)| > exceptional_threshold(x, T_used, eps)

  friend bool operator==(const ScanRow&, const ScanRow&) = default;
};

struct ScanConfig {
  double x_min = 1e3;
  double x_max = 1e7;
  int per_decade = 8;
  double epsilon = 0.1;
  bool capped = true;
  double T_scale = 1.0;
  unsigned workers = 1;
};

// Log-uniform points x_min 10^{i / per_decade} <= x_max, ascending.
std::vector<double> log_grid(double x_min, double x_max, int per_decade);

ScanRow scan_row(double x, const ScanConfig& config, const TraceTable& traces, const ZeroTable& zeros);

// Throws CoverageError naming geodesic_counts or spectral when a table is
// too short for some grid point.
std::vector<ScanRow> run_error_scan(const ScanConfig& config, const TraceTable& traces, const ZeroTable& zeros);

struct RegressionSummary {
  double x_min = 0.0;
  double x_max = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::int64_t points_used = 0;
};

// Least-squares line through (log x, log |psi - x|), skipping rows with a
// zero residual. Throws DomainError with fewer than two usable rows.
RegressionSummary fit_exponent(std::span<const ScanRow> rows);

// Per window, T = optimal_T(e^{n + 1/2}, epsilon, uncapped, T_scale).T.
std::vector<ExceptionalReport> run_exceptional_scan(int n_min, int n_max, double epsilon, int samples,
                                                    const ZeroTable& zeros, double T_scale = 1.0,
                                                    unsigned workers = 1);

struct Eq4Cell {
  int n = 0;
  double T = 0.0;
  double integral = 0.0;
  double ratio = 0.0;  // integral / (e^{2n} T)

  friend bool operator==(const Eq4Cell&, const Eq4Cell&) = default;
};

std::vector<Eq4Cell> run_eq4_grid(int n_min, int n_max, std::span<const double> T_values, const ZeroTable& zeros,
                                  unsigned workers = 1);

// max ratio / min ratio over cells with T >= T_floor; 0 when no cell qualifies.
double eq4_spread(std::span<const Eq4Cell> cells, double T_floor);

void write_scan_csv(std::ostream& out, std::span<const ScanRow> rows);
std::vector<ScanRow> read_scan_csv(std::istream& in);
void write_exceptional_csv(std::ostream& out, std::span<const ExceptionalReport> reports);
std::vector<ExceptionalReport> read_exceptional_csv(std::istream& in);
void write_eq4_csv(std::ostream& out, std::span<const Eq4Cell> cells);
std::vector<Eq4Cell> read_eq4_csv(std::istream& in);

}  // namespace geolab
