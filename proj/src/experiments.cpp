#include "geolab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "geolab/csv.hpp"
#include "geolab/errors.hpp"

namespace geolab {
namespace {

// Runs body(i) for i in [0, count) on `workers` threads. Each index is
// handled once; the first exception is rethrown after all threads join.
template <typename Body>
void parallel_for(std::size_t count, unsigned workers, Body body) {
  workers = std::max(1U, workers);
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    try {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, count); ++w) pool.emplace_back(run);
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<double> log_grid(double x_min, double x_max, int per_decade) {
  if (!(x_min > 0.0) || !(x_max >= x_min)) throw DomainError("log_grid: need 0 < x_min <= x_max");
  if (per_decade < 1) throw DomainError("log_grid: points per decade must be >= 1");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double x = x_min * std::pow(10.0, static_cast<double>(i) / per_decade);
    if (x > x_max * (1.0 + 1e-12)) break;
    grid.push_back(std::min(x, x_max));
  }
  return grid;
}

ScanRow scan_row(double x, const ScanConfig& config, const TraceTable& traces, const ZeroTable& zeros) {
  const TruncationChoice choice = optimal_T(x, config.epsilon, config.capped, config.T_scale);
  require_coverage(zeros, choice.T, "spectral");
  ScanRow row;
  row.x = x;
  row.pi = pi_count(x, traces);
  row.theta = theta(x, traces);
  row.psi = psi(x, traces);
  row.li = li(x);
  row.psi_residual = row.psi - x;
  row.pi_residual = static_cast<double>(row.pi) - row.li;
  const double l = std::log(x);
  const double ll_power = std::pow(std::log(l), 1.0 / 3.0 + config.epsilon);
  const double x23 = std::pow(x, 2.0 / 3.0);
  row.eq6_norm = std::abs(row.psi_residual) / (x23 * l * ll_power);
  row.thm_norm = std::abs(row.pi_residual) / (x23 * ll_power);
  row.T_used = choice.T;
  row.exceptional = std::abs(zero_sum(x, choice.T, zeros)) > exceptional_threshold(x, choice.T, config.epsilon);
  return row;
}

std::vector<ScanRow> run_error_scan(const ScanConfig& config, const TraceTable& traces, const ZeroTable& zeros) {
  constexpr double kE = 2.718281828459045235;
  if (!(config.x_min > kE) || !(config.x_max > config.x_min)) {
    throw DomainError("run_error_scan: need e < x_min < x_max");
  }
  const std::vector<double> grid = log_grid(config.x_min, config.x_max, config.per_decade);
  std::vector<ScanRow> rows(grid.size());
  parallel_for(grid.size(), config.workers, [&](std::size_t i) { rows[i] = scan_row(grid[i], config, traces, zeros); });
  return rows;
}

RegressionSummary fit_exponent(std::span<const ScanRow> rows) {
  std::vector<double> xs;
  std::vector<double> ys;
  RegressionSummary out;
  for (const ScanRow& r : rows) {
    if (r.psi_residual == 0.0 || !(r.x > 0.0)) continue;
    xs.push_back(std::log(r.x));
    ys.push_back(std::log(std::abs(r.psi_residual)));
    out.x_min = xs.size() == 1 ? r.x : std::min(out.x_min, r.x);
    out.x_max = xs.size() == 1 ? r.x : std::max(out.x_max, r.x);
  }
  if (xs.size() < 2) throw DomainError("fit_exponent: fewer than 2 rows with nonzero residual");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_exponent: all usable rows share one x");
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.points_used = static_cast<std::int64_t>(xs.size());
  return out;
}

std::vector<ExceptionalReport> run_exceptional_scan(int n_min, int n_max, double epsilon, int samples,
                                                    const ZeroTable& zeros, double T_scale, unsigned workers) {
  if (n_min < 2 || n_max < n_min) throw DomainError("run_exceptional_scan: need 2 <= n_min <= n_max");
  const auto count = static_cast<std::size_t>(n_max - n_min + 1);
  std::vector<double> Ts(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int n = n_min + static_cast<int>(i);
    Ts[i] = optimal_T(std::exp(n + 0.5), epsilon, false, T_scale).T;
    require_coverage(zeros, Ts[i], "spectral");
  }
  std::vector<ExceptionalReport> reports(count);
  parallel_for(count, workers, [&](std::size_t i) {
    reports[i] = window_exceptional_measure(n_min + static_cast<int>(i), Ts[i], epsilon, zeros, samples);
  });
  return reports;
}

std::vector<Eq4Cell> run_eq4_grid(int n_min, int n_max, std::span<const double> T_values, const ZeroTable& zeros,
                                  unsigned workers) {
  if (n_min < 1 || n_max < n_min) throw DomainError("run_eq4_grid: need 1 <= n_min <= n_max");
  for (const double T : T_values) {
    if (!(T > 0.0)) throw DomainError("run_eq4_grid: T values must be positive");
    require_coverage(zeros, T, "spectral");
  }
  std::vector<Eq4Cell> cells;
  for (int n = n_min; n <= n_max; ++n) {
    for (const double T : T_values) cells.push_back({n, T, 0.0, 0.0});
  }
  parallel_for(cells.size(), workers, [&](std::size_t i) {
    Eq4Cell& cell = cells[i];
    cell.integral = window_mean_square(cell.n, cell.T, zeros);
    cell.ratio = cell.integral / (std::exp(2.0 * cell.n) * cell.T);
  });
  return cells;
}

double eq4_spread(std::span<const Eq4Cell> cells, double T_floor) {
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const Eq4Cell& c : cells) {
    if (c.T < T_floor) continue;
    lo = any ? std::min(lo, c.ratio) : c.ratio;
    hi = any ? std::max(hi, c.ratio) : c.ratio;
    any = true;
  }
  if (!any || lo <= 0.0) return 0.0;
  return hi / lo;
}

namespace {

constexpr const char* kScanHeader =
    "x,pi,theta,psi,li,psi_residual,pi_residual,eq6_norm,thm_norm,T_used,exceptional";
constexpr const char* kExceptionalHeader = "n,measure_estimate,paper_bound,exceeded,total";
constexpr const char* kEq4Header = "n,T,integral,ratio";

using csv::format_real;

}  // namespace

void write_scan_csv(std::ostream& out, std::span<const ScanRow> rows) {
  out << kScanHeader << '\n';
  for (const ScanRow& r : rows) {
    out << format_real(r.x) << ',' << r.pi << ',' << format_real(r.theta) << ',' << format_real(r.psi) << ','
        << format_real(r.li) << ',' << format_real(r.psi_residual) << ',' << format_real(r.pi_residual) << ','
        << format_real(r.eq6_norm) << ',' << format_real(r.thm_norm) << ',' << format_real(r.T_used) << ','
        << (r.exceptional ? 1 : 0) << '\n';
  }
}

std::vector<ScanRow> read_scan_csv(std::istream& in) {
  csv::expect_header(in, kScanHeader);
  std::vector<ScanRow> rows;
  std::string line;
  std::size_t ln = 1;
  while (csv::next_row(in, line, ln)) {
    const auto f = csv::split_line(line);
    if (f.size() != 11) throw ParseError(ln, "expected 11 fields");
    ScanRow r;
    r.x = csv::parse_real(f[0], ln);
    r.pi = csv::parse_int(f[1], ln);
    r.theta = csv::parse_real(f[2], ln);
    r.psi = csv::parse_real(f[3], ln);
    r.li = csv::parse_real(f[4], ln);
    r.psi_residual = csv::parse_real(f[5], ln);
    r.pi_residual = csv::parse_real(f[6], ln);
    r.eq6_norm = csv::parse_real(f[7], ln);
    r.thm_norm = csv::parse_real(f[8], ln);
    r.T_used = csv::parse_real(f[9], ln);
    r.exceptional = csv::parse_bool(f[10], ln);
    rows.push_back(r);
  }
  return rows;
}

void write_exceptional_csv(std::ostream& out, std::span<const ExceptionalReport> reports) {
  out << kExceptionalHeader << '\n';
  for (const ExceptionalReport& r : reports) {
    out << r.n << ',' << format_real(r.measure_estimate) << ',' << format_real(r.paper_bound) << ','
        << r.exceeded_samples << ',' << r.total_samples << '\n';
  }
}

std::vector<ExceptionalReport> read_exceptional_csv(std::istream& in) {
  csv::expect_header(in, kExceptionalHeader);
  std::vector<ExceptionalReport> reports;
  std::string line;
  std::size_t ln = 1;
  while (csv::next_row(in, line, ln)) {
    const auto f = csv::split_line(line);
    if (f.size() != 5) throw ParseError(ln, "expected 5 fields");
    ExceptionalReport r;
    r.n = static_cast<int>(csv::parse_int(f[0], ln));
    r.measure_estimate = csv::parse_real(f[1], ln);
    r.paper_bound = csv::parse_real(f[2], ln);
    r.exceeded_samples = csv::parse_int(f[3], ln);
    r.total_samples = csv::parse_int(f[4], ln);
    reports.push_back(r);
  }
  return reports;
}

void write_eq4_csv(std::ostream& out, std::span<const Eq4Cell> cells) {
  out << kEq4Header << '\n';
  for (const Eq4Cell& c : cells) {
    out << c.n << ',' << format_real(c.T) << ',' << format_real(c.integral) << ',' << format_real(c.ratio) << '\n';
  }
}

std::vector<Eq4Cell> read_eq4_csv(std::istream& in) {
  csv::expect_header(in, kEq4Header);
  std::vector<Eq4Cell> cells;
  std::string line;
  std::size_t ln = 1;
  while (csv::next_row(in, line, ln)) {
    const auto f = csv::split_line(line);
    if (f.size() != 4) throw ParseError(ln, "expected 4 fields");
    cells.push_back({static_cast<int>(csv::parse_int(f[0], ln)), csv::parse_real(f[1], ln),
                     csv::parse_real(f[2], ln), csv::parse_real(f[3], ln)});
  }
  return cells;
}

}  // namespace geolab
