#pragma once

// Exact counting functions over the length spectrum of the modular surface.
//
// Hyperbolic classes of trace t >= 3 have norm N_t = ((t + sqrt(t^2-4))/2)^2
// and length l_t = log N_t. The k-th power of a class of trace t0 has trace
// u_k(t0) with u_0 = 2, u_1 = t0, u_k = t0 u_{k-1} - u_{k-2}, and norm
// N_{t0}^k = N_{u_k(t0)}, so every cutoff N <= x reduces to a trace cutoff.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "geolab/class_numbers.hpp"

namespace geolab {

struct TraceRecord {
  std::int64_t t = 0;
  std::int64_t discriminant = 0;       // t^2 - 4
  std::int64_t total_classes = 0;      // h*(t^2 - 4)
  std::int64_t primitive_classes = 0;  // classes that are not proper powers
  double log_norm = 0.0;               // l_t
  double norm = 0.0;                   // N_t

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct CountSnapshot {
  double x = 0.0;
  std::int64_t pi = 0;
  double theta = 0.0;
  double psi = 0.0;
  double li = 0.0;
};

// l_t = 2 acosh(t/2).
double log_norm_of_trace(std::int64_t t);
double norm_of_trace(std::int64_t t);

// Largest t >= 3 with N_t <= x, or nullopt when N_3 > x. Exact: decided by
// the integer predicate t sqrt(t^2-4) <= 2x - t^2 + 2 on the exact binary
// value of x whenever the floating estimate is within a guard band.
std::optional<std::int64_t> max_trace_for(double x);

// Exact rational form, x = numerator / denominator with denominator > 0.
std::optional<std::int64_t> max_trace_for_rational(std::int64_t numerator, std::int64_t denominator);

// Trace of the k-th power of a class of trace t0 (k >= 0).
std::int64_t trace_power(std::int64_t t0, int k);

class TraceTable {
 public:
  TraceTable() = default;
  // records[i].t must equal 3 + i.
  explicit TraceTable(std::vector<TraceRecord> records);

  std::int64_t t_max() const noexcept { return records_.empty() ? 2 : records_.back().t; }
  bool empty() const noexcept { return records_.empty(); }
  std::span<const TraceRecord> records() const noexcept { return records_; }
  const TraceRecord& at(std::int64_t t) const;

  friend bool operator==(const TraceTable&, const TraceTable&) = default;

 private:
  std::vector<TraceRecord> records_;
};

// Class numbers for every t in [3, t_max], then primitive counts by
// subtracting proper powers in ascending t. `workers` threads split the
// class-number work over disjoint trace blocks; the result does not
// depend on the worker count.
TraceTable build_trace_table(std::int64_t t_max, unsigned workers = 1);

// Rebuilds primitive counts and lengths from (t, h*) pairs.
TraceTable trace_table_from_totals(std::span<const std::int64_t> total_classes_from_3);

double psi(double x, const TraceTable& table);
double theta(double x, const TraceTable& table);
std::int64_t pi_count(double x, const TraceTable& table);

// Sum over jump points N_t <= x of (jump of theta at N_t) / log N_t, the
// Stieltjes form of pi. Returned as a real to be compared with pi_count.
double pi_stieltjes(double x, const TraceTable& table);

// psi through sum_{n >= 1} theta(x^{1/n}); cross-check of the direct path.
double psi_via_theta(double x, const TraceTable& table);

CountSnapshot count_snapshot(double x, const TraceTable& table);

// Principal-value logarithmic integral, integral from 0 to x of dt / log t.
// Throws DomainError for x < 0 and at the pole x = 1.
double li(double x);

// CSV with header t,D,h_star,primitive,log_norm,norm.
void write_trace_csv(std::ostream& out, const TraceTable& table);
TraceTable read_trace_csv(std::istream& in);

// Binary cache: "GLTT", u32 version, u64 t_max, then (t, h_star, primitive)
// as little-endian 64-bit integers.
inline constexpr std::uint32_t kTraceCacheVersion = 1;
void write_trace_cache(std::ostream& out, const TraceTable& table);
TraceTable read_trace_cache(std::istream& in);

}  // namespace geolab
