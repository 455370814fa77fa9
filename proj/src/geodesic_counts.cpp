#include "geolab/geodesic_counts.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include "geolab/csv.hpp"
#include "geolab/errors.hpp"
#include "geolab/summation.hpp"

namespace geolab {
namespace {

using boost::multiprecision::cpp_int;

// Largest x accepted by the cutoff search; keeps t^2 inside int64.
constexpr double kMaxCutoff = 1e18;

// N_t <= p/q  <=>  t sqrt(t^2 - 4) q <= 2p - (t^2 - 2) q
bool norm_at_most(std::int64_t t, const cpp_int& p, const cpp_int& q) {
  const cpp_int tt = cpp_int(t) * t;
  const cpp_int rhs = 2 * p - (tt - 2) * q;
  if (rhs < 0) return false;
  return tt * (tt - 4) * q * q <= rhs * rhs;
}

// Exact binary value of a finite positive double as p/q.
void as_rational(double x, cpp_int& p, cpp_int& q) {
  int exp = 0;
  const double mant = std::frexp(x, &exp);  // x = mant * 2^exp, mant in [0.5, 1)
  const auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  p = m;
  q = 1;
  if (exp >= 0) {
    p <<= exp;
  } else {
    q <<= -exp;
  }
}

long double norm_ld(std::int64_t t) {
  const long double tl = static_cast<long double>(t);
  const long double e = (tl + std::sqrt(tl * tl - 4.0L)) / 2.0L;
  return e * e;
}

void check_cutoff(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("cutoff x must be finite and positive");
  if (x > kMaxCutoff) throw DomainError("cutoff x above supported range (1e18)");
}

std::int64_t estimate_trace(double x) {
  // N_t + 1/N_t = t^2 - 2, so t = sqrt(x) + 1/sqrt(x) at the boundary.
  const double r = std::sqrt(x);
  return std::max<std::int64_t>(2, static_cast<std::int64_t>(std::floor(r + 1.0 / r)));
}

template <typename Pred>
std::optional<std::int64_t> search_trace(std::int64_t guess, Pred at_most) {
  std::int64_t t = std::max<std::int64_t>(guess, 3);
  while (t >= 3 && !at_most(t)) --t;
  if (t < 3) return std::nullopt;
  while (at_most(t + 1)) ++t;
  return t;
}

// False when no class has norm <= x.
bool cutoff_or_throw(double x, const TraceTable& table, std::int64_t& t_cut) {
  const auto t = max_trace_for(x);
  if (!t) return false;
  if (*t > table.t_max()) {
    throw CoverageError("geodesic_counts: x = " + csv::format_real(x) + " needs traces up to " +
                        std::to_string(*t) + ", table stops at " + std::to_string(table.t_max()));
  }
  t_cut = *t;
  return true;
}

}  // namespace

double log_norm_of_trace(std::int64_t t) {
  if (t < 3) throw DomainError("hyperbolic trace must be >= 3");
  return 2.0 * std::acosh(static_cast<double>(t) / 2.0);
}

double norm_of_trace(std::int64_t t) {
  if (t < 3) throw DomainError("hyperbolic trace must be >= 3");
  return static_cast<double>(norm_ld(t));
}

std::optional<std::int64_t> max_trace_for(double x) {
  check_cutoff(x);
  const long double xl = x;
  // 4 ulps of x; the long double norm is far more accurate than that.
  const long double guard = 4.0L * (std::nextafter(x, std::numeric_limits<double>::infinity()) - x);
  cpp_int p;
  cpp_int q;
  bool have_rational = false;
  return search_trace(estimate_trace(x), [&](std::int64_t t) {
    const long double diff = norm_ld(t) - xl;
    if (std::abs(diff) > guard) return diff < 0;
    if (!have_rational) {
      as_rational(x, p, q);
      have_rational = true;
    }
    return norm_at_most(t, p, q);
  });
}

std::optional<std::int64_t> max_trace_for_rational(std::int64_t numerator, std::int64_t denominator) {
  if (denominator <= 0 || numerator <= 0) throw DomainError("rational cutoff must be positive");
  const double x = static_cast<double>(numerator) / static_cast<double>(denominator);
  check_cutoff(x);
  const cpp_int p(numerator);
  const cpp_int q(denominator);
  return search_trace(estimate_trace(x), [&](std::int64_t t) { return norm_at_most(t, p, q); });
}

std::int64_t trace_power(std::int64_t t0, int k) {
  if (k < 0) throw DomainError("trace_power: negative exponent");
  std::int64_t prev = 2;
  std::int64_t cur = t0;
  if (k == 0) return prev;
  for (int i = 1; i < k; ++i) {
    const __int128 next = static_cast<__int128>(t0) * cur - prev;
    if (next > std::numeric_limits<std::int64_t>::max()) throw DomainError("trace_power: overflow");
    prev = cur;
    cur = static_cast<std::int64_t>(next);
  }
  return cur;
}

TraceTable::TraceTable(std::vector<TraceRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].t != static_cast<std::int64_t>(i) + 3) {
      throw DomainError("trace table must list consecutive traces starting at 3");
    }
  }
}

const TraceRecord& TraceTable::at(std::int64_t t) const {
  if (t < 3 || t > t_max()) {
    throw CoverageError("geodesic_counts: trace " + std::to_string(t) + " outside table [3, " +
                        std::to_string(t_max()) + "]");
  }
  return records_[static_cast<std::size_t>(t - 3)];
}

TraceTable trace_table_from_totals(std::span<const std::int64_t> totals) {
  const auto t_max = static_cast<std::int64_t>(totals.size()) + 2;
  std::vector<TraceRecord> records(totals.size());
  for (std::size_t i = 0; i < totals.size(); ++i) {
    const std::int64_t t = static_cast<std::int64_t>(i) + 3;
    records[i] = {t, t * t - 4, totals[i], totals[i], log_norm_of_trace(t), norm_of_trace(t)};
  }
  // Ascending t: by the time t0 is reached its primitive count is final,
  // and its powers all have larger traces.
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::int64_t t0 = records[i].t;
    const std::int64_t prim = records[i].primitive_classes;
    if (prim < 0) throw std::logic_error("negative primitive class count at t=" + std::to_string(t0));
    std::int64_t prev = t0;
    std::int64_t cur = t0 * t0 - 2;
    while (cur <= t_max) {
      records[static_cast<std::size_t>(cur - 3)].primitive_classes -= prim;
      const __int128 next = static_cast<__int128>(t0) * cur - prev;
      if (next > t_max) break;
      prev = cur;
      cur = static_cast<std::int64_t>(next);
    }
  }
  return TraceTable(std::move(records));
}

TraceTable build_trace_table(std::int64_t t_max, unsigned workers) {
  if (t_max < 3) throw DomainError("build_trace_table: t_max must be >= 3");
  if (t_max > 3'000'000'000LL) throw DomainError("build_trace_table: t_max too large");
  workers = std::max(1U, workers);
  const FormEnumerator enumerator(t_max * t_max - 4);
  const auto count = static_cast<std::size_t>(t_max - 2);
  std::vector<std::int64_t> totals(count);

  // Work grows with t, so blocks are handed out dynamically; each slot is
  // written by exactly one thread.
  constexpr std::size_t kBlock = 64;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t begin = next.fetch_add(kBlock);
      if (begin >= count) return;
      const std::size_t end = std::min(count, begin + kBlock);
      for (std::size_t i = begin; i < end; ++i) {
        const auto t = static_cast<std::int64_t>(i) + 3;
        totals[i] = static_cast<std::int64_t>(enumerator.tally(Discriminant::from_trace(t)).class_count);
      }
    }
  };
  auto run = [&] {
    try {
      work();
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(count);
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  }
  if (failure) std::rethrow_exception(failure);
  return trace_table_from_totals(totals);
}

double psi(double x, const TraceTable& table) {
  std::int64_t t_cut = 0;
  if (!cutoff_or_throw(x, table, t_cut)) return 0.0;
  CompensatedSum sum;
  for (std::int64_t t0 = 3; t0 <= t_cut; ++t0) {
    const TraceRecord& r = table.at(t0);
    if (r.primitive_classes == 0) continue;
    const double weight = static_cast<double>(r.primitive_classes) * r.log_norm;
    std::int64_t prev = 2;
    std::int64_t cur = t0;
    while (cur <= t_cut) {
      sum.add(weight);
      const __int128 next = static_cast<__int128>(t0) * cur - prev;
      if (next > t_cut) break;
      prev = cur;
      cur = static_cast<std::int64_t>(next);
    }
  }
  return sum.value();
}

double theta(double x, const TraceTable& table) {
  std::int64_t t_cut = 0;
  if (!cutoff_or_throw(x, table, t_cut)) return 0.0;
  CompensatedSum sum;
  for (std::int64_t t = 3; t <= t_cut; ++t) {
    const TraceRecord& r = table.at(t);
    sum.add(static_cast<double>(r.primitive_classes) * r.log_norm);
  }
  return sum.value();
}

std::int64_t pi_count(double x, const TraceTable& table) {
  std::int64_t t_cut = 0;
  if (!cutoff_or_throw(x, table, t_cut)) return 0;
  std::int64_t n = 0;
  for (std::int64_t t = 3; t <= t_cut; ++t) n += table.at(t).primitive_classes;
  return n;
}

double pi_stieltjes(double x, const TraceTable& table) {
  std::int64_t t_cut = 0;
  if (!cutoff_or_throw(x, table, t_cut)) return 0.0;
  CompensatedSum sum;
  for (std::int64_t t = 3; t <= t_cut; ++t) {
    const TraceRecord& r = table.at(t);
    const double jump = static_cast<double>(r.primitive_classes) * r.log_norm;
    sum.add(jump / std::log(r.norm));
  }
  return sum.value();
}

double psi_via_theta(double x, const TraceTable& table) {
  check_cutoff(x);
  const double smallest = norm_of_trace(3);
  const double log_x = std::log(x);
  CompensatedSum sum;
  for (int n = 1;; ++n) {
    const double root = n == 1 ? x : std::exp(log_x / n);
    if (root < smallest) break;
    sum.add(theta(root, table));
  }
  return sum.value();
}

CountSnapshot count_snapshot(double x, const TraceTable& table) {
  return {x, pi_count(x, table), theta(x, table), psi(x, table), li(x)};
}

namespace {

constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;

// Ei(y) by its power series gamma + ln|y| + sum y^n / (n n!); all terms are
// positive for y > 0, so there is no cancellation on that side.
long double ei_series(long double y) {
  long double term = 1.0L;
  long double sum = 0.0L;
  for (int n = 1; n < 10000; ++n) {
    term *= y / n;
    const long double contrib = term / n;
    sum += contrib;
    if (std::abs(contrib) <= std::numeric_limits<long double>::epsilon() * std::abs(sum)) break;
  }
  return kEulerGamma + std::log(std::abs(y)) + sum;
}

// E1(z) for z > 1 by its continued fraction (modified Lentz).
long double e1_continued_fraction(long double z) {
  const long double tiny = 1e-4000L;
  long double b = z + 1.0L;
  long double c = 1.0L / tiny;
  long double d = 1.0L / b;
  long double h = d;
  for (int i = 1; i < 10000; ++i) {
    const long double a = -static_cast<long double>(i) * i;
    b += 2.0L;
    d = 1.0L / (a * d + b);
    c = b + a / c;
    const long double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0L) <= std::numeric_limits<long double>::epsilon()) break;
  }
  return h * std::exp(-z);
}

}  // namespace

double li(double x) {
  if (std::isnan(x) || x < 0.0) throw DomainError("li: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x == 1.0) throw DomainError("li: logarithmic singularity at x = 1");
  const long double y = std::log(static_cast<long double>(x));
  if (y > -2.0L) return static_cast<double>(ei_series(y));
  return static_cast<double>(-e1_continued_fraction(-y));
}

void write_trace_csv(std::ostream& out, const TraceTable& table) {
  out << "t,D,h_star,primitive,log_norm,norm\n";
  for (const TraceRecord& r : table.records()) {
    out << r.t << ',' << r.discriminant << ',' << r.total_classes << ',' << r.primitive_classes << ','
        << csv::format_real(r.log_norm) << ',' << csv::format_real(r.norm) << '\n';
  }
}

TraceTable read_trace_csv(std::istream& in) {
  csv::expect_header(in, "t,D,h_star,primitive,log_norm,norm");
  std::vector<TraceRecord> records;
  std::string line;
  std::size_t line_number = 1;
  while (csv::next_row(in, line, line_number)) {
    const auto f = csv::split_line(line);
    if (f.size() != 6) throw ParseError(line_number, "expected 6 fields");
    TraceRecord r;
    r.t = csv::parse_int(f[0], line_number);
    r.discriminant = csv::parse_int(f[1], line_number);
    r.total_classes = csv::parse_int(f[2], line_number);
    r.primitive_classes = csv::parse_int(f[3], line_number);
    r.log_norm = csv::parse_real(f[4], line_number);
    r.norm = csv::parse_real(f[5], line_number);
    if (r.t != static_cast<std::int64_t>(records.size()) + 3) throw ParseError(line_number, "traces must be 3,4,5,...");
    if (r.discriminant != r.t * r.t - 4) throw ParseError(line_number, "D must equal t^2 - 4");
    records.push_back(r);
  }
  return TraceTable(std::move(records));
}

namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(bytes, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
  out.write(bytes, 4);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw IoError("trace cache: truncated file");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8U) | bytes[i];
  return v;
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw IoError("trace cache: truncated file");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8U) | bytes[i];
  return v;
}

}  // namespace

void write_trace_cache(std::ostream& out, const TraceTable& table) {
  out.write("GLTT", 4);
  put_u32(out, kTraceCacheVersion);
  put_u64(out, static_cast<std::uint64_t>(table.t_max()));
  for (const TraceRecord& r : table.records()) {
    put_u64(out, static_cast<std::uint64_t>(r.t));
    put_u64(out, static_cast<std::uint64_t>(r.total_classes));
    put_u64(out, static_cast<std::uint64_t>(r.primitive_classes));
  }
  if (!out) throw IoError("trace cache: write failed");
}

TraceTable read_trace_cache(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "GLTT") throw IoError("trace cache: bad magic");
  const std::uint32_t version = get_u32(in);
  if (version != kTraceCacheVersion) {
    throw IoError("trace cache: unsupported version " + std::to_string(version));
  }
  const auto t_max = static_cast<std::int64_t>(get_u64(in));
  if (t_max < 2 || t_max > 3'000'000'000LL) throw IoError("trace cache: implausible t_max");
  std::vector<std::int64_t> totals;
  std::vector<std::int64_t> primitive;
  for (std::int64_t t = 3; t <= t_max; ++t) {
    if (static_cast<std::int64_t>(get_u64(in)) != t) throw IoError("trace cache: records out of order");
    totals.push_back(static_cast<std::int64_t>(get_u64(in)));
    primitive.push_back(static_cast<std::int64_t>(get_u64(in)));
  }
  TraceTable table = trace_table_from_totals(totals);
  for (std::size_t i = 0; i < primitive.size(); ++i) {
    if (table.records()[i].primitive_classes != primitive[i]) {
      throw IoError("trace cache: primitive counts inconsistent with class numbers");
    }
  }
  return table;
}

}  // namespace geolab
