#include "geolab/class_numbers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "geolab/errors.hpp"

namespace geolab {
namespace {

using i128 = __int128;

std::int64_t isqrt(std::int64_t n) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(n)));
  while (static_cast<i128>(r) * r > n) --r;
  while (static_cast<i128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) { return a * b % m; }

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

// Square root of n modulo an odd prime p < 2^32, or -1 for a non-residue.
std::int64_t sqrt_mod(std::uint64_t n, std::uint64_t p) {
  n %= p;
  if (n == 0) return 0;
  if (powmod(n, (p - 1) / 2, p) != 1) return -1;
  if (p % 4 == 3) return static_cast<std::int64_t>(powmod(n, (p + 1) / 4, p));

  // Tonelli-Shanks
  std::uint64_t q = p - 1;
  unsigned s = 0;
  while ((q & 1U) == 0) {
    q >>= 1U;
    ++s;
  }
  std::uint64_t z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  std::uint64_t m = s;
  std::uint64_t c = powmod(z, q, p);
  std::uint64_t t = powmod(n, q, p);
  std::uint64_t r = powmod(n, (q + 1) / 2, p);
  while (t != 1) {
    std::uint64_t i = 0;
    std::uint64_t tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    std::uint64_t b = c;
    for (std::uint64_t j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return static_cast<std::int64_t>(r);
}

std::vector<std::uint32_t> odd_primes_up_to(std::int64_t limit) {
  std::vector<std::uint32_t> primes;
  if (limit < 3) return primes;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::int64_t i = 3; i <= limit; i += 2) {
    if (composite[static_cast<std::size_t>(i)]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::int64_t j = i * i; j <= limit; j += 2 * i) composite[static_cast<std::size_t>(j)] = true;
  }
  return primes;
}

// sqrt(D) < v for v >= 0, exactly.
bool sqrt_below(std::int64_t v, std::int64_t d) { return v >= 0 && static_cast<i128>(v) * v > d; }

// v < sqrt(D), exactly.
bool below_sqrt(std::int64_t v, std::int64_t d) { return v < 0 || static_cast<i128>(v) * v < d; }

}  // namespace

Discriminant::Discriminant(std::int64_t value) : value_(value), floor_sqrt_(0) {
  if (value <= 0) throw DomainError("discriminant must be positive, got " + std::to_string(value));
  if (value % 4 != 0 && value % 4 != 1) {
    throw DomainError("discriminant " + std::to_string(value) + " is not 0 or 1 mod 4");
  }
  floor_sqrt_ = isqrt(value);
  if (floor_sqrt_ * floor_sqrt_ == value) {
    throw DomainError("discriminant " + std::to_string(value) + " is a perfect square");
  }
}

Discriminant Discriminant::from_trace(std::int64_t trace) {
  if (trace < 3) throw DomainError("hyperbolic trace must be >= 3, got " + std::to_string(trace));
  return Discriminant(trace * trace - 4);
}

bool is_reduced(const QuadraticForm& f, const Discriminant& d) {
  const std::int64_t dv = d.value();
  if (static_cast<i128>(f.b) * f.b - static_cast<i128>(4) * f.a * f.c != dv) return false;
  if (f.b <= 0 || !below_sqrt(f.b, dv)) return false;
  const std::int64_t two_a = 2 * (f.a < 0 ? -f.a : f.a);
  // |sqrt(D) - 2|a|| < b  <=>  sqrt(D) < 2|a| + b  and  2|a| - b < sqrt(D)
  return sqrt_below(two_a + f.b, dv) && below_sqrt(two_a - f.b, dv);
}

QuadraticForm reduction_step(const QuadraticForm& f, const Discriminant& d) {
  if (!is_reduced(f, d)) {
    throw ContractError("reduction_step: form (" + std::to_string(f.a) + "," + std::to_string(f.b) + "," +
                        std::to_string(f.c) + ") is not reduced for D=" + std::to_string(d.value()));
  }
  const std::int64_t s = d.floor_sqrt();
  const std::int64_t two_c = 2 * (f.c < 0 ? -f.c : f.c);
  // largest b' <= floor(sqrt D) with b' = -b (mod 2|c|)
  const std::int64_t b_next = s - ((s + f.b) % two_c);
  const std::int64_t c_next = (b_next * b_next - d.value()) / (4 * f.c);
  return {f.c, b_next, c_next};
}

struct FormEnumerator::Layout {
  // Reduced forms with a > 0 grouped by b = 2k + parity; each has a twin
  // with a -> -a. offsets has size (number of b values) + 1.
  std::int64_t parity = 0;
  std::vector<std::uint32_t> offsets;
  std::vector<std::int64_t> a_values;
};

FormEnumerator::FormEnumerator(std::int64_t max_discriminant)
    : max_discriminant_(max_discriminant),
      primes_(odd_primes_up_to(max_discriminant > 0 ? isqrt(max_discriminant) / 2 + 1 : 0)) {
  if (max_discriminant <= 0) throw DomainError("FormEnumerator: max discriminant must be positive");
}

void FormEnumerator::check_range(const Discriminant& d) const {
  if (d.value() > max_discriminant_) {
    throw DomainError("discriminant " + std::to_string(d.value()) + " exceeds enumerator bound " +
                      std::to_string(max_discriminant_));
  }
}

FormEnumerator::Layout FormEnumerator::enumerate(const Discriminant& d) const {
  check_range(d);
  const std::int64_t dv = d.value();
  const std::int64_t s = d.floor_sqrt();
  Layout out;
  out.parity = dv & 1;
  const std::int64_t eps = out.parity;
  // b = 2k + eps, 0 < b <= s
  const std::int64_t k_begin = eps == 0 ? 1 : 0;
  const std::int64_t k_end = (s - eps) / 2 + 1;  // exclusive
  const std::size_t count = k_end > k_begin ? static_cast<std::size_t>(k_end - k_begin) : 0;

  std::vector<std::int64_t> rest(count);
  std::vector<std::int64_t> value(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t b = 2 * (static_cast<std::int64_t>(i) + k_begin) + eps;
    value[i] = (dv - b * b) / 4;
    rest[i] = value[i];
  }

  // factor lists, flat with a fixed stride; 15 distinct primes exceed 2^63
  constexpr std::size_t kStride = 16;
  std::vector<std::uint32_t> fprime(count * kStride);
  std::vector<std::uint8_t> fexp(count * kStride);
  std::vector<std::uint8_t> nfac(count, 0);
  auto push = [&](std::size_t i, std::uint32_t p, std::uint8_t e) {
    fprime[i * kStride + nfac[i]] = p;
    fexp[i * kStride + nfac[i]] = e;
    ++nfac[i];
  };

  for (std::size_t i = 0; i < count; ++i) {
    std::uint8_t e = 0;
    while ((rest[i] & 1) == 0) {
      rest[i] >>= 1;
      ++e;
    }
    if (e > 0) push(i, 2, e);
  }

  const std::int64_t max_value = count > 0 ? value[0] : 0;
  for (const std::uint32_t p32 : primes_) {
    const std::int64_t p = p32;
    if (p * p > max_value) break;
    const std::int64_t r = sqrt_mod(static_cast<std::uint64_t>(dv % p), static_cast<std::uint64_t>(p));
    if (r < 0) continue;
    // (2k + eps)^2 = D (mod p)  =>  k = (+-r - eps) / 2 (mod p)
    const std::int64_t inv2 = (p + 1) / 2;
    std::int64_t roots[2];
    int nroots = 0;
    roots[nroots++] = ((r - eps + p) % p) * inv2 % p;
    if (r != 0) roots[nroots++] = ((p - r - eps + p) % p) * inv2 % p;
    for (int j = 0; j < nroots; ++j) {
      // first k >= k_begin with k = roots[j] (mod p)
      std::int64_t k = roots[j];
      if (k < k_begin) k += p;
      for (; k < k_end; k += p) {
        const auto i = static_cast<std::size_t>(k - k_begin);
        std::uint8_t e = 0;
        while (rest[i] % p == 0) {
          rest[i] /= p;
          ++e;
        }
        push(i, p32, e);
      }
    }
  }

  out.offsets.assign(count + 1, 0);
  std::vector<std::int64_t> divisors;
  for (std::size_t i = 0; i < count; ++i) {
    const std::int64_t b = 2 * (static_cast<std::int64_t>(i) + k_begin) + eps;
    divisors.assign(1, 1);
    auto extend = [&](std::int64_t p, int e) {
      const std::size_t n = divisors.size();
      std::int64_t pk = 1;
      for (int x = 0; x < e; ++x) {
        pk *= p;
        for (std::size_t y = 0; y < n; ++y) divisors.push_back(divisors[y] * pk);
      }
    };
    for (std::uint8_t j = 0; j < nfac[i]; ++j) extend(fprime[i * kStride + j], fexp[i * kStride + j]);
    if (rest[i] > 1) extend(rest[i], 1);
    std::sort(divisors.begin(), divisors.end());
    for (const std::int64_t a : divisors) {
      // (sqrt D - b)/2 < a < (sqrt D + b)/2
      if (sqrt_below(2 * a + b, dv) && below_sqrt(2 * a - b, dv)) out.a_values.push_back(a);
    }
    out.offsets[i + 1] = static_cast<std::uint32_t>(out.a_values.size());
  }
  return out;
}

std::vector<QuadraticForm> FormEnumerator::reduced_forms(const Discriminant& d) const {
  const Layout layout = enumerate(d);
  const std::int64_t k_begin = layout.parity == 0 ? 1 : 0;
  std::vector<QuadraticForm> forms;
  forms.reserve(2 * layout.a_values.size());
  for (std::size_t i = 0; i + 1 < layout.offsets.size(); ++i) {
    const std::int64_t b = 2 * (static_cast<std::int64_t>(i) + k_begin) + layout.parity;
    const std::int64_t m = (d.value() - b * b) / 4;
    for (std::uint32_t j = layout.offsets[i]; j < layout.offsets[i + 1]; ++j) {
      const std::int64_t a = layout.a_values[j];
      forms.push_back({a, b, -m / a});
      forms.push_back({-a, b, m / a});
    }
  }
  std::sort(forms.begin(), forms.end());
  return forms;
}

namespace {

// Follows reduction cycles over the grouped layout without materializing a
// map from forms to indices: the successor (c, b', c') is located by its b'
// group and |c| within that group's short sorted divisor list.
template <typename OnCycleStart, typename OnForm>
void walk_cycles(const FormEnumerator&, const Discriminant& d, const std::vector<std::uint32_t>& offsets,
                 const std::vector<std::int64_t>& a_values, std::int64_t parity, OnCycleStart on_start,
                 OnForm on_form) {
  const std::int64_t k_begin = parity == 0 ? 1 : 0;
  const std::size_t n = a_values.size();
  std::vector<bool> visited(2 * n, false);
  // index of a_values entry -> its b
  std::vector<std::int64_t> b_of(n);
  for (std::size_t i = 0; i + 1 < offsets.size(); ++i) {
    for (std::uint32_t j = offsets[i]; j < offsets[i + 1]; ++j) {
      b_of[j] = 2 * (static_cast<std::int64_t>(i) + k_begin) + parity;
    }
  }
  auto form_of = [&](std::size_t id) {
    const std::size_t j = id / 2;
    const std::int64_t b = b_of[j];
    const std::int64_t m = (d.value() - b * b) / 4;
    const std::int64_t a = a_values[j];
    return (id % 2 == 0) ? QuadraticForm{a, b, -m / a} : QuadraticForm{-a, b, m / a};
  };
  auto id_of = [&](const QuadraticForm& f) -> std::size_t {
    const auto i = static_cast<std::size_t>((f.b - parity) / 2 - k_begin);
    const std::int64_t abs_a = f.a < 0 ? -f.a : f.a;
    const auto first = a_values.begin() + offsets[i];
    const auto last = a_values.begin() + offsets[i + 1];
    const auto it = std::lower_bound(first, last, abs_a);
    if (it == last || *it != abs_a) throw std::logic_error("reduction cycle left the reduced set");
    return 2 * static_cast<std::size_t>(it - a_values.begin()) + (f.a < 0 ? 1 : 0);
  };

  for (std::size_t start = 0; start < 2 * n; ++start) {
    if (visited[start]) continue;
    on_start();
    std::size_t id = start;
    do {
      visited[id] = true;
      const QuadraticForm f = form_of(id);
      on_form(f);
      id = id_of(reduction_step(f, d));
    } while (id != start);
  }
}

}  // namespace

FormClassTally FormEnumerator::tally(const Discriminant& d) const {
  const Layout layout = enumerate(d);
  FormClassTally out{d, 2 * layout.a_values.size(), 0};
  walk_cycles(
      *this, d, layout.offsets, layout.a_values, layout.parity, [&] { ++out.class_count; },
      [](const QuadraticForm&) {});
  return out;
}

std::vector<std::vector<QuadraticForm>> FormEnumerator::cycles(const Discriminant& d) const {
  const Layout layout = enumerate(d);
  std::vector<std::vector<QuadraticForm>> out;
  walk_cycles(
      *this, d, layout.offsets, layout.a_values, layout.parity, [&] { out.emplace_back(); },
      [&](const QuadraticForm& f) { out.back().push_back(f); });
  for (auto& cycle : out) {
    const auto smallest = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), smallest, cycle.end());
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.front() < y.front(); });
  return out;
}

std::vector<QuadraticForm> list_reduced_forms(const Discriminant& d) {
  return FormEnumerator(d.value()).reduced_forms(d);
}

std::vector<std::vector<QuadraticForm>> reduction_cycles(const Discriminant& d) {
  return FormEnumerator(d.value()).cycles(d);
}

std::int64_t class_number(const Discriminant& d) {
  return static_cast<std::int64_t>(FormEnumerator(d.value()).tally(d).class_count);
}

}  // namespace geolab
