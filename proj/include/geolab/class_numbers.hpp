#pragma once

// Reduced indefinite binary quadratic forms and their reduction cycles.
//
// A form (a, b, c) of discriminant D = b^2 - 4ac > 0 (D not a square) is
// reduced when |sqrt(D) - 2|a|| < b < sqrt(D). Reduced forms fall into
// disjoint cycles under the right-neighbour map; the number of cycles,
// counting imprimitive forms as their own classes, is h*(D). For
// D = t^2 - 4 this is the number of PSL(2,Z) conjugacy classes of
// hyperbolic elements with trace t.

#include <compare>
#include <cstdint>
#include <vector>

namespace geolab {

class Discriminant {
 public:
  // Throws DomainError unless value > 0, value = 0 or 1 (mod 4) and value
  // is not a perfect square.
  explicit Discriminant(std::int64_t value);

  // t^2 - 4 for t >= 3.
  static Discriminant from_trace(std::int64_t trace);

  std::int64_t value() const noexcept { return value_; }
  // floor(sqrt(D)); strictly below sqrt(D) since D is not a square.
  std::int64_t floor_sqrt() const noexcept { return floor_sqrt_; }

  friend bool operator==(const Discriminant&, const Discriminant&) = default;

 private:
  std::int64_t value_;
  std::int64_t floor_sqrt_;
};

struct QuadraticForm {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;

  friend auto operator<=>(const QuadraticForm&, const QuadraticForm&) = default;
};

struct FormClassTally {
  Discriminant discriminant;
  std::uint64_t reduced_count = 0;
  std::uint64_t class_count = 0;
};

// Exact test of |sqrt(D) - 2|a|| < b < sqrt(D) together with b^2 - 4ac = D.
bool is_reduced(const QuadraticForm& form, const Discriminant& d);

// Right neighbour (c, b', (b'^2 - D) / 4c) of a reduced form, where b' is
// the representative of -b mod 2|c| in (sqrt(D) - 2|c|, sqrt(D)).
// Throws ContractError if `form` is not reduced for `d`.
QuadraticForm reduction_step(const QuadraticForm& form, const Discriminant& d);

// Enumerates reduced forms by walking b over 0 < b < sqrt(D) with the
// parity of D and taking the divisors a of (D - b^2)/4 inside the reduced
// window. The values (D - b^2)/4 are factored by sieving the quadratic
// polynomial in b with the primes up to sqrt(max D)/2, held here so one
// enumerator can serve a whole batch of discriminants. Read-only after
// construction; safe to share across threads.
class FormEnumerator {
 public:
  explicit FormEnumerator(std::int64_t max_discriminant);

  std::int64_t max_discriminant() const noexcept { return max_discriminant_; }

  // Sorted by (a, b, c).
  std::vector<QuadraticForm> reduced_forms(const Discriminant& d) const;
  FormClassTally tally(const Discriminant& d) const;
  // Each inner vector is one cycle, starting at its smallest form and
  // following reduction_step. Cycles are ordered by their first form.
  std::vector<std::vector<QuadraticForm>> cycles(const Discriminant& d) const;

 private:
  struct Layout;
  Layout enumerate(const Discriminant& d) const;
  void check_range(const Discriminant& d) const;

  std::int64_t max_discriminant_;
  std::vector<std::uint32_t> primes_;  // odd primes only
};

std::vector<QuadraticForm> list_reduced_forms(const Discriminant& d);
std::vector<std::vector<QuadraticForm>> reduction_cycles(const Discriminant& d);
std::int64_t class_number(const Discriminant& d);

}  // namespace geolab
