// Exact coefficient fields for the homology computations: GF(q) for an odd
// prime q (default 32003), or the rationals. Nothing here is approximate;
// every rank and dimension downstream is certified arithmetic over one of
// these two fields.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace segre {

// All failures funnel through this one type. `code` is a stable machine
// readable tag (e.g. "NonPrimeModulus", "CompositionNonzero"); the message
// carries the human context.
struct ComputationError : std::runtime_error {
  std::string code;
  ComputationError(std::string c, const std::string& msg)
      : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

[[noreturn]] inline void fail(const char* code, const std::string& msg) {
  throw ComputationError(code, msg);
}

// A choice of coefficient field. modulus == 0 selects exact rationals.
struct FieldSpec {
  std::uint32_t modulus = 32003;

  static FieldSpec gf(std::uint32_t q);  // throws NonPrimeModulus unless q is an odd prime < 2^31
  static FieldSpec rationals() { return FieldSpec{0}; }

  bool is_rational() const { return modulus == 0; }
  std::string name() const {
    return is_rational() ? "rational" : "gf" + std::to_string(modulus);
  }
  bool operator==(const FieldSpec&) const = default;
};

namespace gf {

inline std::uint32_t mul(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
  return static_cast<std::uint32_t>((std::uint64_t)a * b % q);
}

inline std::uint32_t add(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
  std::uint32_t s = a + b;  // a,b < q < 2^31, no wrap
  return s >= q ? s - q : s;
}

inline std::uint32_t sub(std::uint32_t a, std::uint32_t b, std::uint32_t q) {
  return a >= b ? a - b : a + q - b;
}

std::uint32_t pow(std::uint32_t a, std::uint64_t e, std::uint32_t q);
std::uint32_t inv(std::uint32_t a, std::uint32_t q);  // throws on a == 0

// Canonical representative of a signed integer in [0, q).
inline std::uint32_t reduce(std::int64_t v, std::uint32_t q) {
  std::int64_t r = v % static_cast<std::int64_t>(q);
  if (r < 0) r += q;
  return static_cast<std::uint32_t>(r);
}

bool is_prime(std::uint32_t n);

}  // namespace gf

}  // namespace segre
