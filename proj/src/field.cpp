#include "segre/field.hpp"

namespace segre {
namespace gf {

std::uint32_t pow(std::uint32_t a, std::uint64_t e, std::uint32_t q) {
  std::uint64_t base = a % q, acc = 1;
  while (e) {
    if (e & 1) acc = acc * base % q;
    base = base * base % q;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(acc);
}

std::uint32_t inv(std::uint32_t a, std::uint32_t q) {
  a %= q;
  if (a == 0) fail("DivisionByZero", "inverse of 0 in GF(" + std::to_string(q) + ")");
  return pow(a, q - 2, q);  // Fermat; q prime by construction of FieldSpec
}

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  // Deterministic Miller-Rabin; {2, 7, 61} covers everything below 2^32.
  std::uint32_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) d >>= 1, ++r;
  for (std::uint32_t a : {2u, 7u, 61u}) {
    std::uint32_t x = pow(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 0; i + 1 < r; ++i) {
      x = mul(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

}  // namespace gf

FieldSpec FieldSpec::gf(std::uint32_t q) {
  if (q < 3 || q >= (1u << 31) || (q & 1) == 0 || !gf::is_prime(q))
    fail("NonPrimeModulus",
         "field modulus must be an odd prime below 2^31, got " + std::to_string(q));
  return FieldSpec{q};
}

}  // namespace segre
