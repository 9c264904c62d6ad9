// Coordinate rings as monomial bases: the bigraded ring of the (a,b) embedded
// quadric surface, rational normal scroll rings, and scroll modules. All three
// are toric, so elements are labelled monomials and multiplication is index
// bookkeeping; the graded pieces double as section spaces of the line bundles
// they come from.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "segre/field.hpp"

namespace segre {

// Torus character (u1, u2) of a monomial; products add characters.
struct Bidegree {
  int u1 = 0;
  int u2 = 0;
  friend Bidegree operator+(Bidegree a, Bidegree b) { return {a.u1 + b.u1, a.u2 + b.u2}; }
  auto operator<=>(const Bidegree&) const = default;
};

// Monomial basis vector of the degree-n piece of the (a,b) ring: the
// bihomogeneous monomial of bidegree (i, j) with 0 <= i <= n*a, 0 <= j <= n*b.
struct SegreBasisElement {
  int n = 0;
  int i = 0;
  int j = 0;
  auto operator<=>(const SegreBasisElement&) const = default;
};

// Basis vector b_{i_1..i_n, j} of a scroll module: a sorted multiset of
// column indices plus one height j with 0 <= j <= sum of the chosen column
// degrees + c. c == 0 is the scroll ring itself; c > 0 the twisted module.
struct ScrollBasisElement {
  std::vector<int> indices;  // weakly increasing
  int c = 0;
  int j = 0;
  auto operator<=>(const ScrollBasisElement&) const = default;
};

struct ScrollInvariants {
  std::vector<int> e;
  int f = 0;  // sum of e
};
ScrollInvariants scroll_invariants(const std::vector<int>& e);

std::vector<SegreBasisElement> segre_graded_basis(int a, int b, int n);
SegreBasisElement segre_multiply(int a, int b, const SegreBasisElement& x,
                                 const SegreBasisElement& y);

std::vector<ScrollBasisElement> scroll_graded_basis(const std::vector<int>& e, int c, int n);
// One factor must be a ring element (c == 0); two module elements cannot
// multiply (BothModuleElements).
ScrollBasisElement scroll_multiply(const std::vector<int>& e, const ScrollBasisElement& x,
                                   const ScrollBasisElement& y);

// The ring map from the scroll with all column degrees b (a+1 columns) onto
// the (a,b) surface ring: b_{i_1..i_n, j} -> monomial (n, sum(i_t - offset), j).
// `offset` says where the caller's column indexing starts (0 or 1).
SegreBasisElement scroll_projection(const std::vector<int>& e, const ScrollBasisElement& x,
                                    int offset);

// Uniform handle used by the Koszul engine: a graded algebra (or module over
// one) with interned per-degree bases, generator action and torus bidegrees.
class MonomialAlgebra {
 public:
  enum class Kind { segre, scroll, scroll_module };

  static MonomialAlgebra segre(int a, int b);
  static MonomialAlgebra scroll(std::vector<int> e);
  static MonomialAlgebra scroll_module(std::vector<int> e, int c);

  Kind kind() const { return kind_; }
  int a() const { return a_; }
  int b() const { return b_; }
  const std::vector<int>& e() const { return e_; }
  int c() const { return c_; }

  // Degree-1 generators of the acting ring (for a module: of its base ring).
  int n_generators() const;
  Bidegree generator_bidegree(int g) const;

  std::size_t dim(int degree) const;
  Bidegree element_bidegree(int degree, std::size_t idx) const;
  // Index of generator g times basis(degree)[idx] inside basis(degree + 1).
  std::size_t multiply_index(int g, int degree, std::size_t idx) const;
  // Inverse on monomials: index m' in basis(degree - 1) with g * m' =
  // basis(degree)[idx], or nullopt when g does not divide it.
  std::optional<std::size_t> divide_index(int g, int degree, std::size_t idx) const;

  // Concrete elements behind the indices (interned, enumeration order fixed).
  SegreBasisElement segre_element(int degree, std::size_t idx) const;
  ScrollBasisElement scroll_element(int degree, std::size_t idx) const;
  // Inverse of scroll_element; throws when x is not in basis(degree).
  std::size_t scroll_index(int degree, const ScrollBasisElement& x) const;

  // Pre-intern bases for degrees 0..max_degree; call before concurrent reads.
  void warm(int max_degree) const;

  std::string describe() const;  // stable key, e.g. "segre(3,4)" or "scroll(1,2)"

 private:
  MonomialAlgebra() = default;
  struct Table;
  struct Cache;
  const Table& table(int degree) const;

  Kind kind_ = Kind::segre;
  int a_ = 0, b_ = 0;
  std::vector<int> e_;
  int c_ = 0;
  std::shared_ptr<Cache> cache_;  // interned per-degree tables, shared on copy
};

}  // namespace segre
