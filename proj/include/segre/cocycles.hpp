// Explicit degree-one syzygies of the surface ring at the critical strand
// index p = ab + a - 1, written down as elements of wedge^{p-1} V (x) S^2 V.
// Two families: a vertical one built from any p+1 distinct points of the
// grid {0..a} x {0..b-1} with moves (0,1), and a horizontal one built from
// the full grid {0..a-1} x {0..b} with moves (1,0). Verification checks the
// two defining properties directly: every quadric part lies in the ideal of
// the surface, and the contraction into wedge^{p-2} V (x) S^3 V vanishes.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "segre/koszul.hpp"
#include "segre/matrix.hpp"
#include "segre/resolutions.hpp"
#include "segre/rings.hpp"

namespace segre {

// V basis vector v_{(x,y)} with 0 <= x <= a, 0 <= y <= b has index
// x*(b+1) + y; wedge monomials are bitmasks over those indices.

// Index of v_u * v_v inside the lexicographic basis of S^2 V.
std::uint32_t sym2_index(int a, int b, int u, int v);

// The quadric part of the surface ideal inside S^2 V: differences
// v_P v_Q - v_{P'} v_{Q'} with P + Q = P' + Q', reduced to a basis.
// Membership queries reduce against the canonical form (coefficients of one
// bidegree class must sum to zero, for every class).
class QuadricIdealBasis {
 public:
  QuadricIdealBasis(int a, int b);

  std::size_t dim() const { return dim_; }        // C(n+1,2) - (2a+1)(2b+1)
  std::size_t sym2_dim() const { return r2_class_.size(); }

  // One column per basis difference, rows labeled by S^2 V indices.
  SparseExactMatrix basis() const;

  // True when the integer combination of S^2 V monomials lies in the ideal.
  bool contains(const std::vector<std::pair<std::uint32_t, std::int64_t>>& quad) const;

 private:
  int a_ = 0, b_ = 0;
  std::vector<std::uint32_t> r2_class_;  // S^2 V index -> bidegree class
  std::size_t n_classes_ = 0;
  std::size_t dim_ = 0;
};

struct CocycleTerm {
  std::uint32_t wedge_mask;  // p-1 bits over V indices
  std::uint32_t pair_index;  // S^2 V monomial index
  std::int64_t coeff;
};

struct CocycleExpression {
  int a = 0, b = 0;
  int p = 0;                  // homological index, always ab + a - 1
  int j = 0;                  // number of shifted wedge factors
  bool vertical = true;
  std::uint32_t point_set = 0;  // vertical only: chosen points, bits x*b + y
  Bidegree bidegree;
  std::vector<CocycleTerm> terms;  // sorted by (wedge, pair), zero-free
};

// The vertical expression for a chosen (p+1)-point set and shift count j.
// points live in {0..a} x {0..b-1}; j in 0..p-1. Distinctness and range are
// enforced (InvalidPointSet).
CocycleExpression cocycle_vertical(int a, int b, int j,
                                   const std::vector<std::pair<int, int>>& points);

// The horizontal expression for shift count j, over the full point set
// {0..a-1} x {0..b} in the fixed order (x,y) -> y + (b+1)x.
CocycleExpression cocycle_horizontal(int a, int b, int j);

// Every expression of both families: all C((a+1)b, p+1) point sets (lex
// order) times j = 0..p-1, then the p horizontal ones.
std::vector<CocycleExpression> cocycle_family(int a, int b);

// Both defining checks, exactly: terms share the stated bidegree, each
// wedge monomial's quadric part lies in the ideal, and the contraction into
// wedge^{p-2} V (x) S^3 V cancels to zero over the integers.
bool verify_cocycle(const CocycleExpression& expr);
bool verify_cocycle(const CocycleExpression& expr, const QuadricIdealBasis& ideal);

// Rank of the full family, computed blockwise per bidegree, compared against
// the expected count p*C((a+1)b, p+1) + p and against the strand dimension
// the Koszul engine computes for (p, 1). Needs 3 <= a <= b.
VerifyReport independence_and_count(int a, int b, const StrandOptions& options = {});

// The support claims behind independence of the two families: the witness
// term of the horizontal expression (moves on the j largest wedge points,
// quadric on points p-j, p-j+1) appears with coefficient +-1 and its wedge
// covers column a of {0..a} x {0..b} when j > b and column 0 when
// j < p-b-1; and no term of a vertical expression with the same shift count
// covers any full column (the aggregate suite scans every shift count).
bool claim_witness_check(int a, int b, int j);

// Aggregate suite used by the command line: per-expression verification,
// witness claims for every j, and the independence count.
VerifyReport verify_cocycle_suite(int a, int b, const StrandOptions& options = {});

}  // namespace segre
