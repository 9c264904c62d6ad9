// Graded Betti numbers by direct homology: the degree-(p+q) strand
//
//   wedge^{p+1} V (x) R_{q-1}  ->  wedge^p V (x) R_q  ->  wedge^{p-1} V (x) R_{q+1}
//
// over a monomial algebra splits into torus-bidegree blocks, and kappa_{p,q}
// is the sum of the blocks' middle homology dimensions. Each differential is
// the outgoing map of one strand and the incoming map of the next, so its
// block ranks are computed once and cached; blocks related by the torus
// symmetries of the algebra share their ranks as well.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "segre/matrix.hpp"
#include "segre/rings.hpp"

namespace segre {

// Wedge monomials are bitmasks over the degree-1 generators, ascending index
// order. Sign of removing generator `pos` (leftmost factor contracts with +1).
inline int wedge_sign_remove(std::uint32_t mask, int pos) {
  return (std::popcount(mask & ((std::uint32_t(1) << pos) - 1)) & 1) ? -1 : 1;
}

// Smallest k-subset mask, and Gosper's next-subset step (same popcount).
inline std::uint32_t first_subset(int k) { return (std::uint32_t(1) << k) - 1; }
inline std::uint32_t next_subset(std::uint32_t v) {
  std::uint32_t t = v | (v - 1);
  return (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(v) + 1));
}

struct StrandOptions {
  FieldSpec field = FieldSpec::gf(32003);
  int threads = 1;
  std::string cache_dir;  // empty: no disk cache
};

// One torus-bidegree block of a strand: the two differentials around the
// middle space, restricted to this bidegree. Basis labels pack the wedge mask
// with the ring-basis index. Composition is checked exactly at build time.
struct KoszulBlock {
  Bidegree bidegree;
  SparseExactMatrix d_in;   // from wedge^{p+1} V (x) R_{q-1}
  SparseExactMatrix d_out;  // into wedge^{p-1} V (x) R_{q+1}
};

struct BidegreeTable {
  int p = 0, q = 0;
  std::map<Bidegree, std::size_t> entries;  // nonzero block homology dims
  std::size_t total = 0;                    // = kappa_{p,q}
};

struct BettiTable {
  std::string algebra;
  int a = 0, b = 0;  // surface parameters when the algebra is a surface ring
  int max_p = 0;
  std::string field;
  std::map<std::pair<int, int>, std::size_t> entries;  // (p,q) -> kappa
  std::size_t kappa(int p, int q) const;
};

// Materialized block decomposition of the strand (every bidegree meeting any
// of the three spaces). Small-scale tool; the Betti computations below stream
// block ranks without building matrices.
std::vector<KoszulBlock> koszul_strand(const MonomialAlgebra& alg, int p, int q);

std::size_t betti_number(const MonomialAlgebra& alg, int p, int q,
                         const StrandOptions& opts = {});
BidegreeTable bidegree_table(const MonomialAlgebra& alg, int p, int q,
                             const StrandOptions& opts = {});
BettiTable full_betti_table(const MonomialAlgebra& alg, int max_p, const StrandOptions& opts = {});

// Closed form for the tail of the q = 1 row of the (a,b) surface table,
// 3 <= a <= b: kappa_{p,1} = p*C((a+1)b, p+1) for p >= ab+a, plus p extra
// classes exactly at p = ab+a-1. Below that: OutOfTheoremRange.
std::size_t closed_form_first_row(int a, int b, int p);

// a = 2 surfaces: closed form for the whole q = 1 and q = 2 rows.
std::size_t closed_form_a2(int b, int p, int q);

// Exact binomial; out-of-range arguments (k < 0 or k > n) count as zero.
std::size_t binomial(int n, int k);

}  // namespace segre
