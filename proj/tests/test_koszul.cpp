// Strand homology tests. The oracle below rebuilds whole strands without any
// of the engine's machinery: no bidegree blocking, no bitmasks, no divisions,
// no symmetry sharing. Wedge monomials are explicit sorted generator lists,
// the differential moves the s-th factor into the ring with sign (-1)^s via
// the concrete multiplication functions, and homology comes from the generic
// matrix routine. Engine results must agree with it wherever it is affordable.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "segre/cache.hpp"
#include "segre/koszul.hpp"
#include "segre/matrix.hpp"
#include "segre/rings.hpp"

using namespace segre;

namespace {

// Minimal ring adapters for the oracle: a basis per degree and multiplication
// by a degree-1 generator, all on concrete basis structs.
struct SurfaceRing {
  int a, b;
  using Elem = SegreBasisElement;
  std::vector<Elem> basis(int d) const {
    if (d < 0) return {};
    return segre_graded_basis(a, b, d);
  }
  std::vector<Elem> gens() const { return basis(1); }
  Elem mult(const Elem& g, const Elem& x) const { return segre_multiply(a, b, g, x); }
};

struct ScrollRing {
  std::vector<int> e;
  using Elem = ScrollBasisElement;
  std::vector<Elem> basis(int d) const {
    if (d < 0) return {};
    return scroll_graded_basis(e, 0, d);
  }
  std::vector<Elem> gens() const { return basis(1); }
  Elem mult(const Elem& g, const Elem& x) const { return scroll_multiply(e, g, x); }
};

std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
  for (;;) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
  if (k == 0) out.assign(1, {});
  return out;
}

// d: wedge^k V (x) R_d -> wedge^{k-1} V (x) R_{d+1} over the whole strand.
// Labels are plain enumeration indices of (wedge, element) pairs.
template <class Ring>
SparseExactMatrix oracle_differential(const Ring& ring, int k, int d) {
  const auto gens = ring.gens();
  const int N = static_cast<int>(gens.size());
  const auto dom_w = combinations(N, k);
  const auto cod_w = combinations(N, k - 1);
  const auto dom_e = ring.basis(d);
  const auto cod_e = ring.basis(d + 1);

  std::map<std::vector<int>, std::size_t> cod_w_idx;
  for (std::size_t i = 0; i < cod_w.size(); ++i) cod_w_idx[cod_w[i]] = i;
  std::map<typename Ring::Elem, std::size_t> cod_e_idx;
  for (std::size_t i = 0; i < cod_e.size(); ++i) cod_e_idx[cod_e[i]] = i;

  std::vector<Label> rows(cod_w.size() * cod_e.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  std::vector<Label> cols(dom_w.size() * dom_e.size());
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;

  std::vector<Triplet> entries;
  for (std::size_t wi = 0; wi < dom_w.size(); ++wi) {
    for (std::size_t ei = 0; ei < dom_e.size(); ++ei) {
      const Label col = wi * dom_e.size() + ei;
      for (std::size_t s = 0; s < dom_w[wi].size(); ++s) {
        std::vector<int> rest = dom_w[wi];
        const int g = rest[s];
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(s));
        const auto prod = ring.mult(gens[static_cast<std::size_t>(g)], dom_e[ei]);
        const Label row = cod_w_idx.at(rest) * cod_e.size() + cod_e_idx.at(prod);
        entries.push_back({row, col, (s % 2 == 0) ? 1 : -1});
      }
    }
  }
  return SparseExactMatrix(std::move(rows), std::move(cols), entries);
}

template <class Ring>
std::size_t oracle_betti(const Ring& ring, int p, int q, const FieldSpec& field) {
  SparseExactMatrix d_in = oracle_differential(ring, p + 1, q - 1);
  SparseExactMatrix d_out = oracle_differential(ring, p, q);
  return homology_dim(&d_in, &d_out, field);
}

const FieldSpec kGF = FieldSpec::gf(32003);

}  // namespace

TEST_CASE("binomial matches a Pascal triangle") {
  std::vector<std::vector<std::size_t>> pascal(25);
  for (int n = 0; n < 25; ++n) {
    pascal[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(n) + 1, 1);
    for (int k = 1; k < n; ++k)
      pascal[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)] =
          pascal[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k - 1)] +
          pascal[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k)];
  }
  for (int n = 0; n < 25; ++n)
    for (int k = 0; k <= n; ++k)
      CHECK(binomial(n, k) == pascal[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)]);
  CHECK(binomial(5, -1) == 0);
  CHECK(binomial(5, 6) == 0);
  CHECK(binomial(-2, 0) == 0);
  CHECK(binomial(16, 15) == 16);
}

TEST_CASE("quadric surface: the full strand table against the oracle") {
  const auto alg = MonomialAlgebra::segre(1, 1);
  const SurfaceRing ring{1, 1};
  for (int p = 0; p <= 4; ++p) {
    for (int q = 0; q <= 3; ++q) {
      CAPTURE(p);
      CAPTURE(q);
      const std::size_t expect = oracle_betti(ring, p, q, kGF);
      CHECK(betti_number(alg, p, q) == expect);
    }
  }
  // The single relation of the quadric in P^3.
  CHECK(betti_number(alg, 1, 1) == 1);
  CHECK(oracle_betti(ring, 1, 1, FieldSpec::rationals()) == 1);

  BettiTable t = full_betti_table(alg, 1);
  CHECK(t.kappa(0, 0) == 1);
  CHECK(t.kappa(1, 1) == 1);
  CHECK(t.kappa(0, 1) == 0);
  CHECK(t.kappa(1, 2) == 0);
  CHECK(t.kappa(1, 3) == 0);
}

TEST_CASE("degree (2,2) surface: oracle agreement on low strands") {
  const auto alg = MonomialAlgebra::segre(2, 2);
  const SurfaceRing ring{2, 2};
  for (int p = 0; p <= 3; ++p) {
    for (int q = 0; q <= 1; ++q) {
      CAPTURE(p);
      CAPTURE(q);
      CHECK(betti_number(alg, p, q) == oracle_betti(ring, p, q, kGF));
    }
  }
  CHECK(betti_number(alg, 1, 2) == oracle_betti(ring, 1, 2, kGF));
  CHECK(betti_number(alg, 2, 2) == oracle_betti(ring, 2, 2, kGF));
}

TEST_CASE("degree (2,2) surface: the documented syzygy count at p = 5") {
  const auto alg = MonomialAlgebra::segre(2, 2);
  const SurfaceRing ring{2, 2};
  CHECK(oracle_betti(ring, 5, 1, kGF) == 20);
  CHECK(betti_number(alg, 5, 1) == 20);

  // Same number over the rationals: no unlucky characteristic here.
  StrandOptions rat;
  rat.field = FieldSpec::rationals();
  CHECK(betti_number(alg, 5, 1, rat) == 20);
}

TEST_CASE("degree (2,2) surface: bidegree decomposition of the p = 5 cross") {
  BidegreeTable t = bidegree_table(MonomialAlgebra::segre(2, 2), 5, 1);
  CHECK(t.total == 20);
  std::map<Bidegree, std::size_t> expect{
      {{4, 6}, 1}, {{5, 6}, 2}, {{6, 6}, 4}, {{7, 6}, 2}, {{8, 6}, 1},
      {{6, 4}, 1}, {{6, 5}, 2}, {{6, 7}, 2}, {{6, 8}, 1},
      {{5, 5}, 1}, {{7, 5}, 1}, {{5, 7}, 1}, {{7, 7}, 1}};
  CHECK(t.entries == expect);
}

TEST_CASE("scroll strands match the resolution count p*C(f,p+1)") {
  // Determinantal scroll ideals have pure linear strands of known size.
  const auto s12 = MonomialAlgebra::scroll({1, 2});
  const ScrollRing r12{{1, 2}};
  CHECK(oracle_betti(r12, 1, 1, kGF) == 3);
  CHECK(betti_number(s12, 1, 1) == 3);
  CHECK(betti_number(s12, 2, 1) == 2 * binomial(3, 3));
  CHECK(betti_number(s12, 1, 2) == 0);
  CHECK(oracle_betti(r12, 1, 2, kGF) == 0);

  const auto s22 = MonomialAlgebra::scroll({2, 2});
  const ScrollRing r22{{2, 2}};
  for (int p = 1; p <= 3; ++p) {
    CAPTURE(p);
    CHECK(betti_number(s22, p, 1) == static_cast<std::size_t>(p) * binomial(4, p + 1));
  }
  CHECK(oracle_betti(r22, 2, 1, kGF) == 2 * binomial(4, 3));
  CHECK(betti_number(s22, 2, 2) == 0);
}

TEST_CASE("materialized strand blocks: partition, exactness, and three-route agreement") {
  const auto alg = MonomialAlgebra::segre(2, 2);
  const SurfaceRing ring{2, 2};
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {0, 2}, {2, 0}, {1, 2}}) {
    CAPTURE(p);
    CAPTURE(q);
    // Construction itself asserts d(d(x)) = 0 in every block.
    auto blocks = koszul_strand(alg, p, q);
    std::size_t prev_cells = 0, mid_cells = 0, next_cells = 0, hom = 0;
    for (const auto& blk : blocks) {
      prev_cells += blk.d_in.n_cols();
      mid_cells += blk.d_in.n_rows();
      CHECK(blk.d_in.n_rows() == blk.d_out.n_cols());
      next_cells += blk.d_out.n_rows();
      hom += homology_dim(&blk.d_in, &blk.d_out, kGF);
    }
    const auto dims = [&](int k, int d) -> std::size_t {
      if (d < 0 || k < 0 || k > 9) return 0;
      return binomial(9, k) * ring.basis(d).size();
    };
    CHECK(prev_cells == dims(p + 1, q - 1));
    CHECK(mid_cells == dims(p, q));
    CHECK(next_cells == dims(p - 1, q + 1));
    // Block-by-block homology, the streaming engine, and the naive oracle.
    CHECK(hom == betti_number(alg, p, q));
    CHECK(hom == oracle_betti(ring, p, q, kGF));
  }
}

TEST_CASE("bidegree bookkeeping: alternating sums per bidegree add up") {
  // In one homogeneous degree the blocked dimensions must partition each
  // position, so the global Euler characteristic equals the sum over
  // bidegrees of the per-bidegree alternating sums.
  const auto alg = MonomialAlgebra::segre(2, 2);
  const int total_degree = 3;
  std::map<Bidegree, long long> per_bidegree;
  long long global = 0;
  for (int p = 0; p <= total_degree; ++p) {
    const int q = total_degree - p;
    const int sign = (p % 2 == 0) ? 1 : -1;
    auto blocks = koszul_strand(alg, p, q);
    std::size_t position_total = 0;
    for (const auto& blk : blocks) {
      per_bidegree[blk.bidegree] += sign * static_cast<long long>(blk.d_in.n_rows());
      position_total += blk.d_in.n_rows();
    }
    global += sign * static_cast<long long>(position_total);
    CHECK(position_total == binomial(9, p) * static_cast<std::size_t>(q * 2 + 1) *
                                static_cast<std::size_t>(q * 2 + 1));
  }
  long long blocked = 0;
  for (const auto& [U, v] : per_bidegree) blocked += v;
  CHECK(blocked == global);
}

TEST_CASE("factor symmetry: swapping the surface parameters changes nothing") {
  for (auto [a, b, p, q] : std::vector<std::array<int, 4>>{
           {1, 2, 1, 1}, {2, 3, 2, 1}, {2, 3, 1, 2}, {1, 3, 2, 1}}) {
    CAPTURE(a);
    CAPTURE(b);
    CHECK(betti_number(MonomialAlgebra::segre(a, b), p, q) ==
          betti_number(MonomialAlgebra::segre(b, a), p, q));
  }
}

TEST_CASE("a = 2 closed form reproduces the computed table") {
  const auto alg = MonomialAlgebra::segre(2, 2);
  BettiTable t = full_betti_table(alg, 6);
  for (int p = 1; p <= 6; ++p) {
    CAPTURE(p);
    CHECK(t.kappa(p, 1) == closed_form_a2(2, p, 1));
    CHECK(t.kappa(p, 2) == closed_form_a2(2, p, 2));
  }
  CHECK(t.kappa(0, 0) == 1);
  CHECK(t.kappa(5, 1) == 20);
  CHECK(t.kappa(6, 2) == 1);
  CHECK(t.algebra == "segre(2,2)");
  CHECK(t.field == "gf32003");
}

TEST_CASE("a = 2, b = 3 closed form spot checks against the engine") {
  const auto alg = MonomialAlgebra::segre(2, 3);
  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {7, 1}, {8, 2}, {7, 2}}) {
    CAPTURE(p);
    CAPTURE(q);
    CHECK(betti_number(alg, p, q) == closed_form_a2(3, p, q));
  }
  CHECK(closed_form_a2(3, 8, 2) == 9);
}

TEST_CASE("closed-form values and guard rails") {
  CHECK(closed_form_first_row(3, 3, 11) == 22);
  CHECK(closed_form_first_row(3, 3, 12) == 0);
  CHECK(closed_form_first_row(3, 3, 13) == 0);
  CHECK(closed_form_first_row(3, 4, 14) == 238);
  CHECK(closed_form_first_row(3, 4, 15) == 15);
  CHECK(closed_form_first_row(3, 4, 16) == 0);
  CHECK(closed_form_first_row(4, 4, 19) == 19 * binomial(20, 20) + 19);
  CHECK_THROWS_WITH_AS(closed_form_first_row(3, 3, 10), doctest::Contains("OutOfTheoremRange"),
                       ComputationError);
  CHECK_THROWS_WITH_AS(closed_form_first_row(2, 3, 7), doctest::Contains("InvalidParameters"),
                       ComputationError);
  CHECK_THROWS_WITH_AS(closed_form_first_row(4, 3, 15), doctest::Contains("InvalidParameters"),
                       ComputationError);

  CHECK(closed_form_a2(2, 5, 1) == 20);
  CHECK(closed_form_a2(2, 1, 2) == 0);
  CHECK(closed_form_a2(2, 6, 2) == 1);
  CHECK(closed_form_a2(2, 1, 1) == 20);
  CHECK_THROWS_WITH_AS(closed_form_a2(1, 1, 1), doctest::Contains("InvalidParameters"),
                       ComputationError);
  CHECK_THROWS_WITH_AS(closed_form_a2(2, 0, 1), doctest::Contains("InvalidParameters"),
                       ComputationError);
  CHECK_THROWS_WITH_AS(closed_form_a2(2, 3, 3), doctest::Contains("InvalidParameters"),
                       ComputationError);
}

TEST_CASE("strand argument validation") {
  const auto alg = MonomialAlgebra::segre(1, 1);
  CHECK_THROWS_WITH_AS(betti_number(alg, -1, 1), doctest::Contains("InvalidParameters"),
                       ComputationError);
  CHECK_THROWS_WITH_AS(betti_number(alg, 1, 4), doctest::Contains("InvalidParameters"),
                       ComputationError);
  CHECK_THROWS_WITH_AS(full_betti_table(alg, 2), doctest::Contains("InvalidParameters"),
                       ComputationError);
  StrandOptions bad;
  bad.threads = 0;
  CHECK_THROWS_WITH_AS(betti_number(alg, 1, 1, bad), doctest::Contains("InvalidParameters"),
                       ComputationError);
  // Positions beyond the resolution length are legal and vanish.
  CHECK(betti_number(alg, 3, 1) == 0);
}

TEST_CASE("thread count does not change any table") {
  const auto alg = MonomialAlgebra::segre(2, 2);
  StrandOptions t1, t3;
  t1.threads = 1;
  t3.threads = 3;
  for (auto [p, q] : std::vector<std::pair<int, int>>{{3, 1}, {4, 1}, {5, 1}, {4, 2}}) {
    CAPTURE(p);
    CAPTURE(q);
    BidegreeTable one = bidegree_table(alg, p, q, t1);
    BidegreeTable three = bidegree_table(alg, p, q, t3);
    CHECK(one.total == three.total);
    CHECK(one.entries == three.entries);
  }
}

TEST_CASE("disk cache: warm rerun reproduces the cold result") {
  const auto dir = std::filesystem::temp_directory_path() / "betti-cache-test";
  std::filesystem::remove_all(dir);
  StrandOptions opts;
  opts.cache_dir = dir.string();
  const auto alg = MonomialAlgebra::segre(2, 2);

  BidegreeTable cold = bidegree_table(alg, 4, 1, opts);
  CacheStats after_cold = RankCache::stats(dir.string());
  CHECK(after_cold.records > 0);
  CHECK(after_cold.by_algebra.count("segre(2,2) / gf32003") == 1);

  BidegreeTable warm = bidegree_table(alg, 4, 1, opts);
  CHECK(warm.entries == cold.entries);
  CHECK(warm.total == cold.total);
  // The warm run answered fully from the cache: no new records.
  CHECK(RankCache::stats(dir.string()).records == after_cold.records);

  // Adjacent strand reuses the shared differential's records and adds only
  // its own new ones.
  CHECK(bidegree_table(alg, 5, 1, opts).total == 20);

  RankCache::clear(dir.string());
  CHECK(RankCache::stats(dir.string()).records == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("rational and prime-field strands agree on small surfaces") {
  StrandOptions rat;
  rat.field = FieldSpec::rationals();
  for (auto [a, b, p, q] : std::vector<std::array<int, 4>>{
           {1, 1, 1, 1}, {1, 2, 2, 1}, {2, 2, 3, 1}, {2, 2, 2, 2}}) {
    CAPTURE(a);
    CAPTURE(b);
    CAPTURE(p);
    CAPTURE(q);
    const auto alg = MonomialAlgebra::segre(a, b);
    CHECK(betti_number(alg, p, q, rat) == betti_number(alg, p, q));
  }
}

TEST_CASE("wide scroll strand" * doctest::skip(std::getenv("SEGRE_SLOW_TESTS") == nullptr)) {
  // Six-minute class: the balanced scroll behind the (3,4) surface.
  const auto alg = MonomialAlgebra::scroll({4, 4, 4, 4});
  CHECK(betti_number(alg, 14, 1) == 224);
}
