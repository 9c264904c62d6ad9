// Both syzygy families are assembled literally: pick the two points that
// carry the quadric, distribute the j moves over the remaining points in
// every possible way, and normalize each wedge monomial (a moved point can
// land on another one, killing the term, or change the sorting order, which
// folds into the sign). Verification never solves for anything. Membership
// of a quadric in the surface ideal is the character criterion: coefficients
// must cancel within every torus bidegree class. The contraction into
// wedge^{p-2} V (x) S^3 V is accumulated term by term over the integers and
// must cancel identically, so the checks are field-independent.
#include "segre/cocycles.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "poly_ring.hpp"

namespace segre {

namespace {

void check_ab(int a, int b) {
  if (a < 1 || b < 1)
    fail("InvalidParameters", "the surface needs a >= 1 and b >= 1, got (" +
                                  std::to_string(a) + "," + std::to_string(b) + ")");
  if ((a + 1) * (b + 1) > 31)
    fail("OutOfImplementedRange", "coordinate masks are 32-bit, cannot index " +
                                      std::to_string((a + 1) * (b + 1)) + " coordinates");
}

int grid_vid(int b, int x, int y) { return x * (b + 1) + y; }

Bidegree vid_character(int b, int v) { return {v / (b + 1), v % (b + 1)}; }

std::uint32_t column_bits(int b, int x) {
  return ((1u << (b + 1)) - 1) << (x * (b + 1));
}

// Coordinate ring of the ambient projective space, shared by the builders.
struct Grid {
  int a, b, p, n;
  detail::PolyRing S;
  Grid(int a_, int b_)
      : a(a_), b(b_), p(a_ * b_ + a_ - 1), n((a_ + 1) * (b_ + 1)), S(n) {}
};

bool term_less(const CocycleTerm& s, const CocycleTerm& t) {
  return s.wedge_mask != t.wedge_mask ? s.wedge_mask < t.wedge_mask
                                      : s.pair_index < t.pair_index;
}

std::vector<CocycleTerm> canonicalize(std::vector<CocycleTerm> raw) {
  std::sort(raw.begin(), raw.end(), term_less);
  std::vector<CocycleTerm> out;
  out.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    std::size_t k = i;
    std::int64_t c = 0;
    while (k < raw.size() && raw[k].wedge_mask == raw[i].wedge_mask &&
           raw[k].pair_index == raw[i].pair_index) {
      c += raw[k].coeff;
      ++k;
    }
    if (c != 0) out.push_back({raw[i].wedge_mask, raw[i].pair_index, c});
    i = k;
  }
  return out;
}

// Core of both families. `pvid` lists the chosen points P_1 .. P_{p+1} as
// coordinate indices, ascending; `shift` is the index step of one move
// ((0,1) adds 1, (1,0) adds b+1). For every choice of the quadric pair the
// group sign is the parity of the remaining label sum, and the j moves run
// over all subsets of the p-1 wedge points.
CocycleExpression assemble(Grid& G, int j, bool vertical, std::uint32_t point_set,
                           const std::vector<int>& pvid) {
  const int p = G.p;
  const int k = p + 1;
  if (j < 0 || j > p - 1)
    fail("InvalidParameters", "the shift count must lie in 0.." + std::to_string(p - 1) +
                                  ", got " + std::to_string(j));
  const int shift = vertical ? 1 : G.b + 1;

  CocycleExpression out;
  out.a = G.a;
  out.b = G.b;
  out.p = p;
  out.j = j;
  out.vertical = vertical;
  out.point_set = point_set;
  Bidegree bd{0, 0};
  for (int v : pvid) bd = bd + vid_character(G.b, v);
  out.bidegree = vertical ? bd + Bidegree{0, j + 1} : bd + Bidegree{j + 1, 0};

  const int tri = k * (k + 1) / 2;  // sum of all point labels 1 .. p+1
  const int m = p - 1;
  std::vector<CocycleTerm> raw;
  int src[32], wv[32];
  for (int i2 = 1; i2 < k; ++i2)
    for (int i1 = 0; i1 < i2; ++i1) {
      const std::int64_t base = ((tri - (i1 + 1) - (i2 + 1)) & 1) ? -1 : 1;
      const std::uint32_t q_plus =
          G.S.mult(pvid[i1] + shift, 1, static_cast<std::uint32_t>(pvid[i2]));
      const std::uint32_t q_minus =
          G.S.mult(pvid[i1], 1, static_cast<std::uint32_t>(pvid[i2] + shift));
      int mm = 0;
      for (int t = k - 1; t >= 0; --t)
        if (t != i1 && t != i2) src[mm++] = pvid[t];
      std::uint32_t ss = first_subset(j);
      while (true) {
        for (int t = 0; t < m; ++t)
          wv[t] = src[t] + (((ss >> t) & 1u) ? shift : 0);
        bool dead = false;
        int inv = 0;
        for (int s = 0; s < m && !dead; ++s)
          for (int t = s + 1; t < m; ++t) {
            if (wv[s] == wv[t]) {
              dead = true;
              break;
            }
            if (wv[s] > wv[t]) ++inv;
          }
        if (!dead) {
          std::uint32_t mask = 0;
          for (int t = 0; t < m; ++t) mask |= 1u << wv[t];
          const std::int64_t c = (inv & 1) ? -base : base;
          raw.push_back({mask, q_plus, c});
          raw.push_back({mask, q_minus, -c});
        }
        if (j == 0) break;
        ss = next_subset(ss);
        if (m >= 32 || ss >= (1u << m)) break;
      }
    }
  out.terms = canonicalize(std::move(raw));
  return out;
}

// Visit the (p+1)-point subsets of the vertical grid {0..a} x {0..b-1} in
// lexicographic order of their sorted position tuples. Positions are
// x*b + y; there are none at all when a > b.
template <typename Fn>
void for_each_vertical_subset(int a, int b, Fn&& fn) {
  const int npts = (a + 1) * b;
  const int k = a * (b + 1);
  if (k > npts) return;
  std::vector<int> pids(static_cast<std::size_t>(k));
  std::iota(pids.begin(), pids.end(), 0);
  while (true) {
    fn(static_cast<const std::vector<int>&>(pids));
    int t = k - 1;
    while (t >= 0 && pids[static_cast<std::size_t>(t)] == npts - (k - t)) --t;
    if (t < 0) break;
    ++pids[static_cast<std::size_t>(t)];
    for (int q = t + 1; q < k; ++q)
      pids[static_cast<std::size_t>(q)] = pids[static_cast<std::size_t>(q - 1)] + 1;
  }
}

std::vector<int> pids_to_vids(int b, const std::vector<int>& pids) {
  std::vector<int> vids;
  vids.reserve(pids.size());
  for (int pid : pids) vids.push_back(grid_vid(b, pid / b, pid % b));
  return vids;
}

}  // namespace

std::uint32_t sym2_index(int a, int b, int u, int v) {
  check_ab(a, b);
  const int n = (a + 1) * (b + 1);
  if (u < 0 || v < 0 || u >= n || v >= n)
    fail("InvalidParameters", "coordinate index out of range 0.." + std::to_string(n - 1));
  if (u > v) std::swap(u, v);
  detail::PolyRing S(n);
  return S.mult(u, 1, static_cast<std::uint32_t>(v));
}

QuadricIdealBasis::QuadricIdealBasis(int a, int b) : a_(a), b_(b) {
  check_ab(a, b);
  detail::PolyRing S((a + 1) * (b + 1));
  const std::size_t s2 = S.dim(2);
  r2_class_.resize(s2);
  std::vector<char> seen(static_cast<std::size_t>(2 * a + 1) * (2 * b + 1), 0);
  for (std::size_t i = 0; i < s2; ++i) {
    const auto& vs = S.vars(2, static_cast<std::uint32_t>(i));
    const Bidegree c = vid_character(b, vs[0]) + vid_character(b, vs[1]);
    const auto cls = static_cast<std::uint32_t>(c.u1 * (2 * b + 1) + c.u2);
    r2_class_[i] = cls;
    seen[cls] = 1;
  }
  for (char s : seen) n_classes_ += static_cast<std::size_t>(s);
  dim_ = s2 - n_classes_;
}

SparseExactMatrix QuadricIdealBasis::basis() const {
  std::vector<std::vector<std::uint32_t>> members(
      static_cast<std::size_t>(2 * a_ + 1) * (2 * b_ + 1));
  for (std::uint32_t i = 0; i < r2_class_.size(); ++i) members[r2_class_[i]].push_back(i);
  std::vector<Label> rows(r2_class_.size());
  std::iota(rows.begin(), rows.end(), Label{0});
  std::vector<Label> cols;
  std::vector<Triplet> entries;
  for (const auto& ms : members)
    for (std::size_t k = 0; k + 1 < ms.size(); ++k) {
      const Label c = cols.size();
      cols.push_back(c);
      entries.push_back({ms[k], c, 1});
      entries.push_back({ms[k + 1], c, -1});
    }
  return SparseExactMatrix(rows, cols, entries);
}

bool QuadricIdealBasis::contains(
    const std::vector<std::pair<std::uint32_t, std::int64_t>>& quad) const {
  std::vector<std::int64_t> sums(static_cast<std::size_t>(2 * a_ + 1) * (2 * b_ + 1), 0);
  for (auto [idx, c] : quad) {
    if (idx >= r2_class_.size())
      fail("InvalidParameters", "quadric monomial index " + std::to_string(idx) +
                                    " out of range");
    sums[r2_class_[idx]] += c;
  }
  for (auto s : sums)
    if (s != 0) return false;
  return true;
}

CocycleExpression cocycle_vertical(int a, int b, int j,
                                   const std::vector<std::pair<int, int>>& points) {
  check_ab(a, b);
  Grid G(a, b);
  if (static_cast<int>(points.size()) != G.p + 1)
    fail("InvalidPointSet", "the vertical family needs exactly p+1 = " +
                                std::to_string(G.p + 1) + " points, got " +
                                std::to_string(points.size()));
  std::uint32_t pset = 0;
  for (auto [x, y] : points) {
    if (x < 0 || x > a || y < 0 || y > b - 1)
      fail("InvalidPointSet", "point (" + std::to_string(x) + "," + std::to_string(y) +
                                  ") lies outside {0.." + std::to_string(a) + "} x {0.." +
                                  std::to_string(b - 1) + "}");
    const std::uint32_t bit = 1u << (x * b + y);
    if (pset & bit)
      fail("InvalidPointSet",
           "point (" + std::to_string(x) + "," + std::to_string(y) + ") repeats");
    pset |= bit;
  }
  std::vector<int> pids;
  pids.reserve(points.size());
  for (int pid = 0; pid < (a + 1) * b; ++pid)
    if ((pset >> pid) & 1u) pids.push_back(pid);
  return assemble(G, j, true, pset, pids_to_vids(b, pids));
}

CocycleExpression cocycle_horizontal(int a, int b, int j) {
  check_ab(a, b);
  Grid G(a, b);
  // The full grid {0..a-1} x {0..b} has a(b+1) = p+1 points whose coordinate
  // indices are exactly 0 .. p, already in the fixed order.
  std::vector<int> pvid(static_cast<std::size_t>(G.p + 1));
  std::iota(pvid.begin(), pvid.end(), 0);
  return assemble(G, j, false, 0, pvid);
}

std::vector<CocycleExpression> cocycle_family(int a, int b) {
  check_ab(a, b);
  Grid G(a, b);
  std::vector<CocycleExpression> fam;
  for_each_vertical_subset(a, b, [&](const std::vector<int>& pids) {
    std::uint32_t pset = 0;
    for (int pid : pids) pset |= 1u << pid;
    const auto pvid = pids_to_vids(b, pids);
    for (int j = 0; j < G.p; ++j) fam.push_back(assemble(G, j, true, pset, pvid));
  });
  for (int j = 0; j < G.p; ++j) fam.push_back(cocycle_horizontal(a, b, j));
  return fam;
}

bool verify_cocycle(const CocycleExpression& expr, const QuadricIdealBasis& ideal) {
  if (expr.a < 1 || expr.b < 1 || (expr.a + 1) * (expr.b + 1) > 31) return false;
  Grid G(expr.a, expr.b);
  if (expr.p != G.p) return false;
  if (ideal.sym2_dim() != G.S.dim(2)) return false;

  // Every term must carry the stated character.
  for (const auto& t : expr.terms) {
    if (t.coeff == 0) return false;
    if (std::popcount(t.wedge_mask) != G.p - 1) return false;
    if (G.n < 32 && (t.wedge_mask >> G.n) != 0) return false;
    if (t.pair_index >= G.S.dim(2)) return false;
    Bidegree bd{0, 0};
    std::uint32_t mask = t.wedge_mask;
    while (mask) {
      const int v = std::countr_zero(mask);
      mask &= mask - 1;
      bd = bd + vid_character(G.b, v);
    }
    for (auto v : G.S.vars(2, t.pair_index)) bd = bd + vid_character(G.b, v);
    if (bd != expr.bidegree) return false;
  }

  std::vector<CocycleTerm> sorted = expr.terms;
  std::sort(sorted.begin(), sorted.end(), term_less);

  // The quadric attached to each wedge monomial lies in the surface ideal.
  std::vector<std::pair<std::uint32_t, std::int64_t>> quad;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t k = i;
    quad.clear();
    while (k < sorted.size() && sorted[k].wedge_mask == sorted[i].wedge_mask) {
      quad.push_back({sorted[k].pair_index, sorted[k].coeff});
      ++k;
    }
    if (!ideal.contains(quad)) return false;
    i = k;
  }

  // The contraction cancels identically over the integers.
  std::vector<std::pair<std::uint64_t, std::int64_t>> delta;
  delta.reserve(sorted.size() * static_cast<std::size_t>(G.p > 1 ? G.p - 1 : 1));
  for (const auto& t : sorted) {
    std::uint32_t mask = t.wedge_mask;
    while (mask) {
      const int v = std::countr_zero(mask);
      mask &= mask - 1;
      const int sgn = wedge_sign_remove(t.wedge_mask, v);
      const std::uint32_t rest = t.wedge_mask & ~(1u << v);
      const std::uint32_t cubic = G.S.mult(v, 2, t.pair_index);
      delta.push_back({(static_cast<std::uint64_t>(rest) << 16) | cubic, sgn * t.coeff});
    }
  }
  std::sort(delta.begin(), delta.end(),
            [](const auto& s, const auto& t) { return s.first < t.first; });
  std::size_t i = 0;
  while (i < delta.size()) {
    std::size_t k = i;
    std::int64_t c = 0;
    while (k < delta.size() && delta[k].first == delta[i].first) {
      c += delta[k].second;
      ++k;
    }
    if (c != 0) return false;
    i = k;
  }
  return true;
}

bool verify_cocycle(const CocycleExpression& expr) {
  if (expr.a < 1 || expr.b < 1 || (expr.a + 1) * (expr.b + 1) > 31) return false;
  return verify_cocycle(expr, QuadricIdealBasis(expr.a, expr.b));
}

VerifyReport independence_and_count(int a, int b, const StrandOptions& options) {
  check_ab(a, b);
  if (!(3 <= a && a <= b))
    fail("InvalidParameters", "the independence argument needs 3 <= a <= b, got (" +
                                  std::to_string(a) + "," + std::to_string(b) + ")");
  Grid G(a, b);
  const int p = G.p;

  // Group the family by bidegree before expanding anything; blocks are then
  // materialized one at a time, which keeps the peak footprint at one block.
  struct Ref {
    std::uint32_t pset = 0;
    int j = 0;
    bool vertical = true;
  };
  std::map<Bidegree, std::vector<Ref>> groups;
  std::size_t n_vert = 0;
  for_each_vertical_subset(a, b, [&](const std::vector<int>& pids) {
    Bidegree base{0, 0};
    std::uint32_t pset = 0;
    for (int pid : pids) {
      base = base + Bidegree{pid / b, pid % b};
      pset |= 1u << pid;
    }
    for (int j = 0; j < p; ++j) {
      groups[base + Bidegree{0, j + 1}].push_back({pset, j, true});
      ++n_vert;
    }
  });
  Bidegree hbase{0, 0};
  for (int x = 0; x < a; ++x)
    for (int y = 0; y <= b; ++y) hbase = hbase + Bidegree{x, y};
  for (int j = 0; j < p; ++j)
    groups[hbase + Bidegree{j + 1, 0}].push_back({0, j, false});

  const std::size_t total = n_vert + static_cast<std::size_t>(p);
  const std::size_t expected =
      static_cast<std::size_t>(p) * binomial((a + 1) * b, p + 1) + static_cast<std::size_t>(p);

  std::size_t rank_sum = 0;
  for (const auto& [bd, refs] : groups) {
    std::vector<CocycleExpression> block;
    block.reserve(refs.size());
    for (const auto& r : refs) {
      if (r.vertical) {
        std::vector<int> pids;
        for (int pid = 0; pid < (a + 1) * b; ++pid)
          if ((r.pset >> pid) & 1u) pids.push_back(pid);
        block.push_back(assemble(G, r.j, true, r.pset, pids_to_vids(b, pids)));
      } else {
        block.push_back(cocycle_horizontal(a, b, r.j));
      }
    }
    std::unordered_map<std::uint64_t, std::uint32_t> col_of;
    for (const auto& e : block)
      for (const auto& t : e.terms) {
        const std::uint64_t lab =
            (static_cast<std::uint64_t>(t.wedge_mask) << 16) | t.pair_index;
        col_of.emplace(lab, static_cast<std::uint32_t>(col_of.size()));
      }
    RowEliminator elim(col_of.size(), options.field);
    std::vector<std::pair<std::uint32_t, std::int64_t>> row;
    for (const auto& e : block) {
      row.clear();
      for (const auto& t : e.terms)
        row.push_back(
            {col_of.at((static_cast<std::uint64_t>(t.wedge_mask) << 16) | t.pair_index),
             t.coeff});
      elim.consume(row.data(), row.size());
    }
    rank_sum += elim.rank();
  }

  const std::size_t strand = betti_number(MonomialAlgebra::segre(a, b), p, 1, options);

  std::ostringstream text;
  text << "family size " << total << " (" << n_vert << " vertical, " << p
       << " horizontal), expected p*C(" << (a + 1) * b << "," << p + 1
       << ") + p = " << expected << "\n";
  text << "blockwise rank over " << options.field.name() << ": " << rank_sum << " in "
       << groups.size() << " bidegree blocks\n";
  text << "rank " << rank_sum << " vs kappa_{" << p << ",1} = " << strand << ": "
       << (rank_sum == strand ? "EQUAL" : "DIFFER") << "\n";
  VerifyReport rep;
  rep.pass = total == expected && rank_sum == total && rank_sum == strand;
  text << "independent and complete: " << (rep.pass ? "yes" : "NO") << "\n";
  rep.text = text.str();
  return rep;
}

bool claim_witness_check(int a, int b, int j) {
  check_ab(a, b);
  Grid G(a, b);
  const int p = G.p;
  if (j < 0 || j > p - 1)
    fail("InvalidParameters",
         "the shift count must lie in 0.." + std::to_string(p - 1) + ", got " +
             std::to_string(j));

  // Witness term of the horizontal expression: the p-j-1 smallest points
  // unshifted, the j largest moved by (1,0), quadric on the two in between.
  std::uint32_t wmask = 0;
  for (int v = 0; v <= p - j - 2; ++v) wmask |= 1u << v;
  for (int v = p - j + 1; v <= p; ++v) wmask |= 1u << (v + b + 1);
  const std::uint32_t q_plus =
      G.S.mult(p - j - 1 + b + 1, 1, static_cast<std::uint32_t>(p - j));
  const std::uint32_t q_minus =
      G.S.mult(p - j - 1, 1, static_cast<std::uint32_t>(p - j + b + 1));

  const auto h = cocycle_horizontal(a, b, j);
  const auto coeff_of = [&](std::uint32_t mask, std::uint32_t pair) -> std::int64_t {
    const CocycleTerm probe{mask, pair, 0};
    const auto it = std::lower_bound(h.terms.begin(), h.terms.end(), probe, term_less);
    if (it == h.terms.end() || it->wedge_mask != mask || it->pair_index != pair) return 0;
    return it->coeff;
  };
  const std::int64_t c1 = coeff_of(wmask, q_plus);
  const std::int64_t c2 = coeff_of(wmask, q_minus);
  bool ok = (c1 == 1 || c1 == -1) && c2 == -c1;

  // The witness wedge contains a full coordinate column.
  bool any_range = false;
  if (j > b) {
    any_range = true;
    ok = ok && (wmask & column_bits(b, a)) == column_bits(b, a);
  }
  if (j < p - b - 1) {
    any_range = true;
    ok = ok && (wmask & column_bits(b, 0)) == column_bits(b, 0);
  }
  ok = ok && any_range;
  if (!ok) return false;

  // No term of a vertical expression with this shift count covers a column:
  // a vertical point set meets each column in at most b points and the
  // moves stay inside the column.
  bool clean = true;
  for_each_vertical_subset(a, b, [&](const std::vector<int>& pids) {
    if (!clean) return;
    std::uint32_t pset = 0;
    for (int pid : pids) pset |= 1u << pid;
    const auto e = assemble(G, j, true, pset, pids_to_vids(b, pids));
    for (const auto& t : e.terms)
      for (int x = 0; x <= a; ++x)
        if ((t.wedge_mask & column_bits(b, x)) == column_bits(b, x)) {
          clean = false;
          return;
        }
  });
  return clean;
}

VerifyReport verify_cocycle_suite(int a, int b, const StrandOptions& options) {
  check_ab(a, b);
  if (!(3 <= a && a <= b))
    fail("InvalidParameters", "the independence argument needs 3 <= a <= b, got (" +
                                  std::to_string(a) + "," + std::to_string(b) + ")");
  Grid G(a, b);
  QuadricIdealBasis ideal(a, b);

  std::size_t checked = 0, bad = 0;
  for_each_vertical_subset(a, b, [&](const std::vector<int>& pids) {
    std::uint32_t pset = 0;
    for (int pid : pids) pset |= 1u << pid;
    const auto pvid = pids_to_vids(b, pids);
    for (int j = 0; j < G.p; ++j) {
      ++checked;
      if (!verify_cocycle(assemble(G, j, true, pset, pvid), ideal)) ++bad;
    }
  });
  for (int j = 0; j < G.p; ++j) {
    ++checked;
    if (!verify_cocycle(cocycle_horizontal(a, b, j), ideal)) ++bad;
  }

  std::size_t claims_ok = 0;
  for (int j = 0; j < G.p; ++j)
    if (claim_witness_check(a, b, j)) ++claims_ok;

  const auto ind = independence_and_count(a, b, options);

  VerifyReport rep;
  rep.pass = bad == 0 && claims_ok == static_cast<std::size_t>(G.p) && ind.pass;
  std::ostringstream text;
  text << "expressions verified: " << checked - bad << " of " << checked << "\n";
  text << "witness claims: " << claims_ok << " of " << G.p << " shift counts\n";
  text << ind.text;
  text << "overall: " << (rep.pass ? "PASS" : "FAIL") << "\n";
  rep.text = text.str();
  return rep;
}

}  // namespace segre
