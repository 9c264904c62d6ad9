#include "segre/koszul.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "segre/cache.hpp"

namespace segre {

namespace {

// Wedge masks live in uint32_t; ring indices share a packed 64-bit label.
constexpr int kMaxGenerators = 31;
constexpr std::uint64_t kRingIndexBits = 20;
// Budget (in inner products) for the exact integer d(d(x)) = 0 replay per
// block; larger blocks rely on the rank bookkeeping guard instead.
constexpr std::size_t kComposeCheckBudget = 2'000'000;

using Cell = std::pair<std::uint32_t, std::uint32_t>;  // (wedge mask, ring index)
using Bucket = std::vector<Cell>;
using SpaceBuckets = std::map<Bidegree, Bucket>;

Label cell_label(std::uint32_t mask, std::uint32_t ridx) {
  return (std::uint64_t(mask) << kRingIndexBits) | ridx;
}

// Partition of wedge^k V (x) R_d by total torus bidegree; out-of-range k and
// negative d give the zero space. Cells are emitted in (mask, ring index)
// order, which fixes column order everywhere downstream.
SpaceBuckets bucket_space(const MonomialAlgebra& alg, int k, int d) {
  SpaceBuckets out;
  const int N = alg.n_generators();
  if (k < 0 || k > N || d < 0) return out;
  const std::size_t rd = alg.dim(d);
  if (rd >= (std::size_t(1) << kRingIndexBits))
    fail("InvalidParameters", "graded piece too large for packed labels");
  std::vector<Bidegree> gen_bid(static_cast<std::size_t>(N));
  for (int g = 0; g < N; ++g) gen_bid[static_cast<std::size_t>(g)] = alg.generator_bidegree(g);
  std::vector<Bidegree> elem_bid(rd);
  for (std::size_t i = 0; i < rd; ++i) elem_bid[i] = alg.element_bidegree(d, i);
  auto emit = [&](std::uint32_t mask) {
    Bidegree wb{0, 0};
    for (std::uint32_t m = mask; m; m &= m - 1)
      wb = wb + gen_bid[static_cast<std::size_t>(std::countr_zero(m))];
    for (std::size_t i = 0; i < rd; ++i)
      out[wb + elem_bid[i]].push_back({mask, static_cast<std::uint32_t>(i)});
  };
  if (k == 0) {
    emit(0);
    return out;
  }
  const std::uint32_t limit = std::uint32_t(1) << N;
  for (std::uint32_t mask = first_subset(k); mask < limit; mask = next_subset(mask)) emit(mask);
  return out;
}

std::unordered_map<std::uint64_t, std::uint32_t> index_bucket(const Bucket& b) {
  std::unordered_map<std::uint64_t, std::uint32_t> m;
  m.reserve(b.size() * 2);
  for (std::size_t i = 0; i < b.size(); ++i)
    m.emplace(cell_label(b[i].first, b[i].second), static_cast<std::uint32_t>(i));
  return m;
}

// Rank of d(p_dom, q_dom) restricted to one bidegree block. Rows are streamed
// from the codomain side: the entries of the row of (w', m') sit at the
// columns (w' + g, m'/g) over generators g dividing m', with the contraction
// sign of removing g again from w' + g.
std::size_t rank_block(const MonomialAlgebra& alg, int q_dom, const Bucket& dom, const Bucket& cod,
                       const FieldSpec& field) {
  if (dom.empty() || cod.empty()) return 0;
  auto cols = index_bucket(dom);
  RowEliminator el(dom.size(), field);
  const int N = alg.n_generators();
  std::vector<std::pair<std::uint32_t, std::int64_t>> row;
  row.reserve(static_cast<std::size_t>(N));
  const std::size_t max_rank = std::min(dom.size(), cod.size());
  for (const Cell& c : cod) {
    row.clear();
    for (int g = 0; g < N; ++g) {
      const std::uint32_t bit = std::uint32_t(1) << g;
      if (c.first & bit) continue;
      auto m = alg.divide_index(g, q_dom + 1, c.second);
      if (!m) continue;
      auto it = cols.find(cell_label(c.first | bit, static_cast<std::uint32_t>(*m)));
      if (it == cols.end()) fail("InternalError", "differential left its bidegree block");
      row.push_back({it->second, wedge_sign_remove(c.first | bit, g)});
    }
    el.consume(row.data(), row.size());
    if (el.rank() == max_rank) break;
  }
  return el.rank();
}

// Exact integer replay of d(d(x)) over one block's incoming basis. All signs
// are +-1 and every cancellation happens over the integers, so a nonzero sum
// is a construction bug regardless of field.
void check_composition_zero(const MonomialAlgebra& alg, int p, int q, const Bucket& prev) {
  std::unordered_map<std::uint64_t, std::int64_t> acc;
  for (const Cell& c : prev) {
    acc.clear();
    for (std::uint32_t m1 = c.first; m1; m1 &= m1 - 1) {
      const int g1 = std::countr_zero(m1);
      const int s1 = wedge_sign_remove(c.first, g1);
      const std::uint32_t w1 = c.first & ~(std::uint32_t(1) << g1);
      const std::size_t r1 = alg.multiply_index(g1, q - 1, c.second);
      for (std::uint32_t m2 = w1; m2; m2 &= m2 - 1) {
        const int g2 = std::countr_zero(m2);
        const int s2 = wedge_sign_remove(w1, g2);
        const std::uint32_t w2 = w1 & ~(std::uint32_t(1) << g2);
        const std::size_t r2 = alg.multiply_index(g2, q, r1);
        acc[cell_label(w2, static_cast<std::uint32_t>(r2))] += s1 * s2;
      }
    }
    for (const auto& [label, v] : acc) {
      if (v != 0)
        fail("CompositionNonzero", "d(d(x)) has a nonzero entry in strand (p=" + std::to_string(p) +
                                       ", q=" + std::to_string(q) + ")");
    }
  }
}

// Torus symmetries valid for all maps of total degree s. Flipping a factor of
// the surface (i -> a - i, j -> b - j) permutes the generators by an algebra
// automorphism, so conjugate blocks share dimensions and ranks; on a scroll
// the height flip t -> e_v - t works whenever the column degrees are an
// arithmetic progression (the total height of a block is then s*e_0 + beta*u1)
// and the column reversal works when the degree list is palindromic.
struct SymmetryGroup {
  bool flip1 = false, flip2 = false, transpose = false;
  int s1 = 0;             // u1 -> s1 - u1
  int base2 = 0, beta = 0;  // u2 -> base2 + beta*u1 - u2
};

SymmetryGroup strand_symmetries(const MonomialAlgebra& alg, int s) {
  SymmetryGroup G;
  if (alg.kind() == MonomialAlgebra::Kind::segre) {
    G.flip1 = G.flip2 = true;
    G.s1 = s * alg.a();
    G.base2 = s * alg.b();
    G.transpose = alg.a() == alg.b();
    return G;
  }
  if (alg.kind() != MonomialAlgebra::Kind::scroll) return G;  // module: none
  const std::vector<int>& e = alg.e();
  const int cols = static_cast<int>(e.size());
  const int beta = cols > 1 ? e[1] - e[0] : 0;
  bool affine = true;
  for (int v = 0; v < cols; ++v) affine = affine && e[static_cast<std::size_t>(v)] == e[0] + beta * v;
  if (affine) {
    G.flip2 = true;
    G.base2 = s * e[0];
    G.beta = beta;
  }
  bool palindromic = true;
  for (int v = 0; v < cols; ++v)
    palindromic = palindromic && e[static_cast<std::size_t>(v)] == e[static_cast<std::size_t>(cols - 1 - v)];
  if (palindromic) {
    G.flip1 = true;
    G.s1 = s * (cols - 1);
  }
  return G;
}

std::vector<Bidegree> orbit(const SymmetryGroup& G, Bidegree U) {
  std::set<Bidegree> seen{U};
  std::vector<Bidegree> work{U};
  while (!work.empty()) {
    Bidegree v = work.back();
    work.pop_back();
    Bidegree images[3];
    int n = 0;
    if (G.flip1) images[n++] = {G.s1 - v.u1, v.u2};
    if (G.flip2) images[n++] = {v.u1, G.base2 + G.beta * v.u1 - v.u2};
    if (G.transpose) images[n++] = {v.u2, v.u1};
    for (int i = 0; i < n; ++i)
      if (seen.insert(images[i]).second) work.push_back(images[i]);
  }
  return {seen.begin(), seen.end()};
}

// Contracting one wedge factor back in (mu(w (x) r) = w /\ gen(r)) retracts
// the first differential out of wedge^p V (x) R_0 up to the scalar p, so that
// differential is injective whenever p is invertible in the field. The loop
// certifies everything the argument leans on: R_0 = k, R_1 enumerates exactly
// like the generator set, and the removal/insertion signs of every wedge
// monomial pair up to +1 (insertion sign recomputed naively, which also
// cross-checks the popcount shortcut).
bool retraction_certifies_injectivity(const MonomialAlgebra& alg, int p_dom,
                                      const FieldSpec& field) {
  const int N = alg.n_generators();
  if (p_dom <= 0 || p_dom > N) return false;
  if (!field.is_rational() && std::uint64_t(p_dom) % field.modulus == 0) return false;
  if (alg.dim(0) != 1 || alg.dim(1) != static_cast<std::size_t>(N)) return false;
  for (int g = 0; g < N; ++g)
    if (alg.multiply_index(g, 0, 0) != static_cast<std::size_t>(g)) return false;
  auto naive_insert_sign = [](std::uint32_t wedge, int g) {
    int below = 0;
    for (std::uint32_t m = wedge; m; m &= m - 1)
      if (std::countr_zero(m) < g) ++below;
    return (below & 1) ? -1 : 1;
  };
  const std::uint32_t limit = std::uint32_t(1) << N;
  for (std::uint32_t mask = first_subset(p_dom); mask < limit; mask = next_subset(mask)) {
    int diag = 0;
    for (std::uint32_t m = mask; m; m &= m - 1) {
      const int g = std::countr_zero(m);
      diag += wedge_sign_remove(mask, g) *
              naive_insert_sign(mask & ~(std::uint32_t(1) << g), g);
    }
    if (diag != p_dom) return false;
  }
  return true;
}

class Engine {
 public:
  Engine(const MonomialAlgebra& alg, const StrandOptions& opts)
      : alg_(alg), opts_(opts), disk_(opts.cache_dir) {
    if (opts_.threads < 1) fail("InvalidParameters", "thread count must be >= 1");
    if (alg_.n_generators() > kMaxGenerators)
      fail("InvalidParameters", "more degree-1 generators than wedge masks support");
  }

  BidegreeTable strand(int p, int q);

 private:
  std::optional<std::size_t> cached_rank(int p_dom, int q_dom, Bidegree U) {
    const std::array<int, 4> key{p_dom, q_dom, U.u1, U.u2};
    if (auto it = ranks_.find(key); it != ranks_.end()) return it->second;
    // A differential is the outgoing map of its own strand and the incoming
    // map of the strand one step down, so a disk record of either serves.
    if (auto r = disk_.lookup(alg_.describe(), opts_.field.name(), p_dom, q_dom, U.u1, U.u2))
      return r->rank_out;
    if (auto r =
            disk_.lookup(alg_.describe(), opts_.field.name(), p_dom - 1, q_dom + 1, U.u1, U.u2))
      return r->rank_in;
    return std::nullopt;
  }

  void remember(int p_dom, int q_dom, Bidegree U, std::size_t rank) {
    ranks_[{p_dom, q_dom, U.u1, U.u2}] = rank;
  }

  bool retraction_certified(int p_dom) {
    auto it = retraction_.find(p_dom);
    if (it != retraction_.end()) return it->second;
    const bool ok = retraction_certifies_injectivity(alg_, p_dom, opts_.field);
    retraction_[p_dom] = ok;
    return ok;
  }

  MonomialAlgebra alg_;
  StrandOptions opts_;
  RankCache disk_;
  std::map<std::array<int, 4>, std::size_t> ranks_;  // (p_dom, q_dom, u1, u2)
  std::map<int, bool> retraction_;
};

BidegreeTable Engine::strand(int p, int q) {
  if (p < 0) fail("InvalidParameters", "p must be >= 0");
  if (q < 0 || q > 3) fail("InvalidParameters", "q must be in {0,1,2,3}");
  BidegreeTable out;
  out.p = p;
  out.q = q;
  alg_.warm(q + 1);
  const SpaceBuckets prev = bucket_space(alg_, p + 1, q - 1);
  const SpaceBuckets mid = bucket_space(alg_, p, q);
  const SpaceBuckets next = bucket_space(alg_, p - 1, q + 1);
  if (mid.empty()) return out;

  auto find_bucket = [](const SpaceBuckets& s, Bidegree U) -> const Bucket* {
    auto it = s.find(U);
    return it == s.end() ? nullptr : &it->second;
  };
  auto bucket_size = [&](const SpaceBuckets& s, Bidegree U) -> std::size_t {
    const Bucket* b = find_bucket(s, U);
    return b ? b->size() : 0;
  };

  // Group the populated bidegrees into symmetry orbits; only the
  // lexicographically least representative gets its ranks computed.
  const SymmetryGroup G = strand_symmetries(alg_, p + q);
  struct Job {
    Bidegree rep;
    const Bucket *prev = nullptr, *mid = nullptr, *next = nullptr;
    std::size_t rank_in = 0, rank_out = 0;
    bool elim_in = false, elim_out = false;
  };
  std::vector<Job> jobs;
  std::map<Bidegree, std::size_t> job_of;
  for (const auto& [U, bucket] : mid) {
    const Bidegree rep = orbit(G, U).front();
    if (!mid.count(rep)) fail("InternalError", "symmetry image missing from strand");
    if (U == rep) {
      job_of[U] = jobs.size();
      Job j;
      j.rep = rep;
      j.prev = find_bucket(prev, rep);
      j.mid = &bucket;
      j.next = find_bucket(next, rep);
      jobs.push_back(j);
    }
  }
  for (auto& [U, bucket] : mid) {
    const Bidegree rep = orbit(G, U).front();
    job_of[U] = job_of.at(rep);
  }

  // Resolve what each job still has to eliminate. The q = 0 differential is
  // injective once the retraction is certified, which turns the whole
  // incoming rank of every q = 1 strand into a dimension count.
  for (Job& j : jobs) {
    const std::size_t dm = j.mid->size();
    const std::size_t dp = j.prev ? j.prev->size() : 0;
    const std::size_t dn = j.next ? j.next->size() : 0;
    if (dn > 0 && dm > 0) {
      if (auto c = cached_rank(p, q, j.rep)) {
        j.rank_out = *c;
      } else if (q == 0 && retraction_certified(p)) {
        if (dn < dm) fail("InternalError", "injective differential into a smaller block");
        j.rank_out = dm;
      } else {
        j.elim_out = true;
      }
    }
    if (dp > 0 && dm > 0) {
      if (auto c = cached_rank(p + 1, q - 1, j.rep)) {
        j.rank_in = *c;
      } else if (q == 1 && retraction_certified(p + 1)) {
        if (dm < dp) fail("InternalError", "injective differential into a smaller block");
        j.rank_in = dp;
      } else {
        j.elim_in = true;
      }
    }
  }

  // Eliminations are independent; schedule the big blocks first. Aggregation
  // below is a fold over the sorted bidegree map, so thread count and
  // completion order never touch the result.
  struct WorkItem {
    Job* job;
    bool out;
    std::size_t cost;
  };
  std::vector<WorkItem> work;
  for (Job& j : jobs) {
    if (j.elim_out) work.push_back({&j, true, j.mid->size() * j.next->size()});
    if (j.elim_in) work.push_back({&j, false, j.prev->size() * j.mid->size()});
  }
  std::stable_sort(work.begin(), work.end(),
                   [](const WorkItem& x, const WorkItem& y) { return x.cost > y.cost; });
  std::atomic<std::size_t> cursor{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto run_worker = [&]() {
    try {
      for (;;) {
        const std::size_t i = cursor.fetch_add(1);
        if (i >= work.size()) break;
        Job& j = *work[i].job;
        if (work[i].out)
          j.rank_out = rank_block(alg_, q, *j.mid, *j.next, opts_.field);
        else
          j.rank_in = rank_block(alg_, q - 1, *j.prev, *j.mid, opts_.field);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mu);
      if (!first_error) first_error = std::current_exception();
      cursor.store(work.size());
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(opts_.threads), std::max<std::size_t>(work.size(), 1));
  if (n_threads <= 1) {
    run_worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t + 1 < n_threads; ++t) pool.emplace_back(run_worker);
    run_worker();
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // Exact integer composition replay where affordable (the bookkeeping guard
  // in the fold covers every block regardless).
  if (q >= 1) {
    for (const Job& j : jobs) {
      if (!j.prev) continue;
      const std::size_t cost = j.prev->size() * static_cast<std::size_t>(p + 1) *
                               static_cast<std::size_t>(std::max(p, 1));
      if (cost <= kComposeCheckBudget) check_composition_zero(alg_, p, q, *j.prev);
    }
  }

  for (const Job& j : jobs) {
    remember(p, q, j.rep, j.rank_out);
    remember(p + 1, q - 1, j.rep, j.rank_in);
  }

  for (const auto& [U, bucket] : mid) {
    const Job& j = jobs[job_of.at(U)];
    if (bucket.size() != j.mid->size() || bucket_size(prev, U) != (j.prev ? j.prev->size() : 0) ||
        bucket_size(next, U) != (j.next ? j.next->size() : 0))
      fail("InternalError", "symmetric blocks disagree in dimension");
    if (j.rank_in + j.rank_out > bucket.size())
      fail("CompositionNonzero", "block ranks overlap in strand (p=" + std::to_string(p) +
                                     ", q=" + std::to_string(q) + ")");
    const std::size_t h = bucket.size() - j.rank_in - j.rank_out;
    if (h > 0) out.entries[U] = h;
    out.total += h;
    disk_.store({alg_.describe(), opts_.field.name(), p, q, U.u1, U.u2,
                 bucket_size(prev, U), bucket.size(), bucket_size(next, U), j.rank_in,
                 j.rank_out});
  }
  return out;
}

}  // namespace

std::size_t BettiTable::kappa(int p, int q) const {
  auto it = entries.find({p, q});
  return it == entries.end() ? 0 : it->second;
}

std::vector<KoszulBlock> koszul_strand(const MonomialAlgebra& alg, int p, int q) {
  if (p < 0 || q < 0) fail("InvalidParameters", "strand needs p >= 0 and q >= 0");
  if (alg.n_generators() > kMaxGenerators)
    fail("InvalidParameters", "more degree-1 generators than wedge masks support");
  alg.warm(q + 1);
  const SpaceBuckets prev = bucket_space(alg, p + 1, q - 1);
  const SpaceBuckets mid = bucket_space(alg, p, q);
  const SpaceBuckets next = bucket_space(alg, p - 1, q + 1);
  std::set<Bidegree> degrees;
  for (const auto& [U, b] : prev) degrees.insert(U);
  for (const auto& [U, b] : mid) degrees.insert(U);
  for (const auto& [U, b] : next) degrees.insert(U);

  auto labels_of = [](const SpaceBuckets& s, Bidegree U) {
    std::vector<Label> out;
    auto it = s.find(U);
    if (it == s.end()) return out;
    out.reserve(it->second.size());
    for (const Cell& c : it->second) out.push_back(cell_label(c.first, c.second));
    return out;
  };
  // Differential built from the domain side: move one wedge factor into the
  // ring (the rank engine builds the same maps from the codomain side, so the
  // two constructions cross-check each other in the tests).
  auto triplets_of = [&](const SpaceBuckets& s, Bidegree U, int ring_deg) {
    std::vector<Triplet> t;
    auto it = s.find(U);
    if (it == s.end()) return t;
    for (const Cell& c : it->second) {
      for (std::uint32_t m = c.first; m; m &= m - 1) {
        const int g = std::countr_zero(m);
        const std::size_t prod = alg.multiply_index(g, ring_deg, c.second);
        t.push_back({cell_label(c.first & ~(std::uint32_t(1) << g), static_cast<std::uint32_t>(prod)),
                     cell_label(c.first, c.second), wedge_sign_remove(c.first, g)});
      }
    }
    return t;
  };

  std::vector<KoszulBlock> blocks;
  for (Bidegree U : degrees) {
    SparseExactMatrix d_in(labels_of(mid, U), labels_of(prev, U), triplets_of(prev, U, q - 1));
    SparseExactMatrix d_out(labels_of(next, U), labels_of(mid, U), triplets_of(mid, U, q));
    if (!d_out.compose(d_in, FieldSpec::rationals()).empty())
      fail("CompositionNonzero", "d(d(x)) nonzero in a materialized block");
    blocks.push_back({U, std::move(d_in), std::move(d_out)});
  }
  return blocks;
}

std::size_t betti_number(const MonomialAlgebra& alg, int p, int q, const StrandOptions& opts) {
  Engine eng(alg, opts);
  return eng.strand(p, q).total;
}

BidegreeTable bidegree_table(const MonomialAlgebra& alg, int p, int q, const StrandOptions& opts) {
  Engine eng(alg, opts);
  return eng.strand(p, q);
}

BettiTable full_betti_table(const MonomialAlgebra& alg, int max_p, const StrandOptions& opts) {
  const int N = alg.n_generators();
  if (max_p < 0 || max_p > N - 3)
    fail("InvalidParameters", "max_p must lie in [0, N-3] for this algebra");
  Engine eng(alg, opts);
  BettiTable t;
  t.algebra = alg.describe();
  if (alg.kind() == MonomialAlgebra::Kind::segre) {
    t.a = alg.a();
    t.b = alg.b();
  }
  t.max_p = max_p;
  t.field = opts.field.name();
  // Descending p: strand (p, q) computes rank d(p, q), which strand
  // (p-1, q+1) then reuses as its incoming rank, so each differential is
  // eliminated exactly once across the whole table.
  for (int p = max_p; p >= 0; --p)
    for (int q = 0; q <= 3; ++q) t.entries[{p, q}] = eng.strand(p, q).total;

  // Alarms for shapes that are theorems for these rings: a violation here
  // means a construction bug, not new mathematics.
  if (t.kappa(0, 0) != 1) fail("InternalCheckFailed", "kappa_{0,0} must be 1");
  for (int p = 1; p <= max_p; ++p)
    if (t.kappa(p, 0) != 0)
      fail("InternalCheckFailed", "kappa_{p,0} must vanish for p >= 1 (degree-1 generation)");
  if (alg.kind() == MonomialAlgebra::Kind::segre) {
    const int A = std::min(alg.a(), alg.b()), B = std::max(alg.a(), alg.b());
    for (int p = 0; p <= max_p; ++p) {
      if (t.kappa(p, 3) != 0)
        fail("InternalCheckFailed", "kappa_{p,3} must vanish for a surface table");
      if (p >= A * B + B && t.kappa(p, 1) != 0)
        fail("InternalCheckFailed", "kappa_{p,1} must vanish for p >= ab+b");
      if (p <= 2 * A + 2 * B - 3 && t.kappa(p, 2) != 0)
        fail("InternalCheckFailed", "kappa_{p,2} must vanish for p <= 2a+2b-3");
    }
  }
  return t;
}

std::size_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  if (!r.fits_ulong_p()) fail("InvalidParameters", "binomial exceeds the machine word");
  return static_cast<std::size_t>(r.get_ui());
}

std::size_t closed_form_first_row(int a, int b, int p) {
  if (a < 3 || a > b) fail("InvalidParameters", "closed form needs 3 <= a <= b");
  if (p < a * b + a - 1)
    fail("OutOfTheoremRange",
         "q = 1 closed form starts at p = ab+a-1 = " + std::to_string(a * b + a - 1));
  std::size_t v = static_cast<std::size_t>(p) * binomial((a + 1) * b, p + 1);
  if (p == a * b + a - 1) v += static_cast<std::size_t>(p);
  return v;
}

std::size_t closed_form_a2(int b, int p, int q) {
  if (b < 2) fail("InvalidParameters", "a = 2 closed form needs b >= 2");
  if (p < 1) fail("InvalidParameters", "closed form needs p >= 1");
  if (q != 1 && q != 2) fail("InvalidParameters", "a = 2 closed form covers q in {1,2}");
  auto row2 = [&](int pp) -> long long {
    const long long factor = pp - 2 * b - 1;
    return factor > 0 ? factor * static_cast<long long>(binomial(3 * b, pp)) : 0;
  };
  if (q == 2) return static_cast<std::size_t>(row2(p));
  const long long v = row2(p - 1) +
                      static_cast<long long>(p) * static_cast<long long>(binomial(3 * b + 2, p + 1)) -
                      4LL * b * static_cast<long long>(binomial(3 * b, p - 1));
  if (v < 0) fail("InternalCheckFailed", "a = 2 closed form went negative");
  return static_cast<std::size_t>(v);
}

}  // namespace segre
