#include "segre/matrix.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <numeric>
#include <unordered_map>

namespace segre {

namespace {

// The double-accumulator lane requires headroom: every engagement adds at
// most q*(q-1) to an accumulator entry, and everything must stay below 2^53
// to remain exact. q < 2^21 leaves room for thousands of engagements between
// reductions; larger primes take the per-operation-reduction lane instead.
constexpr std::uint32_t kDoubleLaneMaxQ = 1u << 21;
constexpr double kAccBudget = 9007199254740992.0;  // 2^53
constexpr std::size_t kBatch = 64;                 // pending pivots folded per integration

// Exact x mod q for integer-valued nonnegative x < 2^53 held in a double.
// floor(x * invq) can be off by one ulp in either direction; the fixups make
// the result exact.
inline double dmod(double x, double q, double invq) {
  double r = x - std::floor(x * invq) * q;
  if (r < 0) r += q;
  if (r >= q) r -= q;
  return r;
}

using Entry = std::pair<std::uint32_t, std::int64_t>;

// ---------------------------------------------------------------------------
// GF(q) lane for q < 2^21: double accumulators, u32 pivot rows stored from
// their pivot column onward, pending-batch integration so the quadratic
// reduced-basis maintenance runs as blocked fused-multiply-add loops.
// ---------------------------------------------------------------------------
struct GfLane {
  std::size_t width;
  std::uint32_t q;
  double dq, dinvq;
  std::vector<std::vector<std::uint32_t>> rows;  // rows[i][j - start[i]]
  std::vector<std::uint32_t> start;              // == pivot column of row i
  std::vector<std::int32_t> pivot_of_col;
  std::size_t n_old = 0;  // rows below this index are mutually reduced and integrated
  std::vector<double> acc;
  std::vector<std::uint32_t> support;
  double headroom = kAccBudget;

  GfLane(std::size_t w, std::uint32_t modulus)
      : width(w), q(modulus), dq(modulus), dinvq(1.0 / modulus),
        pivot_of_col(w, -1), acc(w, 0.0) {}

  std::size_t rank() const { return rows.size(); }

  void engage(std::size_t pid, std::uint32_t coef) {
    // acc -= coef * row  done as  acc += (q - coef) * row  to stay nonnegative
    if (headroom < 2.0 * dq * dq) flush_acc();
    const double m = dq - coef;
    const std::uint32_t s = start[pid];
    const std::uint32_t* r = rows[pid].data();
    double* a = acc.data() + s;
    const std::size_t n = width - s;
    for (std::size_t j = 0; j < n; ++j) a[j] += m * r[j];
    headroom -= dq * dq;
  }

  void flush_acc() {
    for (std::size_t j = 0; j < width; ++j) acc[j] = dmod(acc[j], dq, dinvq);
    headroom = kAccBudget;
  }

  bool consume(const Entry* e, std::size_t n) {
    if (rows.size() == width) return false;
    support.clear();
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t r = gf::reduce(e[i].second, q);
      acc[e[i].first] += r;
      support.push_back(e[i].first);
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    headroom = kAccBudget - double(n) * dq;

    std::uint32_t touch_lo = static_cast<std::uint32_t>(width);
    bool engaged = false;
    for (std::uint32_t c : support) {
      acc[c] = dmod(acc[c], dq, dinvq);
      if (acc[c] == 0) continue;
      touch_lo = std::min(touch_lo, c);
      std::int32_t pid = pivot_of_col[c];
      if (pid >= 0 && static_cast<std::size_t>(pid) < n_old) {
        engage(static_cast<std::size_t>(pid), static_cast<std::uint32_t>(acc[c]));
        engaged = true;
      }
    }
    if (engaged) {
      // Old rows may carry entries over pending pivot columns; clear those
      // now that every old engagement has happened. Pending rows are mutually
      // reduced, so order does not matter here.
      for (std::size_t pid = n_old; pid < rows.size(); ++pid) {
        std::uint32_t c = start[pid];
        double v = dmod(acc[c], dq, dinvq);
        acc[c] = v;
        if (v != 0) {
          engage(pid, static_cast<std::uint32_t>(v));
          acc[c] = 0;  // exact by construction; avoid re-deriving via dmod
        }
      }
    } else {
      // Without old-row engagement only the original support can be nonzero,
      // but pending pivots sitting on support columns still have to clear.
      // Engaging one can write onto later support columns, so re-reduce at
      // visit time (support is ascending and writes only go rightward).
      for (std::uint32_t c : support) {
        double v = dmod(acc[c], dq, dinvq);
        acc[c] = v;
        if (v == 0) continue;
        std::int32_t pid = pivot_of_col[c];
        if (pid >= 0) {
          engage(static_cast<std::size_t>(pid), static_cast<std::uint32_t>(v));
          engaged = true;
          acc[c] = 0;
        }
      }
    }

    std::size_t c0 = width;
    if (engaged) {
      for (std::size_t j = touch_lo; j < width; ++j) {
        double v = dmod(acc[j], dq, dinvq);
        acc[j] = v;
        if (v != 0 && c0 == width) c0 = j;
      }
    } else {
      for (std::uint32_t c : support)
        if (acc[c] != 0 && c < c0) c0 = c;
    }

    if (c0 == width) {  // dependent row
      if (engaged) {
        std::fill(acc.begin() + touch_lo, acc.end(), 0.0);
      } else {
        for (std::uint32_t c : support) acc[c] = 0.0;
      }
      return false;
    }

    // New pivot: normalize to leading 1 and record.
    std::uint32_t inv0 = gf::inv(static_cast<std::uint32_t>(acc[c0]), q);
    std::vector<std::uint32_t> row(width - c0, 0u);
    if (engaged) {
      for (std::size_t j = c0; j < width; ++j)
        row[j - c0] = gf::mul(static_cast<std::uint32_t>(acc[j]), inv0, q);
      std::fill(acc.begin() + touch_lo, acc.end(), 0.0);
    } else {
      for (std::uint32_t c : support) {
        if (c >= c0 && acc[c] != 0)
          row[c - c0] = gf::mul(static_cast<std::uint32_t>(acc[c]), inv0, q);
        acc[c] = 0.0;
      }
    }

    // Keep the pending batch mutually reduced: eliminate column c0 from the
    // other pending rows right away (old rows wait for the next integration).
    for (std::size_t pid = n_old; pid < rows.size(); ++pid) {
      if (c0 < start[pid]) continue;
      std::uint32_t coef = rows[pid][c0 - start[pid]];
      if (coef == 0) continue;
      const double m = dq - coef;
      std::uint32_t* p = rows[pid].data() + (c0 - start[pid]);
      const std::uint32_t* nr = row.data();
      const std::size_t len = width - c0;
      for (std::size_t j = 0; j < len; ++j)
        p[j] = static_cast<std::uint32_t>(dmod(double(p[j]) + m * double(nr[j]), dq, dinvq));
    }

    pivot_of_col[c0] = static_cast<std::int32_t>(rows.size());
    start.push_back(c0);
    rows.push_back(std::move(row));
    if (rows.size() - n_old >= kBatch) integrate();
    return true;
  }

  // Fold the pending pivots into the old rows: a blocked rank-K update per
  // old row, accumulated in doubles and reduced once per element.
  void integrate() {
    const std::size_t k_new = rows.size() - n_old;
    if (k_new == 0) return;
    std::vector<double> scratch;
    for (std::size_t i = 0; i < n_old; ++i) {
      std::uint32_t lo = static_cast<std::uint32_t>(width);
      bool any = false;
      for (std::size_t k = n_old; k < rows.size(); ++k) {
        std::uint32_t c = start[k];
        if (c < start[i]) continue;
        if (rows[i][c - start[i]] != 0) {
          any = true;
          lo = std::min(lo, c);
        }
      }
      if (!any) continue;
      const std::size_t len = width - lo;
      scratch.resize(len);
      const std::uint32_t* src = rows[i].data() + (lo - start[i]);
      for (std::size_t j = 0; j < len; ++j) scratch[j] = double(src[j]);
      for (std::size_t k = n_old; k < rows.size(); ++k) {
        std::uint32_t c = start[k];
        if (c < start[i]) continue;
        std::uint32_t coef = rows[i][c - start[i]];
        if (coef == 0) continue;
        const double m = dq - coef;
        const std::uint32_t* nr = rows[k].data() + (lo >= c ? lo - c : 0);
        double* s = scratch.data() + (c >= lo ? c - lo : 0);
        const std::size_t n = width - std::max(lo, c);
        for (std::size_t j = 0; j < n; ++j) s[j] += m * double(nr[j]);
      }
      std::uint32_t* dst = rows[i].data() + (lo - start[i]);
      for (std::size_t j = 0; j < len; ++j)
        dst[j] = static_cast<std::uint32_t>(dmod(scratch[j], dq, dinvq));
    }
    n_old = rows.size();
  }

  std::vector<std::int64_t> reduced_row(std::size_t i) {
    integrate();
    std::vector<std::int64_t> out(width, 0);
    for (std::size_t j = start[i]; j < width; ++j) out[j] = rows[i][j - start[i]];
    return out;
  }
};

// ---------------------------------------------------------------------------
// GF(q) lane for large primes: u64 arithmetic with per-operation reduction.
// Rarely used (q above 2^21); favors simplicity over speed.
// ---------------------------------------------------------------------------
struct GfBigLane {
  std::size_t width;
  std::uint64_t q;
  std::vector<std::vector<std::uint32_t>> rows;  // full width
  std::vector<std::uint32_t> pivcol;
  std::vector<std::int32_t> pivot_of_col;
  std::vector<std::uint64_t> acc;

  GfBigLane(std::size_t w, std::uint32_t modulus)
      : width(w), q(modulus), pivot_of_col(w, -1), acc(w, 0) {}

  std::size_t rank() const { return rows.size(); }

  bool consume(const Entry* e, std::size_t n) {
    if (rows.size() == width) return false;
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t i = 0; i < n; ++i)
      acc[e[i].first] = (acc[e[i].first] + gf::reduce(e[i].second, static_cast<std::uint32_t>(q))) % q;
    for (std::size_t c = 0; c < width; ++c) {
      if (acc[c] == 0) continue;
      std::int32_t pid = pivot_of_col[c];
      if (pid < 0) continue;
      std::uint64_t m = q - acc[c];
      const std::uint32_t* r = rows[pid].data();
      for (std::size_t j = c; j < width; ++j) acc[j] = (acc[j] + m * r[j]) % q;
    }
    std::size_t c0 = width;
    for (std::size_t j = 0; j < width; ++j)
      if (acc[j] != 0) {
        c0 = j;
        break;
      }
    if (c0 == width) return false;
    std::uint64_t inv0 = gf::inv(static_cast<std::uint32_t>(acc[c0]), static_cast<std::uint32_t>(q));
    std::vector<std::uint32_t> row(width, 0);
    for (std::size_t j = c0; j < width; ++j)
      row[j] = static_cast<std::uint32_t>(acc[j] * inv0 % q);
    for (auto& old : rows) {
      std::uint64_t coef = old[c0];
      if (coef == 0) continue;
      std::uint64_t m = q - coef;
      for (std::size_t j = c0; j < width; ++j)
        old[j] = static_cast<std::uint32_t>((old[j] + m * row[j]) % q);
    }
    pivot_of_col[c0] = static_cast<std::int32_t>(rows.size());
    pivcol.push_back(static_cast<std::uint32_t>(c0));
    rows.push_back(std::move(row));
    return true;
  }

  std::vector<std::int64_t> reduced_row(std::size_t i) const {
    return std::vector<std::int64_t>(rows[i].begin(), rows[i].end());
  }
};

// ---------------------------------------------------------------------------
// Rational lane: integer rows kept primitive (content 1, positive leading
// coefficient), cross-multiplication instead of division. Starts on i64 and
// promotes the whole state to arbitrary precision on overflow risk; the
// reduced basis summarizes everything consumed, so no replay is needed.
// ---------------------------------------------------------------------------
struct RatLane {
  std::size_t width;
  std::vector<std::vector<std::int64_t>> rows;  // full width, primitive
  std::vector<std::uint32_t> pivcol;
  std::vector<std::int32_t> pivot_of_col;
  bool big = false;
  std::vector<std::vector<mpz_class>> zrows;
  std::vector<std::int64_t> acc;
  std::vector<mpz_class> zacc;

  static constexpr std::int64_t kSafe = std::int64_t(1) << 62;
  static constexpr std::int64_t kNormalizeAbove = std::int64_t(1) << 40;

  explicit RatLane(std::size_t w) : width(w), pivot_of_col(w, -1), acc(w, 0) {}

  std::size_t rank() const { return big ? zrows.size() : rows.size(); }

  static std::int64_t max_abs(const std::vector<std::int64_t>& v) {
    std::int64_t m = 0;
    for (std::int64_t x : v) m = std::max(m, x < 0 ? -x : x);
    return m;
  }

  static void normalize(std::vector<std::int64_t>& v) {
    std::uint64_t g = 0;
    std::int64_t lead = 0;
    for (std::int64_t x : v) {
      if (x == 0) continue;
      if (lead == 0) lead = x;
      g = std::gcd(g, static_cast<std::uint64_t>(x < 0 ? -x : x));
      if (g == 1 && lead > 0) return;
    }
    if (g == 0) return;
    std::int64_t d = static_cast<std::int64_t>(g);
    if (lead < 0) d = -d;
    if (d != 1)
      for (std::int64_t& x : v) x /= d;
  }

  static void normalize_z(std::vector<mpz_class>& v) {
    mpz_class g = 0;
    int sign = 0;
    for (const mpz_class& x : v) {
      if (x == 0) continue;
      if (sign == 0) sign = sgn(x);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    }
    if (g == 0) return;
    if (sign < 0) g = -g;
    if (g != 1)
      for (mpz_class& x : v) x /= g;
  }

  void promote() {
    if (big) return;
    big = true;
    zrows.reserve(rows.size());
    for (auto& r : rows) zrows.emplace_back(r.begin(), r.end());
    rows.clear();
    zacc.assign(acc.begin(), acc.end());
    acc.clear();
  }

  bool consume_z(const Entry* e, std::size_t n, bool acc_loaded) {
    if (!acc_loaded) {
      std::fill(zacc.begin(), zacc.end(), 0);
      for (std::size_t i = 0; i < n; ++i) zacc[e[i].first] += e[i].second;
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (zacc[c] == 0) continue;
      std::int32_t pid = pivot_of_col[c];
      if (pid < 0) continue;
      const auto& p = zrows[pid];
      mpz_class lc = p[c], coef = zacc[c];
      // Cross-multiplication scales the whole accumulator, not just the tail,
      // so the result stays inside the consumed row span.
      for (std::size_t j = 0; j < width; ++j) zacc[j] = lc * zacc[j] - coef * p[j];
    }
    std::size_t c0 = width;
    for (std::size_t j = 0; j < width; ++j)
      if (zacc[j] != 0) {
        c0 = j;
        break;
      }
    if (c0 == width) return false;
    std::vector<mpz_class> row(zacc.begin(), zacc.end());
    normalize_z(row);
    for (auto& old : zrows) {
      if (old[c0] == 0) continue;
      mpz_class ln = row[c0], coef = old[c0];
      for (std::size_t j = 0; j < width; ++j) old[j] = ln * old[j] - coef * row[j];
      normalize_z(old);
    }
    pivot_of_col[c0] = static_cast<std::int32_t>(zrows.size());
    pivcol.push_back(static_cast<std::uint32_t>(c0));
    zrows.push_back(std::move(row));
    return true;
  }

  bool consume(const Entry* e, std::size_t n) {
    if (rank() == width) return false;
    if (big) return consume_z(e, n, false);
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (__builtin_add_overflow(acc[e[i].first], e[i].second, &acc[e[i].first])) {
        promote();
        std::fill(zacc.begin(), zacc.end(), 0);
        for (std::size_t k = 0; k < n; ++k) zacc[e[k].first] += e[k].second;
        return consume_z(e, n, true);
      }
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (acc[c] == 0) continue;
      std::int32_t pid = pivot_of_col[c];
      if (pid < 0) continue;
      const auto& p = rows[pid];
      const std::int64_t lc = p[c], coef = acc[c];
      std::int64_t am = max_abs(acc), pm = max_abs(p);
      if ((__int128)(lc < 0 ? -lc : lc) * am + (__int128)(coef < 0 ? -coef : coef) * pm >= kSafe) {
        std::vector<std::int64_t> snapshot = acc;
        promote();
        zacc.assign(snapshot.begin(), snapshot.end());
        return consume_z(e, n, true);
      }
      for (std::size_t j = 0; j < width; ++j) acc[j] = lc * acc[j] - coef * p[j];
    }
    std::size_t c0 = width;
    for (std::size_t j = 0; j < width; ++j)
      if (acc[j] != 0) {
        c0 = j;
        break;
      }
    if (c0 == width) return false;
    std::vector<std::int64_t> row(acc.begin(), acc.end());
    normalize(row);
    for (auto& old : rows) {
      if (old[c0] == 0) continue;
      const std::int64_t ln = row[c0], coef = old[c0];
      std::int64_t om = max_abs(old), nm = max_abs(row);
      if ((__int128)ln * om + (__int128)(coef < 0 ? -coef : coef) * nm >= kSafe) {
        zacc.assign(width, 0);
        promote();
        // Redo this maintenance step in big mode; the new pivot row moves too.
        std::vector<mpz_class> zn(row.begin(), row.end());
        for (auto& zold : zrows) {
          if (zold[c0] == 0) continue;
          mpz_class zl = zn[c0], zc = zold[c0];
          for (std::size_t j = 0; j < width; ++j) zold[j] = zl * zold[j] - zc * zn[j];
          normalize_z(zold);
        }
        pivot_of_col[c0] = static_cast<std::int32_t>(zrows.size());
        pivcol.push_back(static_cast<std::uint32_t>(c0));
        zrows.push_back(std::move(zn));
        return true;
      }
      for (std::size_t j = 0; j < width; ++j) old[j] = ln * old[j] - coef * row[j];
      if (max_abs(old) > kNormalizeAbove) normalize(old);
    }
    pivot_of_col[c0] = static_cast<std::int32_t>(rows.size());
    pivcol.push_back(static_cast<std::uint32_t>(c0));
    rows.push_back(std::move(row));
    return true;
  }

  void finalize_rows() {
    if (big) {
      for (auto& r : zrows) normalize_z(r);
    } else {
      for (auto& r : rows) normalize(r);
    }
  }

  std::vector<std::int64_t> reduced_row(std::size_t i) {
    finalize_rows();
    if (!big) return rows[i];
    std::vector<std::int64_t> out(width);
    for (std::size_t j = 0; j < width; ++j) {
      if (!zrows[i][j].fits_slong_p())
        fail("InvalidParameters", "reduced row entry exceeds 64 bits");
      out[j] = mpz_get_si(zrows[i][j].get_mpz_t());
    }
    return out;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// RowEliminator: thin dispatcher over the three lanes.
// ---------------------------------------------------------------------------
struct RowEliminator::Impl {
  FieldSpec field;
  std::size_t width;
  std::unique_ptr<GfLane> gf_small;
  std::unique_ptr<GfBigLane> gf_big;
  std::unique_ptr<RatLane> rat;
};

RowEliminator::RowEliminator(std::size_t width, const FieldSpec& field) : impl_(new Impl) {
  impl_->field = field;
  impl_->width = width;
  if (field.is_rational())
    impl_->rat = std::make_unique<RatLane>(width);
  else if (field.modulus < kDoubleLaneMaxQ)
    impl_->gf_small = std::make_unique<GfLane>(width, field.modulus);
  else
    impl_->gf_big = std::make_unique<GfBigLane>(width, field.modulus);
}

RowEliminator::~RowEliminator() { delete impl_; }

bool RowEliminator::consume(const Entry* entries, std::size_t n) {
  if (impl_->gf_small) return impl_->gf_small->consume(entries, n);
  if (impl_->gf_big) return impl_->gf_big->consume(entries, n);
  return impl_->rat->consume(entries, n);
}

std::size_t RowEliminator::rank() const {
  if (impl_->gf_small) return impl_->gf_small->rank();
  if (impl_->gf_big) return impl_->gf_big->rank();
  return impl_->rat->rank();
}

bool RowEliminator::saturated() const { return rank() == impl_->width; }

std::vector<std::uint32_t> RowEliminator::pivot_cols() const {
  std::vector<std::uint32_t> out;
  if (impl_->gf_small)
    out = impl_->gf_small->start;
  else if (impl_->gf_big)
    out = impl_->gf_big->pivcol;
  else
    out = impl_->rat->pivcol;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::int64_t> RowEliminator::reduced_row(std::size_t i) const {
  if (impl_->gf_small) return impl_->gf_small->reduced_row(i);
  if (impl_->gf_big) return impl_->gf_big->reduced_row(i);
  return impl_->rat->reduced_row(i);
}

// ---------------------------------------------------------------------------
// SparseExactMatrix
// ---------------------------------------------------------------------------
SparseExactMatrix::SparseExactMatrix(std::vector<Label> row_labels, std::vector<Label> col_labels,
                                     const std::vector<Triplet>& entries)
    : row_labels_(std::move(row_labels)), col_labels_(std::move(col_labels)) {
  std::unordered_map<Label, std::uint32_t> rmap, cmap;
  rmap.reserve(row_labels_.size() * 2);
  cmap.reserve(col_labels_.size() * 2);
  for (std::size_t i = 0; i < row_labels_.size(); ++i)
    if (!rmap.emplace(row_labels_[i], static_cast<std::uint32_t>(i)).second)
      fail("InvalidParameters", "duplicate row label");
  for (std::size_t i = 0; i < col_labels_.size(); ++i)
    if (!cmap.emplace(col_labels_[i], static_cast<std::uint32_t>(i)).second)
      fail("InvalidParameters", "duplicate column label");

  struct Cell {
    std::uint32_t r, c;
    std::int64_t v;
  };
  std::vector<Cell> cells;
  cells.reserve(entries.size());
  for (const Triplet& t : entries) {
    auto ri = rmap.find(t.row);
    auto ci = cmap.find(t.col);
    if (ri == rmap.end() || ci == cmap.end())
      fail("LabelMismatch", "triplet label not present in the basis label lists");
    cells.push_back({ri->second, ci->second, t.value});
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });

  row_ptr_.assign(row_labels_.size() + 1, 0);
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i;
    __int128 sum = 0;
    while (j < cells.size() && cells[j].r == cells[i].r && cells[j].c == cells[i].c)
      sum += cells[j++].v;
    if (sum != 0) {
      if (sum > std::numeric_limits<std::int64_t>::max() || sum < std::numeric_limits<std::int64_t>::min())
        fail("InvalidParameters", "matrix entry exceeds 64 bits");
      col_idx_.push_back(cells[i].c);
      values_.push_back(static_cast<std::int64_t>(sum));
      ++row_ptr_[cells[i].r + 1];
    }
    i = j;
  }
  for (std::size_t r = 1; r <= row_labels_.size(); ++r) row_ptr_[r] += row_ptr_[r - 1];
}

std::size_t SparseExactMatrix::rank(const FieldSpec& field) const {
  // Rank is orientation-free; stream along the larger side so the reduced
  // basis (quadratic in the smaller side) stays small.
  const bool transpose = n_cols() > n_rows();
  const std::size_t width = transpose ? n_rows() : n_cols();
  RowEliminator el(width, field);
  std::vector<Entry> row;
  if (!transpose) {
    for (std::size_t r = 0; r < n_rows() && !el.saturated(); ++r) {
      row.clear();
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        row.emplace_back(col_idx_[k], values_[k]);
      el.consume(row.data(), row.size());
    }
  } else {
    std::vector<std::vector<Entry>> cols(n_cols());
    for (std::size_t r = 0; r < n_rows(); ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
        cols[col_idx_[k]].emplace_back(static_cast<std::uint32_t>(r), values_[k]);
    for (std::size_t c = 0; c < n_cols() && !el.saturated(); ++c)
      el.consume(cols[c].data(), cols[c].size());
  }
  return el.rank();
}

std::vector<SparseExactMatrix::KernelVector> SparseExactMatrix::kernel_basis(
    const FieldSpec& field) const {
  RowEliminator el(n_cols(), field);
  std::vector<Entry> row;
  for (std::size_t r = 0; r < n_rows() && !el.saturated(); ++r) {
    row.clear();
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
      row.emplace_back(col_idx_[k], values_[k]);
    el.consume(row.data(), row.size());
  }
  std::vector<std::uint32_t> pivots = el.pivot_cols();
  std::vector<std::int32_t> pivot_index(n_cols(), -1);
  std::vector<std::vector<std::int64_t>> rows(pivots.size());
  // pivot_cols() is sorted; recover which reduced row owns each pivot by
  // matching leading nonzero columns.
  for (std::size_t i = 0; i < el.rank(); ++i) {
    std::vector<std::int64_t> rr = el.reduced_row(i);
    std::size_t lead = 0;
    while (lead < rr.size() && rr[lead] == 0) ++lead;
    auto it = std::lower_bound(pivots.begin(), pivots.end(), static_cast<std::uint32_t>(lead));
    std::size_t slot = static_cast<std::size_t>(it - pivots.begin());
    rows[slot] = std::move(rr);
    pivot_index[lead] = static_cast<std::int32_t>(slot);
  }

  std::vector<KernelVector> basis;
  const bool rat = field.is_rational();
  for (std::size_t f = 0; f < n_cols(); ++f) {
    if (pivot_index[f] >= 0) continue;
    KernelVector kv;
    if (!rat) {
      const std::uint32_t q = field.modulus;
      std::vector<std::pair<std::size_t, std::int64_t>> vals;
      for (std::size_t s = 0; s < pivots.size(); ++s) {
        std::int64_t e = rows[s][f] % q;
        if (e != 0) vals.emplace_back(pivots[s], q - e);
      }
      vals.emplace_back(f, 1);
      std::sort(vals.begin(), vals.end());
      for (auto& [c, v] : vals) kv.coords.emplace_back(col_labels_[c], v);
    } else {
      // x[f] = L (lcm of engaged leading coefficients), x[p_s] = -L*row_s[f]/lead_s.
      mpz_class L = 1;
      for (std::size_t s = 0; s < pivots.size(); ++s)
        if (rows[s][f] != 0) {
          mpz_class lead = rows[s][pivots[s]];
          mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), lead.get_mpz_t());
        }
      std::vector<std::pair<std::size_t, mpz_class>> vals;
      for (std::size_t s = 0; s < pivots.size(); ++s) {
        if (rows[s][f] == 0) continue;
        mpz_class v = -L * rows[s][f] / rows[s][pivots[s]];
        vals.emplace_back(pivots[s], v);
      }
      vals.emplace_back(f, L);
      mpz_class g = 0;
      for (auto& [c, v] : vals) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
      std::sort(vals.begin(), vals.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (auto& [c, v] : vals) {
        mpz_class w = v / g;
        if (!w.fits_slong_p()) fail("InvalidParameters", "kernel coordinate exceeds 64 bits");
        kv.coords.emplace_back(col_labels_[c], mpz_get_si(w.get_mpz_t()));
      }
    }
    basis.push_back(std::move(kv));
  }
  return basis;
}

std::vector<Triplet> SparseExactMatrix::compose(const SparseExactMatrix& other,
                                                const FieldSpec& field) const {
  if (n_cols() != other.n_rows())
    fail("ShapeMismatch", "composition: inner dimensions disagree (" +
                              std::to_string(n_cols()) + " vs " + std::to_string(other.n_rows()) + ")");
  if (col_labels_ != other.row_labels_)
    fail("LabelMismatch", "composition: inner basis labels disagree");

  std::vector<Triplet> out;
  std::vector<__int128> scratch(other.n_cols(), 0);
  std::vector<std::uint32_t> dirty;
  for (std::size_t r = 0; r < n_rows(); ++r) {
    dirty.clear();
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const std::uint32_t m = col_idx_[k];
      const std::int64_t va = values_[k];
      for (std::size_t k2 = other.row_ptr_[m]; k2 < other.row_ptr_[m + 1]; ++k2) {
        const std::uint32_t c = other.col_idx_[k2];
        if (scratch[c] == 0) dirty.push_back(c);
        scratch[c] += (__int128)va * other.values_[k2];
      }
    }
    std::sort(dirty.begin(), dirty.end());
    for (std::uint32_t c : dirty) {
      __int128 v = scratch[c];
      scratch[c] = 0;
      std::int64_t vv;
      if (field.is_rational()) {
        if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
          fail("InvalidParameters", "composition entry exceeds 64 bits");
        vv = static_cast<std::int64_t>(v);
      } else {
        std::int64_t q = field.modulus;
        vv = static_cast<std::int64_t>(v % q);
        if (vv < 0) vv += q;
      }
      if (vv != 0) out.push_back({row_labels_[r], other.col_labels_[c], vv});
    }
  }
  return out;
}

bool SparseExactMatrix::is_zero(const FieldSpec& field) const {
  if (field.is_rational()) return values_.empty();
  for (std::int64_t v : values_)
    if (gf::reduce(v, field.modulus) != 0) return false;
  return true;
}

std::size_t homology_dim(const SparseExactMatrix* d_in, const SparseExactMatrix* d_out,
                         const FieldSpec& field) {
  if (!d_in && !d_out)
    fail("InvalidParameters", "homology needs at least one of the two differentials");
  if (d_in && d_out) {
    if (d_out->n_cols() != d_in->n_rows())
      fail("ShapeMismatch", "homology: middle dimensions disagree (" +
                                std::to_string(d_out->n_cols()) + " vs " +
                                std::to_string(d_in->n_rows()) + ")");
    if (d_out->col_labels() != d_in->row_labels())
      fail("LabelMismatch", "homology: middle basis labels disagree");
    if (!d_out->compose(*d_in, field).empty())
      fail("CompositionNonzero", "d_out . d_in is not zero over " + field.name());
  }
  const std::size_t mid = d_out ? d_out->n_cols() : d_in->n_rows();
  const std::size_t r_out = d_out ? d_out->rank(field) : 0;
  const std::size_t r_in = d_in ? d_in->rank(field) : 0;
  if (r_in + r_out > mid) fail("InvalidParameters", "rank bookkeeping violated; internal error");
  return mid - r_in - r_out;
}

}  // namespace segre
