// Slice-wise assembly of the resolutions. All maps here are defined by where
// they send a single tensor basis vector (wedge monomial) x (V basis vector)
// x (coefficient monomial); the emitters below produce those image terms, and
// matrices, exactness reports and commuting-square checks are all thin loops
// over them. Signs follow one convention throughout: wedge monomials are kept
// as ascending bitmask tuples, removal of the l-th factor (1-indexed) carries
// (-1)^l where a formula says so, and inserting a factor into a sorted tuple
// costs the parity of the factors it jumps over.
#include "segre/resolutions.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <sstream>

#include "poly_ring.hpp"
#include "segre/koszul.hpp"

namespace segre {

namespace {

using detail::PolyRing;

// Shared clamp: a term survives only when its index stays inside [lo, hi].
bool within(int v, int lo, int hi) { return lo <= v && v <= hi; }

// Ambient polynomial ring of a scroll: variables numbered exactly like the
// scroll algebra's generators (column-major, heights 0..e_i).
PolyRing ambient_ring(const std::vector<int>& e) {
  int n = 0;
  for (int d : e) n += d + 1;
  return PolyRing(n);
}

// Fixed data of one scroll-module resolution: shapes plus the dictionaries
// between wedge generator ids f_{i,h} (h = 1..e_i), ambient variables
// b_{i,h} (h = 0..e_i) and columns.
struct ENLayout {
  std::vector<int> e;
  int c = 0, f = 0;
  std::vector<ENShape> shapes;
  std::vector<int> var_base;      // column -> id of b_{i,0}
  std::vector<int> wedge_base;    // column -> id of f_{i,1}
  std::vector<int> wedge_col, wedge_height;

  ENLayout(const std::vector<int>& ee, int cc) : e(ee), c(cc) {
    shapes = en_shapes(e, c);
    f = scroll_invariants(e).f;
    if (f > 24) fail("InvalidParameters", "scroll too wide for packed wedge masks");
    int vb = 0, wb = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      var_base.push_back(vb);
      wedge_base.push_back(wb);
      vb += e[i] + 1;
      wb += e[i];
      for (int h = 1; h <= e[i]; ++h) {
        wedge_col.push_back(static_cast<int>(i));
        wedge_height.push_back(h);
      }
    }
  }

  int var(int col, int h) const { return var_base[static_cast<std::size_t>(col)] + h; }
  int wedge_id(int col, int h) const {
    if (!within(h, 1, e[static_cast<std::size_t>(col)]))
      fail("InvalidParameters", "wedge generator height out of range");
    return wedge_base[static_cast<std::size_t>(col)] + h - 1;
  }
};

// One image term: target basis vector and integer coefficient.
struct Term {
  std::uint32_t mask;
  int B;
  std::uint32_t mono;
  int coeff;
};

constexpr int kMonoBits = 18;
constexpr int kVBits = 6;

Label pack_label(std::uint32_t mask, int B, std::uint32_t mono) {
  return (static_cast<Label>(mask) << (kMonoBits + kVBits)) |
         (static_cast<Label>(B) << kMonoBits) | mono;
}

std::vector<std::uint32_t> wedge_masks(int f, int k) {
  std::vector<std::uint32_t> out;
  if (k < 0 || k > f) return out;
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  for (std::uint32_t m = first_subset(k); m < (std::uint32_t(1) << f); m = next_subset(m))
    out.push_back(m);
  return out;
}

// The differential leaving position pos, applied to one basis vector whose
// coefficient monomial lives in degree s. Three shapes:
//  - pos <= c (first row): multiply by the matrix entries, raising the V
//    index for the top-row entry, d(w (x) B_p) = sum_l (-1)^l
//    [ b_{i_l, h_l - 1} (w minus l) (x) B_{p+1} - b_{i_l, h_l} (w minus l) (x) B_p ];
//  - pos == c + 1 (junction): contract two factors against a 2x2 minor;
//  - pos >= c + 2 (second row): same matrix entries, lowering the V index,
//    with the out-of-range targets B_{-1} and B_{n} clamped away.
void en_diff_terms(const ENLayout& L, PolyRing& S, int pos, int s, std::uint32_t mask, int B,
                   std::uint32_t mono, int coeff, std::vector<Term>& out) {
  if (pos <= L.c) {
    int l = 0;
    for (std::uint32_t m = mask; m; m &= m - 1) {
      const int g = std::countr_zero(m);
      const int sgn = (++l & 1) ? -coeff : coeff;
      const std::uint32_t rest = mask ^ (std::uint32_t(1) << g);
      const int col = L.wedge_col[static_cast<std::size_t>(g)];
      const int h = L.wedge_height[static_cast<std::size_t>(g)];
      out.push_back({rest, B + 1, S.mult(L.var(col, h - 1), s, mono), sgn});
      out.push_back({rest, B, S.mult(L.var(col, h), s, mono), -sgn});
    }
    return;
  }
  if (pos == L.c + 1) {
    int bits[26];
    int n_bits = 0;
    for (std::uint32_t m = mask; m; m &= m - 1) bits[n_bits++] = std::countr_zero(m);
    for (int u = 0; u < n_bits; ++u)
      for (int v = u + 1; v < n_bits; ++v) {
        const int sgn = ((u + v) & 1) ? -coeff : coeff;  // (-1)^{(u+1)+(v+1)}
        const std::uint32_t rest =
            mask ^ (std::uint32_t(1) << bits[u]) ^ (std::uint32_t(1) << bits[v]);
        const int c1 = L.wedge_col[static_cast<std::size_t>(bits[u])];
        const int h1 = L.wedge_height[static_cast<std::size_t>(bits[u])];
        const int c2 = L.wedge_col[static_cast<std::size_t>(bits[v])];
        const int h2 = L.wedge_height[static_cast<std::size_t>(bits[v])];
        out.push_back(
            {rest, 0, S.mult(L.var(c1, h1), s + 1, S.mult(L.var(c2, h2 - 1), s, mono)), sgn});
        out.push_back(
            {rest, 0, S.mult(L.var(c1, h1 - 1), s + 1, S.mult(L.var(c2, h2), s, mono)), -sgn});
      }
    return;
  }
  const int n = pos - L.c - 1;  // source V index; target is V_{n-1}
  int l = 0;
  for (std::uint32_t m = mask; m; m &= m - 1) {
    const int g = std::countr_zero(m);
    const int sgn = (++l & 1) ? -coeff : coeff;
    const std::uint32_t rest = mask ^ (std::uint32_t(1) << g);
    const int col = L.wedge_col[static_cast<std::size_t>(g)];
    const int h = L.wedge_height[static_cast<std::size_t>(g)];
    if (within(B - 1, 0, n - 1))
      out.push_back({rest, B - 1, S.mult(L.var(col, h - 1), s, mono), sgn});
    if (within(B, 0, n - 1)) out.push_back({rest, B, S.mult(L.var(col, h), s, mono), -sgn});
  }
}

// Augmentation of position 0: B_p (x) monomial goes to the module element
// obtained by multiplying the degree-zero generator with index p by the
// monomial's variables.
std::size_t en_augment_index(const ENLayout& L, PolyRing& S, const MonomialAlgebra& mod, int B,
                             int s, std::uint32_t mono) {
  std::size_t idx = mod.scroll_index(0, ScrollBasisElement{{}, L.c, B});
  int d = 0;
  for (std::uint8_t v : S.vars(s, mono)) idx = mod.multiply_index(v, d++, idx);
  return idx;
}

// The chain map covering the append-one-column map M_c -> M_{c-b}, applied to
// one basis vector of position n. Image terms live in position n of the
// target resolution, one ambient degree up. For n <= c-b the coefficient gets
// multiplied by one matrix entry; beyond that the map only inserts wedge
// factors f_{i0, B+l+1} and re-labels the V index.
void alpha_terms(const ENLayout& L, int b, int i0, int n, PolyRing& S, int s, std::uint32_t mask,
                 int B, std::uint32_t mono, int coeff, std::vector<Term>& out) {
  const int cb = L.c - b;
  if (n <= cb) {
    if (B >= b) {
      out.push_back({mask, B - b, S.mult(L.var(i0, b), s, mono), coeff});
      return;
    }
    out.push_back({mask, 0, S.mult(L.var(i0, B), s, mono), coeff});
    const int ins = L.wedge_id(i0, B + 1);
    const std::uint32_t ins_bit = std::uint32_t(1) << ins;
    int l = 0;
    for (std::uint32_t m = mask; m; m &= m - 1) {
      const int g = std::countr_zero(m);
      const int sgn_l = (++l & 1) ? -1 : 1;
      const std::uint32_t rest = mask ^ (std::uint32_t(1) << g);
      if (rest & ins_bit) continue;  // repeated wedge factor
      const int sgn_sort = (std::popcount(rest & (ins_bit - 1)) & 1) ? -1 : 1;
      const int col = L.wedge_col[static_cast<std::size_t>(g)];
      const int h = L.wedge_height[static_cast<std::size_t>(g)];
      out.push_back({rest | ins_bit, 0, S.mult(L.var(col, h - 1), s, mono),
                     coeff * sgn_l * sgn_sort});
    }
    return;
  }
  const int lmax = n - cb - 1;
  const int gsgn = (lmax & 1) ? -coeff : coeff;  // (-1)^{n-c+b-1}
  for (int l = 0; l <= lmax; ++l) {
    const int ins = L.wedge_id(i0, B + l + 1);
    const std::uint32_t ins_bit = std::uint32_t(1) << ins;
    if (mask & ins_bit) continue;
    const int sgn_sort = (std::popcount(mask & (ins_bit - 1)) & 1) ? -1 : 1;
    out.push_back({mask | ins_bit, l, mono, gsgn * sgn_sort});
  }
}

// Sorted, merged, zero-free list of terms for exact comparison.
void canonicalize(std::vector<Term>& v) {
  std::sort(v.begin(), v.end(), [](const Term& x, const Term& y) {
    if (x.mask != y.mask) return x.mask < y.mask;
    if (x.B != y.B) return x.B < y.B;
    return x.mono < y.mono;
  });
  std::size_t w = 0;
  for (std::size_t r = 0; r < v.size();) {
    std::size_t r2 = r;
    long long sum = 0;
    while (r2 < v.size() && v[r2].mask == v[r].mask && v[r2].B == v[r].B &&
           v[r2].mono == v[r].mono)
      sum += v[r2++].coeff;
    if (sum != 0) {
      v[w] = v[r];
      v[w].coeff = static_cast<int>(sum);
      ++w;
    }
    r = r2;
  }
  v.resize(w);
}

bool same_terms(const std::vector<Term>& x, const std::vector<Term>& y) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i].mask != y[i].mask || x[i].B != y[i].B || x[i].mono != y[i].mono ||
        x[i].coeff != y[i].coeff)
      return false;
  return true;
}

// Slice basis of one position at one ambient degree; labels are
// self-describing packs of (mask, B, monomial index).
struct SliceBasis {
  int s = -1;  // coefficient degree, -1 when the slice is empty
  std::vector<std::uint32_t> masks;
  int v_rank = 0;
  std::size_t mono_dim = 0;
  std::vector<Label> labels;
};

SliceBasis en_slice_basis(const ENLayout& L, PolyRing& S, int pos, int d, bool with_labels) {
  SliceBasis out;
  if (pos < 0 || pos >= static_cast<int>(L.shapes.size())) return out;
  const ENShape& sh = L.shapes[static_cast<std::size_t>(pos)];
  if (d < sh.gen_degree) return out;
  out.s = d - sh.gen_degree;
  out.masks = wedge_masks(L.f, sh.wedge);
  out.v_rank = sh.v_index + 1;
  out.mono_dim = S.dim(out.s);
  if (out.mono_dim >> kMonoBits)
    fail("InvalidParameters", "degree slice too large for packed labels");
  if (out.v_rank > (1 << kVBits)) fail("InvalidParameters", "V factor too large for packed labels");
  if (!with_labels) return out;
  out.labels.reserve(out.masks.size() * static_cast<std::size_t>(out.v_rank) * out.mono_dim);
  for (std::uint32_t mask : out.masks)
    for (int B = 0; B < out.v_rank; ++B)
      for (std::size_t mono = 0; mono < out.mono_dim; ++mono)
        out.labels.push_back(pack_label(mask, B, static_cast<std::uint32_t>(mono)));
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

std::vector<ENShape> en_shapes(const std::vector<int>& e, int c) {
  const ScrollInvariants inv = scroll_invariants(e);
  if (c < 0) fail("InvalidParameters", "negative module twist");
  const int f = inv.f;
  const int n_pos = (c + 2 <= f) ? f : std::min(c, f) + 1;
  std::vector<ENShape> out;
  for (int t = 0; t < n_pos; ++t) {
    ENShape sh;
    if (t <= c) {
      sh = {t, c - t, t, 0};
    } else if (t == c + 1) {
      sh = {c + 2, 0, c + 2, 0};
    } else {
      sh = {t + 1, t - c - 1, t + 1, 0};
    }
    sh.rank = binomial(f, sh.wedge) * static_cast<std::size_t>(sh.v_index + 1);
    out.push_back(sh);
  }
  return out;
}

ResolutionSlice en_resolution_degree_piece(const std::vector<int>& e, int c, int deg) {
  if (deg < 0) fail("InvalidParameters", "negative degree");
  ENLayout L(e, c);
  PolyRing S = ambient_ring(e);
  const auto mod = MonomialAlgebra::scroll_module(e, c);

  std::vector<SliceBasis> bases;
  for (int pos = 0; pos < static_cast<int>(L.shapes.size()); ++pos)
    bases.push_back(en_slice_basis(L, S, pos, deg, true));

  ResolutionSlice out;
  out.degree = deg;

  std::vector<Label> mod_labels(mod.dim(deg));
  std::iota(mod_labels.begin(), mod_labels.end(), Label{0});
  std::vector<Triplet> trips;
  const SliceBasis& b0 = bases[0];
  for (int B = 0; B < b0.v_rank; ++B)
    for (std::size_t mono = 0; mono < b0.mono_dim; ++mono)
      trips.push_back(
          {static_cast<Label>(en_augment_index(L, S, mod, B, b0.s, static_cast<std::uint32_t>(mono))),
           pack_label(0, B, static_cast<std::uint32_t>(mono)), 1});
  out.maps.emplace_back(mod_labels, b0.labels, trips);

  std::vector<Term> buf;
  for (int pos = 1; pos < static_cast<int>(L.shapes.size()); ++pos) {
    trips.clear();
    const SliceBasis& src = bases[static_cast<std::size_t>(pos)];
    for (std::uint32_t mask : src.masks)
      for (int B = 0; B < src.v_rank; ++B)
        for (std::size_t mono = 0; mono < src.mono_dim; ++mono) {
          buf.clear();
          en_diff_terms(L, S, pos, src.s, mask, B, static_cast<std::uint32_t>(mono), 1, buf);
          const Label col = pack_label(mask, B, static_cast<std::uint32_t>(mono));
          for (const Term& t : buf)
            trips.push_back({pack_label(t.mask, t.B, t.mono), col, t.coeff});
        }
    out.maps.emplace_back(bases[static_cast<std::size_t>(pos) - 1].labels, src.labels, trips);
  }
  return out;
}

VerifyReport verify_en_exactness(const std::vector<int>& e, int c, int max_deg,
                                 const FieldSpec& field) {
  if (max_deg < 0) fail("InvalidParameters", "negative degree bound");
  VerifyReport rep;
  std::ostringstream os;
  os << "resolution of the twist-" << c << " module over the scroll (" << join_ints(e)
     << "), degrees 0.." << max_deg << ", field " << field.name() << "\n";

  const auto shapes = en_shapes(e, c);
  bool minimal = true;
  for (std::size_t t = 1; t < shapes.size(); ++t)
    minimal = minimal && shapes[t].gen_degree > shapes[t - 1].gen_degree;

  for (int d = 0; d <= max_deg; ++d) {
    const ResolutionSlice sl = en_resolution_degree_piece(e, c, d);
    const std::size_t mdim = sl.maps[0].n_rows();
    const std::size_t aug_rank = sl.maps[0].rank(field);
    const bool onto = aug_rank == mdim;
    rep.pass = rep.pass && onto;
    os << "deg " << d << " module: dim " << mdim << ", image " << aug_rank << ", "
       << (onto ? "PASS" : "FAIL") << "\n";
    for (std::size_t pos = 0; pos < sl.maps.size(); ++pos) {
      const SparseExactMatrix* din = pos + 1 < sl.maps.size() ? &sl.maps[pos + 1] : nullptr;
      const SparseExactMatrix& dout = sl.maps[pos];
      os << "deg " << d << " pos " << pos << ": dim " << dout.n_cols() << ", rank_out "
         << dout.rank(field);
      try {
        const std::size_t h = homology_dim(din, &dout, field);
        const bool ok = h == 0;
        rep.pass = rep.pass && ok;
        os << ", homology " << h << ", " << (ok ? "PASS" : "FAIL") << "\n";
      } catch (const ComputationError& err) {
        rep.pass = false;
        os << ", FAIL (" << err.code << ")\n";
      }
    }
  }
  os << "minimality: generator degrees";
  for (const auto& sh : shapes) os << " " << sh.gen_degree;
  os << (minimal ? " strictly increase, PASS" : " do not increase, FAIL") << "\n";
  rep.pass = rep.pass && minimal;
  os << "overall: " << (rep.pass ? "PASS" : "FAIL") << "\n";
  rep.text = os.str();
  return rep;
}

namespace {

Label relres_label(std::uint32_t gmask, int h, std::size_t idx) {
  return (static_cast<Label>(gmask) << 40) | (static_cast<Label>(h) << 32) |
         static_cast<Label>(idx);
}

// Insert one column index into the sorted index list of a scroll element.
ScrollBasisElement append_column(const ScrollBasisElement& x, int col, int new_c) {
  ScrollBasisElement out;
  out.indices = x.indices;
  out.indices.insert(std::lower_bound(out.indices.begin(), out.indices.end(), col), col);
  out.c = new_c;
  out.j = x.j;
  return out;
}

}  // namespace

ResolutionSlice relative_resolution_degree_piece(int a, int b, int deg) {
  if (a < 1 || b < 1) fail("InvalidParameters", "need a >= 1 and b >= 1");
  if (deg < 0) fail("InvalidParameters", "negative degree");
  const std::vector<int> e(static_cast<std::size_t>(a) + 1, b);
  const auto ring = MonomialAlgebra::scroll(e);
  std::vector<MonomialAlgebra> stage;  // stage[i-1] backs position i
  for (int i = 1; i < a; ++i) stage.push_back(MonomialAlgebra::scroll_module(e, (i + 1) * b));

  // Basis labels per position.
  std::vector<std::vector<Label>> labels(static_cast<std::size_t>(a));
  labels[0].resize(ring.dim(deg));
  std::iota(labels[0].begin(), labels[0].end(), Label{0});
  std::vector<std::vector<std::uint32_t>> gmasks(static_cast<std::size_t>(a));
  for (int i = 1; i < a; ++i) {
    const int dint = deg - (i + 1);
    if (dint < 0) continue;
    gmasks[static_cast<std::size_t>(i)] = wedge_masks(a, i + 1);
    const std::size_t mdim = stage[static_cast<std::size_t>(i) - 1].dim(dint);
    for (std::uint32_t gm : gmasks[static_cast<std::size_t>(i)])
      for (int h = 1; h <= i; ++h)
        for (std::size_t idx = 0; idx < mdim; ++idx)
          labels[static_cast<std::size_t>(i)].push_back(relres_label(gm, h, idx));
  }

  ResolutionSlice out;
  out.degree = deg;

  // Projection onto the surface ring.
  const std::size_t segre_cols = static_cast<std::size_t>(deg * b + 1);
  std::vector<Label> segre_labels(static_cast<std::size_t>(deg * a + 1) * segre_cols);
  std::iota(segre_labels.begin(), segre_labels.end(), Label{0});
  std::vector<Triplet> trips;
  for (std::size_t idx = 0; idx < ring.dim(deg); ++idx) {
    const SegreBasisElement p = scroll_projection(e, ring.scroll_element(deg, idx), 0);
    trips.push_back({static_cast<Label>(p.i) * segre_cols + static_cast<Label>(p.j),
                     static_cast<Label>(idx), 1});
  }
  out.maps.emplace_back(segre_labels, labels[0], trips);

  for (int i = 1; i < a; ++i) {
    trips.clear();
    const int p = i + 1;  // stage index: position i holds M_{pb}
    const int dint = deg - p;
    if (dint >= 0) {
      const MonomialAlgebra& src_mod = stage[static_cast<std::size_t>(i) - 1];
      for (std::uint32_t gm : gmasks[static_cast<std::size_t>(i)])
        for (int h = 1; h <= i; ++h)
          for (std::size_t idx = 0; idx < src_mod.dim(dint); ++idx) {
            const Label col = relres_label(gm, h, idx);
            const ScrollBasisElement el = src_mod.scroll_element(dint, idx);
            if (i == 1) {
              // Bottom of the ladder: both appended columns land in the ring.
              const int j1 = std::countr_zero(gm) + 1;
              const int j2 = 31 - std::countl_zero(gm) + 1;
              const auto plus = append_column(append_column(el, j1 - 1, 0), j2, 0);
              const auto minus = append_column(append_column(el, j1, 0), j2 - 1, 0);
              trips.push_back({static_cast<Label>(ring.scroll_index(deg, plus)), col, 1});
              trips.push_back({static_cast<Label>(ring.scroll_index(deg, minus)), col, -1});
              continue;
            }
            const MonomialAlgebra& dst_mod = stage[static_cast<std::size_t>(i) - 2];
            int l = 0;
            for (std::uint32_t m = gm; m; m &= m - 1) {
              const int jq = std::countr_zero(m) + 1;  // g labels are 1-based
              const int sgn = (++l & 1) ? -1 : 1;      // (-1)^l
              const std::uint32_t rest = gm ^ (std::uint32_t(1) << (jq - 1));
              if (within(h - 1, 1, p - 2)) {
                const auto tgt = append_column(el, jq - 1, (p - 1) * b);
                trips.push_back({relres_label(rest, h - 1, dst_mod.scroll_index(dint + 1, tgt)),
                                 col, sgn});
              }
              if (within(h, 1, p - 2)) {
                const auto tgt = append_column(el, jq, (p - 1) * b);
                trips.push_back({relres_label(rest, h, dst_mod.scroll_index(dint + 1, tgt)),
                                 col, -sgn});
              }
            }
          }
    }
    out.maps.emplace_back(labels[static_cast<std::size_t>(i) - 1],
                          labels[static_cast<std::size_t>(i)], trips);
  }
  return out;
}

VerifyReport verify_relative_resolution(int a, int b, int max_deg, const FieldSpec& field) {
  if (max_deg < 0) fail("InvalidParameters", "negative degree bound");
  VerifyReport rep;
  std::ostringstream os;
  os << "relative resolution of the (" << a << "," << b << ") surface ring, degrees 0.."
     << max_deg << ", field " << field.name() << "\n";
  for (int d = 0; d <= max_deg; ++d) {
    const ResolutionSlice sl = relative_resolution_degree_piece(a, b, d);
    const std::size_t sdim = sl.maps[0].n_rows();
    const std::size_t pr = sl.maps[0].rank(field);
    const bool onto = pr == sdim;
    rep.pass = rep.pass && onto;
    os << "deg " << d << " surface: dim " << sdim << ", image " << pr << ", "
       << (onto ? "PASS" : "FAIL") << "\n";
    for (std::size_t pos = 0; pos < sl.maps.size(); ++pos) {
      const SparseExactMatrix* din = pos + 1 < sl.maps.size() ? &sl.maps[pos + 1] : nullptr;
      const SparseExactMatrix& dout = sl.maps[pos];
      os << "deg " << d << " pos " << pos << ": dim " << dout.n_cols() << ", rank_out "
         << dout.rank(field);
      try {
        const std::size_t h = homology_dim(din, &dout, field);
        const bool ok = h == 0;
        rep.pass = rep.pass && ok;
        os << ", homology " << h << ", " << (ok ? "PASS" : "FAIL") << "\n";
      } catch (const ComputationError& err) {
        rep.pass = false;
        os << ", FAIL (" << err.code << ")\n";
      }
    }
  }
  os << "overall: " << (rep.pass ? "PASS" : "FAIL") << "\n";
  rep.text = os.str();
  return rep;
}

namespace {

void check_chain_map_params(int a, int b, int i0, int c) {
  if (a < 1 || b < 1) fail("InvalidParameters", "need a >= 1 and b >= 1");
  if (!within(i0, 0, a)) fail("InvalidParameters", "column index i0 out of range");
  if (c < b || c % b != 0)
    fail("InvalidParameters", "c must be a positive multiple of the column degree");
}

}  // namespace

SparseExactMatrix horizontal_chain_map(int a, int b, int i0, int n, int c, int deg) {
  check_chain_map_params(a, b, i0, c);
  if (deg < 0) fail("InvalidParameters", "negative degree");
  const std::vector<int> e(static_cast<std::size_t>(a) + 1, b);
  ENLayout Lc(e, c), Lt(e, c - b);
  if (n < 0 || n > c || n >= static_cast<int>(Lt.shapes.size()))
    fail("OutOfImplementedRange", "chain map positions stop at n = c");
  PolyRing S = ambient_ring(e);
  const SliceBasis src = en_slice_basis(Lc, S, n, deg, true);
  const SliceBasis dst = en_slice_basis(Lt, S, n, deg + 1, true);
  std::vector<Triplet> trips;
  std::vector<Term> buf;
  if (src.s >= 0) {
    for (std::uint32_t mask : src.masks)
      for (int B = 0; B < src.v_rank; ++B)
        for (std::size_t mono = 0; mono < src.mono_dim; ++mono) {
          buf.clear();
          alpha_terms(Lc, b, i0, n, S, src.s, mask, B, static_cast<std::uint32_t>(mono), 1, buf);
          const Label col = pack_label(mask, B, static_cast<std::uint32_t>(mono));
          for (const Term& t : buf)
            trips.push_back({pack_label(t.mask, t.B, t.mono), col, t.coeff});
        }
  }
  return SparseExactMatrix(dst.labels, src.labels, trips);
}

VerifyReport verify_chain_map_squares(int a, int b, int p_index, int max_deg) {
  if (a < 1 || b < 1) fail("InvalidParameters", "need a >= 1 and b >= 1");
  if (!within(p_index, 2, a)) fail("InvalidParameters", "p_index must lie in 2..a");
  if (max_deg < 0) fail("InvalidParameters", "negative degree bound");
  const int c = p_index * b;
  const std::vector<int> e(static_cast<std::size_t>(a) + 1, b);
  ENLayout Lc(e, c), Lt(e, c - b);
  PolyRing S = ambient_ring(e);
  const auto mod_c = MonomialAlgebra::scroll_module(e, c);
  const auto mod_t = MonomialAlgebra::scroll_module(e, c - b);

  VerifyReport rep;
  std::ostringstream os;
  os << "chain map squares, a=" << a << " b=" << b << " c=" << c
     << ", coefficient degrees 0.." << max_deg << ", integer coefficients\n";

  std::vector<Term> t1, t2, r1, r2;
  for (int i0 = 0; i0 <= a; ++i0) {
    // Top square: append-column after augmentation vs augmentation after the
    // position-0 chain map.
    std::size_t vecs = 0;
    bool ok = true;
    for (int s = 0; s <= max_deg; ++s)
      for (int B = 0; B <= c; ++B)
        for (std::size_t mono = 0; mono < S.dim(s); ++mono) {
          const std::size_t lhs_mod =
              en_augment_index(Lc, S, mod_c, B, s, static_cast<std::uint32_t>(mono));
          const std::size_t lhs = mod_t.scroll_index(
              s + 1, append_column(mod_c.scroll_element(s, lhs_mod), i0, c - b));
          t1.clear();
          alpha_terms(Lc, b, i0, 0, S, s, 0, B, static_cast<std::uint32_t>(mono), 1, t1);
          std::size_t rhs = lhs + 1;
          if (t1.size() == 1 && t1[0].coeff == 1)
            rhs = en_augment_index(Lt, S, mod_t, t1[0].B, s + 1, t1[0].mono);
          ok = ok && lhs == rhs;
          ++vecs;
        }
    os << "i0 " << i0 << " augmentation square: " << vecs << " vectors, "
       << (ok ? "PASS" : "FAIL") << "\n";
    rep.pass = rep.pass && ok;

    for (int n = 1; n <= c; ++n) {
      vecs = 0;
      ok = true;
      for (int s = 0; s <= max_deg; ++s) {
        const int d = n + s;
        const SliceBasis src = en_slice_basis(Lc, S, n, d, false);
        const int s_tgt = (d + 1) - Lt.shapes[static_cast<std::size_t>(n)].gen_degree;
        for (std::uint32_t mask : src.masks)
          for (int B = 0; B < src.v_rank; ++B)
            for (std::size_t mono = 0; mono < src.mono_dim; ++mono) {
              t1.clear();
              r1.clear();
              alpha_terms(Lc, b, i0, n, S, s, mask, B, static_cast<std::uint32_t>(mono), 1, t1);
              for (const Term& t : t1)
                en_diff_terms(Lt, S, n, s_tgt, t.mask, t.B, t.mono, t.coeff, r1);
              t2.clear();
              r2.clear();
              en_diff_terms(Lc, S, n, s, mask, B, static_cast<std::uint32_t>(mono), 1, t2);
              for (const Term& t : t2)
                alpha_terms(Lc, b, i0, n - 1, S, s + 1, t.mask, t.B, t.mono, t.coeff, r2);
              canonicalize(r1);
              canonicalize(r2);
              ok = ok && same_terms(r1, r2);
              ++vecs;
            }
      }
      os << "i0 " << i0 << " n " << n << ": " << vecs << " vectors, " << (ok ? "PASS" : "FAIL")
         << "\n";
      rep.pass = rep.pass && ok;
    }
  }
  os << "overall: " << (rep.pass ? "PASS" : "FAIL") << "\n";
  rep.text = os.str();
  return rep;
}

std::size_t MappingConeLedger::tail_dim(int p) const {
  if (p < 0) return 0;
  return static_cast<std::size_t>(p) * binomial((a + 1) * b, p + 1);
}

std::size_t MappingConeLedger::kernel_correction() const {
  return static_cast<std::size_t>(a) * static_cast<std::size_t>(b + 1) - 1;
}

MappingConeLedger mapping_cone_ledger(int a, int b) {
  if (a < 3 || b < a) fail("InvalidParameters", "mapping cone ledger needs 3 <= a <= b");
  MappingConeLedger led;
  led.a = a;
  led.b = b;
  led.m = (a + 1) * b - 1;
  led.n = a - 1;
  const std::vector<int> e(static_cast<std::size_t>(a) + 1, b);
  std::vector<std::vector<ENShape>> stage_shapes;  // index by stage
  stage_shapes.push_back(en_shapes(e, 0));
  for (int i = 1; i <= led.n; ++i) stage_shapes.push_back(en_shapes(e, (i + 1) * b));

  led.positions.resize(static_cast<std::size_t>(led.m + led.n) + 1);
  for (int p = 0; p <= led.m + led.n; ++p)
    for (int i = 0; i <= std::min(led.n, p); ++i) {
      const int j = p - i;
      if (j > led.m) continue;
      const ENShape& sh = stage_shapes[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      ConeSummand s;
      s.stage = i;
      s.position = j;
      s.copies = i == 0 ? 1
                        : binomial(a, i + 1) * static_cast<std::size_t>(i);
      s.wedge = sh.wedge;
      s.v_index = sh.v_index;
      s.gen_degree = sh.gen_degree + (i == 0 ? 0 : i + 1);
      s.rank = s.copies * sh.rank;
      if (s.rank == 0) continue;  // empty wedge or zero multiplicity
      led.positions[static_cast<std::size_t>(p)].push_back(s);
    }
  return led;
}

namespace {

// Point of the kernel grid {0..a} x {0..b-1}, numbered x*b + y.
std::vector<Label> kernel_domain_labels(int a, int b) {
  const int npts = (a + 1) * b;
  std::vector<Label> out;
  for (std::uint32_t mask : wedge_masks(npts, b))
    for (int h = 1; h <= a - 1; ++h)
      out.push_back((static_cast<Label>(mask) << 8) | static_cast<Label>(h));
  return out;
}

}  // namespace

SparseExactMatrix kernel_map(int a, int b) {
  if (a < 3 || b < a) fail("InvalidParameters", "kernel map needs 3 <= a <= b");
  const int npts = (a + 1) * b;
  if (npts > 24) fail("InvalidParameters", "grid too large for packed masks");

  std::vector<Label> cols = kernel_domain_labels(a, b);
  std::vector<Label> rows;
  for (std::uint32_t mask : wedge_masks(npts, b - 1))
    for (int pid = 0; pid < a * b; ++pid)
      for (int h = 1; h <= a - 2; ++h)
        rows.push_back((static_cast<Label>(mask) << 16) | (static_cast<Label>(pid) << 8) |
                       static_cast<Label>(h));

  std::vector<Triplet> trips;
  for (std::uint32_t mask : wedge_masks(npts, b))
    for (int h = 1; h <= a - 1; ++h) {
      const Label col = (static_cast<Label>(mask) << 8) | static_cast<Label>(h);
      int l = 0;
      for (std::uint32_t m = mask; m; m &= m - 1) {
        const int pid = std::countr_zero(m);
        const int sgn = (++l & 1) ? -1 : 1;  // (-1)^l
        const std::uint32_t rest = mask ^ (std::uint32_t(1) << pid);
        const int x = pid / b;
        // Contract the factor itself, lowering the G index.
        if (x <= a - 1 && within(h - 1, 1, a - 2))
          trips.push_back({(static_cast<Label>(rest) << 16) | (static_cast<Label>(pid) << 8) |
                               static_cast<Label>(h - 1),
                           col, sgn});
        // Contract its left neighbor, keeping the G index.
        if (x >= 1 && within(h, 1, a - 2))
          trips.push_back({(static_cast<Label>(rest) << 16) |
                               (static_cast<Label>(pid - b) << 8) | static_cast<Label>(h),
                           col, -sgn});
      }
    }
  return SparseExactMatrix(rows, cols, trips);
}

SparseExactMatrix kernel_basis_expressions(int a, int b) {
  if (a < 3 || b < a) fail("InvalidParameters", "kernel expressions need 3 <= a <= b");
  const int p = a * (b + 1) - 1;
  std::vector<Label> cols;
  for (int h = 1; h <= p; ++h) cols.push_back(static_cast<Label>(h));

  std::vector<Triplet> trips;
  std::vector<int> prof(static_cast<std::size_t>(b), 0);  // heights i_0..i_{b-1}
  while (true) {
    // The written order is ascending column y; count inversions against the
    // sorted point order to land on the canonical sign.
    std::uint32_t mask = 0;
    int sum = 0, inv = 0;
    for (int k = 0; k < b; ++k) {
      const int pid = prof[static_cast<std::size_t>(k)] * b + k;
      mask |= std::uint32_t(1) << pid;
      sum += prof[static_cast<std::size_t>(k)];
      for (int k2 = 0; k2 < k; ++k2)
        if (prof[static_cast<std::size_t>(k2)] * b + k2 > pid) ++inv;
    }
    const int sgn = (inv & 1) ? -1 : 1;
    for (int g = 1; g <= a - 1; ++g)
      trips.push_back({(static_cast<Label>(mask) << 8) | static_cast<Label>(g),
                       static_cast<Label>(sum + g), sgn});
    int k = b - 1;
    while (k >= 0 && prof[static_cast<std::size_t>(k)] == a) --k;
    if (k < 0) break;
    ++prof[static_cast<std::size_t>(k)];
    for (int k2 = k + 1; k2 < b; ++k2) prof[static_cast<std::size_t>(k2)] = 0;
  }
  return SparseExactMatrix(kernel_domain_labels(a, b), cols, trips);
}

VerifyReport verify_kernel_lemma(int a, int b, const FieldSpec& field) {
  VerifyReport rep;
  std::ostringstream os;
  const auto km = kernel_map(a, b);
  const auto null_basis = km.kernel_basis(field);
  const std::size_t expected = static_cast<std::size_t>(a) * static_cast<std::size_t>(b + 1) - 1;
  os << "kernel description, a=" << a << " b=" << b << ", field " << field.name() << "\n";
  bool ok = null_basis.size() == expected;
  rep.pass = rep.pass && ok;
  os << "map domain " << km.n_cols() << ", null space dim " << null_basis.size() << ", expected "
     << expected << ", " << (ok ? "PASS" : "FAIL") << "\n";

  const auto expr = kernel_basis_expressions(a, b);
  ok = km.compose(expr, field).empty();
  rep.pass = rep.pass && ok;
  os << "all " << expr.n_cols() << " expressions are cycles, " << (ok ? "PASS" : "FAIL") << "\n";

  const std::size_t er = expr.rank(field);
  ok = er == expected;
  rep.pass = rep.pass && ok;
  os << "expression rank " << er << ", " << (ok ? "PASS" : "FAIL") << "\n";

  // Stack the computed null space next to the expressions: the rank must not
  // grow, which pins both down to the same subspace.
  std::vector<Label> cols;
  std::vector<Triplet> trips;
  for (std::size_t k = 0; k < null_basis.size(); ++k) {
    cols.push_back(static_cast<Label>(k));
    for (const auto& [row, val] : null_basis[k].coords)
      trips.push_back({row, static_cast<Label>(k), val});
  }
  const Label off = static_cast<Label>(null_basis.size());
  for (std::size_t k = 0; k < expr.n_cols(); ++k) cols.push_back(off + static_cast<Label>(k));
  const auto& rl = expr.row_labels();
  for (std::size_t r = 0; r < expr.n_rows(); ++r)
    for (std::size_t nz = expr.row_ptr()[r]; nz < expr.row_ptr()[r + 1]; ++nz)
      trips.push_back({rl[r], off + static_cast<Label>(expr.col_idx()[nz]), expr.values()[nz]});
  const SparseExactMatrix joint(km.col_labels(), cols, trips);
  const std::size_t jr = joint.rank(field);
  ok = jr == expected;
  rep.pass = rep.pass && ok;
  os << "joint span rank " << jr << ", " << (ok ? "PASS" : "FAIL") << "\n";
  os << "overall: " << (rep.pass ? "PASS" : "FAIL") << "\n";
  rep.text = os.str();
  return rep;
}

}  // namespace segre
