#include "segre/rings.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <unordered_map>

namespace segre {

namespace {

void check_segre_params(int a, int b) {
  if (a < 1 || a > b)
    fail("InvalidParameters",
         "surface parameters need 1 <= a <= b, got (" + std::to_string(a) + "," + std::to_string(b) + ")");
}

void check_scroll_degrees(const std::vector<int>& e) {
  if (e.empty()) fail("InvalidParameters", "scroll needs at least one column");
  if (e.size() > 6) fail("InvalidParameters", "scrolls with more than 6 columns are not supported");
  for (int d : e)
    if (d < 1) fail("InvalidParameters", "scroll column degrees must be positive");
}

int scroll_height_cap(const std::vector<int>& e, const ScrollBasisElement& x) {
  int cap = x.c;
  for (int i : x.indices) cap += e[static_cast<std::size_t>(i)];
  return cap;
}

void check_scroll_element(const std::vector<int>& e, const ScrollBasisElement& x) {
  if (x.c < 0) fail("InvalidParameters", "negative module twist");
  if (!std::is_sorted(x.indices.begin(), x.indices.end()))
    fail("InvalidParameters", "scroll indices must be weakly increasing");
  for (int i : x.indices)
    if (i < 0 || i >= static_cast<int>(e.size()))
      fail("InvalidParameters", "scroll column index out of range");
  if (x.j < 0 || x.j > scroll_height_cap(e, x))
    fail("InvalidParameters", "scroll height j out of range");
}

}  // namespace

ScrollInvariants scroll_invariants(const std::vector<int>& e) {
  check_scroll_degrees(e);
  return {e, std::accumulate(e.begin(), e.end(), 0)};
}

std::vector<SegreBasisElement> segre_graded_basis(int a, int b, int n) {
  check_segre_params(a, b);
  if (n < 0) fail("InvalidParameters", "negative degree");
  std::vector<SegreBasisElement> out;
  out.reserve(static_cast<std::size_t>(n * a + 1) * static_cast<std::size_t>(n * b + 1));
  for (int i = 0; i <= n * a; ++i)
    for (int j = 0; j <= n * b; ++j) out.push_back({n, i, j});
  return out;
}

SegreBasisElement segre_multiply(int a, int b, const SegreBasisElement& x,
                                 const SegreBasisElement& y) {
  check_segre_params(a, b);
  auto check = [&](const SegreBasisElement& z) {
    if (z.n < 0 || z.i < 0 || z.i > z.n * a || z.j < 0 || z.j > z.n * b)
      fail("InvalidParameters", "monomial outside the graded basis");
  };
  check(x);
  check(y);
  return {x.n + y.n, x.i + y.i, x.j + y.j};
}

std::vector<ScrollBasisElement> scroll_graded_basis(const std::vector<int>& e, int c, int n) {
  check_scroll_degrees(e);
  if (c < 0 || n < 0) fail("InvalidParameters", "negative twist or degree");
  const int l = static_cast<int>(e.size());
  std::vector<ScrollBasisElement> out;
  // Weakly increasing index tuples in lexicographic order.
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    ScrollBasisElement base{idx, c, 0};
    const int cap = scroll_height_cap(e, base);
    for (int j = 0; j <= cap; ++j) {
      base.j = j;
      out.push_back(base);
    }
    int t = n - 1;
    while (t >= 0 && idx[static_cast<std::size_t>(t)] == l - 1) --t;
    if (t < 0) break;
    const int v = ++idx[static_cast<std::size_t>(t)];
    for (int s = t + 1; s < n; ++s) idx[static_cast<std::size_t>(s)] = v;
  }
  return out;
}

ScrollBasisElement scroll_multiply(const std::vector<int>& e, const ScrollBasisElement& x,
                                   const ScrollBasisElement& y) {
  check_scroll_degrees(e);
  check_scroll_element(e, x);
  check_scroll_element(e, y);
  if (x.c > 0 && y.c > 0)
    fail("BothModuleElements", "cannot multiply two module elements; one factor must be a ring element");
  ScrollBasisElement out;
  out.indices.resize(x.indices.size() + y.indices.size());
  std::merge(x.indices.begin(), x.indices.end(), y.indices.begin(), y.indices.end(),
             out.indices.begin());
  out.c = x.c + y.c;
  out.j = x.j + y.j;
  return out;
}

SegreBasisElement scroll_projection(const std::vector<int>& e, const ScrollBasisElement& x,
                                    int offset) {
  check_scroll_degrees(e);
  if (x.c != 0) fail("InvalidParameters", "projection is defined on ring elements only");
  const int b = e.front();
  for (int d : e)
    if (d != b) fail("InvalidParameters", "projection needs all column degrees equal");
  // The caller's column labels start at `offset`; normalize before validating.
  ScrollBasisElement shifted = x;
  const int a = static_cast<int>(e.size()) - 1;
  int sum = 0;
  for (int& i : shifted.indices) {
    i -= offset;
    if (i < 0 || i > a) fail("InvalidParameters", "column index incompatible with offset");
    sum += i;
  }
  check_scroll_element(e, shifted);
  const int n = static_cast<int>(shifted.indices.size());
  return {n, sum, shifted.j};
}

// ---------------------------------------------------------------------------
// MonomialAlgebra
// ---------------------------------------------------------------------------

struct MonomialAlgebra::Table {
  std::size_t dim = 0;
  // Scroll kinds only: packed exponent vector (8 bits per column) and height.
  std::vector<std::pair<std::uint64_t, int>> elems;
  std::unordered_map<std::uint64_t, std::size_t> index;  // (packed << 9 | j) -> idx
};

struct MonomialAlgebra::Cache {
  std::mutex mu;
  std::map<int, Table> tables;  // node stability lets readers hold references
};

MonomialAlgebra MonomialAlgebra::segre(int a, int b) {
  // The algebra handle accepts either factor order (the two projective factors
  // play symmetric roles); the a <= b normalization is enforced at the basis
  // functions and the CLI, where tables are printed in a fixed orientation.
  if (a < 1 || b < 1)
    fail("InvalidParameters", "surface parameters need a >= 1 and b >= 1, got (" +
                                  std::to_string(a) + "," + std::to_string(b) + ")");
  MonomialAlgebra m;
  m.kind_ = Kind::segre;
  m.a_ = a;
  m.b_ = b;
  m.cache_ = std::make_shared<Cache>();
  return m;
}

MonomialAlgebra MonomialAlgebra::scroll(std::vector<int> e) {
  check_scroll_degrees(e);
  MonomialAlgebra m;
  m.kind_ = Kind::scroll;
  m.e_ = std::move(e);
  m.cache_ = std::make_shared<Cache>();
  return m;
}

MonomialAlgebra MonomialAlgebra::scroll_module(std::vector<int> e, int c) {
  check_scroll_degrees(e);
  if (c < 0) fail("InvalidParameters", "negative module twist");
  MonomialAlgebra m;
  m.kind_ = Kind::scroll_module;
  m.e_ = std::move(e);
  m.c_ = c;
  m.cache_ = std::make_shared<Cache>();
  return m;
}

int MonomialAlgebra::n_generators() const {
  if (kind_ == Kind::segre) return (a_ + 1) * (b_ + 1);
  int n = 0;
  for (int d : e_) n += d + 1;
  return n;
}

Bidegree MonomialAlgebra::generator_bidegree(int g) const {
  if (g < 0 || g >= n_generators()) fail("InvalidParameters", "generator index out of range");
  if (kind_ == Kind::segre) return {g / (b_ + 1), g % (b_ + 1)};
  int v = 0, rem = g;
  while (rem > e_[static_cast<std::size_t>(v)]) {
    rem -= e_[static_cast<std::size_t>(v)] + 1;
    ++v;
  }
  return {v, rem};
}

const MonomialAlgebra::Table& MonomialAlgebra::table(int degree) const {
  if (degree < 0) fail("InvalidParameters", "negative degree");
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto it = cache_->tables.find(degree);
  if (it != cache_->tables.end()) return it->second;
  Table t;
  if (kind_ == Kind::segre) {
    t.dim = static_cast<std::size_t>(degree * a_ + 1) * static_cast<std::size_t>(degree * b_ + 1);
  } else {
    const int module_c = kind_ == Kind::scroll_module ? c_ : 0;
    auto basis = scroll_graded_basis(e_, module_c, degree);
    t.dim = basis.size();
    t.elems.reserve(basis.size());
    t.index.reserve(basis.size() * 2);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      std::uint64_t packed = 0;
      for (int i : basis[k].indices) packed += std::uint64_t(1) << (8 * i);
      if (basis[k].j >= 512 || basis[k].indices.size() >= 255)
        fail("InvalidParameters", "scroll degree out of packed-key range");
      t.elems.emplace_back(packed, basis[k].j);
      t.index.emplace((packed << 9) | static_cast<std::uint64_t>(basis[k].j), k);
    }
  }
  return cache_->tables.emplace(degree, std::move(t)).first->second;
}

void MonomialAlgebra::warm(int max_degree) const {
  for (int d = 0; d <= max_degree; ++d) table(d);
}

std::size_t MonomialAlgebra::dim(int degree) const { return table(degree).dim; }

Bidegree MonomialAlgebra::element_bidegree(int degree, std::size_t idx) const {
  if (kind_ == Kind::segre) {
    const std::size_t cols = static_cast<std::size_t>(degree * b_ + 1);
    return {static_cast<int>(idx / cols), static_cast<int>(idx % cols)};
  }
  const auto& [packed, j] = table(degree).elems.at(idx);
  int u1 = 0;
  for (std::size_t v = 0; v < e_.size(); ++v)
    u1 += static_cast<int>(v) * static_cast<int>((packed >> (8 * v)) & 0xff);
  return {u1, j};
}

std::size_t MonomialAlgebra::multiply_index(int g, int degree, std::size_t idx) const {
  if (kind_ == Kind::segre) {
    const std::size_t cols = static_cast<std::size_t>(degree * b_ + 1);
    const int i = static_cast<int>(idx / cols), j = static_cast<int>(idx % cols);
    const Bidegree gb = generator_bidegree(g);
    return static_cast<std::size_t>(i + gb.u1) * static_cast<std::size_t>((degree + 1) * b_ + 1) +
           static_cast<std::size_t>(j + gb.u2);
  }
  const auto& [packed, j] = table(degree).elems.at(idx);
  const Bidegree gb = generator_bidegree(g);
  const std::uint64_t packed2 = packed + (std::uint64_t(1) << (8 * gb.u1));
  const std::uint64_t key = (packed2 << 9) | static_cast<std::uint64_t>(j + gb.u2);
  const auto& tgt = table(degree + 1);
  auto it = tgt.index.find(key);
  if (it == tgt.index.end()) fail("InvalidParameters", "product fell outside the graded basis");
  return it->second;
}

std::optional<std::size_t> MonomialAlgebra::divide_index(int g, int degree,
                                                         std::size_t idx) const {
  if (degree < 1) fail("InvalidParameters", "cannot divide below degree zero");
  const Bidegree gb = generator_bidegree(g);
  if (kind_ == Kind::segre) {
    const std::size_t cols = static_cast<std::size_t>(degree * b_ + 1);
    const int i = static_cast<int>(idx / cols), j = static_cast<int>(idx % cols);
    const int i2 = i - gb.u1, j2 = j - gb.u2;
    if (i2 < 0 || i2 > (degree - 1) * a_ || j2 < 0 || j2 > (degree - 1) * b_) return std::nullopt;
    return static_cast<std::size_t>(i2) * static_cast<std::size_t>((degree - 1) * b_ + 1) +
           static_cast<std::size_t>(j2);
  }
  const auto& [packed, j] = table(degree).elems.at(idx);
  if (((packed >> (8 * gb.u1)) & 0xff) == 0 || j < gb.u2) return std::nullopt;
  const std::uint64_t packed2 = packed - (std::uint64_t(1) << (8 * gb.u1));
  const std::uint64_t key = (packed2 << 9) | static_cast<std::uint64_t>(j - gb.u2);
  const auto& tgt = table(degree - 1);
  auto it = tgt.index.find(key);
  if (it == tgt.index.end()) return std::nullopt;  // quotient violates the height cap
  return it->second;
}

SegreBasisElement MonomialAlgebra::segre_element(int degree, std::size_t idx) const {
  if (kind_ != Kind::segre) fail("InvalidParameters", "not a surface algebra");
  const std::size_t cols = static_cast<std::size_t>(degree * b_ + 1);
  return {degree, static_cast<int>(idx / cols), static_cast<int>(idx % cols)};
}

ScrollBasisElement MonomialAlgebra::scroll_element(int degree, std::size_t idx) const {
  if (kind_ == Kind::segre) fail("InvalidParameters", "not a scroll algebra");
  const auto& [packed, j] = table(degree).elems.at(idx);
  ScrollBasisElement out;
  for (std::size_t v = 0; v < e_.size(); ++v) {
    const int mult = static_cast<int>((packed >> (8 * v)) & 0xff);
    out.indices.insert(out.indices.end(), static_cast<std::size_t>(mult), static_cast<int>(v));
  }
  out.c = kind_ == Kind::scroll_module ? c_ : 0;
  out.j = j;
  return out;
}

std::size_t MonomialAlgebra::scroll_index(int degree, const ScrollBasisElement& x) const {
  if (kind_ == Kind::segre) fail("InvalidParameters", "not a scroll algebra");
  if (static_cast<int>(x.indices.size()) != degree || x.j < 0 || x.j >= 512 ||
      x.c != (kind_ == Kind::scroll_module ? c_ : 0))
    fail("InvalidParameters", "element outside the graded basis");
  std::uint64_t packed = 0;
  for (int i : x.indices) {
    if (i < 0 || i >= static_cast<int>(e_.size()))
      fail("InvalidParameters", "element outside the graded basis");
    packed += std::uint64_t(1) << (8 * i);
  }
  const auto& t = table(degree);
  auto it = t.index.find((packed << 9) | static_cast<std::uint64_t>(x.j));
  if (it == t.index.end()) fail("InvalidParameters", "element outside the graded basis");
  return it->second;
}

std::string MonomialAlgebra::describe() const {
  if (kind_ == Kind::segre)
    return "segre(" + std::to_string(a_) + "," + std::to_string(b_) + ")";
  std::string s = kind_ == Kind::scroll ? "scroll(" : "scroll_module(";
  for (std::size_t i = 0; i < e_.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e_[i]);
  }
  if (kind_ == Kind::scroll_module) s += ";c=" + std::to_string(c_);
  return s + ")";
}

}  // namespace segre
