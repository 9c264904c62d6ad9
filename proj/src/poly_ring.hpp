// Monomial basis of a polynomial ring, one degree at a time: monomials are
// weakly increasing variable tuples in lexicographic order, multiplication is
// table-driven, tables are built lazily per degree. Internal to the library;
// callers fix the variable order (it becomes the basis enumeration).
// Not thread safe; every user owns its instance.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "segre/field.hpp"

namespace segre {
namespace detail {

class PolyRing {
 public:
  explicit PolyRing(int n_vars) : n_(n_vars) {
    if (n_vars < 1 || n_vars > 255) fail("InvalidParameters", "unsupported variable count");
  }

  int n_vars() const { return n_; }
  std::size_t dim(int d) { return level(d).monos.size(); }

  // Index of variable v times basis(d)[idx] inside basis(d+1).
  std::uint32_t mult(int v, int d, std::uint32_t idx) {
    const auto& tab = mult_table(d);
    return tab[static_cast<std::size_t>(v) * level(d).monos.size() + idx];
  }

  const std::vector<std::uint8_t>& vars(int d, std::uint32_t idx) {
    return level(d).monos[idx];
  }

 private:
  struct Level {
    bool built = false;
    std::vector<std::vector<std::uint8_t>> monos;
    std::map<std::vector<std::uint8_t>, std::uint32_t> index;
  };

  const Level& level(int d) {
    if (d < 0) fail("InvalidParameters", "negative coefficient degree");
    if (static_cast<int>(levels_.size()) <= d) levels_.resize(static_cast<std::size_t>(d) + 1);
    Level& L = levels_[static_cast<std::size_t>(d)];
    if (!L.built) {
      std::vector<std::uint8_t> t(static_cast<std::size_t>(d), 0);
      while (true) {
        L.index.emplace(t, static_cast<std::uint32_t>(L.monos.size()));
        L.monos.push_back(t);
        int p = d - 1;
        while (p >= 0 && t[static_cast<std::size_t>(p)] == n_ - 1) --p;
        if (p < 0) break;
        ++t[static_cast<std::size_t>(p)];
        for (int q = p + 1; q < d; ++q) t[static_cast<std::size_t>(q)] = t[static_cast<std::size_t>(p)];
      }
      L.built = true;
    }
    return L;
  }

  const std::vector<std::uint32_t>& mult_table(int d) {
    if (static_cast<int>(mult_.size()) <= d) mult_.resize(static_cast<std::size_t>(d) + 1);
    if (mult_[static_cast<std::size_t>(d)].empty()) {
      level(d + 1);  // build both levels before taking references; level() may resize
      const Level& src = level(d);
      const Level& dst = level(d + 1);
      std::vector<std::uint32_t> tab(static_cast<std::size_t>(n_) * src.monos.size());
      std::vector<std::uint8_t> tmp;
      for (std::size_t i = 0; i < src.monos.size(); ++i)
        for (int v = 0; v < n_; ++v) {
          tmp = src.monos[i];
          tmp.insert(std::lower_bound(tmp.begin(), tmp.end(), static_cast<std::uint8_t>(v)),
                     static_cast<std::uint8_t>(v));
          tab[static_cast<std::size_t>(v) * src.monos.size() + i] = dst.index.at(tmp);
        }
      mult_[static_cast<std::size_t>(d)] = std::move(tab);
    }
    return mult_[static_cast<std::size_t>(d)];
  }

  int n_ = 0;
  std::vector<Level> levels_;
  std::vector<std::vector<std::uint32_t>> mult_;
};

}  // namespace detail
}  // namespace segre
