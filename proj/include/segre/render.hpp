// Text renderers: bidegree grids (ascii/csv), Betti tables, and the JSON
// result document. Grid output is byte-stable so tests can diff it against
// stored fixtures.
#pragma once

#include <optional>
#include <string>

#include <segre/koszul.hpp>

namespace segre {

// Inclusive bidegree rectangle to print.
struct GridWindow {
  int u1_min = 0, u1_max = 0;
  int u2_min = 0, u2_max = 0;
};

// Tight bounding box of the nonzero entries; nullopt when the table is empty.
std::optional<GridWindow> tight_window(const BidegreeTable& t);

// Grid of block dimensions over the window (default: tight bounding box).
// Zeros print as "0", cells are single-space separated, every row ends with
// a newline. Default orientation: rows u2 descending, columns u1 ascending.
// rotate: rows u1 ascending, columns u2 ascending.
std::string grid_ascii(const BidegreeTable& t, bool rotate = false,
                       std::optional<GridWindow> window = std::nullopt);

// Same grid with comma separators.
std::string grid_csv(const BidegreeTable& t, bool rotate = false,
                     std::optional<GridWindow> window = std::nullopt);

// Single-entry machine output: parameters, the Betti number, and the block
// list sorted lexicographically by bidegree. Compact one-line JSON; parsing
// and re-serializing reproduces the bytes exactly.
std::string betti_json(const MonomialAlgebra& alg, const FieldSpec& field,
                       const BidegreeTable& t);

// Full-table renderers (rows q = 0..3, columns p = 0..max_p).
std::string betti_table_ascii(const BettiTable& t);
std::string betti_table_csv(const BettiTable& t);
std::string betti_table_json(const BettiTable& t);

}  // namespace segre
