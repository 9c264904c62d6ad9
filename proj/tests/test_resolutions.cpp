// Resolution-layer tests. The exactness oracle is homology_dim, which also
// certifies that consecutive slice matrices compose to zero; on top of that,
// every complex is checked against the Euler characteristic identity with the
// resolved module's independently enumerated dimensions, so the slice shapes
// cannot silently drift. Kernel dimensions are brute-force null spaces.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <map>

#include "doctest.h"
#include "segre/koszul.hpp"
#include "segre/resolutions.hpp"
#include "segre/rings.hpp"

using namespace segre;

namespace {

const FieldSpec F = FieldSpec::gf(32003);

// Alternating sum of slice dimensions equals the module dimension in every
// degree, no matter what the differentials are.
void check_euler(const ResolutionSlice& sl, std::size_t module_dim) {
  REQUIRE(!sl.maps.empty());
  CHECK(sl.maps[0].n_rows() == module_dim);
  long long chi = 0;
  for (std::size_t t = 0; t < sl.maps.size(); ++t)
    chi += (t % 2 ? -1LL : 1LL) * static_cast<long long>(sl.maps[t].n_cols());
  CHECK(chi == static_cast<long long>(module_dim));
}

}  // namespace

TEST_CASE("scroll module resolution shapes") {
  // Two-row layout, small enough to list by hand: e = (1,2), so f = 3.
  auto s0 = en_shapes({1, 2}, 0);
  REQUIRE(s0.size() == 3);
  CHECK(s0[0].wedge == 0);
  CHECK(s0[0].v_index == 0);
  CHECK(s0[0].gen_degree == 0);
  CHECK(s0[0].rank == 1);
  CHECK(s0[1].wedge == 2);  // relations among the 2x2 minors block
  CHECK(s0[1].v_index == 0);
  CHECK(s0[1].gen_degree == 2);
  CHECK(s0[1].rank == 3);
  CHECK(s0[2].wedge == 3);
  CHECK(s0[2].v_index == 1);
  CHECK(s0[2].gen_degree == 3);
  CHECK(s0[2].rank == 2);

  auto s1 = en_shapes({1, 2}, 1);
  REQUIRE(s1.size() == 3);
  CHECK(s1[0].rank == 2);  // V_1
  CHECK(s1[1].wedge == 1);
  CHECK(s1[1].v_index == 0);
  CHECK(s1[1].gen_degree == 1);
  CHECK(s1[1].rank == 3);
  CHECK(s1[2].wedge == 3);  // junction position right after the first row
  CHECK(s1[2].v_index == 0);
  CHECK(s1[2].gen_degree == 3);
  CHECK(s1[2].rank == 1);

  // c beyond f - 2: the first row is the whole complex.
  auto s3 = en_shapes({1, 2}, 3);
  REQUIRE(s3.size() == 4);
  for (int t = 0; t < 4; ++t) {
    CHECK(s3[static_cast<std::size_t>(t)].wedge == t);
    CHECK(s3[static_cast<std::size_t>(t)].v_index == 3 - t);
    CHECK(s3[static_cast<std::size_t>(t)].gen_degree == t);
  }
  CHECK(s3[1].rank == 3 * 3);

  // Rational normal curve of degree 4: classical ranks C(4,t+1)*t.
  auto curve = en_shapes({4}, 0);
  REQUIRE(curve.size() == 4);
  for (int t = 1; t < 4; ++t)
    CHECK(curve[static_cast<std::size_t>(t)].rank ==
          binomial(4, t + 1) * static_cast<std::size_t>(t));

  // Wider scroll: second row ranks C(8,t+1)*t for t >= 2.
  auto w = en_shapes({2, 3, 3}, 0);
  REQUIRE(w.size() == 8);
  CHECK(w[1].rank == 28);
  for (int t = 2; t < 8; ++t) {
    CHECK(w[static_cast<std::size_t>(t)].rank ==
          binomial(8, t + 1) * static_cast<std::size_t>(t));
    CHECK(w[static_cast<std::size_t>(t)].gen_degree == t + 1);
  }
}

TEST_CASE("scroll module resolution slices: Euler characteristic") {
  for (auto [e, c] : std::vector<std::pair<std::vector<int>, int>>{
           {{1, 2}, 0}, {{1, 2}, 1}, {{1, 2}, 3}, {{2, 3, 3}, 0}, {{3, 3}, 2}}) {
    auto mod = MonomialAlgebra::scroll_module(e, c);
    for (int d = 0; d <= 3; ++d) check_euler(en_resolution_degree_piece(e, c, d), mod.dim(d));
  }
}

TEST_CASE("scroll module resolution is exact and minimal") {
  for (auto [e, c] : std::vector<std::pair<std::vector<int>, int>>{
           {{1, 2}, 0}, {{1, 2}, 1}, {{1, 2}, 3}, {{2, 3, 3}, 0}}) {
    auto rep = verify_en_exactness(e, c, 3, F);
    INFO(rep.text);
    CHECK(rep.pass);
    CHECK(rep.text.find("FAIL") == std::string::npos);
  }
  // Same proof over the rationals for one of them.
  CHECK(verify_en_exactness({1, 2}, 1, 3, FieldSpec::rationals()).pass);
}

TEST_CASE("scroll module resolution slices are deterministic") {
  auto a = en_resolution_degree_piece({2, 3, 3}, 1, 3);
  auto b = en_resolution_degree_piece({2, 3, 3}, 1, 3);
  REQUIRE(a.maps.size() == b.maps.size());
  for (std::size_t t = 0; t < a.maps.size(); ++t) {
    CHECK(a.maps[t].row_labels() == b.maps[t].row_labels());
    CHECK(a.maps[t].col_labels() == b.maps[t].col_labels());
    CHECK(a.maps[t].col_idx() == b.maps[t].col_idx());
    CHECK(a.maps[t].values() == b.maps[t].values());
  }
}

TEST_CASE("relative resolution over the wide scroll") {
  // (2,2): one stage, 0 -> M_4(-2) -> R -> surface ring -> 0.
  for (int d = 0; d <= 4; ++d) {
    auto sl = relative_resolution_degree_piece(2, 2, d);
    REQUIRE(sl.maps.size() == 2);
    check_euler(sl, static_cast<std::size_t>(2 * d + 1) * static_cast<std::size_t>(2 * d + 1));
  }
  auto rep22 = verify_relative_resolution(2, 2, 4, F);
  INFO(rep22.text);
  CHECK(rep22.pass);

  // (3,3): two stages with multiplicities 3 and 2.
  {
    auto sl = relative_resolution_degree_piece(3, 3, 3);
    REQUIRE(sl.maps.size() == 3);
    CHECK(sl.maps[0].n_rows() == 100);
    CHECK(sl.maps[0].n_cols() == 200);   // scroll ring on 4 columns of degree 3
    CHECK(sl.maps[1].n_cols() == 120);   // M_6 in internal degree 1, three copies
    CHECK(sl.maps[2].n_cols() == 20);    // M_9 in internal degree 0, two copies
    check_euler(sl, 100);
  }
  auto rep33 = verify_relative_resolution(3, 3, 3, F);
  INFO(rep33.text);
  CHECK(rep33.pass);
  CHECK(verify_relative_resolution(2, 2, 3, FieldSpec::rationals()).pass);
}

TEST_CASE("column append chain map: degree zero stage") {
  // (1,2), c = b = 2: position 0 sends B_j to b_{i0,j} B_0 (and B_2 via the
  // saturated case, which agrees at j = b). Three columns, one +1 entry each.
  auto m = horizontal_chain_map(1, 2, 0, 0, 2, 0);
  CHECK(m.n_cols() == 3);
  CHECK(m.n_rows() == 6);  // V_0 tensor the degree-1 polynomials, 6 variables
  CHECK(m.n_entries() == 3);
  for (auto v : m.values()) CHECK(v == 1);
  std::size_t rk = m.rank(F);
  CHECK(rk == 3);  // b_{0,0}, b_{0,1}, b_{0,2} are distinct variables

  // Tail stage lands in the junction position of the target resolution.
  auto t = horizontal_chain_map(1, 2, 1, 1, 2, 1);
  CHECK(t.n_cols() > 0);
  CHECK(t.n_entries() > 0);

  CHECK_THROWS_WITH_AS(horizontal_chain_map(2, 2, 0, 5, 4, 5),
                       doctest::Contains("OutOfImplementedRange"), ComputationError);
  CHECK_THROWS_AS(horizontal_chain_map(2, 2, 3, 1, 4, 1), ComputationError);  // i0 > a
  CHECK_THROWS_AS(horizontal_chain_map(2, 2, 0, 1, 3, 1), ComputationError);  // c not a multiple
}

TEST_CASE("column append chain maps commute with the differentials") {
  auto r22 = verify_chain_map_squares(2, 2, 2, 2);
  INFO(r22.text);
  CHECK(r22.pass);
  CHECK(r22.text.find("FAIL") == std::string::npos);

  auto r33 = verify_chain_map_squares(3, 3, 2, 1);
  INFO(r33.text);
  CHECK(r33.pass);

  CHECK_THROWS_AS(verify_chain_map_squares(3, 3, 4, 1), ComputationError);  // p_index > a
  CHECK_THROWS_AS(verify_chain_map_squares(3, 3, 1, 1), ComputationError);  // p_index < 2
}

TEST_CASE("mapping cone ledger") {
  auto led = mapping_cone_ledger(3, 3);
  CHECK(led.m == 11);
  CHECK(led.n == 2);
  REQUIRE(led.positions.size() == 14);

  REQUIRE(led.positions[0].size() == 1);
  CHECK(led.positions[0][0].rank == 1);
  CHECK(led.positions[0][0].gen_degree == 0);

  // p = 1: the minors block of the scroll ring plus the first relative stage.
  REQUIRE(led.positions[1].size() == 2);
  CHECK(led.positions[1][0].stage == 0);
  CHECK(led.positions[1][0].rank == 66);
  CHECK(led.positions[1][0].gen_degree == 2);
  CHECK(led.positions[1][1].stage == 1);
  CHECK(led.positions[1][1].copies == 3);
  CHECK(led.positions[1][1].rank == 21);  // three copies of V_6
  CHECK(led.positions[1][1].gen_degree == 2);

  // p = 11, where the first Betti row overshoots: ranks 11 + 144 + 440.
  REQUIRE(led.positions[11].size() == 3);
  std::map<int, std::size_t> rk11, gd11;
  for (const auto& s : led.positions[11]) {
    rk11[s.stage] = s.rank;
    gd11[s.stage] = static_cast<std::size_t>(s.gen_degree);
  }
  CHECK(rk11[0] == 11);
  CHECK(rk11[1] == 144);
  CHECK(rk11[2] == 440);
  CHECK(gd11[0] == 12);
  CHECK(gd11[1] == 13);
  CHECK(gd11[2] == 12);
  CHECK(led.tail_dim(11) == 11);
  CHECK(led.kernel_correction() == 11);
  // The two pieces of the overshoot reproduce the closed form.
  CHECK(led.tail_dim(11) + led.kernel_correction() == closed_form_first_row(3, 3, 11));

  // p = 12: every surviving summand is generated one degree further out, and
  // the stage-0 contribution has already died.
  REQUIRE(led.positions[12].size() == 2);
  for (const auto& s : led.positions[12]) CHECK(s.gen_degree == 14);
  CHECK(led.tail_dim(12) == 0);

  auto led34 = mapping_cone_ledger(3, 4);
  CHECK(led34.m == 15);
  CHECK(led34.n == 2);
  CHECK(led34.tail_dim(15) == 15);
  REQUIRE(led34.positions[15].size() == 3);
  for (const auto& s : led34.positions[15])
    CHECK(s.gen_degree == (s.stage == 0 ? 16 : 17));
  CHECK(led34.kernel_correction() == 14);
  CHECK(led34.tail_dim(14) + led34.kernel_correction() == closed_form_first_row(3, 4, 14));
  CHECK(led34.tail_dim(14) == 224);

  CHECK_THROWS_AS(mapping_cone_ledger(2, 3), ComputationError);
  CHECK_THROWS_AS(mapping_cone_ledger(4, 3), ComputationError);
}

TEST_CASE("kernel map and its explicit basis") {
  auto km = kernel_map(3, 3);
  CHECK(km.n_cols() == 440);
  // Oracle: the actual null space of the assembled map.
  auto null33 = km.kernel_basis(F);
  CHECK(null33.size() == 11);
  CHECK(km.kernel_basis(FieldSpec::rationals()).size() == 11);

  auto expr = kernel_basis_expressions(3, 3);
  CHECK(expr.n_cols() == 11);
  REQUIRE(expr.row_labels() == km.col_labels());
  CHECK(km.compose(expr, F).empty());  // every expression really is a cycle
  CHECK(expr.rank(F) == 11);
  CHECK(expr.rank(FieldSpec::rationals()) == 11);

  // Spanning: stacking the brute-force kernel next to the expressions does
  // not grow the rank, so they generate the same 11-dimensional space.
  {
    std::vector<Label> cols;
    std::vector<Triplet> trips;
    for (std::size_t k = 0; k < null33.size(); ++k) {
      cols.push_back(static_cast<Label>(k));
      for (const auto& [row, val] : null33[k].coords)
        trips.push_back({row, static_cast<Label>(k), val});
    }
    for (std::size_t k = 0; k < expr.n_cols(); ++k)
      cols.push_back(static_cast<Label>(100 + k));
    const auto& rl = expr.row_labels();
    for (std::size_t r = 0; r < expr.n_rows(); ++r)
      for (std::size_t nz = expr.row_ptr()[r]; nz < expr.row_ptr()[r + 1]; ++nz)
        trips.push_back({rl[r], static_cast<Label>(100 + expr.col_idx()[nz]), expr.values()[nz]});
    SparseExactMatrix joint(km.col_labels(), cols, trips);
    CHECK(joint.rank(F) == 11);
  }

  auto km34 = kernel_map(3, 4);
  CHECK(km34.n_cols() == 3640);
  CHECK(km34.kernel_basis(F).size() == 14);
  auto expr34 = kernel_basis_expressions(3, 4);
  CHECK(expr34.n_cols() == 14);
  CHECK(km34.compose(expr34, F).empty());
  CHECK(expr34.rank(F) == 14);

  CHECK_THROWS_AS(kernel_map(2, 2), ComputationError);  // needs a >= 3
}
