// Free resolutions behind the strand computations: the determinantal
// resolution of scroll modules, the relative resolution of the surface ring
// over the wide scroll, the horizontal chain maps between consecutive stages,
// the mapping-cone bookkeeping, and the explicit kernel basis that accounts
// for the extra syzygies in the first row of the Betti table.
//
// No symbolic polynomial matrices are ever materialized. Every map is
// produced one ambient-degree slice at a time as a SparseExactMatrix with
// integer entries; exactness, minimality and commutation checks all reduce
// to ranks of slices over the requested field.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segre/matrix.hpp"
#include "segre/rings.hpp"

namespace segre {

// One free module in the scroll-module resolution, wedge^m F (x) V_n with
// generators in degree gen_degree. F has rank f = sum of column degrees, one
// generator f_{i,j} per column i and height 1 <= j <= e_i; V_n is free of
// rank n+1 with basis B_0..B_n.
struct ENShape {
  int wedge = 0;
  int v_index = 0;      // rank of the V factor minus one
  int gen_degree = 0;   // generators sit in this degree (the twist)
  std::size_t rank = 0; // C(f, wedge) * (v_index + 1)
};

// Position-by-position layout of the resolution of the module M_c over the
// polynomial ring on the scroll coordinates:
//
//   position 0:                    V_c
//   position t, 1 <= t <= c:       wedge^t F (x) V_{c-t}        gen degree t
//   position c+1 (when c+2 <= f):  wedge^{c+2} F                gen degree c+2
//   position t, c+2 <= t <= f-1:   wedge^{t+1} F (x) V_{t-c-1}  gen degree t+1
std::vector<ENShape> en_shapes(const std::vector<int>& e, int c);

// A full complex restricted to one ambient degree. maps[0] is the
// augmentation onto the resolved module's degree piece; maps[t] for t >= 1
// is the differential from position t to position t-1. Consecutive maps
// compose to zero by construction (checked when homology is taken).
struct ResolutionSlice {
  int degree = 0;
  std::vector<SparseExactMatrix> maps;
};

ResolutionSlice en_resolution_degree_piece(const std::vector<int>& e, int c, int deg);

// Pass/fail summary with one line per individual check.
struct VerifyReport {
  bool pass = true;
  std::string text;
};

// Checks, for every ambient degree <= max_deg: the augmentation is onto, all
// homology along the complex vanishes (including the left end), and the
// differentials are minimal (no entry of degree zero, witnessed by strictly
// increasing generator degrees and empty constant blocks).
VerifyReport verify_en_exactness(const std::vector<int>& e, int c, int max_deg,
                                 const FieldSpec& field = FieldSpec::gf(32003));

// Resolution of the (a,b) surface ring by modules over the scroll ring with
// a+1 columns of degree b. Position 0 is the scroll ring itself; position i
// for 1 <= i <= a-1 is M_{(i+1)b} tensored with wedge^{i+1} G (x) G_i, where
// G is an a-dimensional space with basis g_1..g_a and G_i the span of
// g_1..g_i. maps[0] is the projection onto the surface ring's degree piece.
ResolutionSlice relative_resolution_degree_piece(int a, int b, int deg);

VerifyReport verify_relative_resolution(int a, int b, int max_deg,
                                        const FieldSpec& field = FieldSpec::gf(32003));

// The chain map alpha_{i0,n} covering the column-append map M_c -> M_{c-b},
// b_{I,c,j} -> b_{I+{i0},c-b,j}, between the two resolutions. It sends
// position n of the resolution of M_c (ambient degree deg) into position n
// of the resolution of M_{c-b} (ambient degree deg+1): onto
// wedge^n F (x) V_{c-b-n} while n <= c-b, and onto wedge^{n+1} F (x)
// V_{n-c+b-1} beyond that. Requires c a positive multiple of b and
// 0 <= i0 <= a; positions n > c are not constructed (OutOfImplementedRange).
SparseExactMatrix horizontal_chain_map(int a, int b, int i0, int n, int c, int deg);

// For c = p_index*b, checks every square of the ladder: the top square
// (augmentations against the column-append map) and, for 1 <= n <= c,
// vertical-after-alpha_n equals alpha_{n-1}-after-vertical, for every column
// i0 in 0..a. Slices are indexed by the degree s of the polynomial
// coefficients, s = 0..max_deg; equality is checked with integer
// coefficients, so it holds over every field at once.
VerifyReport verify_chain_map_squares(int a, int b, int p_index, int max_deg);

// Bookkeeping for the resolution of the surface ring over the polynomial
// ring obtained by stacking the scroll-module resolutions along the relative
// resolution (an iterated mapping cone; the differentials between stages are
// never needed, only the shapes). Position p collects summands Q_{i,j} with
// i+j = p, where i is the relative-resolution stage and j the position
// inside that stage's resolution.
struct ConeSummand {
  int stage = 0;
  int position = 0;
  std::size_t copies = 0; // dim of the wedge^{i+1} G (x) G_i multiplicity
  int wedge = 0;
  int v_index = 0;
  int gen_degree = 0;     // p+1 or p+2; the stage-0 tail at j = 0 sits in 0
  std::size_t rank = 0;   // copies * C(f, wedge) * (v_index + 1)
};

struct MappingConeLedger {
  int a = 0, b = 0;
  int m = 0;  // last position of the stage-0 resolution, (a+1)b - 1
  int n = 0;  // last relative-resolution stage, a - 1
  std::vector<std::vector<ConeSummand>> positions; // positions[p], p = 0..m+n

  // Dimension of the stage-0 summand at position p after killing every
  // positive-degree coefficient: p * C((a+1)b, p+1).
  std::size_t tail_dim(int p) const;
  // Size of the correction accounted for by the kernel basis: a(b+1) - 1.
  std::size_t kernel_correction() const;
};

MappingConeLedger mapping_cone_ledger(int a, int b);

// The kernel computation that produces the correction term. W is the span of
// v_P for P in the grid {0..a} x {0..b-1}; the map goes from
// wedge^b W (x) G_{a-1} to wedge^{b-1} W (x) W' (x) G_{a-2} with W' spanned
// by the points with first coordinate at most a-1:
//
//   v_{P_1}^..^v_{P_b} (x) g_h ->
//       sum_l (-1)^l (drop l) (x) v_{P_l}        (x) g_{h-1}
//     - sum_l (-1)^l (drop l) (x) v_{P_l-(1,0)}  (x) g_h
//
// where terms whose middle point leaves the smaller grid or whose g index
// leaves its range are dropped.
SparseExactMatrix kernel_map(int a, int b);

// The explicit kernel vectors, one per h with 1 <= h <= a(b+1)-1: the sum of
// v_{(i_0,0)}^v_{(i_1,1)}^..^v_{(i_{b-1},b-1)} (x) g_{h-sum} over all height
// profiles 0 <= i_k <= a keeping 1 <= h-sum <= a-1. Returned as the columns
// of a matrix whose rows are the domain basis of kernel_map, so membership
// and span checks compose directly.
SparseExactMatrix kernel_basis_expressions(int a, int b);

// Full check of the kernel description: the null space of kernel_map has
// dimension a(b+1)-1, every explicit expression lies in it, the expressions
// are independent, and together with the computed null space they span the
// same subspace.
VerifyReport verify_kernel_lemma(int a, int b, const FieldSpec& field = FieldSpec::gf(32003));

}  // namespace segre
