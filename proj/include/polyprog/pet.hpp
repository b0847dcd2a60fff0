// Symbolic PET-induction engine: polynomial systems over Z[m, W, h_1..h_D],
// weight vectors under their ordinal order, the van der Corput linearization
// step, and extraction of the controlling Gowers specification from the
// final linear system.
//
// Ring convention: variable 0 is the coarse variable m, variable 1 is W,
// and the fine variables h_1..h_D sit at indices 2..D+1 (nvars = D+2).
// Every van der Corput step appends two fresh fine variables at the end,
// so older polynomials embed by the identity map on indices.
#pragma once

#include "polyprog/common.hpp"
#include "polyprog/gowers.hpp"
#include "polyprog/multipoly.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace polyprog {

struct PolyNode {
  int id = 0;
  bool active = true;
  MultiPoly R;  // shift polynomial in the system ring
};

// A node set with shift polynomials, one distinguished (always active)
// node, and a subset of inactive nodes. Linearity of a node is always
// measured against the distinguished node: deg_m(R_id - R_alpha0) <= 1.
struct PolySystem {
  static constexpr int kVarM = 0;
  static constexpr int kVarW = 1;

  int D = 0;                    // number of fine variables
  int distinguished = 0;        // node id alpha_0, always active
  std::vector<PolyNode> nodes;  // sorted by id, ids unique and positive

  int nvars() const { return D + 2; }
  int var_h(int j) const;  // ring index of h_j, 1 <= j <= D

  bool has_node(int id) const;
  const PolyNode& node(int id) const;
  int max_id() const;
  std::vector<std::string> var_names() const;  // {"m", "W", "h1", ...}

  bool node_is_linear(int id) const;
  // True when every active node is linear.
  bool is_linear() const;
  std::vector<int> active_ids() const;

  // Non-degeneracy: pairwise R differences non-constant in (m, h_1..h_D);
  // differences of linear pairs non-constant in m; distinguished node
  // present and active; ids unique; ring arities consistent.
  void validate() const;

  std::string describe() const;
};

// d(a, b) = deg_m(R_a - R_b), symmetric and non-archimedean; a != b.
int node_distance(const PolySystem& sys, int a, int b);

// entries[i] counts equivalence classes of active nodes at distance i+1
// from the reference node; trailing zeros are stripped. The order is the
// ordinal one: w < w' iff the topmost differing entry is smaller.
struct WeightVector {
  std::vector<std::int64_t> entries;

  void normalize();
  bool operator==(const WeightVector& o) const { return entries == o.entries; }
  bool operator!=(const WeightVector& o) const { return !(*this == o); }
  bool operator<(const WeightVector& o) const;
  std::string str() const;
};

// Weight of `sys` relative to the active node `ref`: partitions the other
// active nodes by beta ~ gamma iff d(beta, gamma) < d(ref, beta); entry i
// counts the classes at distance i >= 1 (distance-0 nodes are dropped).
WeightVector weight_vector(const PolySystem& sys, int ref);

// Subtracts R from every node polynomial. Distances, linearity flags and
// hence all weights are unchanged (asserted).
PolySystem translate(const PolySystem& sys, const MultiPoly& R);

// The reference node certifying the descent of a step on `target`: the
// active node at minimal positive distance from the target (ties ->
// smallest id; the distinguished node is an eligible candidate).
// Minimality is what makes the descent certificate sound: classes farther
// from the target than the reference are untouched by the step, the
// reference's own class disappears at its distance, and no node can climb
// into that distance from below.  Falls back to the distinguished node
// when no candidate exists (cannot happen for a non-linear target).
int vdc_reference_node(const PolySystem& sys, int target);

// One van der Corput step on a non-linear active target node: normalizes
// R_target = 0 by translation, deactivates the distance-0 set A0 (R kept),
// and re-centers the remainder A1 twice with two fresh fine variables:
// the m+h_{D+1} copy keeps node ids, the m+h_{D+2} copy gets fresh ids.
// Asserts weight_vector(result, vdc_reference_node(sys, target)) <
// weight_vector(sys, target) and re-validates the result.
PolySystem vdc_step(const PolySystem& sys, int target);

struct LinearizeStep {
  int target = 0;              // eliminated node
  MultiPoly translation;       // R subtracted before the step (pre-step ring)
  std::string translation_str;
  int reference = 0;           // node certifying the descent
  WeightVector weight_before;  // relative to target, before the step
  WeightVector weight_after;   // relative to reference, after the step
  int fine_var_lo = 0;         // 1-based labels of the two fresh fine vars
  int fine_var_hi = 0;
  std::vector<std::pair<int, int>> duplicates;  // original id -> copy id
  int node_count_after = 0;
};

struct LinearizedResult {
  PolySystem final_system;  // linear; distinguished polynomial normalized to 0
  std::vector<LinearizeStep> steps;
  std::vector<int> linear_ids;     // A_l: linear active nodes != alpha_0
  std::vector<int> nonlinear_ids;  // A_nl: non-linear (inactive) nodes
  std::vector<MultiPoly> b;        // R_alpha = b_alpha*m + c_alpha, system ring
  std::vector<MultiPoly> c;
  // Q0 = sum_alpha b_alpha * m_alpha in the ring (h_1..h_t, W, m_alpha...):
  // h's at 0..t-1, W at t, the |A_l| coarse shifts m_alpha from t+1 on.
  MultiPoly Q0;
  // Steps Q_i = b_alpha in the ring (h_1..h_t, W), padded with constant-1
  // components to d >= 2; H, sqrtM, Wval are left at defaults (1) for the
  // caller to fill in before evaluating norms.
  GowersSpec gowers_spec;
};

// Full PET induction: repeatedly applies vdc_step to the non-linear active
// node closest to the distinguished node (ties -> smallest id) until every
// active node is linear, then reads off the Gowers specification.
LinearizedResult linearize(const PolySystem& sys);

// Base system of a progression family: D = 0, nodes 1..k all active,
// distinguished node 1, R_i = P_i(W*m)/W when w_symbolic (requires
// P_i(0) = 0 for integrality) and R_i = P_i(m) otherwise. The P_i are
// univariate in m and must be pairwise distinct.
PolySystem make_system(const std::vector<MultiPoly>& P, bool w_symbolic);

// CLI input: one polynomial in m per line, e.g. "m^2 - m"; blank lines and
// lines starting with '#' are skipped.
std::vector<MultiPoly> parse_poly_family(const std::string& text);

}  // namespace polyprog
