#include "polyprog/pet.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace polyprog {

namespace {

// deg_m of a polynomial in a system ring; 0 for polynomials free of m
// (including the zero polynomial, where degree_in reports -inf).
int deg_m(const MultiPoly& p) {
  int d = p.degree_in(PolySystem::kVarM);
  return d < 0 ? 0 : d;
}

int distance_of(const MultiPoly& Ra, const MultiPoly& Rb) {
  return deg_m(Ra - Rb);
}

}  // namespace

// ---------------------------------------------------------------------------
// PolySystem
// ---------------------------------------------------------------------------

int PolySystem::var_h(int j) const {
  if (j < 1 || j > D) {
    throw PreconditionError("fine variable index " + std::to_string(j) +
                            " outside 1.." + std::to_string(D));
  }
  return 1 + j;
}

bool PolySystem::has_node(int id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return true;
  }
  return false;
}

const PolyNode& PolySystem::node(int id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return n;
  }
  throw PreconditionError("no node with id " + std::to_string(id));
}

int PolySystem::max_id() const {
  int m = 0;
  for (const auto& n : nodes) m = std::max(m, n.id);
  return m;
}

std::vector<std::string> PolySystem::var_names() const {
  std::vector<std::string> names = {"m", "W"};
  for (int j = 1; j <= D; ++j) names.push_back("h" + std::to_string(j));
  return names;
}

bool PolySystem::node_is_linear(int id) const {
  const MultiPoly diff = node(id).R - node(distinguished).R;
  return diff.degree_in(kVarM) <= 1;
}

bool PolySystem::is_linear() const {
  for (const auto& n : nodes) {
    if (n.active && !node_is_linear(n.id)) return false;
  }
  return true;
}

std::vector<int> PolySystem::active_ids() const {
  std::vector<int> ids;
  for (const auto& n : nodes) {
    if (n.active) ids.push_back(n.id);
  }
  return ids;
}

void PolySystem::validate() const {
  if (D < 0) throw PreconditionError("negative fine degree count");
  if (nodes.empty()) throw PreconditionError("system has no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id <= 0) throw PreconditionError("non-positive node id");
    if (i > 0 && nodes[i - 1].id >= nodes[i].id) {
      throw PreconditionError("node ids not strictly increasing");
    }
    if (nodes[i].R.nvars() != nvars()) {
      throw PreconditionError("node " + std::to_string(nodes[i].id) +
                              " polynomial has arity " +
                              std::to_string(nodes[i].R.nvars()) +
                              ", system ring has " + std::to_string(nvars()));
    }
  }
  if (!has_node(distinguished)) {
    throw PreconditionError("distinguished node " +
                            std::to_string(distinguished) + " missing");
  }
  if (!node(distinguished).active) {
    throw PreconditionError("distinguished node is inactive");
  }
  const MultiPoly& R0 = node(distinguished).R;
  std::vector<bool> linear(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    linear[i] = (nodes[i].R - R0).degree_in(kVarM) <= 1;
  }
  // Both degeneracy conditions are equalities of term subsets: two nodes
  // differ by a constant in (m, h) exactly when their terms involving m or
  // some fine variable agree, and two nodes differ by a constant in m
  // exactly when their terms with positive m-exponent agree.  Bucketing the
  // serialized subsets finds any offending pair in one pass per check.
  const auto subset_key = [this](const MultiPoly& p, bool m_only) {
    std::string key;
    for (const auto& [exps, c] : p.terms()) {
      bool keep = exps[static_cast<std::size_t>(kVarM)] > 0;
      if (!keep && !m_only) {
        for (int j = 1; j <= D && !keep; ++j) {
          keep = exps[static_cast<std::size_t>(var_h(j))] > 0;
        }
      }
      if (!keep) continue;
      for (const auto e : exps) {
        key += std::to_string(e);
        key += ',';
      }
      key += c.str();
      key += ';';
    }
    return key;
  };
  std::unordered_map<std::string, int> first_with_key;
  for (const auto& n : nodes) {
    const auto [it, inserted] =
        first_with_key.try_emplace(subset_key(n.R, false), n.id);
    if (!inserted) {
      throw PreconditionError("degenerate system: difference of nodes " +
                              std::to_string(it->second) + ", " +
                              std::to_string(n.id) + " is constant in (m, h)");
    }
  }
  first_with_key.clear();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!linear[i]) continue;
    const auto [it, inserted] =
        first_with_key.try_emplace(subset_key(nodes[i].R, true), nodes[i].id);
    if (!inserted) {
      throw PreconditionError("degenerate system: linear nodes " +
                              std::to_string(it->second) + ", " +
                              std::to_string(nodes[i].id) +
                              " differ by a constant in m");
    }
  }
}

std::string PolySystem::describe() const {
  std::ostringstream os;
  const auto names = var_names();
  os << "system: D=" << D << ", distinguished=" << distinguished << "\n";
  for (const auto& n : nodes) {
    os << "  node " << n.id << (n.active ? "  active  " : "  inactive")
       << (n.id == distinguished ? " *" : "  ") << " R = " << n.R.str(names)
       << "\n";
  }
  return os.str();
}

int node_distance(const PolySystem& sys, int a, int b) {
  if (a == b) {
    throw PreconditionError("node distance requires distinct nodes, got id " +
                            std::to_string(a) + " twice");
  }
  return distance_of(sys.node(a).R, sys.node(b).R);
}

// ---------------------------------------------------------------------------
// Weight vectors
// ---------------------------------------------------------------------------

void WeightVector::normalize() {
  while (!entries.empty() && entries.back() == 0) entries.pop_back();
}

bool WeightVector::operator<(const WeightVector& o) const {
  const std::size_t top = std::max(entries.size(), o.entries.size());
  for (std::size_t i = top; i-- > 0;) {
    const std::int64_t a = i < entries.size() ? entries[i] : 0;
    const std::int64_t b = i < o.entries.size() ? o.entries[i] : 0;
    if (a != b) return a < b;
  }
  return false;
}

std::string WeightVector::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(entries[i]);
  }
  return out + ")";
}

namespace {

// Canonical text key for a polynomial, used to bucket equal coefficient
// polynomials without pairwise comparisons.
std::string poly_key(const MultiPoly& p) {
  static std::vector<std::string> names;
  while (static_cast<int>(names.size()) < p.nvars()) {
    names.push_back("v" + std::to_string(names.size()));
  }
  return p.str(names);
}

}  // namespace

WeightVector weight_vector(const PolySystem& sys, int ref) {
  if (!sys.node(ref).active) {
    throw PreconditionError("weight vector reference node " +
                            std::to_string(ref) + " is inactive");
  }
  // Two nodes at distance i from ref are equivalent exactly when their
  // difference polynomials agree on the m^i coefficient: agreement above i
  // is automatic because both differences have m-degree exactly i.  The
  // class count at level i is therefore the number of distinct m^i
  // coefficients, which needs only one pass over the active nodes.
  const MultiPoly& r_ref = sys.node(ref).R;
  std::map<int, std::set<std::string>> classes_at;
  for (int id : sys.active_ids()) {
    if (id == ref) continue;
    const MultiPoly diff = sys.node(id).R - r_ref;
    const int dist = diff.degree_in(PolySystem::kVarM);
    if (dist < 1) continue;
    auto coeffs = diff.coeffs_in(PolySystem::kVarM);
    classes_at[dist].insert(poly_key(coeffs[static_cast<std::size_t>(dist)]));
  }
  WeightVector w;
  for (const auto& [dist, keys] : classes_at) {
    if (static_cast<std::size_t>(dist) > w.entries.size()) {
      w.entries.resize(static_cast<std::size_t>(dist), 0);
    }
    w.entries[static_cast<std::size_t>(dist) - 1] =
        static_cast<std::int64_t>(keys.size());
  }
  w.normalize();
  return w;
}

// ---------------------------------------------------------------------------
// Translation
// ---------------------------------------------------------------------------

PolySystem translate(const PolySystem& sys, const MultiPoly& R) {
  if (R.nvars() != sys.nvars()) {
    throw PreconditionError("translation polynomial has arity " +
                            std::to_string(R.nvars()) +
                            ", system ring has " + std::to_string(sys.nvars()));
  }
  PolySystem out = sys;
  for (auto& n : out.nodes) n.R = n.R - R;
  // Differences R_a - R_b are untouched by a common shift, so distances and
  // linearity flags must agree exactly with the input system.  The pairwise
  // distance audit is quadratic, so it only runs on small systems; linearity
  // flags are always re-checked.
  constexpr std::size_t kAuditLimit = 48;
  for (std::size_t i = 0; i < sys.nodes.size(); ++i) {
    const int id = sys.nodes[i].id;
    if (sys.node_is_linear(id) != out.node_is_linear(id)) {
      throw InvariantError("translation changed linearity of node " +
                               std::to_string(id),
                           sys.describe() + out.describe());
    }
    if (sys.nodes.size() > kAuditLimit) continue;
    for (std::size_t j = i + 1; j < sys.nodes.size(); ++j) {
      if (node_distance(sys, id, sys.nodes[j].id) !=
          node_distance(out, id, out.nodes[j].id)) {
        throw InvariantError("translation changed a node distance",
                             sys.describe() + out.describe());
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Van der Corput step
// ---------------------------------------------------------------------------

int vdc_reference_node(const PolySystem& sys, int target) {
  // The descent certificate needs a reference at minimal positive distance
  // from the target: every class strictly farther out is preserved verbatim,
  // the reference's own class drops out at that distance, and by minimality
  // no node can move up into it from below.
  int best = -1;
  int best_dist = 0;
  for (int id : sys.active_ids()) {
    if (id == target) continue;
    const int dist = node_distance(sys, target, id);
    if (dist == 0) continue;  // in A0
    if (best < 0 || dist < best_dist || (dist == best_dist && id < best)) {
      best = id;
      best_dist = dist;
    }
  }
  return best < 0 ? sys.distinguished : best;
}

PolySystem vdc_step(const PolySystem& sys, int target) {
  const PolyNode& tgt = sys.node(target);
  if (!tgt.active) {
    throw PreconditionError("van der Corput target node " +
                            std::to_string(target) + " is inactive");
  }
  if (sys.node_is_linear(target)) {
    throw PreconditionError("van der Corput target node " +
                            std::to_string(target) + " is linear");
  }
  const WeightVector w_before = weight_vector(sys, target);
  const int reference = vdc_reference_node(sys, target);

  const PolySystem base = translate(sys, tgt.R);

  PolySystem out;
  out.D = sys.D + 2;
  out.distinguished = sys.distinguished;
  const int old_nvars = sys.nvars();
  const int new_nvars = out.nvars();
  std::vector<int> embed(static_cast<std::size_t>(old_nvars));
  std::iota(embed.begin(), embed.end(), 0);

  // Substitution images sending m to m + h_{D+1} resp. m + h_{D+2}; all
  // other variables map to themselves in the enlarged ring.
  auto shifted_images = [&](int h_index) {
    std::vector<MultiPoly> images;
    images.reserve(static_cast<std::size_t>(new_nvars));
    images.push_back(MultiPoly::variable(new_nvars, PolySystem::kVarM) +
                     MultiPoly::variable(new_nvars, h_index));
    for (int v = 1; v < new_nvars; ++v) {
      images.push_back(MultiPoly::variable(new_nvars, v));
    }
    return images;
  };
  const auto images_h = shifted_images(out.var_h(out.D - 1));
  const auto images_hp = shifted_images(out.var_h(out.D));

  std::vector<const PolyNode*> a1;
  for (const auto& n : base.nodes) {
    const bool in_a0 =
        n.id == target || node_distance(base, target, n.id) == 0;
    PolyNode copy;
    copy.id = n.id;
    if (in_a0) {
      copy.active = false;
      copy.R = n.R.remap(new_nvars, embed);
    } else {
      copy.active = n.active;
      copy.R = n.R.remap(new_nvars, embed).substitute(images_h);
      a1.push_back(&n);
    }
    out.nodes.push_back(std::move(copy));
  }
  int next_id = sys.max_id();
  for (const PolyNode* n : a1) {
    PolyNode dup;
    dup.id = ++next_id;
    dup.active = n->active;
    dup.R = n->R.remap(new_nvars, embed).substitute(images_hp);
    out.nodes.push_back(std::move(dup));
  }
  std::sort(out.nodes.begin(), out.nodes.end(),
            [](const PolyNode& a, const PolyNode& b) { return a.id < b.id; });

  out.validate();
  const WeightVector w_after = weight_vector(out, reference);
  if (!(w_after < w_before)) {
    throw InvariantError(
        "van der Corput step failed to decrease the weight: " +
            w_after.str() + " relative to node " + std::to_string(reference) +
            " is not below " + w_before.str() + " relative to node " +
            std::to_string(target),
        sys.describe() + out.describe());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full linearization
// ---------------------------------------------------------------------------

namespace {

constexpr std::int64_t kStepBudget = 500;
constexpr std::size_t kNodeBudget = 20'000;

// Next van der Corput target; -1 when the system is linear.
int pick_target(const PolySystem& sys) {
  // Targets the non-linear active node farthest from the distinguished node.
  // Eliminating the deepest classes first drives the induction to
  // completion: any step spent on a shallower node duplicates every deeper
  // node, so the deep population must be cleared while it is small.  Ties
  // are broken towards the node sharing its polynomial up to constants with
  // the most other actives (a "harvest" step deactivates that whole group
  // at once), then towards the smallest id.  Duplicate pairs created by a
  // step land a distance below their source, so repeated harvesting at the
  // deepest level shrinks its group count by one per step until it empties.
  const int alpha0 = sys.distinguished;
  const MultiPoly& r0 = sys.node(alpha0).R;
  struct Cand {
    int id = -1;
    int dist = 0;
    std::string tail;  // all m-coefficients above the constant term
  };
  std::vector<Cand> cands;
  std::unordered_map<std::string, int> cluster_size;
  for (int id : sys.active_ids()) {
    if (id == alpha0) continue;
    const MultiPoly diff = sys.node(id).R - r0;
    const int dist = deg_m(diff);
    auto coeffs = diff.coeffs_in(PolySystem::kVarM);
    std::string tail;
    for (std::size_t k = 1; k < coeffs.size(); ++k) {
      tail += poly_key(coeffs[k]);
      tail += '|';
    }
    ++cluster_size[tail];
    if (dist >= 2) cands.push_back({id, dist, std::move(tail)});
  }
  int best = -1, best_dist = 0, best_cluster = 0;
  for (const Cand& c : cands) {
    const int cluster = cluster_size[c.tail];
    if (best < 0 || c.dist > best_dist ||
        (c.dist == best_dist &&
         (cluster > best_cluster || (cluster == best_cluster && c.id < best)))) {
      best = c.id;
      best_dist = c.dist;
      best_cluster = cluster;
    }
  }
  return best;
}

std::string trace_of(const std::vector<LinearizeStep>& steps) {
  std::ostringstream os;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    os << "step " << i + 1 << ": target " << steps[i].target << ", weight "
       << steps[i].weight_before.str() << " -> " << steps[i].weight_after.str()
       << " (reference " << steps[i].reference << ", "
       << steps[i].node_count_after << " nodes)\n";
  }
  return os.str();
}

}  // namespace

LinearizedResult linearize(const PolySystem& sys) {
  sys.validate();
  LinearizedResult result;
  PolySystem current = sys;

  while (true) {
    const int target = pick_target(current);
    if (target < 0) break;
    if (static_cast<std::int64_t>(result.steps.size()) >= kStepBudget) {
      throw BudgetError("linearization exceeded " +
                        std::to_string(kStepBudget) + " steps");
    }
    if (current.nodes.size() > kNodeBudget) {
      throw BudgetError("linearization exceeded " +
                        std::to_string(kNodeBudget) + " nodes");
    }
    LinearizeStep step;
    step.target = target;
    step.translation = current.node(target).R;
    step.translation_str = step.translation.str(current.var_names());
    step.reference = vdc_reference_node(current, target);
    step.weight_before = weight_vector(current, target);
    const int old_max = current.max_id();
    PolySystem next = vdc_step(current, target);
    step.weight_after = weight_vector(next, step.reference);
    step.fine_var_lo = next.D - 1;
    step.fine_var_hi = next.D;
    int copy_id = old_max;
    for (const auto& n : current.nodes) {
      if (n.id == target || node_distance(current, target, n.id) == 0) {
        continue;
      }
      step.duplicates.emplace_back(n.id, ++copy_id);
    }
    step.node_count_after = static_cast<int>(next.nodes.size());
    result.steps.push_back(std::move(step));
    // Re-normalize so the distinguished polynomial is zero.  Translation
    // changes no distance, weight, or flag, but it keeps every stored
    // polynomial the size of a difference, which is what bounds the cost of
    // the later steps on large systems.
    current = translate(next, next.node(next.distinguished).R);
  }

  // Extraction: normalize the distinguished polynomial to zero and read
  // off R_alpha = b_alpha*m + c_alpha over the linear active nodes.
  result.final_system =
      translate(current, current.node(current.distinguished).R);
  const PolySystem& fin = result.final_system;
  const MultiPoly zero(fin.nvars());
  for (const auto& n : fin.nodes) {
    if (n.id == fin.distinguished) continue;
    if (n.active) {
      result.linear_ids.push_back(n.id);
    } else if (!fin.node_is_linear(n.id)) {
      result.nonlinear_ids.push_back(n.id);
    }
  }
  for (int id : result.linear_ids) {
    const MultiPoly& R = fin.node(id).R;
    if (R.degree_in(PolySystem::kVarM) > 1) {
      throw InvariantError("linear system has active node " +
                               std::to_string(id) + " of m-degree " +
                               std::to_string(R.degree_in(PolySystem::kVarM)),
                           trace_of(result.steps) + fin.describe());
    }
    auto coeffs = R.coeffs_in(PolySystem::kVarM);
    result.c.push_back(coeffs.empty() ? zero : coeffs[0]);
    result.b.push_back(coeffs.size() > 1 ? coeffs[1] : zero);
  }
  for (std::size_t i = 0; i < result.b.size(); ++i) {
    if (result.b[i].is_zero()) {
      throw InvariantError("vanishing coarse coefficient b at node " +
                               std::to_string(result.linear_ids[i]),
                           trace_of(result.steps) + fin.describe());
    }
    for (std::size_t j = i + 1; j < result.b.size(); ++j) {
      if (result.b[i] == result.b[j]) {
        throw InvariantError(
            "coinciding coarse coefficients b at nodes " +
                std::to_string(result.linear_ids[i]) + " and " +
                std::to_string(result.linear_ids[j]),
            trace_of(result.steps) + fin.describe());
      }
    }
  }

  // Move b into the Gowers ring (h_1..h_t, W): system variable m never
  // occurs in b, W goes to index t, h_j to index j-1.
  const int t = fin.D;
  std::vector<int> to_gowers(static_cast<std::size_t>(fin.nvars()));
  to_gowers[PolySystem::kVarM] = t;  // unused: b is m-free (checked above)
  to_gowers[PolySystem::kVarW] = t;
  for (int j = 1; j <= t; ++j) to_gowers[static_cast<std::size_t>(1 + j)] = j - 1;

  GowersSpec spec;
  spec.t = t;
  const std::size_t L = result.b.size();
  for (std::size_t i = 0; i < L; ++i) {
    if (result.b[i].degree_in(PolySystem::kVarM) > 0) {
      throw InvariantError("coarse coefficient b depends on m",
                           fin.describe());
    }
    spec.Q.push_back(result.b[i].remap(t + 1, to_gowers));
  }
  while (spec.Q.size() < 2) {
    spec.Q.push_back(MultiPoly::constant(t + 1, 1));
  }
  spec.d = static_cast<int>(spec.Q.size());
  spec.validate();
  result.gowers_spec = spec;

  // Q0 = sum_alpha b_alpha * m_alpha with the coarse shifts m_alpha
  // appended after (h_1..h_t, W).
  const int q0_nvars = t + 1 + static_cast<int>(L);
  std::vector<int> widen(static_cast<std::size_t>(t) + 1);
  std::iota(widen.begin(), widen.end(), 0);
  MultiPoly q0(q0_nvars);
  for (std::size_t i = 0; i < L; ++i) {
    q0 += spec.Q[i].remap(q0_nvars, widen) *
          MultiPoly::variable(q0_nvars, t + 1 + static_cast<int>(i));
  }
  result.Q0 = q0;
  return result;
}

// ---------------------------------------------------------------------------
// Base systems and CLI input
// ---------------------------------------------------------------------------

PolySystem make_system(const std::vector<MultiPoly>& P, bool w_symbolic) {
  if (P.empty()) throw PreconditionError("empty polynomial family");
  for (std::size_t i = 0; i < P.size(); ++i) {
    if (P[i].nvars() != 1) {
      throw PreconditionError("family polynomials must be univariate in m");
    }
    for (std::size_t j = i + 1; j < P.size(); ++j) {
      if (P[i] == P[j]) {
        throw PreconditionError("duplicate polynomials at positions " +
                                std::to_string(i + 1) + " and " +
                                std::to_string(j + 1));
      }
    }
  }
  PolySystem sys;
  sys.D = 0;
  sys.distinguished = 1;
  const int nv = sys.nvars();
  for (std::size_t i = 0; i < P.size(); ++i) {
    PolyNode n;
    n.id = static_cast<int>(i) + 1;
    n.active = true;
    if (w_symbolic) {
      if (!P[i].coeff(Monomial{0}).is_zero()) {
        throw PreconditionError(
            "P_" + std::to_string(i + 1) +
            " has a non-zero constant term; P_i(W m)/W is not integral");
      }
      // P_i(W m)/W: substitute m -> W*m, then strip one W from every term
      // (each has m-degree >= 1, hence W-degree >= 1 after substitution).
      const MultiPoly wm = MultiPoly::variable(nv, PolySystem::kVarM) *
                           MultiPoly::variable(nv, PolySystem::kVarW);
      const MultiPoly composed = P[i].remap(nv, {PolySystem::kVarM})
                                     .substitute({wm,
                                                  MultiPoly::variable(
                                                      nv, PolySystem::kVarW)});
      MultiPoly reduced(nv);
      for (const auto& [mono, coeff] : composed.terms()) {
        Monomial m = mono;
        if (m[PolySystem::kVarW] == 0) {
          throw PreconditionError("non-integral division by W in P_" +
                                  std::to_string(i + 1));
        }
        --m[PolySystem::kVarW];
        reduced += MultiPoly::monomial(nv, m, coeff);
      }
      n.R = reduced;
    } else {
      n.R = P[i].remap(nv, {PolySystem::kVarM});
    }
    sys.nodes.push_back(std::move(n));
  }
  sys.validate();
  return sys;
}

std::vector<MultiPoly> parse_poly_family(const std::string& text) {
  std::vector<MultiPoly> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    out.push_back(parse_poly(line, {"m"}));
  }
  return out;
}

}  // namespace polyprog
