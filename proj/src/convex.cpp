#include "polyprog/convex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

namespace polyprog {

namespace {

constexpr std::int64_t kLatticeBudget = 100000000;
constexpr double kFeasEps = 1e-9;

double norm2(const std::vector<double>& a) {
  double s = 0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

// All vertices of the polytope {a_i . x <= b_i} found by solving DxD tight
// subsets; used for bounding boxes and LP by enumeration.
std::vector<std::vector<double>> polytope_vertices(
    int D, const std::vector<Halfspace>& hs) {
  size_t n = hs.size();
  if (D > 6 || n > 24)
    throw BudgetError("halfspace set too large for vertex enumeration");
  std::vector<std::vector<double>> verts;
  std::vector<int> idx(static_cast<size_t>(D));
  std::function<void(size_t, int)> rec = [&](size_t start, int chosen) {
    if (chosen == D) {
      Eigen::MatrixXd A(D, D);
      Eigen::VectorXd b(D);
      for (int r = 0; r < D; ++r) {
        const Halfspace& h = hs[static_cast<size_t>(idx[static_cast<size_t>(r)])];
        for (int c = 0; c < D; ++c) A(r, c) = h.a[static_cast<size_t>(c)];
        b(r) = h.b;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      lu.setThreshold(1e-10);
      if (!lu.isInvertible()) return;
      Eigen::VectorXd x = lu.solve(b);
      for (size_t i = 0; i < n; ++i) {
        double dot = 0;
        for (int c = 0; c < D; ++c) dot += hs[i].a[static_cast<size_t>(c)] * x(c);
        if (dot > hs[i].b + kFeasEps * (1 + std::fabs(hs[i].b))) return;
      }
      std::vector<double> v(static_cast<size_t>(D));
      for (int c = 0; c < D; ++c) v[static_cast<size_t>(c)] = x(c);
      verts.push_back(std::move(v));
      return;
    }
    for (size_t i = start; i < n; ++i) {
      idx[static_cast<size_t>(chosen)] = static_cast<int>(i);
      rec(i + 1, chosen + 1);
    }
  };
  rec(0, 0);
  return verts;
}

}  // namespace

ConvexBody ConvexBody::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.empty())
    throw PreconditionError("ConvexBody::box: bound arity mismatch");
  for (size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i]))
      throw PreconditionError("ConvexBody::box: empty interval");
  ConvexBody b;
  b.kind_ = Kind::Box;
  b.dim_ = static_cast<int>(lo.size());
  b.lo_ = std::move(lo);
  b.hi_ = std::move(hi);
  return b;
}

ConvexBody ConvexBody::halfspace_set(int dim, std::vector<Halfspace> hs) {
  if (dim <= 0) throw PreconditionError("halfspace_set: dimension");
  for (const auto& h : hs) {
    if (static_cast<int>(h.a.size()) != dim)
      throw PreconditionError("halfspace_set: normal arity mismatch");
    if (norm2(h.a) == 0)
      throw PreconditionError("halfspace_set: zero normal");
  }
  ConvexBody b;
  b.kind_ = Kind::HalfspaceSet;
  b.dim_ = dim;
  b.hs_ = std::move(hs);
  auto verts = polytope_vertices(dim, b.hs_);
  if (verts.empty())
    throw PreconditionError(
        "halfspace_set: unbounded or empty (no feasible vertices)");
  b.lo_.assign(static_cast<size_t>(dim), 0);
  b.hi_.assign(static_cast<size_t>(dim), 0);
  for (int c = 0; c < dim; ++c) {
    double mn = verts[0][static_cast<size_t>(c)], mx = mn;
    for (const auto& v : verts) {
      mn = std::min(mn, v[static_cast<size_t>(c)]);
      mx = std::max(mx, v[static_cast<size_t>(c)]);
    }
    b.lo_[static_cast<size_t>(c)] = mn;
    b.hi_[static_cast<size_t>(c)] = mx;
  }
  return b;
}

bool ConvexBody::contains(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != dim_) return false;
  if (kind_ == Kind::Box) {
    for (int i = 0; i < dim_; ++i) {
      size_t s = static_cast<size_t>(i);
      if (!(lo_[s] < x[s] && x[s] < hi_[s])) return false;
    }
    return true;
  }
  for (const auto& h : hs_) {
    double dot = 0;
    for (int i = 0; i < dim_; ++i) dot += h.a[static_cast<size_t>(i)] * x[static_cast<size_t>(i)];
    if (!(dot < h.b)) return false;
  }
  return true;
}

double inradius(const ConvexBody& body) {
  if (body.kind() == ConvexBody::Kind::Box) {
    double r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < body.dim(); ++i) {
      size_t s = static_cast<size_t>(i);
      r = std::min(r, (body.hi()[s] - body.lo()[s]) / 2.0);
    }
    return r;
  }
  // Chebyshev center: maximize r with a_i.x + |a_i| r <= b_i, via
  // (D+1)-subset vertex enumeration in (x, r) space.
  int D = body.dim();
  const auto& hs = body.halfspaces();
  std::vector<Halfspace> lifted;
  lifted.reserve(hs.size());
  for (const auto& h : hs) {
    Halfspace l;
    l.a = h.a;
    l.a.push_back(norm2(h.a));
    l.b = h.b;
    lifted.push_back(std::move(l));
  }
  auto verts = polytope_vertices(D + 1, lifted);
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& v : verts) best = std::max(best, v.back());
  if (!(best > 0))
    throw PreconditionError("inradius: degenerate halfspace set");
  return best;
}

namespace {

// Integers n = a (mod m) in the open interval (lo, hi).
std::int64_t open_interval_residue_count(double lo, double hi, std::int64_t m,
                                         std::int64_t a) {
  std::int64_t L = static_cast<std::int64_t>(std::floor(lo)) + 1;
  std::int64_t U = static_cast<std::int64_t>(std::ceil(hi)) - 1;
  if (U < L) return 0;
  auto mod = [&](std::int64_t v) { return ((v % m) + m) % m; };
  a = mod(a);
  // First member >= L.
  std::int64_t first = L + mod(a - L);
  if (first > U) return 0;
  return (U - first) / m + 1;
}

std::int64_t first_residue_at_least(std::int64_t L, std::int64_t m,
                                    std::int64_t a) {
  auto mod = [&](std::int64_t v) { return ((v % m) + m) % m; };
  return L + mod(mod(a) - L);
}

}  // namespace

std::int64_t lattice_point_count(const ConvexBody& body, std::int64_t m,
                                 const std::vector<std::int64_t>& a) {
  if (m < 1) throw PreconditionError("lattice_point_count: modulus >= 1");
  if (static_cast<int>(a.size()) != body.dim())
    throw PreconditionError("lattice_point_count: residue arity mismatch");
  if (body.kind() == ConvexBody::Kind::Box) {
    std::int64_t total = 1;
    for (int i = 0; i < body.dim(); ++i) {
      size_t s = static_cast<size_t>(i);
      total *= open_interval_residue_count(body.lo()[s], body.hi()[s], m,
                                           a[s]);
      if (total == 0) return 0;
    }
    return total;
  }
  std::int64_t count = 0;
  for_each_lattice_point(body, m, a,
                         [&](const std::vector<std::int64_t>&) { ++count; });
  return count;
}

void for_each_lattice_point(
    const ConvexBody& body, std::int64_t m, const std::vector<std::int64_t>& a,
    const std::function<void(const std::vector<std::int64_t>&)>& visit) {
  if (m < 1) throw PreconditionError("for_each_lattice_point: modulus >= 1");
  int D = body.dim();
  if (static_cast<int>(a.size()) != D)
    throw PreconditionError("for_each_lattice_point: residue arity mismatch");

  std::vector<std::int64_t> L(static_cast<size_t>(D)), U(static_cast<size_t>(D)),
      start(static_cast<size_t>(D));
  double budget = 1;
  for (int i = 0; i < D; ++i) {
    size_t s = static_cast<size_t>(i);
    L[s] = static_cast<std::int64_t>(std::floor(body.lo()[s])) + 1;
    U[s] = static_cast<std::int64_t>(std::ceil(body.hi()[s])) - 1;
    if (U[s] < L[s]) return;
    start[s] = first_residue_at_least(L[s], m, a[s]);
    if (start[s] > U[s]) return;
    budget *= static_cast<double>((U[s] - start[s]) / m + 1);
  }
  if (budget > static_cast<double>(kLatticeBudget))
    throw BudgetError("lattice enumeration exceeds the point budget");

  const bool filter = body.kind() == ConvexBody::Kind::HalfspaceSet;
  std::vector<std::int64_t> x = start;
  std::vector<double> xd(static_cast<size_t>(D));
  for (;;) {
    bool inside = true;
    if (filter) {
      for (int i = 0; i < D; ++i)
        xd[static_cast<size_t>(i)] = static_cast<double>(x[static_cast<size_t>(i)]);
      inside = body.contains(xd);
    }
    if (inside) visit(x);
    int v = D - 1;
    while (v >= 0) {
      size_t s = static_cast<size_t>(v);
      x[s] += m;
      if (x[s] <= U[s]) break;
      x[s] = start[s];
      --v;
    }
    if (v < 0) break;
  }
}

PeriodicAverage average_periodic(
    const ConvexBody& body, std::int64_t m,
    const std::function<double(const std::vector<std::int64_t>&)>& f,
    double guard) {
  if (m < 1) throw PreconditionError("average_periodic: modulus >= 1");
  double r = inradius(body);
  if (r < guard * static_cast<double>(m))
    throw PreconditionError(
        "average_periodic: inradius below the guard multiple of the modulus");
  PeriodicAverage out;
  double sum = 0;
  std::int64_t count = 0;
  std::vector<std::int64_t> res(static_cast<size_t>(body.dim()));
  std::vector<std::int64_t> zero(static_cast<size_t>(body.dim()), 0);
  for_each_lattice_point(body, 1, zero,
                         [&](const std::vector<std::int64_t>& x) {
                           for (size_t i = 0; i < x.size(); ++i)
                             res[i] = ((x[i] % m) + m) % m;
                           sum += f(res);
                           ++count;
                         });
  if (count == 0)
    throw PreconditionError("average_periodic: no lattice points in body");
  out.body_average = sum / static_cast<double>(count);
  out.points = count;

  // Full-period mean over Z_m^D.
  int D = body.dim();
  double pts = std::pow(static_cast<double>(m), D);
  if (pts > 1e7)
    throw BudgetError("average_periodic: period enumeration exceeds budget");
  std::fill(res.begin(), res.end(), 0);
  double psum = 0;
  std::int64_t pcount = 0;
  for (;;) {
    psum += f(res);
    ++pcount;
    int v = D - 1;
    while (v >= 0) {
      size_t s = static_cast<size_t>(v);
      if (++res[s] < m) break;
      res[s] = 0;
      --v;
    }
    if (v < 0) break;
  }
  out.period_average = psum / static_cast<double>(pcount);
  out.deviation = std::fabs(out.body_average - out.period_average);
  return out;
}

SupBoxAverage sup_box_average(
    const ConvexBody& body,
    const std::function<double(const std::vector<std::int64_t>&)>& f) {
  int D = body.dim();
  double r = inradius(body);
  if (r < 1.0)
    throw PreconditionError("sup_box_average: inradius below 1");
  SupBoxAverage out;
  out.covering_constant = std::pow(4.0, D);
  out.cube_side = 2 * r;

  // Collect body lattice points and the grid cubes that contain them.
  double bsum = 0;
  std::int64_t bcount = 0;
  std::set<std::vector<std::int64_t>> cubes;  // grid indices k, corner k*r
  std::vector<std::int64_t> zero(static_cast<size_t>(D), 0);
  for_each_lattice_point(body, 1, zero,
                         [&](const std::vector<std::int64_t>& x) {
                           bsum += f(x);
                           ++bcount;
                           // x lies in cubes with corner k*r, k in
                           // {floor(x/r)-1, floor(x/r)} per axis.
                           std::vector<std::int64_t> base(x.size());
                           for (size_t i = 0; i < x.size(); ++i)
                             base[i] = static_cast<std::int64_t>(
                                 std::floor(static_cast<double>(x[i]) / r));
                           std::vector<std::int64_t> k(x.size());
                           for (std::uint32_t mask = 0;
                                mask < (1u << x.size()); ++mask) {
                             bool ok = true;
                             for (size_t i = 0; i < x.size(); ++i) {
                               k[i] = base[i] - ((mask >> i) & 1u);
                               double corner = static_cast<double>(k[i]) * r;
                               double xi = static_cast<double>(x[i]);
                               if (!(corner <= xi && xi < corner + 2 * r)) {
                                 ok = false;
                                 break;
                               }
                             }
                             if (ok) cubes.insert(k);
                           }
                         });
  if (bcount == 0)
    throw PreconditionError("sup_box_average: no lattice points in body");
  out.body_average = bsum / static_cast<double>(bcount);
  out.body_points = bcount;

  // Average f over every lattice point of each marked cube.
  for (const auto& k : cubes) {
    // Integer points of the half-open cube [corner, corner+2r) per axis.
    double csum = 0;
    std::int64_t ccount = 0;
    std::vector<std::int64_t> x = zero;
    std::vector<std::int64_t> L(static_cast<size_t>(D)), U(static_cast<size_t>(D));
    for (int i = 0; i < D; ++i) {
      size_t s = static_cast<size_t>(i);
      double corner = static_cast<double>(k[s]) * r;
      L[s] = static_cast<std::int64_t>(std::ceil(corner));
      U[s] = static_cast<std::int64_t>(std::ceil(corner + 2 * r)) - 1;
      x[s] = L[s];
    }
    for (;;) {
      csum += f(x);
      ++ccount;
      int v = D - 1;
      while (v >= 0) {
        size_t s = static_cast<size_t>(v);
        if (++x[s] <= U[s]) break;
        x[s] = L[s];
        --v;
      }
      if (v < 0) break;
    }
    if (ccount > 0) {
      double avg = csum / static_cast<double>(ccount);
      if (avg > out.sup_average) {
        out.sup_average = avg;
        out.best_cube_corner.assign(static_cast<size_t>(D), 0);
        for (int i = 0; i < D; ++i)
          out.best_cube_corner[static_cast<size_t>(i)] =
              static_cast<double>(k[static_cast<size_t>(i)]) * r;
      }
    }
  }
  return out;
}

}  // namespace polyprog
