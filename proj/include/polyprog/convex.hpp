// Open convex bodies in R^D with exact-ish lattice counting, inradius,
// residue-class averages, and a cube-covering supremum bound.
#pragma once

#include "polyprog/common.hpp"

#include <functional>

namespace polyprog {

struct Halfspace {
  std::vector<double> a;  // normal
  double b;               // {x : a.x < b}
};

// Either an open axis-aligned box prod (lo_i, hi_i) or an open intersection
// of halfspaces (with a derived bounding box for enumeration).
class ConvexBody {
 public:
  enum class Kind { Box, HalfspaceSet };

  static ConvexBody box(std::vector<double> lo, std::vector<double> hi);
  static ConvexBody halfspace_set(int dim, std::vector<Halfspace> hs);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  const std::vector<Halfspace>& halfspaces() const { return hs_; }

  bool contains(const std::vector<double>& x) const;

 private:
  Kind kind_ = Kind::Box;
  int dim_ = 0;
  std::vector<double> lo_, hi_;  // box bounds, or bounding box for hs sets
  std::vector<Halfspace> hs_;
};

// Radius of the largest ball contained in the body. Boxes: half the
// smallest side. Halfspace sets: Chebyshev-center LP solved exactly by
// enumerating (D+1)-subsets of tight constraints (small dimensions only).
double inradius(const ConvexBody& body);

// Number of lattice points x = a (mod m) inside the open body
// (componentwise congruence). Budget-guarded enumeration for halfspace
// sets; per-axis closed form for boxes.
std::int64_t lattice_point_count(const ConvexBody& body, std::int64_t m,
                                 const std::vector<std::int64_t>& a);

// Visits each such lattice point.
void for_each_lattice_point(
    const ConvexBody& body, std::int64_t m, const std::vector<std::int64_t>& a,
    const std::function<void(const std::vector<std::int64_t>&)>& visit);

// Average of an m-periodic function over the body's lattice points versus
// its full-period mean. Precondition: inradius >= guard * m.
struct PeriodicAverage {
  double body_average = 0;
  double period_average = 0;
  double deviation = 0;  // |body - period|
  std::int64_t points = 0;
};
PeriodicAverage average_periodic(
    const ConvexBody& body, std::int64_t m,
    const std::function<double(const std::vector<std::int64_t>&)>& f,
    double guard = 1.0);

// Supremum of cube averages over an overlapping grid of side-2r cubes
// (r = inradius, grid step r): for f >= 0 the body average is at most
// covering_constant * sup_average. The constant 4^D comes from the cube
// covering argument and is reported, not asserted tight.
struct SupBoxAverage {
  double sup_average = 0;
  double body_average = 0;
  double covering_constant = 0;  // 4^D
  std::vector<double> best_cube_corner;
  double cube_side = 0;
  std::int64_t body_points = 0;
};
SupBoxAverage sup_box_average(
    const ConvexBody& body,
    const std::function<double(const std::vector<std::int64_t>&)>& f);

}  // namespace polyprog
