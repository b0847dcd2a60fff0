#include "polyprog/cutoff.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace polyprog {

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] via Newton iteration.
struct GLRule {
  std::vector<double> x, w;
};

const GLRule& gauss_legendre(int n) {
  static std::map<int, GLRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GLRule r;
  r.x.resize(static_cast<size_t>(n));
  r.w.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    double p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1);
    r.x[static_cast<size_t>(i)] = x;
    r.w[static_cast<size_t>(i)] = 2.0 / ((1 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

// Integrates f over [a, b] with `panels` GL panels of `nodes` points.
template <typename F>
auto integrate(F&& f, double a, double b, int panels, int nodes)
    -> decltype(f(0.0)) {
  const GLRule& rule = gauss_legendre(nodes);
  decltype(f(0.0)) total{};
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    double mid = lo + h / 2, half = h / 2;
    for (int i = 0; i < nodes; ++i) {
      total += f(mid + half * rule.x[static_cast<size_t>(i)]) *
               (half * rule.w[static_cast<size_t>(i)]);
    }
  }
  return total;
}

// C-infinity step: S(0) = 1, S(1) = 0, all derivatives vanish at both ends.
double bump(double u) { return u > 0 ? std::exp(-1.0 / u) : 0.0; }
double bump_d(double u) {
  return u > 0 ? std::exp(-1.0 / u) / (u * u) : 0.0;
}
double smoothstep_down(double s) {
  double n = bump(1 - s), d = bump(s) + bump(1 - s);
  return n / d;
}
double smoothstep_down_d(double s) {
  double n = bump(1 - s), d = bump(s) + bump(1 - s);
  double dn = -bump_d(1 - s), dd = bump_d(s) - bump_d(1 - s);
  return (dn * d - n * dd) / (d * d);
}

}  // namespace

CutoffChi CutoffChi::tent() {
  CutoffChi c;
  c.shape_ = ChiShape::Tent;
  c.scale_ = 1.0;
  return c;
}

CutoffChi CutoffChi::smooth_plateau(double plateau_end) {
  if (!(plateau_end > 0 && plateau_end < 1))
    throw PreconditionError("smooth_plateau: plateau end must be in (0,1)");
  CutoffChi c;
  c.shape_ = ChiShape::SmoothPlateau;
  c.plateau_ = plateau_end;
  // Normalize the derivative energy to 1: for the unscaled shape the
  // energy is (1/(1-a)) * int_0^1 S'(s)^2 ds.
  double e0 = integrate([](double s) {
    double d = smoothstep_down_d(s);
    return d * d;
  }, 0.0, 1.0, 32, 12);
  e0 /= (1 - plateau_end);
  c.scale_ = 1.0 / std::sqrt(e0);
  return c;
}

double CutoffChi::operator()(double t) const {
  t = std::fabs(t);
  if (t >= 1) return 0;
  if (shape_ == ChiShape::Tent) return 1 - t;
  if (t <= plateau_) return scale_;
  return scale_ * smoothstep_down((t - plateau_) / (1 - plateau_));
}

double CutoffChi::derivative_energy() const {
  if (shape_ == ChiShape::Tent) {
    // chi' = -1 on (0,1); integrate numerically anyway for uniformity.
    return integrate([](double) { return 1.0; }, 0.0, 1.0, 4, 8);
  }
  double a = plateau_, lam = scale_;
  return integrate(
      [&](double t) {
        double d = lam * smoothstep_down_d((t - a) / (1 - a)) / (1 - a);
        return d * d;
      },
      a, 1.0, 32, 12);
}

std::complex<double> CutoffChi::phi(double xi) const {
  // Panels sized so each covers about one oscillation of e^{i x xi}.
  int per_unit = std::max(4, static_cast<int>(std::ceil(std::fabs(xi) / 5.0)));
  auto integrand = [&](double x) {
    return std::exp(x) * (*this)(x) *
           std::exp(std::complex<double>(0.0, x * xi));
  };
  // Split at the kinks/transition points for piecewise smoothness.
  std::complex<double> total =
      integrate(integrand, -1.0, 0.0, per_unit, 10) +
      integrate(integrand, 0.0, 1.0, per_unit, 10);
  return total / (2 * M_PI);
}

double CutoffChi::phi_identity(double T, int panels_per_unit,
                               int nodes_per_panel) const {
  if (T <= 0) throw PreconditionError("phi_identity: T must be positive");
  // 1-D quadrature grid on [-T, T]; phi is evaluated once per node.
  const GLRule& rule = gauss_legendre(nodes_per_panel);
  int panels = std::max(1, static_cast<int>(std::ceil(2 * T * panels_per_unit)));
  double h = 2 * T / panels;
  std::vector<double> ts;
  std::vector<double> ws;
  ts.reserve(static_cast<size_t>(panels) * nodes_per_panel);
  for (int p = 0; p < panels; ++p) {
    double lo = -T + p * h, mid = lo + h / 2, half = h / 2;
    for (int i = 0; i < nodes_per_panel; ++i) {
      ts.push_back(mid + half * rule.x[static_cast<size_t>(i)]);
      ws.push_back(half * rule.w[static_cast<size_t>(i)]);
    }
  }
  size_t n = ts.size();
  std::vector<std::complex<double>> phis(n);
  for (size_t i = 0; i < n; ++i) phis[i] = phi(ts[i]);

  std::complex<double> acc{0, 0};
  for (size_t i = 0; i < n; ++i) {
    std::complex<double> zi(1.0, ts[i]);
    std::complex<double> fi = zi * phis[i] * ws[i];
    for (size_t j = 0; j < n; ++j) {
      std::complex<double> zj(1.0, ts[j]);
      std::complex<double> denom(2.0, ts[i] + ts[j]);
      acc += fi * zj * phis[j] * ws[j] / denom;
    }
  }
  return acc.real();
}

std::string CutoffChi::name() const {
  return shape_ == ChiShape::Tent ? "tent" : "smooth-plateau";
}

}  // namespace polyprog
