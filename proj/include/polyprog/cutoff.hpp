// Cutoff functions for the divisor-sum majorant: the tent (default) and a
// normalized smooth plateau bump, together with the derivative-energy
// normalization check and the Fourier-side double-integral identity.
#pragma once

#include "polyprog/common.hpp"

#include <complex>

namespace polyprog {

enum class ChiShape { Tent, SmoothPlateau };

// Even function supported on [-1, 1], normalized so that the derivative
// energy int_0^1 chi'(t)^2 dt equals 1.
//
// Tent: chi(t) = max(1 - |t|, 0); chi(0) = 1, the unique admissible shape
// with chi(0) = 1 (Cauchy-Schwarz forces chi(0)^2 <= energy).
// SmoothPlateau: constant on [0, a], C^infinity ramp exp(1 - 1/(1 - s^2))
// on (a, 1), scaled so the energy is 1; chi(0) < 1.
class CutoffChi {
 public:
  static CutoffChi tent();
  static CutoffChi smooth_plateau(double plateau_end = 0.5);

  ChiShape shape() const { return shape_; }
  double operator()(double t) const;
  double chi0() const { return (*this)(0.0); }

  // int_0^1 chi'(t)^2 dt by Gauss-Legendre panels (analytic for the tent).
  double derivative_energy() const;

  // phi(xi) = (1/2pi) * int_{-1}^{1} e^x chi(x) e^{i x xi} dx.
  std::complex<double> phi(double xi) const;

  // Double integral of (1+it)(1+it')/(2+it+it') phi(t) phi(t') over
  // [-T, T]^2; equals the derivative energy as T -> infinity. Returns the
  // real part (the imaginary part vanishes by symmetry).
  double phi_identity(double T, int panels_per_unit = 4,
                      int nodes_per_panel = 10) const;

  std::string name() const;

 private:
  ChiShape shape_ = ChiShape::Tent;
  double plateau_ = 0.5;
  double scale_ = 1.0;  // normalization factor for the smooth shape
};

}  // namespace polyprog
