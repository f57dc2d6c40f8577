#pragma once

#include <vector>

#include "osc/types.hpp"

namespace osc {

// Piecewise polynomial in the power basis, identically zero outside [breaks.front(), breaks.back()].
struct PiecewisePolynomial {
  std::vector<double> breaks;               // sorted, size n+1
  std::vector<std::vector<double>> coeffs;  // n pieces, coeffs[i][k] multiplies r^k
  int smoothness = 2;

  // k-th derivative; side < 0 takes the left piece at a breakpoint, side > 0 the right one.
  double eval(double r, int k = 0, int side = 1) const;
  double operator()(double r) const { return eval(r); }

  // r -> p(a r), a > 0.
  PiecewisePolynomial scaled(double a) const;
  PiecewisePolynomial operator-(const PiecewisePolynomial& o) const;
  // Largest one-sided mismatch of derivatives 0..smoothness over interior breakpoints.
  double junction_mismatch() const;
};

PiecewisePolynomial eta0_poly();
PiecewisePolynomial eta_poly();
PiecewisePolynomial eta_tilde_poly(double c, int d);

double eta0(double r);
double eta(double r);
double eta_tilde(double r, double c, int d);
// Derivatives of eta0, k <= 2.
double eta0_deriv(double r, int k);

// psi_circ(x) = eta0(|x|).
double psi_circ(const Vec& x);

// psi_j(x) = psi~_j / sum psi~_l with psi~_j = psi_circ((x - w_j)/eps); all zero when the sum is.
std::vector<double> partition_psi(const std::vector<Vec>& centers, double eps, const Vec& x);

// Grid of spacing eps/2 covering the box; each point of the box then has some psi~_j = 1.
std::vector<Vec> covering_centers(const Box& box, double eps);

}  // namespace osc
