#pragma once

#include <functional>
#include <vector>

#include "osc/phase.hpp"
#include "osc/types.hpp"

namespace osc {

struct OscResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;  // |finest - next finest| summed over leaf panels
  long nodes_used = 0;
  long panels = 0;
  bool converged = true;
};

struct QuadOptions {
  double tol = 1e-8;  // absolute
  int max_depth = 16;
  long max_evals = 400'000'000;
  int min_nodes = 8;
  // Total tensor nodes per panel; panels asking for more are split before evaluation.
  long max_panel_nodes = 4096;
  // d = 4 switches to sparse-grid assembly above this many full-grid nodes.
  long smolyak_threshold = 1'000'000;
  bool allow_separable = true;
};

struct Integrand {
  std::function<cplx(const Vec&)> f;
  // Local |grad of the total phase|, in radians per unit length; empty means non-oscillatory.
  std::function<double(const Vec&)> wavenumber;
};

// Tensor Gauss-Legendre with dyadic adaptive subdivision.
OscResult integrate(const Integrand& g, const Box& box, const QuadOptions& opts);

// Smolyak combination of composite Gauss-Legendre rules; used for d = 4.
OscResult integrate_sparse(const Integrand& g, const Box& box, const QuadOptions& opts);

// Gauss-Legendre nodes and weights on [-1, 1].
const std::vector<double>& gl_nodes(int n);
const std::vector<double>& gl_weights(int n);

// Amplitude with compact support inside `support`; optional per-axis factors when it is a product.
struct AmplitudeField {
  std::function<double(const Vec&)> fn;
  Box support;
  std::vector<std::function<double(double)>> factors;

  double operator()(const Vec& x) const { return fn(x); }
};

// psi_circ((x - c)/s), supported in the ball of radius 2s around c.
AmplitudeField psi_circ_field(const Vec& center, double s);
// prod_i eta0((x_i - c_i)/s).
AmplitudeField tensor_cutoff_field(const Vec& center, double s);

// int e^{i lambda (a phi(x) + v.x)} H^z phi(x) psi(x) dx over supp psi intersected with the phase domain.
OscResult phase_integral(const PhaseFunction& phase, const AmplitudeField& psi, double lambda, double a,
                         const Vec& v, DampingExponent z, const QuadOptions& opts);

// The damped oscillatory integral with phase lambda (phi(x) + x.v).
OscResult osc_integral(const PhaseFunction& phase, const AmplitudeField& psi, double lambda, const Vec& v,
                       DampingExponent z, const QuadOptions& opts);

// Fourier transform of the damped surface measure of the graph of phi at xi in R^{d+1}.
OscResult surface_fourier(const PhaseFunction& phase, const AmplitudeField& psi, DampingExponent z, const Vec& xi,
                          double c, const QuadOptions& opts);

}  // namespace osc
