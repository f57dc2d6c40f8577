#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "osc/decay.hpp"

namespace osc {

// f(|x|), f(r) = (r-1)^4/4 + r, on a box around e1 of half-width eps.
PhasePtr remark_phase(int d, double eps = 0.125);

// Printed closed form 3 (|x|^2 - 3|x| + 3)^{d-1} (|x| - 1)^2.
double remark_hdet_formula(const Vec& x);

// (radial, tangential) Hessian eigenvalues: 3(|x|-1)^2 and |x|^2 - 3|x| + 3.
std::pair<double, double> remark_eigenvalues(const Vec& x);

// Smallest Hessian eigenvalue over random points of the ball B(e1, eps).
double remark_min_eigenvalue(int d, double eps, int samples, std::uint64_t seed);

struct SsssOptions {
  double eps = 0.125;  // radius of the ball around e1
  long samples = 1L << 16;
  std::uint64_t seed = 17;
};

struct SsssPoint {
  double lambda = 0.0;
  double value = 0.0;
  double error = 0.0;         // Monte Carlo standard error
  double max_integrand = 0.0; // max of H^{1/2} over samples in the set, at most 1/lambda
  long hits = 0;
};

struct SsssResult {
  std::vector<SsssPoint> points;
  DecayFit fit;
};

// int H^{1/2} over {x in B(e1, eps): lambda Phi in [lambda, lambda+1], H^{1/2} <= 1/lambda}.
// Stratified Monte Carlo over the slab 1 <= |x| <= 1 + 1/lambda, which contains the band since f is
// increasing with f(1) = 1 and f(r) >= r.
SsssResult ssss_floor(int d, const std::vector<double>& lambdas, const SsssOptions& opts = {});

using Rational = boost::multiprecision::cpp_rational;

// "3/2", "0.2", "7" to an exact rational.
Rational parse_rational(const std::string& s);

// -2m/q + (2m-2) d rho <= -d.
bool appendix_divergence(int d, int m, const Rational& q, const Rational& rho);

// rho_m = (2m/q - d) / ((2m-2) d), m >= 2.
Rational appendix_threshold(int d, int m, const Rational& q);

// Smallest m in [1, m_max] with rho < rho_m, i.e. (2m-2) d rho < 2m/p - d.
std::optional<int> appendix_certificate(int d, const Rational& p, const Rational& rho, int m_max);

}  // namespace osc
