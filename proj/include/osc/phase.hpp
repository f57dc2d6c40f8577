#pragma once

#include <memory>
#include <string>
#include <vector>

#include "osc/jet.hpp"
#include "osc/types.hpp"

namespace osc {

// z = re + i im, the damping exponent of H^z.
struct DampingExponent {
  double re = 0.0;
  double im = 0.0;
};

struct PhaseEval {
  double value;
  Vec grad;
  Mat hess;
  double hdet;
};

class PhaseFunction {
 public:
  PhaseFunction(int d, Box domain, std::string family, std::vector<double> params);
  virtual ~PhaseFunction() = default;

  int dim() const { return d_; }
  const Box& domain() const { return domain_; }
  const std::string& family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  // Stable identifier used in CSV output, e.g. "monomial_sum(4,4)".
  std::string id() const;

  virtual bool in_domain(const Vec& x) const { return domain_.contains(x, 1e-12); }

  virtual double value(const Vec& x) const = 0;
  virtual Vec grad(const Vec& x) const = 0;
  virtual Mat hess(const Vec& x) const = 0;
  // |det Hess|, cofactor expansion for d <= 4.
  virtual double hdet(const Vec& x) const;
  // Taylor jet of s -> phi(x + s v).
  virtual Jet line_jet(const Vec& x, const Vec& v, int order) const = 0;

  // phi(x) = sum_i f_i(x_i); axis_term returns f_i^(deriv)(t) for deriv in {0,1,2}.
  virtual bool separable() const { return false; }
  virtual double axis_term(int axis, double t, int deriv) const;

 protected:
  int d_;
  Box domain_;
  std::string family_;
  std::vector<double> params_;
};

using PhasePtr = std::shared_ptr<const PhaseFunction>;

double hessian_det(const Mat& h);

PhaseEval eval_all(const PhaseFunction& phase, const Vec& x);

// (H)^z with the conventions: 0 when H = 0 and Re z > 0, 1 when z = 0.
cplx damping_power(double h, DampingExponent z);
cplx damping_factor(const PhaseFunction& phase, const Vec& x, DampingExponent z);

struct FiniteTypeGrid {
  int directions = 64;
  int radii = 32;
  double threshold = 1e-9;
};

struct FiniteType {
  int k;
  double m;
  double M;
};

FiniteType finite_type_params(const PhaseFunction& phase, int kmax, const FiniteTypeGrid& grid = {});

// Quasi-uniform unit vectors; the first 2d are the signed coordinate axes when n >= 2d.
std::vector<Vec> sphere_directions(int d, int n, unsigned seed = 7);

// Catalog.
PhasePtr make_quadratic(int d, double half_width = 2.0);
PhasePtr make_monomial_sum(const std::vector<int>& exponents, double half_width = 2.0);
PhasePtr make_mixed(double half_width = 2.0);
PhasePtr make_remark(int d, double eps = 0.125);
PhasePtr make_appendix(int d, int m, double half_width = 2.0);
PhasePtr make_flat(double half_width = 1.0);

// Factory used by the config layer; throws ConfigError naming phase.family / phase.params.
// half_width > 0 overrides the default domain of the box-shaped families.
PhasePtr make_phase(const std::string& family, const std::vector<double>& params, double half_width = 0.0);

struct CatalogEntry {
  std::string family;
  std::string params;
  std::string description;
};
std::vector<CatalogEntry> phase_catalog();

// g(y) = alpha * (phi(A y + b) + w.y + kappa); covers the recentred and normalized phases.
class PullbackPhase : public PhaseFunction {
 public:
  PullbackPhase(PhasePtr base, Mat a, Vec b, Vec w, double kappa, double alpha, std::string tag);

  bool in_domain(const Vec& y) const override;
  double value(const Vec& y) const override;
  Vec grad(const Vec& y) const override;
  Mat hess(const Vec& y) const override;
  double hdet(const Vec& y) const override;
  Jet line_jet(const Vec& y, const Vec& v, int order) const override;

  const PhaseFunction& base() const { return *base_; }
  const PhasePtr& base_ptr() const { return base_; }
  Vec to_base(const Vec& y) const { return a_ * y + b_; }
  const Mat& matrix() const { return a_; }
  const Vec& offset() const { return b_; }
  const Vec& linear() const { return w_; }
  double shift() const { return kappa_; }
  double alpha() const { return alpha_; }

 private:
  PhasePtr base_;
  Mat a_;
  Vec b_;
  Vec w_;
  double kappa_;
  double alpha_;
  double det_a_;
};

}  // namespace osc
