#include "osc/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace osc {

PhaseFunction::PhaseFunction(int d, Box domain, std::string family, std::vector<double> params)
    : d_(d), domain_(std::move(domain)), family_(std::move(family)), params_(std::move(params)) {
  if (d < 1 || d > kMaxDim) throw PreconditionError("phase dimension out of range");
}

std::string PhaseFunction::id() const {
  std::ostringstream os;
  os << family_ << "(";
  for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
  os << ")";
  return os.str();
}

double PhaseFunction::hdet(const Vec& x) const { return std::abs(hessian_det(hess(x))); }

double PhaseFunction::axis_term(int, double, int) const {
  throw PreconditionError("phase " + id() + " is not separable");
}

double hessian_det(const Mat& h) {
  const int d = static_cast<int>(h.rows());
  switch (d) {
    case 1:
      return h(0, 0);
    case 2:
      return h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
    case 3:
      return h(0, 0) * (h(1, 1) * h(2, 2) - h(1, 2) * h(2, 1)) -
             h(0, 1) * (h(1, 0) * h(2, 2) - h(1, 2) * h(2, 0)) +
             h(0, 2) * (h(1, 0) * h(2, 1) - h(1, 1) * h(2, 0));
    case 4: {
      // Laplace expansion by complementary 2x2 minors of the first two rows.
      auto m2 = [&](int r0, int r1, int c0, int c1) {
        return h(r0, c0) * h(r1, c1) - h(r0, c1) * h(r1, c0);
      };
      return m2(0, 1, 0, 1) * m2(2, 3, 2, 3) - m2(0, 1, 0, 2) * m2(2, 3, 1, 3) +
             m2(0, 1, 0, 3) * m2(2, 3, 1, 2) + m2(0, 1, 1, 2) * m2(2, 3, 0, 3) -
             m2(0, 1, 1, 3) * m2(2, 3, 0, 2) + m2(0, 1, 2, 3) * m2(2, 3, 0, 1);
    }
    default:
      return h.partialPivLu().determinant();
  }
}

PhaseEval eval_all(const PhaseFunction& phase, const Vec& x) {
  if (x.size() != phase.dim() || !phase.in_domain(x)) {
    throw DomainError("point outside the domain of " + phase.id());
  }
  PhaseEval e{phase.value(x), phase.grad(x), phase.hess(x), 0.0};
  e.hdet = phase.hdet(x);
  return e;
}

cplx damping_power(double h, DampingExponent z) {
  if (z.re < 0.0) throw PreconditionError("damping exponent needs Re z >= 0");
  if (h > 0.0) return std::polar(std::pow(h, z.re), z.im * std::log(h));
  if (z.re > 0.0) return 0.0;
  if (z.im == 0.0) return 1.0;
  throw UndefinedValueError("H^z undefined: H = 0 with Re z = 0 and Im z != 0");
}

cplx damping_factor(const PhaseFunction& phase, const Vec& x, DampingExponent z) {
  if (!phase.in_domain(x)) throw DomainError("point outside the domain of " + phase.id());
  return damping_power(phase.hdet(x), z);
}

std::vector<Vec> sphere_directions(int d, int n, unsigned seed) {
  std::vector<Vec> out;
  if (d == 1) {
    out.push_back(make_vec({1.0}));
    out.push_back(make_vec({-1.0}));
    return out;
  }
  if (d == 2) {
    for (int j = 0; j < n; ++j) {
      const double a = 2.0 * std::numbers::pi * j / n;
      out.push_back(make_vec({std::cos(a), std::sin(a)}));
    }
    return out;
  }
  if (n >= 2 * d) {
    for (int i = 0; i < d; ++i) {
      out.push_back(unit(d, i));
      out.push_back(-unit(d, i));
    }
  }
  const int rest = n - static_cast<int>(out.size());
  if (d == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < rest; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / rest;
      const double r = std::sqrt(1.0 - z * z);
      out.push_back(make_vec({r * std::cos(golden * i), r * std::sin(golden * i), z}));
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int i = 0; i < rest; ++i) {
    Vec v(d);
    for (int k = 0; k < d; ++k) v[k] = g(rng);
    out.push_back(v / v.norm());
  }
  return out;
}

FiniteType finite_type_params(const PhaseFunction& phase, int kmax, const FiniteTypeGrid& grid) {
  if (kmax < 2) throw PreconditionError("kmax must be >= 2");
  if (2 * kmax + 5 > Jet::kMaxOrder) throw PreconditionError("kmax too large for jet order");
  const int d = phase.dim();
  const Box& box = phase.domain();
  double hw = 0.5 * (box.hi - box.lo).minCoeff();
  const Vec c = box.center();
  const auto dirs = sphere_directions(d, grid.directions);

  std::vector<Vec> points;
  for (const auto& th : dirs) {
    for (int i = 0; i < grid.radii; ++i) {
      const double r = grid.radii > 1 ? hw * i / (grid.radii - 1) : 0.0;
      if (i == 0 && &th != &dirs.front()) continue;  // the center only once
      Vec x = c + r * th;
      if (phase.in_domain(x)) points.push_back(x);
    }
  }

  std::vector<double> mins(kmax + 1, std::numeric_limits<double>::infinity());
  for (const auto& x : points) {
    for (const auto& v : dirs) {
      const Jet j = phase.line_jet(x, v, kmax);
      double s = 0.0;
      for (int k = 2; k <= kmax; ++k) {
        s += std::abs(j[k]);
        mins[k] = std::min(mins[k], s);
      }
    }
  }
  int k = 0;
  for (int kk = 2; kk <= kmax; ++kk) {
    if (mins[kk] > grid.threshold) {
      k = kk;
      break;
    }
  }
  if (k == 0) throw NotFiniteTypeError("no k <= " + std::to_string(kmax) + " certifies finite type for " + phase.id());

  const int order = 2 * k + 5;
  double big = 0.0;
  for (const auto& x : points) {
    for (const auto& v : dirs) {
      const Jet j = phase.line_jet(x, v, order);
      for (int n = 0; n <= order; ++n) big = std::max(big, std::abs(j.derivative(n)));
    }
  }
  return {k, mins[k], big};
}

namespace {

Jet line_coord(const Vec& x, const Vec& v, int i, int order) { return Jet::variable(x[i], v[i], order); }

class QuadraticPhase : public PhaseFunction {
 public:
  QuadraticPhase(int d, double hw)
      : PhaseFunction(d, Box::cube(d, hw), "quadratic", {double(d), hw}) {}
  double value(const Vec& x) const override { return 0.5 * x.squaredNorm(); }
  Vec grad(const Vec& x) const override { return x; }
  Mat hess(const Vec&) const override { return Mat::Identity(d_, d_); }
  double hdet(const Vec&) const override { return 1.0; }
  Jet line_jet(const Vec& x, const Vec& v, int order) const override {
    Jet r(0.0, order);
    for (int i = 0; i < d_; ++i) {
      const Jet t = line_coord(x, v, i, order);
      r += 0.5 * (t * t);
    }
    return r;
  }
  bool separable() const override { return true; }
  double axis_term(int, double t, int deriv) const override {
    return deriv == 0 ? 0.5 * t * t : deriv == 1 ? t : 1.0;
  }
};

class MonomialSumPhase : public PhaseFunction {
 public:
  MonomialSumPhase(std::vector<int> p, double hw, std::string family)
      : PhaseFunction(static_cast<int>(p.size()), Box::cube(static_cast<int>(p.size()), hw),
                      std::move(family), {}),
        p_(std::move(p)) {
    for (int e : p_) params_.push_back(e);
    if (family_ != "monomial_sum") params_.clear();
  }
  double value(const Vec& x) const override {
    double s = 0.0;
    for (int i = 0; i < d_; ++i) s += ipow(x[i], p_[i]);
    return s;
  }
  Vec grad(const Vec& x) const override {
    Vec g(d_);
    for (int i = 0; i < d_; ++i) g[i] = axis_term(i, x[i], 1);
    return g;
  }
  Mat hess(const Vec& x) const override {
    Mat h = Mat::Zero(d_, d_);
    for (int i = 0; i < d_; ++i) h(i, i) = axis_term(i, x[i], 2);
    return h;
  }
  double hdet(const Vec& x) const override {
    double s = 1.0;
    for (int i = 0; i < d_; ++i) s *= axis_term(i, x[i], 2);
    return std::abs(s);
  }
  Jet line_jet(const Vec& x, const Vec& v, int order) const override {
    Jet r(0.0, order);
    for (int i = 0; i < d_; ++i) r += ipow(line_coord(x, v, i, order), p_[i]);
    return r;
  }
  bool separable() const override { return true; }
  double axis_term(int axis, double t, int deriv) const override {
    const int p = p_[axis];
    if (deriv == 0) return ipow(t, p);
    if (deriv == 1) return p * ipow(t, p - 1);
    return p * (p - 1) * ipow(t, p - 2);
  }

 private:
  std::vector<int> p_;
};

// f(|x|) with f(r) = (r-1)^4/4 + r.
class RemarkPhase : public PhaseFunction {
 public:
  RemarkPhase(int d, double eps)
      : PhaseFunction(d, Box::cube(unit(d, 0), eps), "remark", {double(d), eps}) {}
  double value(const Vec& x) const override {
    const double r = x.norm();
    return 0.25 * ipow(r - 1.0, 4) + r;
  }
  Vec grad(const Vec& x) const override {
    const double r = x.norm();
    return (ipow(r - 1.0, 3) + 1.0) / r * x;
  }
  Mat hess(const Vec& x) const override {
    const double r = x.norm();
    const Vec u = x / r;
    const double f1 = ipow(r - 1.0, 3) + 1.0;
    const double f2 = 3.0 * ipow(r - 1.0, 2);
    Mat h = (f1 / r) * Mat::Identity(d_, d_);
    h += (f2 - f1 / r) * (u * u.transpose());
    return h;
  }
  // Eigenvalues f'' (radial) and f'/r (tangential, d-1 times).
  double hdet(const Vec& x) const override {
    const double r = x.norm();
    return 3.0 * ipow(r - 1.0, 2) * std::pow(std::abs(ipow(r - 1.0, 3) + 1.0) / r, d_ - 1);
  }
  Jet line_jet(const Vec& x, const Vec& v, int order) const override {
    Jet s(0.0, order);
    for (int i = 0; i < d_; ++i) {
      const Jet t = line_coord(x, v, i, order);
      s += t * t;
    }
    const Jet r = sqrt(s);
    return 0.25 * ipow(r - 1.0, 4) + r;
  }
};

// 1 + |x|^{2m}.
class AppendixPhase : public PhaseFunction {
 public:
  AppendixPhase(int d, int m, double hw)
      : PhaseFunction(d, Box::cube(d, hw), "appendix", {double(d), double(m)}), m_(m) {}
  double value(const Vec& x) const override { return 1.0 + ipow(x.squaredNorm(), m_); }
  Vec grad(const Vec& x) const override { return 2.0 * m_ * ipow(x.squaredNorm(), m_ - 1) * x; }
  Mat hess(const Vec& x) const override {
    const double s = x.squaredNorm();
    Mat h = 2.0 * m_ * ipow(s, m_ - 1) * Mat::Identity(d_, d_);
    if (m_ >= 2) h += 4.0 * m_ * (m_ - 1) * ipow(s, m_ - 2) * (x * x.transpose());
    return h;
  }
  Jet line_jet(const Vec& x, const Vec& v, int order) const override {
    Jet s(0.0, order);
    for (int i = 0; i < d_; ++i) {
      const Jet t = line_coord(x, v, i, order);
      s += t * t;
    }
    return 1.0 + ipow(s, m_);
  }

 private:
  int m_;
};

// exp(-1/x^2): smooth, convex near 0, every derivative vanishes at 0.
class FlatPhase : public PhaseFunction {
 public:
  explicit FlatPhase(double hw) : PhaseFunction(1, Box::cube(1, hw), "flat", {}) {}
  double value(const Vec& x) const override { return x[0] == 0.0 ? 0.0 : std::exp(-1.0 / (x[0] * x[0])); }
  Vec grad(const Vec& x) const override {
    const double t = x[0];
    return make_vec({t == 0.0 ? 0.0 : 2.0 / (t * t * t) * value(x)});
  }
  Mat hess(const Vec& x) const override {
    const double t = x[0];
    Mat h(1, 1);
    h(0, 0) = t == 0.0 ? 0.0 : (4.0 / ipow(t, 6) - 6.0 / ipow(t, 4)) * value(x);
    return h;
  }
  Jet line_jet(const Vec& x, const Vec& v, int order) const override {
    if (x[0] == 0.0) return Jet(0.0, order);
    const Jet t = line_coord(x, v, 0, order);
    return exp(-1.0 / (t * t));
  }
};

}  // namespace

PhasePtr make_quadratic(int d, double hw) { return std::make_shared<QuadraticPhase>(d, hw); }

PhasePtr make_monomial_sum(const std::vector<int>& exponents, double hw) {
  for (int p : exponents) {
    if (p < 2 || p % 2) throw PreconditionError("monomial exponents must be even and >= 2");
  }
  return std::make_shared<MonomialSumPhase>(exponents, hw, "monomial_sum");
}

PhasePtr make_mixed(double hw) { return std::make_shared<MonomialSumPhase>(std::vector<int>{2, 4}, hw, "mixed"); }

PhasePtr make_remark(int d, double eps) {
  if (d < 2) throw PreconditionError("remark phase needs d >= 2");
  return std::make_shared<RemarkPhase>(d, eps);
}

PhasePtr make_appendix(int d, int m, double hw) {
  if (m < 1) throw PreconditionError("appendix phase needs m >= 1");
  return std::make_shared<AppendixPhase>(d, m, hw);
}

PhasePtr make_flat(double hw) { return std::make_shared<FlatPhase>(hw); }

namespace {

int as_int(double x, const std::string& what) {
  if (x != std::floor(x)) throw ConfigError("phase.params: " + what + " must be an integer");
  return static_cast<int>(x);
}

void need(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("phase.params: " + msg);
}

}  // namespace

PhasePtr make_phase(const std::string& family, const std::vector<double>& p, double half_width) {
  const double w = half_width > 0 ? half_width : 2.0;
  try {
    if (family == "quadratic") {
      need(p.size() == 1 || p.size() == 2, "quadratic takes d [half_width]");
      const int d = as_int(p[0], "d");
      need(d >= 1 && d <= kMaxDim, "d out of range");
      return make_quadratic(d, p.size() == 2 ? p[1] : w);
    }
    if (family == "monomial_sum") {
      need(!p.empty() && p.size() <= kMaxDim, "monomial_sum takes 1..6 even exponents");
      std::vector<int> e;
      for (double x : p) e.push_back(as_int(x, "exponent"));
      return make_monomial_sum(e, w);
    }
    if (family == "mixed") {
      need(p.empty(), "mixed takes no parameters");
      return make_mixed(w);
    }
    if (family == "remark") {
      need(p.size() == 1 || p.size() == 2, "remark takes d [eps]");
      const int d = as_int(p[0], "d");
      need(d >= 2 && d <= kMaxDim, "d out of range");
      return make_remark(d, p.size() == 2 ? p[1] : 0.125);
    }
    if (family == "appendix") {
      need(p.size() == 2, "appendix takes d m");
      const int d = as_int(p[0], "d");
      need(d >= 1 && d <= kMaxDim, "d out of range");
      return make_appendix(d, as_int(p[1], "m"), w);
    }
    if (family == "flat") return make_flat();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("phase.params: ") + e.what());
  }
  throw ConfigError("phase.family: unknown phase family '" + family + "'");
}

std::vector<CatalogEntry> phase_catalog() {
  return {
      {"quadratic", "d [half_width]", "|x|^2/2, nondegenerate"},
      {"monomial_sum", "p1 ... pd (even)", "sum_i x_i^{p_i}, degenerate along the axes"},
      {"mixed", "", "x1^2 + x2^4"},
      {"remark", "d [eps]", "(|x|-1)^4/4 + |x| on a ball around e1, H vanishes on the unit sphere"},
      {"appendix", "d m", "1 + |x|^{2m}"},
      {"flat", "", "exp(-1/x^2), not of finite type"},
  };
}

PullbackPhase::PullbackPhase(PhasePtr base, Mat a, Vec b, Vec w, double kappa, double alpha, std::string tag)
    : PhaseFunction(base->dim(), Box{}, std::move(tag), {}),
      base_(std::move(base)),
      a_(std::move(a)),
      b_(std::move(b)),
      w_(std::move(w)),
      kappa_(kappa),
      alpha_(alpha) {
  det_a_ = hessian_det(a_);
  if (det_a_ == 0.0) throw RankDeficiencyError("singular pullback matrix");
  // Bounding box of the preimage of the base domain.
  const Mat inv = a_.inverse();
  const Box& bb = base_->domain();
  Vec lo = Vec::Constant(d_, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (int mask = 0; mask < (1 << d_); ++mask) {
    Vec corner(d_);
    for (int i = 0; i < d_; ++i) corner[i] = (mask >> i) & 1 ? bb.hi[i] : bb.lo[i];
    const Vec y = inv * (corner - b_);
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  domain_ = Box{lo, hi};
}

bool PullbackPhase::in_domain(const Vec& y) const { return base_->in_domain(to_base(y)); }

double PullbackPhase::value(const Vec& y) const {
  return alpha_ * (base_->value(to_base(y)) + w_.dot(y) + kappa_);
}

Vec PullbackPhase::grad(const Vec& y) const {
  return alpha_ * (a_.transpose() * base_->grad(to_base(y)) + w_);
}

Mat PullbackPhase::hess(const Vec& y) const {
  return alpha_ * (a_.transpose() * base_->hess(to_base(y)) * a_);
}

double PullbackPhase::hdet(const Vec& y) const {
  return std::pow(std::abs(alpha_), d_) * det_a_ * det_a_ * base_->hdet(to_base(y));
}

Jet PullbackPhase::line_jet(const Vec& y, const Vec& v, int order) const {
  Jet j = base_->line_jet(to_base(y), a_ * v, order);
  j += Jet::variable(w_.dot(y) + kappa_, w_.dot(v), order);
  j *= alpha_;
  return j;
}

}  // namespace osc
