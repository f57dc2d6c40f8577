#include "osc/extremal.hpp"

#include <cmath>
#include <random>

#include "osc/statset.hpp"

namespace osc {

PhasePtr remark_phase(int d, double eps) { return make_remark(d, eps); }

double remark_hdet_formula(const Vec& x) {
  const double r = x.norm();
  const int d = static_cast<int>(x.size());
  return 3.0 * std::pow(r * r - 3.0 * r + 3.0, d - 1) * (r - 1.0) * (r - 1.0);
}

std::pair<double, double> remark_eigenvalues(const Vec& x) {
  const double r = x.norm();
  return {3.0 * (r - 1.0) * (r - 1.0), r * r - 3.0 * r + 3.0};
}

double remark_min_eigenvalue(int d, double eps, int samples, std::uint64_t seed) {
  const PhasePtr p = remark_phase(d, eps);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double lo = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Vec dir(d);
    for (int i = 0; i < d; ++i) dir[i] = g(rng);
    const Vec x = unit(d, 0) + dir / dir.norm() * eps * std::pow(u(rng), 1.0 / d);
    Eigen::SelfAdjointEigenSolver<Mat> es(p->hess(x));
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

SsssResult ssss_floor(int d, const std::vector<double>& lambdas, const SsssOptions& opts) {
  if (d < 2 || d > kMaxDim) throw PreconditionError("ssss floor needs 2 <= d <= 6");
  const PhasePtr phase = remark_phase(d, opts.eps);
  const double eps = opts.eps;
  SsssResult out;
  for (double lambda : lambdas) {
    SsssPoint pt;
    pt.lambda = lambda;
    // Cells over (y, t) with y in [-eps, eps]^{d-1} the transverse coordinates and t in [0, 1] along the slab.
    Box cells{Vec::Constant(d, -eps), Vec::Constant(d, eps)};
    cells.lo[d - 1] = 0.0;
    cells.hi[d - 1] = 1.0;
    double sum = 0.0, sum2 = 0.0;
    long count = 0;
    const double r1 = 1.0 + 1.0 / lambda;
    for_each_cell(cells, opts.samples, MeasureMethod::kMonteCarlo, opts.seed, [&](const Vec& c, double vol) {
      ++count;
      const double y2 = c.head(d - 1).squaredNorm();
      if (y2 >= 1.0) return;
      const double a = std::sqrt(1.0 - y2), b = std::sqrt(r1 * r1 - y2);
      Vec x(d);
      x[0] = a + c[d - 1] * (b - a);
      for (int i = 1; i < d; ++i) x[i] = c[i - 1];
      if ((x - unit(d, 0)).norm() > eps) return;
      const double f = lambda * phase->value(x);
      if (f < lambda || f > lambda + 1.0) return;
      const double root = std::sqrt(phase->hdet(x));
      if (root > 1.0 / lambda) return;
      const double y = root * (b - a) * vol;
      sum += y;
      sum2 += y * y;
      ++pt.hits;
      pt.max_integrand = std::max(pt.max_integrand, root);
    });
    pt.value = sum;
    pt.error = std::sqrt(std::max(0.0, sum2 - sum * sum / static_cast<double>(count)));
    out.points.push_back(pt);
  }
  std::vector<double> l, v;
  for (const auto& p : out.points) {
    l.push_back(p.lambda);
    v.push_back(p.value);
  }
  if (l.size() >= 5) out.fit = fit_decay(l, v);
  return out;
}

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw ConfigError("zero denominator in '" + s + "'");
    return parse_rational(s.substr(0, slash)) / den;
  }
  std::string digits;
  long long scale_pow = 0;
  bool neg = false, dot = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char ch = s[i];
    if (i == 0 && (ch == '-' || ch == '+')) {
      neg = ch == '-';
    } else if (ch == '.' && !dot) {
      dot = true;
    } else if (ch >= '0' && ch <= '9') {
      digits += ch;
      if (dot) ++scale_pow;
    } else {
      throw ConfigError("not a rational: '" + s + "'");
    }
  }
  if (digits.empty()) throw ConfigError("not a rational: '" + s + "'");
  boost::multiprecision::cpp_int num(digits), den = 1;
  for (long long k = 0; k < scale_pow; ++k) den *= 10;
  Rational r(num, den);
  return neg ? Rational(-r) : r;
}

bool appendix_divergence(int d, int m, const Rational& q, const Rational& rho) {
  if (d < 1 || m < 1) throw PreconditionError("appendix check needs d >= 1 and m >= 1");
  if (!(q > 1) || rho < 0) throw PreconditionError("appendix check needs q > 1 and rho >= 0");
  const Rational lhs = Rational(-2 * m) / q + Rational(2 * m - 2) * d * rho;
  return lhs <= Rational(-d);
}

Rational appendix_threshold(int d, int m, const Rational& q) {
  if (m < 2) throw PreconditionError("threshold needs m >= 2");
  return (Rational(2 * m) / q - d) / Rational((2 * m - 2) * d);
}

std::optional<int> appendix_certificate(int d, const Rational& p, const Rational& rho, int m_max) {
  if (d < 1 || !(p > 1) || rho < 0) throw PreconditionError("certificate needs d >= 1, p > 1, rho >= 0");
  for (int m = 1; m <= m_max; ++m) {
    if (Rational(2 * m - 2) * d * rho < Rational(2 * m) / p - d) return m;
  }
  return std::nullopt;
}

}  // namespace osc
