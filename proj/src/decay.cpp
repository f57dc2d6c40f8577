#include "osc/decay.hpp"

#include <algorithm>
#include <cmath>

#include "osc/parallel.hpp"

namespace osc {

namespace {

struct LsqResult {
  Eigen::VectorXd coef;
  double rms = 0.0;
};

LsqResult least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  LsqResult r;
  r.coef = a.colPivHouseholderQr().solve(y);
  r.rms = std::sqrt((a * r.coef - y).squaredNorm() / static_cast<double>(y.size()));
  return r;
}

void check_series(const std::vector<double>& lambdas, const std::vector<double>& values) {
  if (lambdas.size() != values.size()) throw PreconditionError("one value per lambda expected");
  if (lambdas.size() < 5) throw PreconditionError("decay fit needs at least 5 points");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(std::abs(values[i]) > 0.0) || !std::isfinite(values[i])) throw DegenerateFitError("zero value in series");
    if (!(lambdas[i] > 1.0)) throw PreconditionError("decay fit needs lambda > 1");
  }
}

// Columns: 1, log lambda (unless the slope is fixed), log log lambda (when extended).
DecayFit fit_once(const std::vector<double>& lambdas, const std::vector<double>& values, std::size_t skip,
                  const double* fixed_slope) {
  const Eigen::Index n = static_cast<Eigen::Index>(lambdas.size() - skip);
  const int base = fixed_slope ? 1 : 2;
  Eigen::MatrixXd a(n, base), ax(n, base + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::size_t i = static_cast<std::size_t>(k) + skip;
    const double ll = std::log(lambdas[i]);
    y[k] = std::log(std::abs(values[i])) - (fixed_slope ? *fixed_slope * ll : 0.0);
    a(k, 0) = 1.0;
    if (!fixed_slope) a(k, 1) = ll;
    ax(k, base) = std::log(ll);
  }
  ax.leftCols(base) = a;
  const LsqResult plain = least_squares(a, y);
  DecayFit f;
  f.intercept = plain.coef[0];
  f.slope = fixed_slope ? *fixed_slope : plain.coef[1];
  f.residual_rms = plain.rms;
  f.points = static_cast<int>(n);
  f.dropped = static_cast<int>(skip);
  // The extended fit is underdetermined with as many columns as points.
  if (n > base + 1) {
    const LsqResult ext = least_squares(ax, y);
    f.log_factor_gain = plain.rms - ext.rms;
    f.log_coefficient = ext.coef[base];
  }
  return f;
}

DecayFit fit_with_drop(const std::vector<double>& lambdas, const std::vector<double>& values,
                       const double* fixed_slope) {
  check_series(lambdas, values);
  // Sort by lambda so "the two smallest" is well defined.
  std::vector<std::size_t> order(lambdas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lambdas[a] < lambdas[b]; });
  std::vector<double> l, v;
  for (std::size_t i : order) {
    l.push_back(lambdas[i]);
    v.push_back(values[i]);
  }
  DecayFit f = fit_once(l, v, 0, fixed_slope);
  if (f.residual_rms > 0.05 && l.size() >= 7) f = fit_once(l, v, 2, fixed_slope);
  return f;
}

}  // namespace

LambdaSeries lambda_sweep(const std::function<OscResult(double)>& eval, const std::vector<double>& lambdas,
                          int workers) {
  for (double l : lambdas) {
    if (!(l >= 2.0)) throw PreconditionError("lambda sweep needs lambda >= 2");
  }
  LambdaSeries s;
  s.rows.resize(lambdas.size());
  parallel_for(lambdas.size(), workers, [&](std::size_t i) { s.rows[i] = {lambdas[i], eval(lambdas[i])}; });
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    if (lambdas[i + 1] != 2.0 * lambdas[i]) s.dyadic = false;
  }
  for (const auto& r : s.rows) s.all_converged = s.all_converged && r.result.converged;
  return s;
}

LambdaSeries lambda_sweep(const PhaseFunction& phase, const AmplitudeField& psi, DampingExponent z, const Vec& v,
                          const std::vector<double>& lambdas, const QuadOptions& opts, int workers) {
  return lambda_sweep([&](double l) { return osc_integral(phase, psi, l, v, z, opts); }, lambdas, workers);
}

std::vector<double> dyadic_lambdas(int k_min, int k_max) {
  std::vector<double> out;
  for (int k = k_min; k <= k_max; ++k) out.push_back(std::ldexp(1.0, k));
  return out;
}

DecayFit fit_decay(const std::vector<double>& lambdas, const std::vector<double>& values) {
  return fit_with_drop(lambdas, values, nullptr);
}

DecayFit fit_decay(const LambdaSeries& series) {
  std::vector<double> l, v;
  for (const auto& r : series.rows) {
    l.push_back(r.lambda);
    v.push_back(std::abs(r.result.value));
  }
  return fit_decay(l, v);
}

DecayFit fit_decay_fixed_slope(const std::vector<double>& lambdas, const std::vector<double>& values,
                               double slope) {
  return fit_with_drop(lambdas, values, &slope);
}

TGrowth t_growth_scan(const PhaseFunction& phase, const AmplitudeField& psi, const Vec& v, double lambda,
                      const std::vector<double>& ts, const QuadOptions& opts, int workers) {
  TGrowth out;
  out.ts = ts;
  out.normalized.resize(ts.size());
  const double scale = std::pow(std::abs(lambda), 0.5 * phase.dim());
  parallel_for(ts.size(), workers, [&](std::size_t i) {
    const OscResult r = osc_integral(phase, psi, lambda, v, {0.5, ts[i]}, opts);
    out.normalized[i] = std::abs(r.value) * scale / std::pow(1.0 + std::abs(ts[i]), 3);
  });
  for (double x : out.normalized) {
    if (!std::isfinite(x)) throw UndefinedValueError("t growth value not finite");
    out.max = std::max(out.max, x);
  }
  return out;
}

}  // namespace osc
