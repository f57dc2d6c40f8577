#pragma once

#include <vector>

#include "osc/quad.hpp"

namespace osc {

struct SweepRow {
  double lambda = 0.0;
  OscResult result;
};

struct LambdaSeries {
  std::vector<SweepRow> rows;
  bool dyadic = true;  // consecutive ratios all equal to 2
  bool all_converged = true;
};

// One damped oscillatory integral per lambda; rows keep the input order for any worker count.
LambdaSeries lambda_sweep(const PhaseFunction& phase, const AmplitudeField& psi, DampingExponent z, const Vec& v,
                          const std::vector<double>& lambdas, const QuadOptions& opts, int workers = 1);

// Same, with osc_integral replaced by any lambda -> OscResult map.
LambdaSeries lambda_sweep(const std::function<OscResult(double)>& eval, const std::vector<double>& lambdas,
                          int workers = 1);

std::vector<double> dyadic_lambdas(int k_min, int k_max);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  // residual(slope only) - residual(slope + log log lambda term), both as RMS.
  double log_factor_gain = 0.0;
  double log_coefficient = 0.0;  // coefficient of log log lambda in the extended fit
  int points = 0;
  int dropped = 0;               // smallest lambdas left out of the fit
};

// Least squares of log|value| on log lambda. When the RMS residual exceeds 0.05 the two smallest
// lambdas are dropped once and the fit is redone.
DecayFit fit_decay(const std::vector<double>& lambdas, const std::vector<double>& values);
DecayFit fit_decay(const LambdaSeries& series);

// Fit with the slope held fixed: only the intercept (and the log log lambda coefficient) are free.
DecayFit fit_decay_fixed_slope(const std::vector<double>& lambdas, const std::vector<double>& values,
                               double slope);

struct TGrowth {
  std::vector<double> ts;
  std::vector<double> normalized;  // |I^{1/2+it}| lambda^{d/2} / (1+|t|)^3
  double max = 0.0;
};

TGrowth t_growth_scan(const PhaseFunction& phase, const AmplitudeField& psi, const Vec& v, double lambda,
                      const std::vector<double>& ts, const QuadOptions& opts, int workers = 1);

}  // namespace osc
