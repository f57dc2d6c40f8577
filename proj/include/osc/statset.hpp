#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "osc/decompose.hpp"

namespace osc {

using ScalarField = std::function<double(const Vec&)>;

// Data of the stationary-set bound: phase L Phi1 + tau log Phi2, amplitude a supported in `support`.
struct BandProblem {
  ScalarField phi1;
  ScalarField phi2;
  ScalarField a;
  Box support;
  // |grad(L phi1 + tau log phi2)| at x, used only to size quadrature panels.
  std::function<double(const Vec&, double L, double tau)> wavenumber;
};

enum class MeasureMethod { kMonteCarlo, kGrid };

struct MeasureOptions {
  MeasureMethod method = MeasureMethod::kMonteCarlo;
  long samples = 1L << 16;
  std::uint64_t seed = 1;
};

struct MeasureEstimate {
  double value = 0.0;
  double error = 0.0;  // standard error (Monte Carlo) or cell-resolution bound (grid)
};

// Calls fn(x, cell_volume) once per cell of an m^d grid over box, m = ceil(n^{1/d}).
// Monte Carlo jitters x uniformly inside each cell; the grid method uses cell midpoints.
void for_each_cell(const Box& box, long n, MeasureMethod method, std::uint64_t seed,
                   const std::function<void(const Vec&, double)>& fn);

// int 1{L phi1 in [beta1, beta1+1]} 1{phi2 in [beta2, s beta2]} a dx.
MeasureEstimate band_measure(const BandProblem& p, double beta1, double beta2, double L, double s,
                             const MeasureOptions& opts);

struct ProfileOptions {
  MeasureOptions measure;
  double beta1_step = 0.125;   // beta1 grid spacing; the bands have width 1
  int per_decade = 64;         // beta2 log-grid density
  double pad_decades = 1.0;    // beta2 grid padding beyond the range of phi2 on supp a
  int workers = 1;
};

struct StatSetProfile {
  std::vector<double> beta1;
  std::vector<double> beta2;
  std::vector<std::vector<double>> S;       // S[i][j] at (beta2[i], beta1[j])
  std::vector<std::vector<double>> error;   // standard errors, same layout
  std::vector<double> row_sup;              // sup over beta1 of S[i]
  double L = 0.0;
  double tau = 0.0;
  double s = 0.0;
};

// e^{1 / max(|tau|, 1)}.
double band_ratio(double tau);

StatSetProfile stat_set_profile(const BandProblem& p, double L, double tau, const ProfileOptions& opts);

// (1 + |tau|) int_0^inf sup_beta1 S dbeta2 / beta2, trapezoid in log beta2.
double ssm_rhs(const StatSetProfile& profile, double tau);

// int e^{i (L phi1 + tau log phi2)} a dx.
OscResult ssm_lhs(const BandProblem& p, double L, double tau, const QuadOptions& opts);

// Sign changes of consecutive differences, ignoring differences with |delta| <= noise_floor.
int monotonicity_changes(const std::vector<double>& values, double noise_floor);
// Same count with the floor 3 sqrt(e_i^2 + e_{i+1}^2) built from per-value standard errors.
int monotonicity_changes_with_errors(const std::vector<double>& values, const std::vector<double>& errors);

struct BandBoundOptions {
  double C = 0.0;  // 0: 40 d sqrt(d) |B^{d-1}| rmax^{d-1}, from the slicing argument
  long samples = 1L << 16;
  double beta_step = 0.125;
  std::uint64_t seed = 3;
  bool throw_on_failure = true;
};

struct BandBound {
  double sup_measure = 0.0;  // max over l and beta of |{y in supp A_{l,0} : h lambda Phi^h(y) in [beta, beta+1]}|
  double bound = 0.0;        // C / (h lambda)
};

BandBound verify_band_bound(const DyadicPiece& piece, const BandBoundOptions& opts = {});

}  // namespace osc
