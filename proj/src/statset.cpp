#include "osc/statset.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "osc/parallel.hpp"

namespace osc {

namespace {

struct Sample {
  double p1;  // L phi1
  double p2;
  double w;   // a * cell volume
};

long cells_per_axis(long n, int d) {
  long m = static_cast<long>(std::ceil(std::pow(static_cast<double>(n), 1.0 / d) - 1e-9));
  return std::max(1L, m);
}

void check_support(const Box& b) {
  for (int i = 0; i < b.dim(); ++i) {
    if (!std::isfinite(b.lo[i]) || !std::isfinite(b.hi[i]) || !(b.hi[i] >= b.lo[i])) {
      throw UnsupportedInputError("amplitude needs a bounded support box");
    }
  }
}

// Window sums of width w over bins: out[j] = sum_{k=j}^{j+w-1} bins[k]. Summed directly: prefix
// differences lose the small windows in the tails to cancellation.
std::vector<double> window_sums(const std::vector<double>& bins, int w, std::size_t count) {
  std::vector<double> out(count, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t hi = std::min(bins.size(), j + static_cast<std::size_t>(w));
    for (std::size_t k = j; k < hi; ++k) out[j] += bins[k];
  }
  return out;
}

int window_width(double step) {
  const int w = static_cast<int>(std::lround(1.0 / step));
  if (w < 1 || std::abs(w * step - 1.0) > 1e-12) throw PreconditionError("beta1 step must divide 1");
  return w;
}

}  // namespace

void for_each_cell(const Box& box, long n, MeasureMethod method, std::uint64_t seed,
                   const std::function<void(const Vec&, double)>& fn) {
  check_support(box);
  const int d = box.dim();
  const long m = cells_per_axis(n, d);
  const Vec width = (box.hi - box.lo) / static_cast<double>(m);
  const double vol = width.prod();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<long> idx(d, 0);
  Vec x(d);
  while (true) {
    for (int i = 0; i < d; ++i) {
      const double f = method == MeasureMethod::kMonteCarlo ? u(rng) : 0.5;
      x[i] = box.lo[i] + (static_cast<double>(idx[i]) + f) * width[i];
    }
    fn(x, vol);
    int i = 0;
    while (i < d && ++idx[i] == m) idx[i++] = 0;
    if (i == d) break;
  }
}

MeasureEstimate band_measure(const BandProblem& p, double beta1, double beta2, double L, double s,
                             const MeasureOptions& opts) {
  if (!(s > 1.0)) throw PreconditionError("band ratio s must exceed 1");
  if (opts.samples < 1000) throw PreconditionError("band measure needs at least 1000 samples");
  check_support(p.support);
  const int d = p.support.dim();
  auto inside = [&](const Vec& x) {
    const double v1 = L * p.phi1(x);
    if (v1 < beta1 || v1 > beta1 + 1.0) return false;
    const double v2 = p.phi2(x);
    return v2 >= beta2 && v2 <= s * beta2;
  };
  double sum = 0.0, sum2 = 0.0;
  long count = 0;
  double boundary = 0.0;
  const long m = cells_per_axis(opts.samples, d);
  const Vec width = (p.support.hi - p.support.lo) / static_cast<double>(m);
  for_each_cell(p.support, opts.samples, opts.method, opts.seed, [&](const Vec& x, double vol) {
    ++count;
    const double a = p.a(x);
    const bool in = a != 0.0 && inside(x);
    const double y = in ? a * vol : 0.0;
    sum += y;
    sum2 += y * y;
    if (opts.method == MeasureMethod::kGrid) {
      // A cell whose indicator differs from an axis neighbour is only resolved to its own volume.
      for (int i = 0; i < d; ++i) {
        for (double sgn : {-1.0, 1.0}) {
          Vec z = x;
          z[i] += sgn * width[i];
          if (!p.support.contains(z)) continue;
          const double az = p.a(z);
          if ((az != 0.0 && inside(z)) != in) {
            boundary += std::max(std::abs(a), std::abs(az)) * vol;
            i = d;
            break;
          }
        }
      }
    }
  });
  MeasureEstimate out;
  out.value = sum;
  if (opts.method == MeasureMethod::kGrid) {
    out.error = boundary;
  } else {
    out.error = std::sqrt(std::max(0.0, sum2 - sum * sum / static_cast<double>(count)));
  }
  return out;
}

double band_ratio(double tau) { return std::exp(1.0 / std::max(std::abs(tau), 1.0)); }

StatSetProfile stat_set_profile(const BandProblem& p, double L, double tau, const ProfileOptions& opts) {
  if (opts.measure.samples < 1000) throw PreconditionError("profile needs at least 1000 samples");
  check_support(p.support);
  const int w = window_width(opts.beta1_step);
  StatSetProfile out;
  out.L = L;
  out.tau = tau;
  out.s = band_ratio(tau);

  std::vector<Sample> samples;
  long total = 0;
  for_each_cell(p.support, opts.measure.samples, opts.measure.method, opts.measure.seed,
                [&](const Vec& x, double vol) {
                  ++total;
                  const double a = p.a(x);
                  if (a == 0.0) return;
                  const double v2 = p.phi2(x);
                  if (!(v2 > 0.0)) return;
                  samples.push_back({L * p.phi1(x), v2, a * vol});
                });
  if (samples.empty()) return out;
  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.p2 < b.p2; });

  double lo1 = samples[0].p1, hi1 = lo1;
  for (const Sample& s : samples) {
    lo1 = std::min(lo1, s.p1);
    hi1 = std::max(hi1, s.p1);
  }
  const double step = opts.beta1_step;
  const long j0 = static_cast<long>(std::floor(lo1 / step)) - (w - 1);
  const long j1 = static_cast<long>(std::floor(hi1 / step));
  const std::size_t n1 = static_cast<std::size_t>(j1 - j0 + 1);
  out.beta1.resize(n1);
  for (std::size_t j = 0; j < n1; ++j) out.beta1[j] = step * static_cast<double>(j0 + static_cast<long>(j));

  const double pd = opts.per_decade;
  const long k0 = static_cast<long>(std::floor(std::log10(samples.front().p2) * pd - opts.pad_decades * pd));
  const long k1 = static_cast<long>(std::ceil(std::log10(samples.back().p2) * pd + opts.pad_decades * pd));
  for (long k = k0; k <= k1; ++k) out.beta2.push_back(std::pow(10.0, static_cast<double>(k) / pd));

  const std::size_t rows = out.beta2.size();
  out.S.assign(rows, {});
  out.error.assign(rows, {});
  out.row_sup.assign(rows, 0.0);
  parallel_for(rows, opts.workers, [&](std::size_t i) {
    const double b = out.beta2[i];
    auto first = std::lower_bound(samples.begin(), samples.end(), b,
                                  [](const Sample& s, double v) { return s.p2 < v; });
    auto last = std::upper_bound(samples.begin(), samples.end(), out.s * b,
                                 [](double v, const Sample& s) { return v < s.p2; });
    std::vector<double> bins(n1 + w, 0.0), bins2(n1 + w, 0.0);
    for (auto it = first; it < last; ++it) {
      const long k = static_cast<long>(std::floor(it->p1 / step)) - j0;
      bins[k] += it->w;
      bins2[k] += it->w * it->w;
    }
    // Window j holds the bins j .. j + w - 1.
    std::vector<double> S = window_sums(bins, w, n1);
    std::vector<double> S2 = window_sums(bins2, w, n1);
    out.S[i] = S;
    out.error[i].resize(n1);
    for (std::size_t j = 0; j < n1; ++j) {
      out.error[i][j] = std::sqrt(std::max(0.0, S2[j] - S[j] * S[j] / static_cast<double>(total)));
    }
    out.row_sup[i] = S.empty() ? 0.0 : *std::max_element(S.begin(), S.end());
  });
  return out;
}

double ssm_rhs(const StatSetProfile& profile, double tau) {
  if (std::abs(profile.s - band_ratio(tau)) > 1e-12 * profile.s) {
    throw PreconditionError("profile band ratio does not match tau");
  }
  const auto& r = profile.row_sup;
  if (r.empty()) return 0.0;
  if (r.front() > 0.0 || r.back() > 0.0) throw GridTooSmallError("beta2 grid edge carries nonzero S");
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    integral += 0.5 * (r[i] + r[i + 1]) * std::log(profile.beta2[i + 1] / profile.beta2[i]);
  }
  return (1.0 + std::abs(tau)) * integral;
}

OscResult ssm_lhs(const BandProblem& p, double L, double tau, const QuadOptions& opts) {
  if (!p.wavenumber) throw PreconditionError("oscillatory side needs a wavenumber estimate");
  check_support(p.support);
  Integrand g;
  g.f = [&](const Vec& x) -> cplx {
    const double a = p.a(x);
    if (a == 0.0) return 0.0;
    double phase = L * p.phi1(x);
    if (tau != 0.0) {
      const double v2 = p.phi2(x);
      if (!(v2 > 0.0)) throw DomainError("log phi2 undefined on supp a");
      phase += tau * std::log(v2);
    }
    return a * std::polar(1.0, phase);
  };
  g.wavenumber = [&](const Vec& x) { return p.wavenumber(x, L, tau); };
  return integrate(g, p.support, opts);
}

int monotonicity_changes(const std::vector<double>& values, double noise_floor) {
  int changes = 0, last = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double delta = values[i + 1] - values[i];
    if (std::abs(delta) <= noise_floor) continue;
    const int sgn = delta > 0 ? 1 : -1;
    if (last != 0 && sgn != last) ++changes;
    last = sgn;
  }
  return changes;
}

int monotonicity_changes_with_errors(const std::vector<double>& values, const std::vector<double>& errors) {
  if (errors.size() != values.size()) throw PreconditionError("one error per value expected");
  int changes = 0, last = 0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double delta = values[i + 1] - values[i];
    if (std::abs(delta) <= 3.0 * std::hypot(errors[i], errors[i + 1])) continue;
    const int sgn = delta > 0 ? 1 : -1;
    if (last != 0 && sgn != last) ++changes;
    last = sgn;
  }
  return changes;
}

BandBound verify_band_bound(const DyadicPiece& piece, const BandBoundOptions& opts) {
  const int d = piece.dim();
  const int w = window_width(opts.beta_step);
  const double hl = piece.h() * std::abs(piece.lambda());
  BandBound out;
  double C = opts.C;
  if (C <= 0.0) {
    const double ball = std::pow(M_PI, 0.5 * (d - 1)) / std::tgamma(0.5 * (d + 1));
    C = 40.0 * d * std::sqrt(double(d)) * ball * std::pow(piece.shell_rmax(), d - 1);
  }
  out.bound = C / hl;

  // h lambda Phi^h lies in [h lambda / 2, 2 h lambda] on supp A.
  const long j0 = static_cast<long>(std::floor(0.5 * hl / opts.beta_step)) - w;
  const std::size_t nb = static_cast<std::size_t>(std::ceil(1.5 * hl / opts.beta_step)) + 2 * w + 2;
  std::vector<std::vector<double>> bins(d, std::vector<double>(nb, 0.0));
  for_each_cell(piece.box(), opts.samples, MeasureMethod::kMonteCarlo, opts.seed, [&](const Vec& y, double vol) {
    if (piece.A(y) == 0.0) return;
    const double v = hl * piece.phi(y);
    const long k = static_cast<long>(std::floor(v / opts.beta_step)) - j0;
    if (k < 0 || k >= static_cast<long>(nb)) return;
    for (int l = 0; l < d; ++l) {
      if (piece.A_lk(l, 0, y) != 0.0) bins[l][k] += vol;
    }
  });
  for (int l = 0; l < d; ++l) {
    const std::vector<double> s = window_sums(bins[l], w, nb);
    out.sup_measure = std::max(out.sup_measure, *std::max_element(s.begin(), s.end()));
  }
  if (opts.throw_on_failure && out.sup_measure > out.bound) {
    throw CertificationError("band measure on the kappa = 0 support exceeds C / (h lambda)");
  }
  return out;
}

}  // namespace osc
