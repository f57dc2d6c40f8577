#include "osc/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osc/cutoff.hpp"

namespace osc {

namespace {

Box intersect(const Box& a, const Box& b) { return Box{a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi)}; }

// I_v^h over a box in base coordinates u = x + omega.
OscResult height_integral(const PhaseFunction& phase, const AmplitudeField& psi, const Vec& v, const Vec& omega,
                          double h, double lambda, double t, const Box& box, const QuadOptions& opts) {
  const double f0 = phase.value(omega);
  auto phi_v = [&](const Vec& u) { return phase.value(u) + v.dot(u - omega) - f0; };
  Integrand g;
  g.f = [&](const Vec& u) -> cplx {
    const double p = psi(u);
    if (p == 0.0) return 0.0;
    const double pv = phi_v(u);
    const double e = eta(pv / h);
    if (e == 0.0) return 0.0;
    return p * e * damping_power(phase.hdet(u), {0.5, t}) * std::polar(1.0, lambda * pv);
  };
  g.wavenumber = [&](const Vec& u) { return std::abs(lambda) * (phase.grad(u) + v).norm() + std::abs(t); };
  return integrate(g, intersect(intersect(box, psi.support), phase.domain()), opts);
}

}  // namespace

HeightSet dyadic_heights(double lo, double hi, double h_min, double h_circ) {
  HeightSet out;
  if (lo > hi || hi <= 0.0) return out;
  // h/2 <= hi and 2h >= lo.
  const int top = static_cast<int>(std::floor(std::log2(2.0 * hi)));
  const double floor_h = std::max(lo / 2.0, h_min);
  for (int k = top; std::ldexp(1.0, k) >= floor_h; --k) {
    const double h = std::ldexp(1.0, k);
    (h >= h_circ ? out.direct : out.normalized).push_back(h);
    if (k < -1000) break;
  }
  return out;
}

std::pair<double, double> phase_range(const PhaseFunction& phi_v, const AmplitudeField& psi, const Vec& omega,
                                      int n) {
  const int d = phi_v.dim();
  const Box box = psi.support;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  long total = 1;
  for (int i = 0; i < d; ++i) total *= n + 1;
  Vec u(d);
  for (long m = 0; m < total; ++m) {
    long r = m;
    for (int i = 0; i < d; ++i) {
      u[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * static_cast<double>(r % (n + 1)) / n;
      r /= n + 1;
    }
    if (!(psi(u) > 0.0)) continue;
    const double p = phi_v.value(u - omega);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  if (psi(omega) > 0.0) lo = 0.0;
  return {lo, hi};
}

DyadicPiece::DyadicPiece(NormalizedPhase np, const CertReport& cert, AmplitudeField psi, double lambda, double t)
    : np_(std::move(np)), psi_(std::move(psi)), lambda_(lambda), t_(t), c_(cert.grad_ceiling) {
  if (!(c_ > 0.0) || !(cert.shell_rmax > 0.0)) throw PreconditionError("piece needs a certified normalized phase");
  if (np_.h * std::abs(lambda_) < 1.0) throw PreconditionError("piece needs h |lambda| >= 1");
  d_ = np_.phase->dim();
  step_ = std::min(1e-3, 0.1 / (np_.h * std::abs(lambda_)));
  rmax_ = cert.shell_rmax;
  box_ = Box::cube(d_, 1.05 * rmax_);
}

double DyadicPiece::along(int l, const Vec& y, int m, const std::function<double(const Vec&)>& f) const {
  const Vec e = unit(d_, l) * step_;
  const double s = step_;
  switch (m) {
    case 0:
      return f(y);
    case 1:
      return (f(y - 2 * e) - 8 * f(y - e) + 8 * f(y + e) - f(y + 2 * e)) / (12 * s);
    case 2:
      return (-f(y + 2 * e) + 16 * f(y + e) - 30 * f(y) + 16 * f(y - e) - f(y - 2 * e)) / (12 * s * s);
    case 3:
      return (f(y + 2 * e) - 2 * f(y + e) + 2 * f(y - e) - f(y - 2 * e)) / (2 * s * s * s);
    default:
      throw PreconditionError("derivative order above 3");
  }
}

double DyadicPiece::hdet_deriv(int l, int m, const Vec& y) const {
  return along(l, y, m, [&](const Vec& x) { return hdet(x); });
}

double DyadicPiece::Psi(const Vec& y) const {
  const double base = lambda_ * np_.h * phi(y);
  const double H = hdet(y);
  return H > 0.0 ? base + t_ * std::log(H) : base;
}

double DyadicPiece::dPsi(int l, int m, const Vec& y) const {
  const Jet j = np_.phase->line_jet(y, unit(d_, l), m);
  double out = lambda_ * np_.h * j.derivative(m);
  const double H = hdet(y);
  if (t_ == 0.0 || !(H > 0.0)) return out;
  const double h1 = hdet_deriv(l, 1, y);
  if (m == 1) return out + t_ * h1 / H;
  const double h2 = hdet_deriv(l, 2, y);
  if (m == 2) return out + t_ * (h2 / H - h1 * h1 / (H * H));
  const double h3 = hdet_deriv(l, 3, y);
  return out + t_ * (h3 / H - 3 * h1 * h2 / (H * H) + 2 * h1 * h1 * h1 / (H * H * H));
}

double DyadicPiece::A(const Vec& y) const {
  const double e = eta(phi(y));
  if (e == 0.0) return 0.0;
  const double p = psi_(np_.T.apply(y) + np_.omega);
  if (p == 0.0) return 0.0;
  return e * std::sqrt(hdet(y)) * p;
}

double DyadicPiece::A_l(int l, const Vec& y) const {
  const double a = A(y);
  if (a == 0.0) return 0.0;
  const Vec g = np_.phase->grad(y);
  const double k = 20.0 * d_ * std::sqrt(double(d_));
  double den = 0.0;
  for (int j = 0; j < d_; ++j) den += 1.0 - eta0(k * g[j]);
  if (den == 0.0) return 0.0;
  return a * (1.0 - eta0(k * g[l])) / den;
}

double DyadicPiece::a_l(int l, const Vec& y) const {
  const double H = hdet(y);
  const double hl = np_.h * lambda_;
  const double f1 = 1.0 - eta0(hl * std::sqrt(H));
  if (f1 == 0.0 || t_ == 0.0) return f1;
  const double r = t_ * hdet_deriv(l, 1, y) / (hl * H);
  return f1 * (1.0 - eta_tilde(r, c_, d_));
}

double DyadicPiece::A_lk(int l, int kappa, const Vec& y) const {
  const double a = A_l(l, y);
  if (a == 0.0) return 0.0;
  const double w = a_l(l, y);
  return kappa == 0 ? a * (1.0 - w) : a * w;
}

double DyadicPiece::D2(int l, const Vec& y) const {
  auto g = [&](const Vec& x) { return A_lk(l, 1, x); };
  const double a0 = g(y);
  const double a1 = along(l, y, 1, g), a2 = along(l, y, 2, g);
  if (a0 == 0.0 && a1 == 0.0 && a2 == 0.0) return 0.0;
  const double p1 = dPsi(l, 1, y);
  if (p1 == 0.0) return 0.0;
  const double p2 = dPsi(l, 2, y), p3 = dPsi(l, 3, y);
  const double d1 = -p2 / (p1 * p1);
  const double d2 = -p3 / (p1 * p1 * p1) + 3 * p2 * p2 / (p1 * p1 * p1 * p1);
  return d2 * a0 + d1 * 3 * a1 / p1 + a2 / (p1 * p1);
}

DyadicPiece build_piece(const NormalizedPhase& np, const CertReport& cert, const AmplitudeField& psi, double lambda,
                        double t) {
  return DyadicPiece(np, cert, psi, lambda, t);
}

PieceIntegral piece_integral(const DyadicPiece& piece, const QuadOptions& opts) {
  PieceIntegral out;
  const int d = piece.dim();
  const double hl = piece.h() * piece.lambda();
  Integrand g;
  g.f = [&](const Vec& y) -> cplx {
    const double a = piece.A(y);
    return a == 0.0 ? cplx(0.0) : a * std::polar(1.0, piece.Psi(y));
  };
  g.wavenumber = [&](const Vec& y) {
    return std::abs(hl) * piece.normalized().phase->grad(y).norm() + std::abs(piece.t());
  };
  out.rescaled = integrate(g, piece.box(), opts);

  const NormalizedPhase& np = piece.normalized();
  const double h = np.h;
  const double phase = piece.t() * std::log(std::pow(h, d) / (np.T.det * np.T.det));
  out.predicted = std::pow(h, 0.5 * d) * std::polar(1.0, phase) * out.rescaled.value;

  // Image of the normalized box in base coordinates.
  Vec half(d);
  for (int i = 0; i < d; ++i) half[i] = piece.box().hi[0] * np.T.matrix.row(i).cwiseAbs().sum();
  const Vec c = np.T.translation + np.omega;
  QuadOptions o = opts;
  o.tol = opts.tol * std::pow(h, 0.5 * d);
  out.direct = height_integral(*np.original, piece.psi(), np.v, np.omega, h, piece.lambda(), piece.t(),
                               Box{c - half, c + half}, o);
  return out;
}

OscResult piece_split_integral(const DyadicPiece& piece, int l, int kappa, const QuadOptions& opts) {
  const double hl = piece.h() * piece.lambda();
  Integrand g;
  g.f = [&](const Vec& y) -> cplx {
    const double a = piece.A_lk(l, kappa, y);
    return a == 0.0 ? cplx(0.0) : a * std::polar(1.0, piece.Psi(y));
  };
  g.wavenumber = [&](const Vec& y) {
    return std::abs(hl) * piece.normalized().phase->grad(y).norm() + std::abs(piece.t());
  };
  return integrate(g, piece.box(), opts);
}

OscResult direct_height_integral(const PhaseFunction& phase, const AmplitudeField& psi, const Vec& v,
                                 const Vec& omega, double h, double lambda, double t, const QuadOptions& opts) {
  return height_integral(phase, psi, v, omega, h, lambda, t, psi.support, opts);
}

}  // namespace osc
