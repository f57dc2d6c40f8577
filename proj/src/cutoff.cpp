#include "osc/cutoff.hpp"

#include <algorithm>
#include <cmath>

namespace osc {

namespace {

double poly_deriv(const std::vector<double>& c, double r, int k) {
  double s = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= k; --i) {
    double f = 1.0;
    for (int j = 0; j < k; ++j) f *= i - j;
    s = s * r + f * c[i];
  }
  return s;
}

}  // namespace

double PiecewisePolynomial::eval(double r, int k, int side) const {
  if (breaks.empty() || r < breaks.front() || r > breaks.back()) return 0.0;
  auto it = side < 0 ? std::lower_bound(breaks.begin(), breaks.end(), r)
                     : std::upper_bound(breaks.begin(), breaks.end(), r);
  const std::ptrdiff_t piece = (it - breaks.begin()) - 1;
  if (piece < 0 || piece >= static_cast<std::ptrdiff_t>(coeffs.size())) return 0.0;
  return poly_deriv(coeffs[static_cast<std::size_t>(piece)], r, k);
}

PiecewisePolynomial PiecewisePolynomial::scaled(double a) const {
  PiecewisePolynomial out;
  out.smoothness = smoothness;
  for (double b : breaks) out.breaks.push_back(b / a);
  for (const auto& c : coeffs) {
    std::vector<double> nc(c.size());
    double p = 1.0;
    for (std::size_t i = 0; i < c.size(); ++i, p *= a) nc[i] = c[i] * p;
    out.coeffs.push_back(nc);
  }
  return out;
}

PiecewisePolynomial PiecewisePolynomial::operator-(const PiecewisePolynomial& o) const {
  PiecewisePolynomial out;
  out.smoothness = std::min(smoothness, o.smoothness);
  out.breaks = breaks;
  out.breaks.insert(out.breaks.end(), o.breaks.begin(), o.breaks.end());
  std::sort(out.breaks.begin(), out.breaks.end());
  out.breaks.erase(std::unique(out.breaks.begin(), out.breaks.end()), out.breaks.end());
  auto piece_of = [](const PiecewisePolynomial& p, double mid) -> std::vector<double> {
    if (p.breaks.empty() || mid < p.breaks.front() || mid > p.breaks.back()) return {};
    auto it = std::upper_bound(p.breaks.begin(), p.breaks.end(), mid);
    return p.coeffs[static_cast<std::size_t>(it - p.breaks.begin() - 1)];
  };
  for (std::size_t i = 0; i + 1 < out.breaks.size(); ++i) {
    const double mid = 0.5 * (out.breaks[i] + out.breaks[i + 1]);
    auto a = piece_of(*this, mid);
    auto b = piece_of(o, mid);
    std::vector<double> c(std::max(a.size(), b.size()), 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) c[k] += a[k];
    for (std::size_t k = 0; k < b.size(); ++k) c[k] -= b[k];
    out.coeffs.push_back(c);
  }
  return out;
}

double PiecewisePolynomial::junction_mismatch() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    for (int k = 0; k <= smoothness; ++k) {
      const double l = i == 0 ? 0.0 : poly_deriv(coeffs[i - 1], breaks[i], k);
      const double r = i + 1 == breaks.size() ? 0.0 : poly_deriv(coeffs[i], breaks[i], k);
      worst = std::max(worst, std::abs(l - r));
    }
  }
  return worst;
}

PiecewisePolynomial eta0_poly() {
  // (2-r)^3 (6r^2 - 9r + 4) expanded on [1,2]; the left piece is its reflection.
  const std::vector<double> right{32, -120, 180, -130, 45, -6};
  std::vector<double> left = right;
  for (std::size_t k = 1; k < left.size(); k += 2) left[k] = -left[k];
  PiecewisePolynomial p;
  p.breaks = {-2, -1, 1, 2};
  p.coeffs = {left, {1.0}, right};
  return p;
}

PiecewisePolynomial eta_poly() { return eta0_poly() - eta0_poly().scaled(2.0); }

PiecewisePolynomial eta_tilde_poly(double c, int d) {
  return eta0_poly().scaled(1.0 / (4.0 * c)) - eta0_poly().scaled(80.0 * d * std::sqrt(double(d)));
}

double eta0(double r) {
  const double a = std::abs(r);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double u = 2.0 - a;
  return u * u * u * ((6.0 * a - 9.0) * a + 4.0);
}

double eta0_deriv(double r, int k) {
  if (k == 0) return eta0(r);
  const double a = std::abs(r);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  const double u = 2.0 - a;
  const double q = (6.0 * a - 9.0) * a + 4.0;
  double v;
  if (k == 1) {
    v = -3.0 * u * u * q + u * u * u * (12.0 * a - 9.0);
    return r < 0 ? -v : v;
  }
  v = 6.0 * u * q - 6.0 * u * u * (12.0 * a - 9.0) + 12.0 * u * u * u;
  return v;
}

double eta(double r) { return eta0(r) - eta0(2.0 * r); }

double eta_tilde(double r, double c, int d) {
  return eta0(r / (4.0 * c)) - eta0(80.0 * d * std::sqrt(double(d)) * r);
}

double psi_circ(const Vec& x) { return eta0(x.norm()); }

std::vector<double> partition_psi(const std::vector<Vec>& centers, double eps, const Vec& x) {
  std::vector<double> w(centers.size());
  for (std::size_t j = 0; j < centers.size(); ++j) w[j] = psi_circ((x - centers[j]) / eps);
  const double s = pairwise_sum(w.data(), w.size());
  for (double& v : w) v = s > 0.0 ? v / s : 0.0;
  return w;
}

std::vector<Vec> covering_centers(const Box& box, double eps) {
  const int d = box.dim();
  const double step = 0.5 * eps;
  std::vector<int> n(d);
  for (int i = 0; i < d; ++i) n[i] = static_cast<int>(std::ceil((box.hi[i] - box.lo[i]) / step)) + 1;
  std::vector<Vec> out;
  std::vector<int> idx(d, 0);
  while (true) {
    Vec c(d);
    for (int i = 0; i < d; ++i) c[i] = box.lo[i] + step * idx[i];
    out.push_back(c);
    int i = 0;
    while (i < d && ++idx[i] == n[i]) idx[i++] = 0;
    if (i == d) break;
  }
  return out;
}

}  // namespace osc
