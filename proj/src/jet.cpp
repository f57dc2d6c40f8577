#include "osc/jet.hpp"

#include <algorithm>
#include <stdexcept>

namespace osc {

double Jet::derivative(int j) const {
  double f = 1.0;
  for (int i = 2; i <= j; ++i) f *= i;
  return c_[j] * f;
}

Jet& Jet::operator+=(const Jet& o) {
  n_ = std::max(n_, o.n_);
  for (int j = 0; j <= n_; ++j) c_[j] += o.c_[j];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  n_ = std::max(n_, o.n_);
  for (int j = 0; j <= n_; ++j) c_[j] -= o.c_[j];
  return *this;
}

Jet& Jet::operator*=(double a) {
  for (int j = 0; j <= n_; ++j) c_[j] *= a;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int n = std::max(a.n_, b.n_);
  Jet r(0.0, n);
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
    r.c_[k] = s;
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  if (b.c_[0] == 0.0) throw std::domain_error("jet division by zero");
  const int n = std::max(a.n_, b.n_);
  Jet r(0.0, n);
  for (int k = 0; k <= n; ++k) {
    double s = a.c_[k];
    for (int i = 1; i <= k; ++i) s -= b.c_[i] * r.c_[k - i];
    r.c_[k] = s / b.c_[0];
  }
  return r;
}

Jet exp(const Jet& a) {
  const int n = a.order();
  Jet r(std::exp(a[0]), n);
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += i * a[i] * r[k - i];
    r[k] = s / k;
  }
  return r;
}

Jet log(const Jet& a) {
  if (a[0] <= 0.0) throw std::domain_error("jet log of nonpositive value");
  const int n = a.order();
  Jet r(std::log(a[0]), n);
  for (int k = 1; k <= n; ++k) {
    double s = k * a[k];
    for (int i = 1; i < k; ++i) s -= i * r[i] * a[k - i];
    r[k] = s / (k * a[0]);
  }
  return r;
}

Jet pow(const Jet& a, double p) {
  if (a[0] <= 0.0) throw std::domain_error("jet pow of nonpositive value");
  const int n = a.order();
  Jet r(std::pow(a[0], p), n);
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += (p * i - (k - i)) * a[i] * r[k - i];
    r[k] = s / (k * a[0]);
  }
  return r;
}

Jet sqrt(const Jet& a) { return pow(a, 0.5); }

Jet ipow(const Jet& a, int p) {
  Jet r(1.0, a.order());
  Jet base = a;
  while (p > 0) {
    if (p & 1) r = r * base;
    p >>= 1;
    if (p) base = base * base;
  }
  return r;
}

}  // namespace osc
