#pragma once

#include <array>
#include <cmath>

namespace osc {

// Truncated univariate Taylor series: c[j] = f^(j)(s0) / j!.
// Used for exact directional derivatives (v.grad)^j of catalog phases along a line.
class Jet {
 public:
  static constexpr int kMaxOrder = 31;

  Jet() : n_(0) { c_.fill(0.0); }
  Jet(double value, int order) : n_(order) {
    c_.fill(0.0);
    c_[0] = value;
  }
  static Jet variable(double value, double slope, int order) {
    Jet j(value, order);
    if (order >= 1) j.c_[1] = slope;
    return j;
  }

  int order() const { return n_; }
  double operator[](int j) const { return c_[j]; }
  double& operator[](int j) { return c_[j]; }
  double value() const { return c_[0]; }
  // j-th derivative with respect to the line parameter.
  double derivative(int j) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(double a);
  Jet& operator+=(double a) {
    c_[0] += a;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double b) { return a += b; }
  friend Jet operator+(double b, Jet a) { return a += b; }
  friend Jet operator-(Jet a, double b) { return a += -b; }
  friend Jet operator-(double b, Jet a) {
    a *= -1.0;
    return a += b;
  }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double b) { return a *= b; }
  friend Jet operator*(double b, Jet a) { return a *= b; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(Jet a, double b) { return a *= 1.0 / b; }
  friend Jet operator/(double a, const Jet& b) { return Jet(a, b.n_) / b; }

 private:
  int n_;
  std::array<double, kMaxOrder + 1> c_;
};

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
// a^p for real p; requires a.value() > 0 unless p is a nonnegative integer.
Jet pow(const Jet& a, double p);
Jet ipow(const Jet& a, int p);

inline double ipow(double a, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= a;
  return r;
}

}  // namespace osc
