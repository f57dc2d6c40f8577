#include "osc/types.hpp"

namespace osc {

bool Box::contains(const Vec& x, double slack) const {
  for (int i = 0; i < dim(); ++i) {
    if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
  }
  return true;
}

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= hi[i] - lo[i];
  return v;
}

Box Box::cube(const Vec& center, double half_width) {
  Box b;
  b.lo = center.array() - half_width;
  b.hi = center.array() + half_width;
  return b;
}

Box Box::cube(int d, double half_width) { return cube(zeros(d), half_width); }

Vec make_vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

Vec zeros(int d) { return Vec::Zero(d); }

Vec unit(int d, int i) {
  Vec v = Vec::Zero(d);
  v[i] = 1.0;
  return v;
}

namespace {

template <class T>
T pairwise(const T* xs, std::size_t n) {
  if (n <= 8) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += xs[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise(xs, h) + pairwise(xs + h, n - h);
}

}  // namespace

cplx pairwise_sum(const cplx* xs, std::size_t n) { return pairwise(xs, n); }
double pairwise_sum(const double* xs, std::size_t n) { return pairwise(xs, n); }

}  // namespace osc
