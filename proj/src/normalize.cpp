#include "osc/normalize.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace osc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// g(T x) * scale for a pullback g, folded into a single pullback of the original phase.
std::shared_ptr<PullbackPhase> pullback_compose(const PullbackPhase& g, const AffineMap& T, double scale,
                                                std::string tag) {
  const Mat a = g.matrix() * T.matrix;
  const Vec b = g.matrix() * T.translation + g.offset();
  const Vec w = T.matrix.transpose() * g.linear();
  const double kappa = g.linear().dot(T.translation) + g.shift();
  return std::make_shared<PullbackPhase>(g.base_ptr(), a, b, w, kappa, g.alpha() * scale, std::move(tag));
}

Mat sym_sqrt(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  const Vec ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// Minimum-volume enclosing ellipsoid weights (Khachiyan iteration with away steps).
std::vector<double> mvee_weights(const std::vector<Vec>& pts, double eps) {
  const int d = pts.front().size();
  const std::size_t n = pts.size();
  const int D = d + 1;
  Eigen::MatrixXd q(D, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    q.block(0, static_cast<Eigen::Index>(i), d, 1) = pts[i];
    q(d, static_cast<Eigen::Index>(i)) = 1.0;
  }
  std::vector<double> u(n, 1.0 / n);
  Eigen::VectorXd m(static_cast<Eigen::Index>(n));
  for (int it = 0; it < 100000; ++it) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(D, D);
    for (std::size_t i = 0; i < n; ++i) x += u[i] * q.col(static_cast<Eigen::Index>(i)) * q.col(static_cast<Eigen::Index>(i)).transpose();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(x);
    const Eigen::MatrixXd xq = ldlt.solve(q);
    m = (q.array() * xq.array()).colwise().sum().transpose();
    std::size_t j = 0, k = 0;
    double kmin = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      if (m[static_cast<Eigen::Index>(i)] > m[static_cast<Eigen::Index>(j)]) j = i;
      if (u[i] > 0.0 && m[static_cast<Eigen::Index>(i)] < kmin) {
        kmin = m[static_cast<Eigen::Index>(i)];
        k = i;
      }
    }
    const double mj = m[static_cast<Eigen::Index>(j)];
    const double up = (mj - D) / D, down = (D - kmin) / D;
    if (up <= eps && down <= eps) break;
    if (up >= down) {
      const double step = (mj - D) / (D * (mj - 1.0));
      for (double& w : u) w *= 1.0 - step;
      u[j] += step;
    } else {
      double step = (D - kmin) / (D * (kmin - 1.0));
      step = std::min(step, u[k] / (1.0 - u[k]));
      for (double& w : u) w *= 1.0 + step;
      u[k] -= step;
      u[k] = std::max(u[k], 0.0);
    }
  }
  return u;
}

// Radial function of {f < level} seen from the origin of the frame.
double radius(const PhaseFunction& f, const Vec& dir) { return ray_exit(f, zeros(f.dim()), dir, 0.5, 1e4); }

// Coordinate descent on the sphere for the smallest radius, from a starting direction.
double hill_climb_min(const PhaseFunction& f, Vec dir, double r) {
  const int d = f.dim();
  for (double step = 0.2; step > 1e-7; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (int i = 0; i < d && !moved; ++i) {
        for (double sgn : {1.0, -1.0}) {
          Vec t = dir + sgn * step * unit(d, i);
          t.normalize();
          const double rt = radius(f, t);
          if (rt < r) {
            r = rt;
            dir = t;
            moved = true;
            break;
          }
        }
      }
    }
  }
  return r;
}

std::vector<Vec> random_directions(int d, int n, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd;
  std::vector<Vec> out;
  for (int i = 0; i < d; ++i) {
    out.push_back(unit(d, i));
    out.push_back(-unit(d, i));
  }
  while (static_cast<int>(out.size()) < n) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = nd(eng);
    out.push_back(v / v.norm());
  }
  return out;
}

}  // namespace

AffineMap AffineMap::make(const Mat& m, const Vec& t) {
  AffineMap a;
  a.matrix = m;
  a.translation = t;
  const Eigen::FullPivLU<Mat> lu(m);
  if (!lu.isInvertible()) throw RankDeficiencyError("affine map is singular");
  a.inverse = lu.inverse();
  a.det = lu.determinant();
  return a;
}

AffineMap AffineMap::identity(int d) { return make(Mat::Identity(d, d), zeros(d)); }

AffineMap AffineMap::compose(const AffineMap& o) const { return make(matrix * o.matrix, matrix * o.translation + translation); }

AffineMap AffineMap::inverted() const { return make(inverse, -(inverse * translation)); }

Vec solve_critical(const PhaseFunction& phase, const Vec& v, double tol) {
  const int d = phase.dim();
  auto F = [&](const Vec& w) { return phase.value(w) + v.dot(w); };
  Vec w = zeros(d);
  for (int it = 0; it < 500; ++it) {
    const Vec g = phase.grad(w) + v;
    if (g.norm() < tol) {
      if (w.norm() > 0.25) throw OutsideGradientImageError("critical point outside B_{1/4}");
      return w;
    }
    const Mat h = phase.hess(w);
    const double mu = 1e-14 * (1.0 + h.norm());
    Vec p = (h + mu * Mat::Identity(d, d)).ldlt().solve(-g);
    // Keep the iterate in B_{1/2}; a minimizer of phi + v.x outside B_{1/4} is reported as an error.
    const double f0 = F(w);
    double s = 1.0;
    bool ok = false;
    for (int ls = 0; ls < 200 && !ok; ++ls, s *= 0.5) {
      const Vec t = w + s * p;
      // Near the solution F stalls at rounding level; a smaller gradient still counts as progress.
      if (t.norm() <= 0.5 && (F(t) < f0 || (phase.grad(t) + v).norm() < g.norm())) {
        w = t;
        ok = true;
      }
    }
    if (!ok) throw OutsideGradientImageError("Newton iteration stalled; -v is not in grad phi(B_{1/4})");
  }
  throw OutsideGradientImageError("Newton iteration did not converge");
}

std::shared_ptr<PullbackPhase> recentred_phase(const PhasePtr& phase, const Vec& v, const Vec& omega) {
  const int d = phase->dim();
  return std::make_shared<PullbackPhase>(phase, Mat::Identity(d, d), omega, v, -phase->value(omega), 1.0,
                                         "recentred");
}

double ray_exit(const PhaseFunction& f, const Vec& origin, const Vec& dir, double level, double rmax) {
  if (!(f.value(origin) < level)) return 0.0;
  if (f.value(origin + rmax * dir) < level) return kInf;
  double lo = 0.0, hi = rmax;
  // Shrink the bracket geometrically first so small radii resolve to full relative precision.
  while (hi > 1e-300 && !(f.value(origin + 0.5 * hi * dir) < level)) hi *= 0.5;
  lo = 0.5 * hi;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f.value(origin + mid * dir) < level ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<Vec> sublevel_boundary(const PhaseFunction& phi_v, double h, int directions) {
  if (!(h > 0.0)) throw PreconditionError("height must be positive");
  std::vector<Vec> out;
  for (const Vec& t : sphere_directions(phi_v.dim(), directions)) {
    const double r = ray_exit(phi_v, zeros(phi_v.dim()), t, 0.5 * h, 0.5);
    if (!std::isfinite(r)) throw HeightTooLargeError("level h/2 not reached inside B_{1/2}");
    out.push_back(r * t);
  }
  return out;
}

AffineMap john_transform(const std::vector<Vec>& boundary) {
  if (boundary.empty()) throw RankDeficiencyError("no boundary points");
  const int d = boundary.front().size();
  if (static_cast<int>(boundary.size()) < d + 1) throw RankDeficiencyError("too few boundary points");
  Vec mean = zeros(d);
  for (const auto& p : boundary) mean += p;
  mean /= static_cast<double>(boundary.size());
  Mat cov = Mat::Zero(d, d);
  for (const auto& p : boundary) cov += (p - mean) * (p - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  if (!(es.eigenvalues().minCoeff() > 1e-20 * std::max(es.eigenvalues().maxCoeff(), 1e-300))) {
    throw RankDeficiencyError("boundary points do not span R^d");
  }
  const std::vector<double> u = mvee_weights(boundary, 1e-9);
  Vec c = zeros(d);
  for (std::size_t i = 0; i < boundary.size(); ++i) c += u[i] * boundary[i];
  Mat s = Mat::Zero(d, d);
  for (std::size_t i = 0; i < boundary.size(); ++i) s += u[i] * (boundary[i] - c) * (boundary[i] - c).transpose();
  const Mat l = sym_sqrt(d * s);
  const Mat linv = l.inverse();
  double rmin = kInf;
  for (const auto& p : boundary) rmin = std::min(rmin, (linv * (p - c)).norm());
  return AffineMap::make(l * rmin, c);
}

NormalizedPhase normalized_phase(const std::shared_ptr<PullbackPhase>& phi_v, const AffineMap& T, double h) {
  if (!(h > 0.0)) throw PreconditionError("height must be positive");
  NormalizedPhase np;
  np.original = phi_v->base_ptr();
  np.recentred = phi_v;
  np.v = phi_v->linear();
  np.omega = phi_v->offset();
  np.h = h;
  np.T = T;
  np.phase = pullback_compose(*phi_v, T, 1.0 / h, "normalized");
  return np;
}

NormalizedPhase normalize(const PhasePtr& phase, const Vec& v, double h, const NormalizeOptions& opts) {
  const int d = phase->dim();
  const Vec omega = solve_critical(*phase, v);
  auto phi_v = recentred_phase(phase, v, omega);
  const int n = opts.directions > 0 ? opts.directions : (1 << (6 + d));
  const AffineMap T0 = john_transform(sublevel_boundary(*phi_v, h, n));
  NormalizedPhase np = normalized_phase(phi_v, T0, h);

  // The samples only see finitely many rays; pin the inscribed radius down with extra probes.
  std::vector<std::pair<double, Vec>> radii;
  for (const Vec& t : random_directions(d, opts.probes, opts.seed)) radii.emplace_back(radius(*np.phase, t), t);
  std::sort(radii.begin(), radii.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double rmin = radii.front().first;
  for (std::size_t i = 0; i < std::min<std::size_t>(4, radii.size()); ++i) {
    rmin = std::min(rmin, hill_climb_min(*np.phase, radii[i].second, radii[i].first));
  }
  const double s = rmin * (1.0 - 1e-9);
  return normalized_phase(phi_v, AffineMap::make(T0.matrix * s, T0.translation), h);
}

SandwichCheck check_sandwich(const NormalizedPhase& np, int probes, unsigned seed, double slack) {
  SandwichCheck c;
  c.inner_min = kInf;
  for (const Vec& t : random_directions(np.phase->dim(), probes, seed)) {
    const double r = radius(*np.phase, t);
    c.inner_min = std::min(c.inner_min, r);
    c.outer_max = std::max(c.outer_max, r);
  }
  const int d = np.phase->dim();
  c.ok = c.inner_min >= 1.0 - slack && c.outer_max <= d * (1.0 + slack);
  return c;
}

bool covers_ball(const PullbackPhase& g, double R) {
  const Box& bb = g.base().domain();
  const Mat& a = g.matrix();
  for (int i = 0; i < g.dim(); ++i) {
    const double ext = R * a.row(i).norm();
    if (g.offset()[i] - ext < bb.lo[i] || g.offset()[i] + ext > bb.hi[i]) return false;
  }
  return true;
}

CertReport certify_normalized(const NormalizedPhase& np, double R, const CertifyOptions& opts) {
  const PhaseFunction& f = *np.phase;
  const int d = f.dim();
  CertReport rep;
  rep.R = R;
  rep.k = opts.k > 0 ? opts.k : finite_type_params(*np.original, 12, {16, 8}).k;
  std::mt19937_64 eng(opts.seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  auto in_ball = [&](double r) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = nd(eng);
    return x / x.norm() * r * std::pow(ud(eng), 1.0 / d);
  };

  // Shell {1/2 <= Phi_v^h <= 2}: rays from the frame origin, which sits inside both sublevel sets.
  rep.grad_floor = kInf;
  rep.shell_rmin = kInf;
  for (const Vec& t : sphere_directions(d, opts.shell_rays, opts.seed)) {
    const double r1 = radius(f, t);
    const double r2 = ray_exit(f, zeros(d), t, 2.0, 1e4);
    rep.shell_rmin = std::min(rep.shell_rmin, r1);
    rep.shell_rmax = std::max(rep.shell_rmax, r2);
    for (int j = 0; j < opts.shell_steps; ++j) {
      const double r = r1 + (r2 - r1) * j / (opts.shell_steps - 1);
      const double g = f.grad(r * t).norm();
      rep.grad_floor = std::min(rep.grad_floor, g);
      rep.grad_ceiling = std::max(rep.grad_ceiling, g);
    }
  }
  rep.grad_ok = rep.grad_floor >= 1.0 / (20.0 * d) - 1e-3;
  rep.containment_ok = rep.shell_rmin >= 1.0 - 1e-6 && rep.shell_rmax <= 9.0 * d;

  if (!covers_ball(*np.phase, R)) {
    rep.skipped = true;
    rep.note = "rescaled domain does not cover B_R";
  } else {
    const int order = 2 * rep.k + 5;
    for (int s = 0; s < opts.samples; ++s) {
      const Vec y = in_ball(R);
      for (int i = 0; i <= d; ++i) {
        Vec dir(d);
        if (i < d) {
          dir = unit(d, i);
        } else {
          for (int m = 0; m < d; ++m) dir[m] = nd(eng);
          dir.normalize();
        }
        const Jet j = f.line_jet(y, dir, order);
        for (int n = 0; n <= order; ++n) rep.deriv_sup = std::max(rep.deriv_sup, std::abs(j.derivative(n)));
      }
    }
    const double dx = opts.fd_step;
    for (int s = 0; s < opts.samples; ++s) {
      const Vec y = in_ball(R - 1.0);
      const double h0 = f.hdet(y);
      if (!(h0 > 0.0)) continue;
      for (int i = 0; i < d; ++i) {
        const Vec e = unit(d, i) * dx;
        const double dh = (-f.hdet(y + 2 * e) + 8 * f.hdet(y + e) - 8 * f.hdet(y - e) + f.hdet(y - 2 * e)) / (12 * dx);
        rep.glaeser = std::max(rep.glaeser, dh * dh / h0);
      }
    }
    rep.glaeser_ok = std::isfinite(rep.glaeser);
  }
  if (opts.throw_on_failure) {
    if (!rep.grad_ok) throw CertificationError("gradient floor on the shell violated");
    if (!rep.containment_ok) throw CertificationError("shell containment in B_{9d} minus B_1 violated");
    if (!rep.skipped && !rep.glaeser_ok) throw CertificationError("Glaeser ratio not finite");
  }
  return rep;
}

}  // namespace osc
