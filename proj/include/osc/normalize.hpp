#pragma once

#include <memory>
#include <string>
#include <vector>

#include "osc/phase.hpp"

namespace osc {

// x -> matrix * x + translation.
struct AffineMap {
  Mat matrix;
  Vec translation;
  Mat inverse;
  double det = 1.0;

  static AffineMap make(const Mat& m, const Vec& t);
  static AffineMap identity(int d);

  int dim() const { return static_cast<int>(translation.size()); }
  Vec apply(const Vec& x) const { return matrix * x + translation; }
  Vec apply_inverse(const Vec& y) const { return inverse * (y - translation); }
  // (*this) o other.
  AffineMap compose(const AffineMap& other) const;
  AffineMap inverted() const;
};

// Minimizer of phi + v.x inside B_{1/4}, i.e. grad phi(omega) = -v.
Vec solve_critical(const PhaseFunction& phase, const Vec& v, double tol = 1e-12);

// Phi_v(x) = phi(x + omega) + v.x - phi(omega).
std::shared_ptr<PullbackPhase> recentred_phase(const PhasePtr& phase, const Vec& v, const Vec& omega);

// Radius where the ray origin + r dir leaves {f < level}; the sublevel set must be convex and contain origin.
// Returns +inf when the level is not reached by rmax.
double ray_exit(const PhaseFunction& f, const Vec& origin, const Vec& dir, double level, double rmax);

// One point per direction on {Phi_v = h/2}, searched inside B_{1/2}.
std::vector<Vec> sublevel_boundary(const PhaseFunction& phi_v, double h, int directions);

// Map with B_1 inside T^{-1}(hull) and T^{-1}(hull) inside B_d, from boundary samples of a convex body.
AffineMap john_transform(const std::vector<Vec>& boundary);

struct NormalizedPhase {
  PhasePtr original;
  std::shared_ptr<PullbackPhase> recentred;  // Phi_v
  Vec v;
  Vec omega;
  double h = 0.0;
  AffineMap T;
  std::shared_ptr<PullbackPhase> phase;  // Phi_v^h(x) = Phi_v(T x) / h
};

NormalizedPhase normalized_phase(const std::shared_ptr<PullbackPhase>& phi_v, const AffineMap& T, double h);

struct NormalizeOptions {
  int directions = 0;  // 0: 2^{6+d}
  int probes = 256;    // extra rays used to pin down the inscribed radius
  unsigned seed = 11;
};

// Full pipeline: critical point, recentring, sublevel boundary, John map, inner-radius refinement.
NormalizedPhase normalize(const PhasePtr& phase, const Vec& v, double h, const NormalizeOptions& opts = {});

struct SandwichCheck {
  double inner_min = 0.0;  // smallest radius of {Phi_v^h < 1/2} over the probes
  double outer_max = 0.0;
  bool ok = false;
};

SandwichCheck check_sandwich(const NormalizedPhase& np, int probes, unsigned seed, double slack = 1e-6);

struct CertifyOptions {
  int k = 0;              // finite type order; 0 computes it from the original phase
  int samples = 2048;     // points in B_R for derivative sups and the Glaeser ratio
  int shell_rays = 512;   // rays through the shell {1/2 <= Phi_v^h <= 2}
  int shell_steps = 16;   // radii per ray inside the shell
  double fd_step = 1e-3;  // stencil spacing for the determinant gradient
  unsigned seed = 5;
  bool throw_on_failure = true;
};

struct CertReport {
  bool skipped = false;  // rescaled domain does not cover B_R
  std::string note;
  int k = 0;
  double R = 0.0;
  double deriv_sup = 0.0;    // max |directional derivative| of order <= 2k+5 over B_R
  double grad_floor = 0.0;   // min |grad Phi_v^h| on the shell
  double grad_ceiling = 0.0; // max |grad Phi_v^h| on the shell
  double shell_rmin = 0.0;
  double shell_rmax = 0.0;
  double glaeser = 0.0;      // sup (d_j H)^2 / H over B_{R-1}
  bool grad_ok = false;
  bool containment_ok = false;
  bool glaeser_ok = false;
};

// Throws CertificationError naming the failed bound; skipped reports are returned, not thrown.
CertReport certify_normalized(const NormalizedPhase& np, double R, const CertifyOptions& opts = {});

// Whether the affine preimage of the base domain contains B_R.
bool covers_ball(const PullbackPhase& g, double R);

}  // namespace osc
