#include "osc/verify.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "osc/cutoff.hpp"
#include "osc/experiments.hpp"
#include "osc/extremal.hpp"
#include "osc/normalize.hpp"

namespace osc {

namespace {

struct Sampler {
  std::mt19937_64 eng;
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng); }
  Vec in_box(const Box& b, double shrink = 1.0) {
    Vec x(b.lo.size());
    for (int i = 0; i < x.size(); ++i) {
      const double c = 0.5 * (b.lo[i] + b.hi[i]), r = 0.5 * shrink * (b.hi[i] - b.lo[i]);
      x[i] = uniform(c - r, c + r);
    }
    return x;
  }
  Vec direction(int d) {
    std::normal_distribution<double> n;
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = n(eng);
    return v.normalized();
  }
};

std::vector<PhasePtr> catalog() {
  return {make_quadratic(2), make_quadratic(3), make_monomial_sum({4, 4}), make_monomial_sum({2, 4, 6}),
          make_mixed(), make_remark(2), make_appendix(2, 2)};
}

InvariantCheck check(const std::string& name, bool pass, const std::string& detail) { return {name, pass, detail}; }

InvariantCheck cutoff_partition(Sampler& rng) {
  double worst = 0.0;
  const Box box = Box::cube(2, 0.1);
  const double eps = 1.0 / 16;
  const auto centers = covering_centers(box, eps);
  for (int s = 0; s < 500; ++s) {
    const Vec x = rng.in_box(Box::cube(2, 0.4));
    double sum = 0.0;
    for (double w : partition_psi(centers, eps, x)) sum += w;
    worst = std::max(worst, std::min(std::abs(sum - 1.0), std::abs(sum)));
    if (box.contains(x)) worst = std::max(worst, std::abs(sum - 1.0));
  }
  return check("cutoff partition of unity", worst <= 1e-12, "max defect " + fmt(worst));
}

InvariantCheck cutoff_junctions() {
  // The inner scale s of eta_tilde multiplies k-th derivatives by s^k; compare relative to s^2.
  const double inner = 80.0 * 2 * std::sqrt(2.0);
  const double m = std::max({eta0_poly().junction_mismatch(), eta_poly().junction_mismatch(),
                             eta_tilde_poly(2.0, 2).junction_mismatch() / (inner * inner)});
  return check("cutoff C2 junctions", m <= 1e-12, "max mismatch " + fmt(m));
}

InvariantCheck quad_closed_form() {
  const double k0 = 100.0, k1 = 37.0;
  Integrand g;
  g.f = [&](const Vec& x) { return std::polar(1.0, k0 * x[0] + k1 * x[1]); };
  g.wavenumber = [&](const Vec&) { return std::hypot(k0, k1); };
  QuadOptions o;
  o.tol = 1e-13;
  const OscResult r = integrate(g, Box{make_vec({0.0, 0.0}), make_vec({1.0, 1.0})}, o);
  auto one = [](double k) { return (std::exp(cplx(0, k)) - 1.0) / cplx(0, k); };
  const cplx exact = one(k0) * one(k1);
  const double rel = std::abs(r.value - exact) / std::abs(exact);
  return check("quadrature closed form", rel < 1e-8, "relative error " + fmt(rel));
}

InvariantCheck phase_gradients(Sampler& rng) {
  double worst = 0.0;
  for (const auto& p : catalog()) {
    for (int s = 0; s < 1000; ++s) {
      const Vec x = rng.in_box(p->domain(), 0.99);
      const Vec v = rng.direction(p->dim());
      const double h = 1e-5;
      const double fd = (p->value(x + h * v) - p->value(x - h * v)) / (2 * h);
      const double an = p->grad(x).dot(v);
      worst = std::max(worst, std::abs(fd - an) / std::max(1.0, std::abs(an)));
    }
  }
  return check("phase gradient vs central differences", worst < 1e-6, "max relative error " + fmt(worst));
}

InvariantCheck phase_convexity(Sampler& rng) {
  double lo = 1e300;
  for (const auto& p : catalog()) {
    for (int s = 0; s < 2000; ++s) {
      Eigen::SelfAdjointEigenSolver<Mat> es(p->hess(rng.in_box(p->domain())));
      lo = std::min(lo, es.eigenvalues().minCoeff());
    }
  }
  return check("phase convexity", lo >= -1e-10, "min eigenvalue " + fmt(lo));
}

InvariantCheck damping_modulus(Sampler& rng) {
  double worst = 0.0;
  for (const auto& p : catalog()) {
    for (int s = 0; s < 200; ++s) {
      const Vec x = rng.in_box(p->domain());
      const DampingExponent z{rng.uniform(0.0, 1.5), rng.uniform(-50.0, 50.0)};
      const double h = p->hdet(x);
      if (h == 0.0) continue;
      worst = std::max(worst, std::abs(std::abs(damping_factor(*p, x, z)) / std::pow(h, z.re) - 1.0));
    }
  }
  return check("damping modulus", worst <= 1e-14, "max relative defect " + fmt(worst));
}

InvariantCheck sandwich(Sampler& rng, std::uint64_t seed) {
  int fails = 0, cases = 0;
  for (const auto& p : {make_quadratic(2), make_monomial_sum({4, 4}), make_mixed(), make_monomial_sum({2, 4, 6})}) {
    for (int s = 0; s < 2; ++s) {
      Vec v = rng.direction(p->dim()) * rng.uniform(0.0, 1e-3);
      const double h = std::ldexp(1.0, -13 - s * 3);
      const SandwichCheck c = check_sandwich(normalize(p, v, h), 256, static_cast<unsigned>(seed + s));
      fails += !(c.ok && c.inner_min >= 1 - 1e-6 && c.outer_max <= p->dim() * (1 + 1e-6));
      ++cases;
    }
  }
  return check("John sandwich", fails == 0, std::to_string(cases - fails) + "/" + std::to_string(cases) + " cases");
}

InvariantCheck certification(Sampler& rng) {
  int fails = 0, cases = 0;
  double floor_min = 1e300;
  for (const auto& p : {make_quadratic(2, 64), make_monomial_sum({4, 4}, 128), make_mixed(128)}) {
    const Vec v = rng.direction(2) * rng.uniform(0.0, 1e-4);
    CertifyOptions o;
    o.samples = 128;
    o.shell_rays = 128;
    o.throw_on_failure = false;
    const CertReport r = certify_normalized(normalize(p, v, std::ldexp(1.0, -8)), 200.0, o);
    fails += r.skipped || !r.containment_ok || r.grad_floor < 1.0 / 40 - 1e-3;
    floor_min = std::min(floor_min, r.grad_floor);
    ++cases;
  }
  return check("gradient floor and containment", fails == 0, "min floor " + fmt(floor_min));
}

InvariantCheck appendix(Sampler& rng) {
  int agree = 0;
  for (int s = 0; s < 200; ++s) {
    const int d = static_cast<int>(rng.uniform(1, 6)), m = static_cast<int>(rng.uniform(1, 7));
    const Rational q(static_cast<int>(rng.uniform(5, 40)), 3);
    const Rational rho(static_cast<int>(rng.uniform(0, 12)), static_cast<int>(rng.uniform(1, 12)));
    if (!(q > 1)) {
      ++agree;
      continue;
    }
    // Double arithmetic with a margin; exact ties are only checked for consistency with the threshold.
    const double a = -2.0 * m / static_cast<double>(q) + (2.0 * m - 2) * d * static_cast<double>(rho);
    const bool exact = appendix_divergence(d, m, q, rho);
    agree += std::abs(a + d) < 1e-9 ? exact : exact == (a <= -d);
  }
  return check("appendix exponent arithmetic", agree == 200, std::to_string(agree) + "/200 agree");
}

InvariantCheck determinism(std::uint64_t seed, int workers) {
  const std::string text =
      "[d]\nexperiment.kind = decay\nphase.family = monomial_sum\nphase.params = 4 4\nsweep.lambda_min = 16\n"
      "sweep.lambda_max = 256\nsweep.points = 5\nz.re = 0.5\n"
      "[s]\nexperiment.kind = ssss\nextremal.samples = 4096\nsweep.lambda_min = 64\nsweep.lambda_max = 1024\n"
      "sweep.points = 5\n";
  const Config c = parse_config(text);
  RunOptions o;
  o.seed = seed;
  o.workers = workers;
  bool same = true;
  for (const auto& s : c.experiments) {
    const PreparedExperiment e = prepare_experiment(s, o);
    same = same && render_csv(e.run()) == render_csv(e.run());
  }
  return check("determinism", same, same ? "identical CSV bytes" : "CSV bytes differ between runs");
}

}  // namespace

std::vector<InvariantCheck> verify_invariants(std::uint64_t seed, int workers) {
  Sampler rng{std::mt19937_64(seed)};
  const std::vector<std::pair<std::string, std::function<InvariantCheck()>>> checks = {
      {"cutoff partition of unity", [&] { return cutoff_partition(rng); }},
      {"cutoff C2 junctions", [&] { return cutoff_junctions(); }},
      {"quadrature closed form", [&] { return quad_closed_form(); }},
      {"phase gradient vs central differences", [&] { return phase_gradients(rng); }},
      {"phase convexity", [&] { return phase_convexity(rng); }},
      {"damping modulus", [&] { return damping_modulus(rng); }},
      {"John sandwich", [&] { return sandwich(rng, seed); }},
      {"gradient floor and containment", [&] { return certification(rng); }},
      {"appendix exponent arithmetic", [&] { return appendix(rng); }},
      {"determinism", [&] { return determinism(seed, workers); }},
  };
  std::vector<InvariantCheck> out;
  for (const auto& [name, fn] : checks) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("exception: ") + e.what()});
    }
  }
  return out;
}

}  // namespace osc
