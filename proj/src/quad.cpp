#include "osc/quad.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>

#include "osc/cutoff.hpp"

namespace osc {

namespace {

struct GlTable {
  std::vector<double> x;
  std::vector<double> w;
};

const GlTable& gl_table(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GlTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<GlTable>();
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      double xi, wi;
      gsl_integration_glfixed_point(-1.0, 1.0, static_cast<size_t>(i), &xi, &wi, t);
      slot->x.push_back(xi);
      slot->w.push_back(wi);
    }
    gsl_integration_glfixed_table_free(t);
  }
  return *slot;
}

struct Acc {
  cplx value;
  double err;
  bool ok;
};

class Adaptive {
 public:
  Adaptive(const Integrand& g, const QuadOptions& o, int d) : g_(g), o_(o), d_(d) {
    cap_ = std::max(o.min_nodes, static_cast<int>(std::floor(std::pow(double(o.max_panel_nodes), 1.0 / d) + 1e-9)));
    cap_ = std::min(cap_, 64);
    cap_ -= cap_ % 2;
  }

  // Global adaptive refinement: the leaf with the largest local error is split until the
  // summed estimate meets tol, a leaf hits max_depth, or the evaluation budget runs out.
  Acc solve(const Box& b, double tol) {
    std::vector<Box> seeds;
    presplit(b, 0, seeds);
    std::vector<Leaf> leaves;
    for (const auto& s : seeds) leaves.push_back(make_leaf(s, panel_of(s), depth_of_seed(s, b)));
    auto worse = [&](std::size_t a, std::size_t c) {
      return leaves[a].err < leaves[c].err || (leaves[a].err == leaves[c].err && a > c);
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> heap(worse);
    double total = 0.0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      total += leaves[i].err;
      heap.push(i);
    }
    bool capped = false;
    while (total > tol && !heap.empty() && evals <= o_.max_evals) {
      const std::size_t i = heap.top();
      heap.pop();
      Leaf& lf = leaves[i];
      if (lf.depth + 1 >= o_.max_depth) {
        capped = true;
        continue;
      }
      total -= lf.err;
      lf.alive = false;
      const auto kids = children(lf.box);
      const int depth = lf.depth + 1;
      const std::vector<cplx> qk = lf.kids;
      for (std::size_t k = 0; k < kids.size(); ++k) {
        leaves.push_back(make_leaf(kids[k], qk[k], depth));
        total += leaves.back().err;
        heap.push(leaves.size() - 1);
      }
    }
    std::vector<cplx> vals;
    double err = 0.0;
    for (const auto& lf : leaves) {
      if (!lf.alive) continue;
      vals.push_back(lf.fine);
      err += lf.err;
      ++panels;
    }
    return {pairwise_sum(vals.data(), vals.size()), err, err <= tol && !capped};
  }

  long count_nodes(const Box& b, int depth, long limit) {
    std::vector<int> n = nodes_for(b);
    const bool too_many = std::any_of(n.begin(), n.end(), [&](int k) { return k > cap_; });
    if (too_many && depth < o_.max_depth) {
      long s = 0;
      for (const auto& kid : children(b)) {
        s += count_nodes(kid, depth + 1, limit - s);
        if (s > limit) break;
      }
      return s;
    }
    clamp(n);
    long p = 1;
    for (int k : n) p *= k;
    return p;
  }

  long evals = 0;
  long panels = 0;

 private:
  struct Leaf {
    Box box;
    int depth;
    cplx fine;
    double err;
    std::vector<cplx> kids;
    bool alive = true;
  };

  void presplit(const Box& b, int depth, std::vector<Box>& out) {
    std::vector<int> n = nodes_for(b);
    const bool too_many = std::any_of(n.begin(), n.end(), [&](int k) { return k > cap_; });
    if (too_many && depth < o_.max_depth) {
      for (const auto& kid : children(b)) presplit(kid, depth + 1, out);
      return;
    }
    out.push_back(b);
  }

  int depth_of_seed(const Box& s, const Box& root) const {
    const double r = (root.hi[0] - root.lo[0]) / (s.hi[0] - s.lo[0]);
    return static_cast<int>(std::lround(std::log2(r)));
  }

  cplx panel_of(const Box& b) {
    auto n = nodes_for(b);
    clamp(n);
    return panel(b, n);
  }

  // Coarse value q is compared with the sum over the 2^d children.
  Leaf make_leaf(const Box& b, cplx q, int depth) {
    Leaf lf{b, depth, {}, 0.0, {}};
    for (const auto& kid : children(b)) lf.kids.push_back(panel_of(kid));
    lf.fine = pairwise_sum(lf.kids.data(), lf.kids.size());
    lf.err = std::abs(lf.fine - q);
    return lf;
  }

  void clamp(std::vector<int>& n) const {
    for (int& k : n) k = std::min(k, cap_);
  }

  std::vector<int> nodes_for(const Box& b) const {
    double kmax = 0.0;
    if (g_.wavenumber) {
      // Corners, edge midpoints and the center: 3^d samples.
      int total = 1;
      for (int i = 0; i < d_; ++i) total *= 3;
      Vec x(d_);
      for (int m = 0; m < total; ++m) {
        int r = m;
        for (int i = 0; i < d_; ++i) {
          x[i] = b.lo[i] + 0.5 * (r % 3) * (b.hi[i] - b.lo[i]);
          r /= 3;
        }
        kmax = std::max(kmax, g_.wavenumber(x));
      }
    }
    std::vector<int> n(d_);
    for (int i = 0; i < d_; ++i) {
      const double want = 4.0 * kmax * (b.hi[i] - b.lo[i]) / std::numbers::pi;
      int k = std::max(o_.min_nodes, static_cast<int>(std::ceil(std::min(want, 1e9))));
      n[i] = k + (k % 2);
    }
    return n;
  }

  std::vector<Box> children(const Box& b) const {
    std::vector<Box> out;
    const Vec mid = b.center();
    for (int mask = 0; mask < (1 << d_); ++mask) {
      Box c{b.lo, b.hi};
      for (int i = 0; i < d_; ++i) {
        if ((mask >> i) & 1) c.lo[i] = mid[i];
        else c.hi[i] = mid[i];
      }
      out.push_back(c);
    }
    return out;
  }

  cplx panel(const Box& b, const std::vector<int>& n) {
    std::vector<const GlTable*> tabs(d_);
    long total = 1;
    for (int i = 0; i < d_; ++i) {
      tabs[i] = &gl_table(n[i]);
      total *= n[i];
    }
    buf_.resize(static_cast<std::size_t>(total));
    std::vector<int> idx(d_, 0);
    Vec x(d_);
    const Vec half = 0.5 * (b.hi - b.lo);
    const Vec mid = b.center();
    for (long m = 0; m < total; ++m) {
      double w = 1.0;
      for (int i = 0; i < d_; ++i) {
        x[i] = mid[i] + half[i] * tabs[i]->x[idx[i]];
        w *= half[i] * tabs[i]->w[idx[i]];
      }
      buf_[static_cast<std::size_t>(m)] = w * g_.f(x);
      for (int i = 0; i < d_ && ++idx[i] == n[i]; ++i) idx[i] = 0;
    }
    evals += total;
    return pairwise_sum(buf_.data(), buf_.size());
  }

  const Integrand& g_;
  QuadOptions o_;
  int d_;
  int cap_;
  std::vector<cplx> buf_;
};

Box intersect(const Box& a, const Box& b) {
  return Box{a.lo.cwiseMax(b.lo), a.hi.cwiseMin(b.hi)};
}

bool empty_box(const Box& b) { return ((b.hi - b.lo).array() <= 0.0).any(); }

}  // namespace

const std::vector<double>& gl_nodes(int n) { return gl_table(n).x; }
const std::vector<double>& gl_weights(int n) { return gl_table(n).w; }

OscResult integrate(const Integrand& g, const Box& box, const QuadOptions& opts) {
  const int d = box.dim();
  OscResult r;
  if (empty_box(box)) return r;
  Adaptive ad(g, opts, d);
  if (d == 4 && ad.count_nodes(box, 0, opts.smolyak_threshold) > opts.smolyak_threshold) {
    return integrate_sparse(g, box, opts);
  }
  const Acc a = ad.solve(box, opts.tol);
  r.value = a.value;
  r.error_estimate = a.err;
  r.nodes_used = ad.evals;
  r.panels = ad.panels;
  r.converged = a.ok && r.error_estimate <= opts.tol;
  return r;
}

OscResult integrate_sparse(const Integrand& g, const Box& box, const QuadOptions& opts) {
  const int d = box.dim();
  OscResult r;
  if (empty_box(box)) return r;
  // Level l on each axis: 2^l equal panels with 8 Gauss points each.
  auto rule = [&](int axis, int level, std::vector<double>& xs, std::vector<double>& ws) {
    const int panels = 1 << level;
    const auto& tab = gl_table(8);
    const double h = (box.hi[axis] - box.lo[axis]) / panels;
    xs.clear();
    ws.clear();
    for (int p = 0; p < panels; ++p) {
      const double mid = box.lo[axis] + (p + 0.5) * h;
      for (int k = 0; k < 8; ++k) {
        xs.push_back(mid + 0.5 * h * tab.x[k]);
        ws.push_back(0.5 * h * tab.w[k]);
      }
    }
  };
  std::map<std::vector<int>, cplx> tensor_cache;
  std::vector<cplx> buf;
  auto tensor = [&](const std::vector<int>& lv) -> cplx {
    auto it = tensor_cache.find(lv);
    if (it != tensor_cache.end()) return it->second;
    std::vector<std::vector<double>> xs(d), ws(d);
    long total = 1;
    for (int i = 0; i < d; ++i) {
      rule(i, lv[i], xs[i], ws[i]);
      total *= static_cast<long>(xs[i].size());
    }
    buf.resize(static_cast<std::size_t>(total));
    std::vector<std::size_t> idx(d, 0);
    Vec x(d);
    for (long m = 0; m < total; ++m) {
      double w = 1.0;
      for (int i = 0; i < d; ++i) {
        x[i] = xs[i][idx[i]];
        w *= ws[i][idx[i]];
      }
      buf[static_cast<std::size_t>(m)] = w * g.f(x);
      for (int i = 0; i < d && ++idx[i] == xs[i].size(); ++i) idx[i] = 0;
    }
    r.nodes_used += total;
    const cplx s = pairwise_sum(buf.data(), buf.size());
    tensor_cache.emplace(lv, s);
    return s;
  };
  auto binom = [](int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
  };
  auto combination = [&](int q) {
    std::vector<cplx> terms;
    std::vector<int> lv(d, 0);
    // Enumerate multi-indices with |l| in [q-d+1, q].
    std::function<void(int, int)> rec = [&](int axis, int used) {
      if (axis == d - 1) {
        for (int last = 0; used + last <= q; ++last) {
          const int s = used + last;
          if (s < q - d + 1) continue;
          lv[axis] = last;
          const double c = ((q - s) % 2 ? -1.0 : 1.0) * binom(d - 1, q - s);
          terms.push_back(c * tensor(lv));
        }
        return;
      }
      for (int l = 0; used + l <= q; ++l) {
        lv[axis] = l;
        rec(axis + 1, used + l);
      }
    };
    rec(0, 0);
    return pairwise_sum(terms.data(), terms.size());
  };
  cplx prev = combination(d - 1);
  r.converged = false;
  for (int q = d;; ++q) {
    const long before = r.nodes_used;
    const cplx cur = combination(q);
    r.value = cur;
    r.error_estimate = std::abs(cur - prev);
    r.panels = static_cast<long>(tensor_cache.size());
    if (r.error_estimate <= opts.tol) {
      r.converged = true;
      break;
    }
    // Next level costs at least about twice this one.
    if (r.nodes_used + 2 * (r.nodes_used - before) > opts.max_evals || q - d > 20) break;
    prev = cur;
  }
  return r;
}

AmplitudeField psi_circ_field(const Vec& center, double s) {
  AmplitudeField a;
  a.fn = [center, s](const Vec& x) { return eta0((x - center).norm() / s); };
  a.support = Box::cube(center, 2.0 * s);
  return a;
}

AmplitudeField tensor_cutoff_field(const Vec& center, double s) {
  AmplitudeField a;
  a.fn = [center, s](const Vec& x) {
    double p = 1.0;
    for (int i = 0; i < x.size(); ++i) p *= eta0((x[i] - center[i]) / s);
    return p;
  };
  a.support = Box::cube(center, 2.0 * s);
  for (int i = 0; i < center.size(); ++i) {
    const double c = center[i];
    a.factors.push_back([c, s](double t) { return eta0((t - c) / s); });
  }
  return a;
}

OscResult phase_integral(const PhaseFunction& phase, const AmplitudeField& psi, double lambda, double a,
                         const Vec& v, DampingExponent z, const QuadOptions& opts) {
  const int d = phase.dim();
  const Box box = intersect(psi.support, phase.domain());
  if (empty_box(box)) return {};

  if (opts.allow_separable && phase.separable() && static_cast<int>(psi.factors.size()) == d) {
    // The tensor rule factorizes exactly over a product integrand.
    OscResult out;
    out.value = 1.0;
    std::vector<OscResult> parts;
    QuadOptions o1 = opts;
    o1.tol = std::min(opts.tol, 1e-12);
    for (int i = 0; i < d; ++i) {
      const auto& fac = psi.factors[static_cast<std::size_t>(i)];
      const double vi = v[i];
      Integrand g1;
      g1.f = [&, i, vi](const Vec& t) -> cplx {
        const double amp = fac(t[0]);
        if (amp == 0.0) return 0.0;
        const double ph = lambda * (a * phase.axis_term(i, t[0], 0) + vi * t[0]);
        return amp * damping_power(std::abs(phase.axis_term(i, t[0], 2)), z) * std::polar(1.0, ph);
      };
      g1.wavenumber = [&, i, vi](const Vec& t) {
        return std::abs(lambda) * std::abs(a * phase.axis_term(i, t[0], 1) + vi);
      };
      Box b1{make_vec({box.lo[i]}), make_vec({box.hi[i]})};
      parts.push_back(integrate(g1, b1, o1));
    }
    for (const auto& p : parts) {
      out.value *= p.value;
      out.nodes_used += p.nodes_used;
      out.panels += p.panels;
      out.converged = out.converged && p.converged;
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      double others = 1.0;
      for (std::size_t j = 0; j < parts.size(); ++j) {
        if (j != i) others *= std::abs(parts[j].value) + parts[j].error_estimate;
      }
      out.error_estimate += parts[i].error_estimate * others;
    }
    return out;
  }

  Integrand g;
  g.f = [&](const Vec& x) -> cplx {
    const double amp = psi.fn(x);
    if (amp == 0.0) return 0.0;
    const double ph = lambda * (a * phase.value(x) + v.dot(x));
    return amp * damping_power(phase.hdet(x), z) * std::polar(1.0, ph);
  };
  g.wavenumber = [&](const Vec& x) { return std::abs(lambda) * (a * phase.grad(x) + v).norm(); };
  return integrate(g, box, opts);
}

OscResult osc_integral(const PhaseFunction& phase, const AmplitudeField& psi, double lambda, const Vec& v,
                       DampingExponent z, const QuadOptions& opts) {
  if (!(opts.tol > 0.0)) throw PreconditionError("tol must be positive");
  return phase_integral(phase, psi, lambda, 1.0, v, z, opts);
}

OscResult surface_fourier(const PhaseFunction& phase, const AmplitudeField& psi, DampingExponent z, const Vec& xi,
                          double c, const QuadOptions& opts) {
  const int d = phase.dim();
  if (xi.size() != d + 1) throw PreconditionError("xi must have d+1 components");
  if (xi.norm() < 2.0) throw PreconditionError("surface_fourier needs |xi| >= 2");
  if (!(c > 0.0)) throw PreconditionError("regime constant c must be positive");
  const Vec xp = xi.head(d);
  const double last = xi[d];
  if (std::abs(last) >= c * xp.norm()) {
    return osc_integral(phase, psi, -last, xp / last, z, opts);
  }
  const double n = xp.norm();
  return phase_integral(phase, psi, -n, last / n, xp / n, z, opts);
}

}  // namespace osc
