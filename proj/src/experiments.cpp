#include "osc/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <mutex>
#include <set>

#include "osc/cutoff.hpp"
#include "osc/decay.hpp"
#include "osc/extremal.hpp"
#include "osc/normalize.hpp"
#include "osc/parallel.hpp"
#include "osc/statset.hpp"

namespace osc {

namespace {

const std::set<std::string> kCommonKeys = {"experiment.kind", "seed", "tol", "out_dir", "workers", "output",
                                           "normalize.h_circ", "cutoff.eps_circ", "regime.c"};

const std::map<std::string, std::set<std::string>> kKindKeys = {
    {"decay", {"phase.family", "phase.params", "phase.half_width", "sweep.lambda_min", "sweep.lambda_max", "sweep.points", "z.re", "z.im",
               "v", "cutoff.scale", "quad.separable"}},
    {"certify", {"phase.family", "phase.params", "phase.half_width", "v", "normalize.h", "certify.samples",
                 "certify.shell_rays", "certify.R"}},
    {"statset", {"statset.problem", "statset.r0", "statset.L", "statset.tau", "statset.samples",
                 "statset.beta1_step", "statset.per_decade"}},
    {"ssss", {"extremal.d", "extremal.eps", "extremal.samples", "sweep.lambda_min", "sweep.lambda_max",
              "sweep.points"}},
    {"appendix", {"appendix.d", "appendix.p", "appendix.rho", "appendix.m_max"}},
};

struct PhaseSpec {
  PhasePtr phase;
  std::string id;
};

PhaseSpec phase_spec(const ConfigSection& s) {
  const std::string family = s.str("phase.family");
  const std::vector<double> params = s.nums("phase.params", {});
  PhaseSpec p;
  try {
    p.phase = make_phase(family, params, s.num("phase.half_width", 0.0));
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    const std::string key = msg.rfind("phase.params", 0) == 0 ? "phase.params" : "phase.family";
    s.fail(key, msg.substr(msg.find(':') + 2));
  }
  p.id = family + "[";
  for (std::size_t i = 0; i < params.size(); ++i) p.id += (i ? ";" : "") + fmt(params[i]);
  p.id += "]";
  return p;
}

Vec vector_key(const ConfigSection& s, const std::string& key, int d) {
  const std::vector<double> raw = s.nums(key, std::vector<double>(d, 0.0));
  if (static_cast<int>(raw.size()) != d) s.fail(key, "expected " + std::to_string(d) + " components");
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = raw[i];
  return v;
}

// Geometric grid; exact powers of two when both ends are.
std::vector<double> lambda_grid(const ConfigSection& s) {
  const double lo = s.num("sweep.lambda_min"), hi = s.num("sweep.lambda_max");
  const long n = s.integer("sweep.points", 0);
  if (!(lo >= 2.0)) s.fail("sweep.lambda_min", "must be at least 2");
  if (!(hi >= lo)) s.fail("sweep.lambda_max", "must be at least sweep.lambda_min");
  if (n < 1) s.fail("sweep.points", "must be a positive integer");
  if (n == 1) return {lo};
  const double a = std::log2(lo), b = std::log2(hi);
  std::vector<double> out;
  for (long k = 0; k < n; ++k) out.push_back(std::exp2(a + (b - a) * k / (n - 1)));
  out.back() = hi;
  return out;
}

std::uint64_t seed_of(const ConfigSection& s, const RunOptions& o) {
  if (o.seed) return *o.seed;
  const long v = s.integer("seed", 1);
  if (v < 0) s.fail("seed", "must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::vector<std::pair<std::string, std::string>> base_meta(const ConfigSection& s, const std::string& kind,
                                                           std::uint64_t seed, double tol) {
  return {{"tool", "osclab"},
          {"version", kToolVersion},
          {"schema", std::to_string(kSchemaVersion)},
          {"experiment", s.name()},
          {"kind", kind},
          {"seed", std::to_string(seed)},
          {"tol", fmt(tol)},
          {"h_circ", fmt(s.num("normalize.h_circ", std::ldexp(1.0, -8)))},
          {"eps_circ", fmt(s.num("cutoff.eps_circ", 1.0 / 64))},
          {"c", fmt(s.num("regime.c", 0.25))}};
}

void fit_footer(CsvTable& t, const DecayFit& f) {
  t.footer = {{"fit.slope", fmt(f.slope)},
              {"fit.intercept", fmt(f.intercept)},
              {"fit.residual_rms", fmt(f.residual_rms)},
              {"fit.log_factor_gain", fmt(f.log_factor_gain)},
              {"fit.points", std::to_string(f.points)},
              {"fit.dropped", std::to_string(f.dropped)}};
}

PreparedExperiment prepare_decay(const ConfigSection& s, const RunOptions& o, PreparedExperiment e) {
  const PhaseSpec ps = phase_spec(s);
  const int d = ps.phase->dim();
  const std::vector<double> lambdas = lambda_grid(s);
  const DampingExponent z{s.num("z.re", 0.0), s.num("z.im", 0.0)};
  const Vec v = vector_key(s, "v", d);
  const double scale = s.num("cutoff.scale", 0.5);
  if (!(scale > 0)) s.fail("cutoff.scale", "must be positive");
  QuadOptions q;
  q.tol = s.num("tol", 1e-10);
  q.allow_separable = s.flag("quad.separable", true);
  if (!(q.tol > 0)) s.fail("tol", "must be positive");
  const std::uint64_t seed = seed_of(s, o);
  auto meta = base_meta(s, "decay", seed, q.tol);
  meta.push_back({"cutoff.scale", fmt(scale)});
  meta.push_back({"grid", "lambda points=" + std::to_string(lambdas.size())});
  const int workers = o.workers;
  e.run = [=] {
    const auto psi = tensor_cutoff_field(zeros(d), scale);
    const LambdaSeries series = lambda_sweep(*ps.phase, psi, z, v, lambdas, q, workers);
    CsvTable t;
    t.meta = meta;
    t.header = decay_columns(d);
    for (const auto& r : series.rows) {
      std::vector<std::string> row = {ps.id, std::to_string(d), fmt(z.re), fmt(z.im)};
      for (int i = 0; i < d; ++i) row.push_back(fmt(v[i]));
      row.insert(row.end(), {fmt(r.lambda), fmt(r.result.value.real()), fmt(r.result.value.imag()),
                             fmt(std::abs(r.result.value)), fmt(r.result.error_estimate),
                             std::to_string(r.result.nodes_used)});
      t.rows.push_back(std::move(row));
    }
    if (series.rows.size() >= 5) fit_footer(t, fit_decay(series));
    t.footer.push_back({"all_converged", series.all_converged ? "true" : "false"});
    return t;
  };
  return e;
}

PreparedExperiment prepare_certify(const ConfigSection& s, const RunOptions& o, PreparedExperiment e) {
  const PhaseSpec ps = phase_spec(s);
  const int d = ps.phase->dim();
  const Vec v = vector_key(s, "v", d);
  const std::vector<double> hs = s.nums("normalize.h", {std::ldexp(1.0, -8)});
  for (double h : hs) {
    if (!(h > 0 && h <= 1)) s.fail("normalize.h", "heights must lie in (0, 1]");
  }
  CertifyOptions co;
  co.samples = static_cast<int>(s.integer("certify.samples", 256));
  co.shell_rays = static_cast<int>(s.integer("certify.shell_rays", 256));
  co.throw_on_failure = false;
  const double R = s.num("certify.R", 100.0 * d);
  if (!(R > 1)) s.fail("certify.R", "must exceed 1");
  const std::uint64_t seed = seed_of(s, o);
  co.seed = static_cast<unsigned>(seed);
  auto meta = base_meta(s, "certify", seed, 0.0);
  meta.push_back({"certify.R", fmt(R)});
  meta.push_back({"grid", "samples=" + std::to_string(co.samples) + " shell_rays=" + std::to_string(co.shell_rays)});
  const int workers = o.workers;
  e.run = [=] {
    std::vector<std::vector<std::string>> rows(hs.size());
    parallel_for(static_cast<int>(hs.size()), workers, [&](int i) {
      const NormalizedPhase np = normalize(ps.phase, v, hs[i]);
      const SandwichCheck sw = check_sandwich(np, 512, co.seed);
      const CertReport r = certify_normalized(np, R, co);
      std::vector<std::string> row = {ps.id, std::to_string(d), fmt(hs[i])};
      for (int k = 0; k < d; ++k) row.push_back(fmt(v[k]));
      auto b = [](bool x) { return std::string(x ? "true" : "false"); };
      row.insert(row.end(), {b(sw.ok), fmt(sw.inner_min), fmt(sw.outer_max), b(r.skipped), std::to_string(r.k),
                             fmt(r.grad_floor), fmt(r.grad_ceiling), fmt(r.shell_rmin), fmt(r.shell_rmax),
                             fmt(r.glaeser), b(r.grad_ok), b(r.containment_ok), b(r.glaeser_ok)});
      rows[i] = std::move(row);
    });
    CsvTable t;
    t.meta = meta;
    t.header = certify_columns(d);
    t.rows = std::move(rows);
    return t;
  };
  return e;
}

BandProblem named_problem(const ConfigSection& s) {
  const std::string name = s.str("statset.problem", "saddle");
  const double r0 = s.num("statset.r0", 0.5);
  if (!(r0 > 0)) s.fail("statset.r0", "must be positive");
  BandProblem p;
  if (name == "saddle") {
    p.phi1 = [](const Vec& x) { return x[0] * x[1]; };
  } else if (name == "radial") {
    p.phi1 = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  } else {
    s.fail("statset.problem", "unknown problem '" + name + "' (saddle, radial)");
  }
  p.phi2 = [](const Vec&) { return 2.0; };
  p.a = [r0](const Vec& x) { return psi_circ(x / r0); };
  p.support = Box::cube(2, 2 * r0);
  p.wavenumber = [](const Vec& x, double L, double) { return L * x.norm(); };
  return p;
}

PreparedExperiment prepare_statset(const ConfigSection& s, const RunOptions& o, PreparedExperiment e) {
  const BandProblem p = named_problem(s);
  const double L = s.num("statset.L", 64.0), tau = s.num("statset.tau", 0.0);
  if (!(L > 0)) s.fail("statset.L", "must be positive");
  ProfileOptions po;
  po.measure.samples = s.integer("statset.samples", 1L << 16);
  po.beta1_step = s.num("statset.beta1_step", 0.125);
  po.per_decade = static_cast<int>(s.integer("statset.per_decade", 64));
  po.workers = o.workers;
  if (po.measure.samples < 1) s.fail("statset.samples", "must be positive");
  if (!(po.beta1_step > 0)) s.fail("statset.beta1_step", "must be positive");
  if (po.per_decade < 1) s.fail("statset.per_decade", "must be positive");
  QuadOptions q;
  q.tol = s.num("tol", 1e-8);
  const std::uint64_t seed = seed_of(s, o);
  po.measure.seed = seed;
  auto meta = base_meta(s, "statset", seed, q.tol);
  meta.push_back({"problem", s.str("statset.problem", "saddle")});
  meta.push_back({"L", fmt(L)});
  meta.push_back({"tau", fmt(tau)});
  meta.push_back({"grid", "samples=" + std::to_string(po.measure.samples) + " beta1_step=" + fmt(po.beta1_step) +
                              " per_decade=" + std::to_string(po.per_decade)});
  e.run = [=] {
    const StatSetProfile prof = stat_set_profile(p, L, tau, po);
    CsvTable t;
    t.meta = meta;
    t.header = kStatsetColumns;
    for (std::size_t i = 0; i < prof.beta2.size(); ++i) {
      for (std::size_t j = 0; j < prof.beta1.size(); ++j) {
        t.rows.push_back({fmt(prof.beta1[j]), fmt(prof.beta2[i]), fmt(prof.S[i][j]), fmt(prof.error[i][j])});
      }
    }
    const double rhs = ssm_rhs(prof, tau);
    const double lhs = std::abs(ssm_lhs(p, L, tau, q).value);
    t.footer = {{"lhs_abs", fmt(lhs)}, {"ssm_rhs", fmt(rhs)}, {"ratio", fmt(lhs > 0 ? rhs / lhs : INFINITY)}};
    return t;
  };
  return e;
}

PreparedExperiment prepare_ssss(const ConfigSection& s, const RunOptions& o, PreparedExperiment e) {
  const long d = s.integer("extremal.d", 2);
  if (d < 2 || d > kMaxDim) s.fail("extremal.d", "must lie in 2..6");
  SsssOptions so;
  so.eps = s.num("extremal.eps", 0.125);
  so.samples = s.integer("extremal.samples", 1L << 16);
  if (!(so.eps > 0 && so.eps < 1)) s.fail("extremal.eps", "must lie in (0, 1)");
  if (so.samples < 1) s.fail("extremal.samples", "must be positive");
  const std::vector<double> lambdas = lambda_grid(s);
  so.seed = seed_of(s, o);
  auto meta = base_meta(s, "ssss", so.seed, 0.0);
  meta.push_back({"d", std::to_string(d)});
  meta.push_back({"extremal.eps", fmt(so.eps)});
  meta.push_back({"grid", "samples=" + std::to_string(so.samples)});
  e.run = [=] {
    const SsssResult r = ssss_floor(static_cast<int>(d), lambdas, so);
    CsvTable t;
    t.meta = meta;
    t.header = kSsssColumns;
    for (const auto& p : r.points) {
      t.rows.push_back({fmt(p.lambda), fmt(p.value), fmt(p.error), fmt(p.max_integrand), std::to_string(p.hits)});
    }
    if (r.points.size() >= 5) fit_footer(t, r.fit);
    return t;
  };
  return e;
}

PreparedExperiment prepare_appendix(const ConfigSection& s, const RunOptions& o, PreparedExperiment e) {
  const long d = s.integer("appendix.d", 2);
  if (d < 1) s.fail("appendix.d", "must be positive");
  Rational p;
  std::vector<Rational> rhos;
  try {
    p = parse_rational(s.str("appendix.p"));
  } catch (const ConfigError& err) {
    s.fail("appendix.p", err.what());
  }
  if (!(p > 1)) s.fail("appendix.p", "must exceed 1");
  try {
    for (const auto& w : s.words("appendix.rho")) rhos.push_back(parse_rational(w));
  } catch (const ConfigError& err) {
    s.fail("appendix.rho", err.what());
  }
  for (const auto& r : rhos) {
    if (r < 0) s.fail("appendix.rho", "values must be non-negative");
  }
  const long m_max = s.integer("appendix.m_max", 1000);
  if (m_max < 1) s.fail("appendix.m_max", "must be positive");
  const std::string ptext = s.str("appendix.p");
  const std::vector<std::string> rtext = s.words("appendix.rho");
  auto meta = base_meta(s, "appendix", seed_of(s, o), 0.0);
  meta.push_back({"grid", "m_max=" + std::to_string(m_max)});
  e.run = [=] {
    CsvTable t;
    t.meta = meta;
    t.header = kAppendixColumns;
    for (std::size_t i = 0; i < rhos.size(); ++i) {
      const auto w = appendix_certificate(static_cast<int>(d), p, rhos[i], static_cast<int>(m_max));
      t.rows.push_back({std::to_string(d), ptext, rtext[i], w ? std::to_string(*w) : "none"});
    }
    return t;
  };
  return e;
}

}  // namespace

std::vector<std::string> decay_columns(int d) {
  std::vector<std::string> c = {"phase_id", "d", "z_re", "z_im"};
  for (int i = 1; i <= d; ++i) c.push_back("v_" + std::to_string(i));
  c.insert(c.end(), {"lambda", "value_re", "value_im", "abs", "err_est", "nodes"});
  return c;
}

std::vector<std::string> certify_columns(int d) {
  std::vector<std::string> c = {"phase_id", "d", "h"};
  for (int i = 1; i <= d; ++i) c.push_back("v_" + std::to_string(i));
  c.insert(c.end(), {"sandwich_ok", "inner_min", "outer_max", "skipped", "k", "grad_floor", "grad_ceiling",
                     "shell_rmin", "shell_rmax", "glaeser", "grad_ok", "containment_ok", "glaeser_ok"});
  return c;
}

const std::vector<std::string> kStatsetColumns = {"beta1", "beta2", "S", "stderr"};
const std::vector<std::string> kSsssColumns = {"lambda", "value", "stderr", "max_integrand", "hits"};
const std::vector<std::string> kAppendixColumns = {"d", "p", "rho", "witness_m"};

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> k;
  for (const auto& [name, keys] : kKindKeys) k.push_back(name);
  return k;
}

PreparedExperiment prepare_experiment(const ConfigSection& s, const RunOptions& o) {
  PreparedExperiment e;
  e.name = s.name();
  e.kind = s.str("experiment.kind");
  auto known = kKindKeys.find(e.kind);
  if (known == kKindKeys.end()) s.fail("experiment.kind", "unknown kind '" + e.kind + "'");
  for (const auto& [key, entry] : s.entries()) {
    if (!kCommonKeys.count(key) && !known->second.count(key)) s.fail(key, "unknown key for kind " + e.kind);
  }
  e.output = s.str("output", e.name + ".csv");
  if (e.output.find('/') != std::string::npos) s.fail("output", "must be a plain file name");
  e.dir = o.out_dir.value_or(s.str("out_dir", "out"));
  if (e.kind == "decay") return prepare_decay(s, o, std::move(e));
  if (e.kind == "certify") return prepare_certify(s, o, std::move(e));
  if (e.kind == "statset") return prepare_statset(s, o, std::move(e));
  if (e.kind == "ssss") return prepare_ssss(s, o, std::move(e));
  return prepare_appendix(s, o, std::move(e));
}

int RunReport::exit_code() const {
  for (const auto& o : outcomes) {
    if (!o.error.empty()) return 1;
  }
  return 0;
}

RunReport run_config(const Config& config, const RunOptions& opts) {
  // With several experiments the workers run whole experiments; a single one gets them all inside.
  RunOptions inner = opts;
  if (config.experiments.size() > 1) inner.workers = 1;
  std::vector<PreparedExperiment> prepared;
  std::set<std::string> outputs;
  for (const auto& s : config.experiments) {
    prepared.push_back(prepare_experiment(s, inner));
    const std::string target = (std::filesystem::path(prepared.back().dir) / prepared.back().output).string();
    if (!outputs.insert(target).second) s.fail("output", "'" + target + "' is written twice");
  }
  RunReport report;
  if (prepared.empty()) return report;
  for (const auto& e : prepared) std::filesystem::create_directories(e.dir);
  report.outcomes.resize(prepared.size());
  std::mutex write_lock;
  const int outer = prepared.size() > 1 ? std::min<int>(opts.workers, static_cast<int>(prepared.size())) : 1;
  parallel_for(static_cast<int>(prepared.size()), std::max(outer, 1), [&](int i) {
    ExperimentOutcome& out = report.outcomes[i];
    out.name = prepared[i].name;
    try {
      const CsvTable t = prepared[i].run();
      const std::string text = render_csv(t);
      const std::string path = (std::filesystem::path(prepared[i].dir) / prepared[i].output).string();
      std::lock_guard<std::mutex> g(write_lock);
      write_file_atomic(path, text);
      out.path = path;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });
  return report;
}

}  // namespace osc
