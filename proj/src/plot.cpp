#include "osc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "osc/decay.hpp"
#include "osc/types.hpp"

namespace osc {

namespace {

constexpr double kW = 640, kH = 440, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string num(double x, int prec = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", prec, x);
  return buf;
}

std::string px(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  double sx(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); }
  double sy(double y) const { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); }
};

void open_svg(std::ostringstream& o, const std::string& title, const std::string& hash) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
    << kW << ' ' << kH << "\">\n";
  o << "<metadata>source-sha256: " << hash << "</metadata>\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
    << title << "</text>\n";
}

void axes(std::ostringstream& o, const Frame& f, const std::string& xl, const std::string& yl) {
  o << "<g stroke=\"black\" fill=\"none\">\n";
  o << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\"" << px(kW - kLeft - kRight)
    << "\" height=\"" << px(kH - kTop - kBottom) << "\"/>\n</g>\n";
  o << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 4, y = f.y0 + (f.y1 - f.y0) * k / 4;
    o << "<text x=\"" << px(f.sx(x)) << "\" y=\"" << px(kH - kBottom + 16) << "\" text-anchor=\"middle\">"
      << num(x, 3) << "</text>\n";
    o << "<text x=\"" << px(kLeft - 6) << "\" y=\"" << px(f.sy(y) + 4) << "\" text-anchor=\"end\">" << num(y, 3)
      << "</text>\n";
  }
  o << "<text x=\"" << px(kLeft + (kW - kLeft - kRight) / 2) << "\" y=\"" << px(kH - 12)
    << "\" text-anchor=\"middle\">" << xl << "</text>\n";
  o << "<text x=\"16\" y=\"" << px(kTop + (kH - kTop - kBottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << px(kTop + (kH - kTop - kBottom) / 2) << ")\">" << yl << "</text>\n</g>\n";
}

std::pair<double, double> padded(const std::vector<double>& v) {
  double lo = *std::min_element(v.begin(), v.end()), hi = *std::max_element(v.begin(), v.end());
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace

PlotKind parse_plot_kind(const std::string& s) {
  if (s == "decay") return PlotKind::kDecay;
  if (s == "heatmap") return PlotKind::kHeatmap;
  throw ConfigError("plot kind: expected decay or heatmap, got '" + s + "'");
}

std::string decay_svg(const CsvTable& t, const std::string& hash) {
  require_columns(t, {"lambda", "abs"});
  const std::vector<double> l = t.numeric_column("lambda"), a = t.numeric_column("abs");
  if (l.size() < 2) throw SchemaError("decay plot needs at least two rows");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < l.size(); ++i) {
    if (!(l[i] > 0 && a[i] > 0)) throw SchemaError("decay plot needs positive lambda and abs");
    lx.push_back(std::log2(l[i]));
    ly.push_back(std::log2(a[i]));
  }
  const DecayFit fit = l.size() >= 5 ? fit_decay(l, a) : DecayFit{};
  const auto [x0, x1] = padded(lx);
  const auto [y0, y1] = padded(ly);
  const Frame f{x0, x1, y0, y1};
  std::ostringstream o;
  open_svg(o, "decay: " + t.meta_value("experiment"), hash);
  axes(o, f, "log2 lambda", "log2 |I|");
  o << "<g fill=\"#1f4e9c\">\n";
  for (std::size_t i = 0; i < lx.size(); ++i) {
    o << "<circle cx=\"" << px(f.sx(lx[i])) << "\" cy=\"" << px(f.sy(ly[i])) << "\" r=\"3\"/>\n";
  }
  o << "</g>\n";
  if (fit.points > 0) {
    // log2|I| = slope log2 lambda + intercept / ln 2
    auto line = [&](double x) { return fit.slope * x + fit.intercept / std::log(2.0); };
    o << "<line x1=\"" << px(f.sx(x0)) << "\" y1=\"" << px(f.sy(line(x0))) << "\" x2=\"" << px(f.sx(x1))
      << "\" y2=\"" << px(f.sy(line(x1))) << "\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
    o << "<text x=\"" << px(kW - kRight - 8) << "\" y=\"" << px(kTop + 18)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"13\">slope " << num(fit.slope, 4)
      << " (rms " << num(fit.residual_rms, 2) << ")</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string heatmap_svg(const CsvTable& t, const std::string& hash) {
  require_columns(t, {"beta1", "beta2", "S"});
  const std::vector<double> b1 = t.numeric_column("beta1"), b2 = t.numeric_column("beta2"),
                            s = t.numeric_column("S");
  if (b1.empty()) throw SchemaError("heatmap needs at least one row");
  std::vector<double> xs = b1, ys;
  for (double b : b2) {
    if (!(b > 0)) throw SchemaError("heatmap needs positive beta2");
    ys.push_back(std::log10(b));
  }
  auto uniq = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const std::vector<double> ux = uniq(xs), uy = uniq(ys);
  const double dx = ux.size() > 1 ? ux[1] - ux[0] : 1.0, dy = uy.size() > 1 ? uy[1] - uy[0] : 1.0;
  const Frame f{ux.front(), ux.back() + dx, uy.front(), uy.back() + dy};
  const double smax = std::max(*std::max_element(s.begin(), s.end()), 1e-300);
  std::ostringstream o;
  open_svg(o, "stationary set: " + t.meta_value("experiment"), hash);
  o << "<g stroke=\"none\">\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0)) continue;
    const int shade = static_cast<int>(std::lround(255 * (1 - std::clamp(s[i] / smax, 0.0, 1.0))));
    const double xa = f.sx(xs[i]), xb = f.sx(xs[i] + dx), ya = f.sy(ys[i] + dy), yb = f.sy(ys[i]);
    o << "<rect x=\"" << px(xa) << "\" y=\"" << px(ya) << "\" width=\"" << px(xb - xa) << "\" height=\""
      << px(yb - ya) << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\"/>\n";
  }
  o << "</g>\n";
  axes(o, f, "beta1", "log10 beta2");
  o << "<text x=\"" << px(kW - kRight - 8) << "\" y=\"" << px(kTop + 18)
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">max S " << num(smax) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

std::string plot_csv(const std::string& csv_path, PlotKind kind, const std::string& svg_path) {
  const std::string text = read_file(csv_path);
  const CsvTable t = parse_csv(text);
  const std::string hash = sha256_hex(text);
  const std::string svg = kind == PlotKind::kDecay ? decay_svg(t, hash) : heatmap_svg(t, hash);
  write_file_atomic(svg_path, svg);
  return svg;
}

}  // namespace osc
