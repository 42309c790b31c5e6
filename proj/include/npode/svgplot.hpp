#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "npode/errors.hpp"

namespace npode::cli {

// One output dimension of a curve plot: x against truth/mean with a +-sigma
// band; optional reference curve and context markers.
struct CurveSeries {
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<double> truth;            // same length as x, may be empty
  std::vector<double> ref_x, ref_y;     // noiseless reference, may be empty
  std::vector<double> ctx_x, ctx_y;     // context/training markers, may be empty
  std::string label = "y";
};

// Per-test-point interval chart (capped CI bars with truth markers).
struct BarSeries {
  std::vector<double> truth;
  std::vector<double> mean;
  std::vector<double> low;
  std::vector<double> high;
  std::string label = "y";
};

namespace svg_detail {

struct Scale {
  double lo = 0, hi = 1, a = 0, b = 1;  // data range -> pixel range
  double operator()(double v) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

inline Scale fit(std::vector<double> vals, double pix_a, double pix_b) {
  double lo = vals.empty() ? 0.0 : *std::min_element(vals.begin(), vals.end());
  double hi = vals.empty() ? 1.0 : *std::max_element(vals.begin(), vals.end());
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad, pix_a, pix_b};
}

inline std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                            const Scale& sx, const Scale& sy, const char* color,
                            double width) {
  std::ostringstream os;
  os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
     << "\" points=\"";
  for (size_t i = 0; i < xs.size(); ++i)
    os << sx(xs[i]) << "," << sy(ys[i]) << " ";
  os << "\"/>\n";
  return os.str();
}

}  // namespace svg_detail

// Predicted curves with shaded uncertainty bands, one panel per output
// dimension, stacked vertically.
inline std::string svg_curves(const std::vector<CurveSeries>& panels) {
  using namespace svg_detail;
  const double w = 640, h = 280, margin = 40;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
     << h * panels.size() << "\">\n";
  for (size_t pi = 0; pi < panels.size(); ++pi) {
    const CurveSeries& p = panels[pi];
    double top = pi * h;
    std::vector<double> ally;
    for (size_t i = 0; i < p.mean.size(); ++i) {
      ally.push_back(p.mean[i] - p.std[i]);
      ally.push_back(p.mean[i] + p.std[i]);
    }
    ally.insert(ally.end(), p.truth.begin(), p.truth.end());
    ally.insert(ally.end(), p.ref_y.begin(), p.ref_y.end());
    ally.insert(ally.end(), p.ctx_y.begin(), p.ctx_y.end());
    std::vector<double> allx = p.x;
    allx.insert(allx.end(), p.ref_x.begin(), p.ref_x.end());
    allx.insert(allx.end(), p.ctx_x.begin(), p.ctx_x.end());
    Scale sx = fit(allx, margin, w - margin);
    Scale sy = fit(ally, top + h - margin, top + margin);

    // shaded band as a closed polygon: upper edge forward, lower edge back
    os << "<polygon fill=\"cyan\" fill-opacity=\"0.35\" stroke=\"none\" points=\"";
    for (size_t i = 0; i < p.x.size(); ++i)
      os << sx(p.x[i]) << "," << sy(p.mean[i] + p.std[i]) << " ";
    for (size_t i = p.x.size(); i-- > 0;)
      os << sx(p.x[i]) << "," << sy(p.mean[i] - p.std[i]) << " ";
    os << "\"/>\n";
    if (!p.ref_x.empty()) os << polyline(p.ref_x, p.ref_y, sx, sy, "gray", 1.0);
    os << polyline(p.x, p.mean, sx, sy, "blue", 1.5);
    for (size_t i = 0; i < p.truth.size(); ++i)
      os << "<circle cx=\"" << sx(p.x[i]) << "\" cy=\"" << sy(p.truth[i])
         << "\" r=\"2\" fill=\"red\"/>\n";
    for (size_t i = 0; i < p.ctx_x.size(); ++i)
      os << "<circle cx=\"" << sx(p.ctx_x[i]) << "\" cy=\"" << sy(p.ctx_y[i])
         << "\" r=\"1.5\" fill=\"black\"/>\n";
    os << "<text x=\"" << margin << "\" y=\"" << top + margin - 10 << "\">" << p.label
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

// Capped interval bars over test-point index.
inline std::string svg_bars(const std::vector<BarSeries>& panels) {
  using namespace svg_detail;
  const double w = 640, h = 280, margin = 40;
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
     << h * panels.size() << "\">\n";
  for (size_t pi = 0; pi < panels.size(); ++pi) {
    const BarSeries& p = panels[pi];
    double top = pi * h;
    long n = static_cast<long>(p.mean.size());
    std::vector<double> idx(n), ally;
    for (long i = 0; i < n; ++i) idx[i] = static_cast<double>(i);
    ally.insert(ally.end(), p.low.begin(), p.low.end());
    ally.insert(ally.end(), p.high.begin(), p.high.end());
    ally.insert(ally.end(), p.truth.begin(), p.truth.end());
    Scale sx = fit(idx, margin, w - margin);
    Scale sy = fit(ally, top + h - margin, top + margin);
    double cap = n > 1 ? 0.3 * (sx(1) - sx(0)) : 5.0;
    for (long i = 0; i < n; ++i) {
      double cx = sx(idx[i]);
      os << "<line x1=\"" << cx << "\" y1=\"" << sy(p.low[i]) << "\" x2=\"" << cx
         << "\" y2=\"" << sy(p.high[i]) << "\" stroke=\"blue\" stroke-width=\"1\"/>\n";
      for (double v : {p.low[i], p.high[i]})
        os << "<line x1=\"" << cx - cap << "\" y1=\"" << sy(v) << "\" x2=\"" << cx + cap
           << "\" y2=\"" << sy(v) << "\" stroke=\"blue\" stroke-width=\"1\"/>\n";
      os << "<circle cx=\"" << cx << "\" cy=\"" << sy(p.mean[i])
         << "\" r=\"2\" fill=\"blue\"/>\n";
      os << "<circle cx=\"" << cx << "\" cy=\"" << sy(p.truth[i])
         << "\" r=\"2\" fill=\"red\"/>\n";
    }
    os << "<text x=\"" << margin << "\" y=\"" << top + margin - 10 << "\">" << p.label
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace npode::cli
