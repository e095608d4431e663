#include "ehgo/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ehgo {

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double map(double v) const { return log ? std::log10(v) : v; }
  double unmap(double v) const { return log ? std::pow(10.0, v) : v; }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0); }

}  // namespace

std::string render_svg(const std::vector<Series>& series, const PlotOptions& o) {
  const double left = 70, right = 20, top = 40, bottom = 55;
  const double pw = o.width - left - right, ph = o.height - top - bottom;

  Axis ax{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), o.log_x};
  Axis ay{ax.lo, ax.hi, o.log_y};
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], o.log_x) || !usable(s.y[i], o.log_y)) continue;
      ax.lo = std::min(ax.lo, ax.map(s.x[i]));
      ax.hi = std::max(ax.hi, ax.map(s.x[i]));
      ay.lo = std::min(ay.lo, ay.map(s.y[i]));
      ay.hi = std::max(ay.hi, ay.map(s.y[i]));
    }
  }
  if (!(ax.lo <= ax.hi)) ax.lo = 0, ax.hi = 1;
  if (!(ay.lo <= ay.hi)) ay.lo = 0, ay.hi = 1;
  auto widen = [](Axis& a) {
    const double span = a.hi - a.lo;
    const double pad = span > 0 ? 0.05 * span : 0.5;
    a.lo -= pad;
    a.hi += pad;
  };
  widen(ax);
  widen(ay);
  if (o.equal_aspect) {
    const double sx = (ax.hi - ax.lo) / pw, sy = (ay.hi - ay.lo) / ph;
    const double s = std::max(sx, sy);
    const double cx = 0.5 * (ax.lo + ax.hi), cy = 0.5 * (ay.lo + ay.hi);
    ax.lo = cx - 0.5 * s * pw, ax.hi = cx + 0.5 * s * pw;
    ay.lo = cy - 0.5 * s * ph, ay.hi = cy + 0.5 * s * ph;
  }
  auto px = [&](double v) { return left + (ax.map(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return top + ph - (ay.map(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\""
     << o.height << "\" viewBox=\"0 0 " << o.width << ' ' << o.height << "\" data-series=\""
     << series.size() << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << num(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << escape(o.title) << "</text>\n"
     << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
     << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Five ticks per axis, evenly spaced in mapped coordinates.
  for (int i = 0; i <= 4; ++i) {
    const double fx = ax.lo + (ax.hi - ax.lo) * i / 4.0;
    const double fy = ay.lo + (ay.hi - ay.lo) * i / 4.0;
    const double X = left + pw * i / 4.0, Y = top + ph - ph * i / 4.0;
    os << "<text x=\"" << num(X) << "\" y=\"" << num(top + ph + 18)
       << "\" text-anchor=\"middle\" font-size=\"11\">" << tick(ax.unmap(fx)) << "</text>\n"
       << "<text x=\"" << num(left - 6) << "\" y=\"" << num(Y + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << tick(ay.unmap(fy)) << "</text>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(o.height - 12)
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(o.x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\""
     << " transform=\"rotate(-90 16 " << num(top + ph / 2) << ")\">" << escape(o.y_label)
     << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, (n + o.max_points - 1) / std::max<std::size_t>(1, o.max_points));
    std::ostringstream pts;
    bool first = true;
    for (std::size_t i = 0; i < n; i += stride) {
      if (!usable(s.x[i], o.log_x) || !usable(s.y[i], o.log_y)) continue;
      pts << (first ? "" : " ") << num(px(s.x[i])) << ',' << num(py(s.y[i]));
      first = false;
    }
    if (s.markers) {
      os << "<g class=\"series\" data-label=\"" << escape(s.label) << "\" fill=\"" << s.color << "\">";
      for (std::size_t i = 0; i < n; i += stride) {
        if (!usable(s.x[i], o.log_x) || !usable(s.y[i], o.log_y)) continue;
        os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"4\"/>";
      }
      os << "</g>\n";
    } else {
      os << "<polyline class=\"series\" data-label=\"" << escape(s.label)
         << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
         << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"" << pts.str() << "\"/>\n";
    }
    const double ly = top + 16 + 16 * static_cast<double>(si);
    os << "<text x=\"" << num(left + pw - 8) << "\" y=\"" << num(ly)
       << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << s.color << "\">" << escape(s.label)
       << "</text>\n";
  }
  for (std::size_t i = 0; i < o.notes.size(); ++i) {
    os << "<text x=\"" << num(left + 8) << "\" y=\"" << num(top + 16 + 16 * static_cast<double>(i))
       << "\" font-size=\"12\">" << escape(o.notes[i]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string trajectory_svg(const SimLog& log) {
  Series vehicle{"vehicle", {}, {}, false, false, "#1f77b4"};
  Series drone{"multirotor", {}, {}, true, false, "#d62728"};
  for (const SimRecord& r : log.records) {
    vehicle.x.push_back(r.vehicle.xc1.x());
    vehicle.y.push_back(r.vehicle.xc1.y());
    drone.x.push_back(r.state.p1.x());
    drone.y.push_back(r.state.p1.y());
  }
  PlotOptions o;
  o.title = "Top-down trajectories";
  o.x_label = "x [m]";
  o.y_label = "y [m]";
  o.equal_aspect = true;
  return render_svg({vehicle, drone}, o);
}

std::string errors_svg(const SimLog& log) {
  Series rho{"|rho1| [m]", {}, {}, false, false, "#1f77b4"};
  Series xi{"|xi1| [rad]", {}, {}, false, false, "#ff7f0e"};
  for (const SimRecord& r : log.records) {
    rho.x.push_back(r.t);
    rho.y.push_back(r.chi.segment<3>(slot::rho1).norm());
    xi.x.push_back(r.t);
    xi.y.push_back(r.chi.segment<3>(slot::xi1).norm());
  }
  PlotOptions o;
  o.title = "Tracking errors";
  o.x_label = "t [s]";
  o.y_label = "norm";
  o.log_y = true;
  return render_svg({rho, xi}, o);
}

std::string sweep_svg(const SweepResult& sweep) {
  Series pts{"steady error", {}, {}, false, true, "#1f77b4"};
  Series fit{"fit", {}, {}, true, false, "#d62728"};
  for (const SweepPoint& p : sweep.points) {
    if (p.diverged) continue;
    pts.x.push_back(p.epsilon);
    pts.y.push_back(p.steady_error);
  }
  if (!pts.x.empty()) {
    const auto [lo, hi] = std::minmax_element(pts.x.begin(), pts.x.end());
    for (double e : {*lo, *hi}) {
      fit.x.push_back(e);
      fit.y.push_back(std::exp(sweep.intercept + sweep.slope * std::log(e)));
    }
  }
  PlotOptions o;
  o.title = "Steady estimation error vs epsilon";
  o.x_label = "epsilon";
  o.y_label = "RMS |chi - chi_hat|";
  o.log_x = o.log_y = true;
  char note[64];
  std::snprintf(note, sizeof note, "slope = %.3f", sweep.slope);
  o.notes.push_back(note);
  return render_svg({pts, fit}, o);
}

}  // namespace ehgo
