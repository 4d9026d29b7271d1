#include "ctunnel/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ctunnel::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round step of the form {1, 2, 5} x 10^k giving about `target` intervals.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double p = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * p >= raw) return m * p;
  return 10.0 * p;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi >= lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
  }
};

}  // namespace

std::string render(const Plot& plot, int width, int height) {
  const double left = 80, right = 170, top = 40 + 16.0 * plot.notes.size(), bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;

  Range rx, ry;
  for (const Series& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double r = s.style == Style::Circles && i < s.r.size() ? s.r[i] : 0.0;
      if (!std::isfinite(s.y[i])) continue;
      rx.add(s.x[i] - r);
      rx.add(s.x[i] + r);
      ry.add(s.y[i] - r);
      ry.add(s.y[i] + r);
    }
  }
  rx.pad();
  ry.pad();
  if (plot.equal_aspect) {
    const double sx = (rx.hi - rx.lo) / pw, sy = (ry.hi - ry.lo) / ph;
    if (sx > sy) {
      const double c = 0.5 * (ry.lo + ry.hi), half = 0.5 * sx * ph;
      ry.lo = c - half, ry.hi = c + half;
    } else {
      const double c = 0.5 * (rx.lo + rx.hi), half = 0.5 * sy * pw;
      rx.lo = c - half, rx.hi = c + half;
    }
  }
  auto X = [&](double x) { return left + (x - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto Y = [&](double y) { return top + (ry.hi - y) / (ry.hi - ry.lo) * ph; };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << num(left) << "\" y=\"22\" font-size=\"15\">" << escape(plot.title)
    << "</text>\n";
  for (std::size_t k = 0; k < plot.notes.size(); ++k)
    o << "<text x=\"" << num(left) << "\" y=\"" << num(40 + 16.0 * k)
      << "\" font-size=\"12\" fill=\"#444\">" << escape(plot.notes[k]) << "</text>\n";

  o << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
    << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double xs = nice_step(rx.hi - rx.lo, 6), ys = nice_step(ry.hi - ry.lo, 6);
  for (double t = std::ceil(rx.lo / xs) * xs; t <= rx.hi; t += xs) {
    o << "<line x1=\"" << num(X(t)) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(X(t))
      << "\" y2=\"" << num(top) << "\" stroke=\"#ddd\"/>\n"
      << "<text x=\"" << num(X(t)) << "\" y=\"" << num(top + ph + 16)
      << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
  }
  for (double t = std::ceil(ry.lo / ys) * ys; t <= ry.hi; t += ys) {
    o << "<line x1=\"" << num(left) << "\" y1=\"" << num(Y(t)) << "\" x2=\"" << num(left + pw)
      << "\" y2=\"" << num(Y(t)) << "\" stroke=\"#ddd\"/>\n"
      << "<text x=\"" << num(left - 6) << "\" y=\"" << num(Y(t) + 4)
      << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(t) << "</text>\n";
  }
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 18)
    << "\" font-size=\"13\" text-anchor=\"middle\">" << escape(plot.xlabel) << "</text>\n"
    << "<text x=\"18\" y=\"" << num(top + ph / 2) << "\" font-size=\"13\" text-anchor=\"middle\" "
    << "transform=\"rotate(-90 18 " << num(top + ph / 2) << ")\">" << escape(plot.ylabel)
    << "</text>\n";

  o << "<clipPath id=\"frame\"><rect x=\"" << num(left) << "\" y=\"" << num(top)
    << "\" width=\"" << num(pw) << "\" height=\"" << num(ph) << "\"/></clipPath>\n"
    << "<g clip-path=\"url(#frame)\">\n";
  for (const Series& s : plot.series) {
    if (s.style == Style::Line) {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::isfinite(s.y[i])) o << num(X(s.x[i])) << ',' << num(Y(s.y[i])) << ' ';
      o << "\"/>\n";
    } else if (s.style == Style::Circles) {
      const double scale = pw / (rx.hi - rx.lo);
      for (std::size_t i = 0; i < s.x.size(); ++i)
        o << "<circle cx=\"" << num(X(s.x[i])) << "\" cy=\"" << num(Y(s.y[i])) << "\" r=\""
          << num(s.r[i] * scale) << "\" fill=\"none\" stroke=\"" << s.color
          << "\" stroke-dasharray=\"4 3\"/>\n";
    } else {
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (std::isfinite(s.y[i]))
          o << "<circle cx=\"" << num(X(s.x[i])) << "\" cy=\"" << num(Y(s.y[i]))
            << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
  }
  o << "</g>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const Series& s = plot.series[k];
    const double ly = top + 14 + 18.0 * k, lx = left + pw + 12;
    if (s.style == Style::Markers)
      o << "<circle cx=\"" << num(lx + 8) << "\" cy=\"" << num(ly - 4) << "\" r=\"3\" fill=\""
        << s.color << "\"/>\n";
    else
      o << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(lx + 16)
        << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\"/>\n";
    o << "<text x=\"" << num(lx + 22) << "\" y=\"" << num(ly) << "\" font-size=\"11\">"
      << escape(s.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace ctunnel::svg
