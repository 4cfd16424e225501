#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vpkcli {

namespace {
constexpr double W = 720, H = 480;
constexpr double ML = 70, MR = 20, MT = 40, MB = 55;

double tr(double v, bool log) { return log ? std::log10(v) : v; }

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}
} // namespace

void SvgPlot::save(const std::string& path) const {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double xv = s.x[i], yv = s.y[i];
      if (logx && xv <= 0) continue;
      if (logy && yv <= 0) continue;
      xmin = std::min(xmin, tr(xv, logx));
      xmax = std::max(xmax, tr(xv, logx));
      ymin = std::min(ymin, tr(yv, logy));
      ymax = std::max(ymax, tr(yv, logy));
    }
  if (!(xmin < xmax)) {
    xmin -= 1;
    xmax += 1;
  }
  if (!(ymin < ymax)) {
    ymin -= 1;
    ymax += 1;
  }
  double xpad = 0.03 * (xmax - xmin), ypad = 0.05 * (ymax - ymin);
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  auto X = [&](double v) { return ML + (tr(v, logx) - xmin) / (xmax - xmin) * (W - ML - MR); };
  auto Y = [&](double v) { return H - MB - (tr(v, logy) - ymin) / (ymax - ymin) * (H - MT - MB); };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
         "font-family=\"sans-serif\">"
      << title << "</text>\n";

  auto tick_values = [&](double lo, double hi, bool log) {
    std::vector<double> t;
    if (log) {
      for (int d = static_cast<int>(std::floor(lo)); d <= static_cast<int>(std::ceil(hi)); ++d)
        if (d >= lo - 1e-9 && d <= hi + 1e-9) t.push_back(std::pow(10.0, d));
    } else {
      double span = hi - lo;
      double step = std::pow(10.0, std::floor(std::log10(span / 4)));
      if (span / step > 8) step *= 2;
      if (span / step > 8) step *= 2.5;
      for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) t.push_back(v);
    }
    return t;
  };

  for (double tv : tick_values(xmin, xmax, logx)) {
    double px = X(logx ? tv : tv);
    out << "<line x1=\"" << px << "\" y1=\"" << MT << "\" x2=\"" << px << "\" y2=\"" << H - MB
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << H - MB + 18
        << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
        << fmt(tv) << "</text>\n";
  }
  for (double tv : tick_values(ymin, ymax, logy)) {
    double py = Y(logy ? tv : tv);
    out << "<line x1=\"" << ML << "\" y1=\"" << py << "\" x2=\"" << W - MR << "\" y2=\"" << py
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << ML - 6 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt(tv)
        << "</text>\n";
  }
  out << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR << "\" height=\""
      << H - MT - MB << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" << xlabel
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << (MT + H - MB) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 16 "
      << (MT + H - MB) / 2 << ")\">" << ylabel << "</text>\n";

  for (const auto& s : series) {
    std::ostringstream pts;
    bool pen_up = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((logx && s.x[i] <= 0) || (logy && s.y[i] <= 0) || !std::isfinite(s.y[i])) {
        pen_up = true;
        continue;
      }
      pts << (pen_up ? "M" : "L") << X(s.x[i]) << ' ' << Y(s.y[i]) << ' ';
      pen_up = false;
    }
    out << "<path d=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"" << s.width << "\"/>\n";
    if (s.markers)
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if ((logx && s.x[i] <= 0) || (logy && s.y[i] <= 0)) continue;
        out << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i])
            << "\" r=\"3.5\" fill=\"" << s.color << "\"/>\n";
      }
  }
  out << "</svg>\n";

  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f.good()) throw std::runtime_error("cannot write " + tmp);
    f << out.str();
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move " + tmp + " into place");
}

} // namespace vpkcli
