#include "idamp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace idamp {

namespace {

constexpr double W = 640, H = 420, ML = 70, MR = 150, MT = 40, MB = 50;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
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

}  // namespace

std::string svg_loglog(const std::vector<PlotSeries>& series, const std::string& title, const std::string& xlabel,
                       const std::string& ylabel) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0 && s.y[i] > 0)) continue;
      x0 = std::min(x0, std::log10(s.x[i]));
      x1 = std::max(x1, std::log10(s.x[i]));
      y0 = std::min(y0, std::log10(s.y[i]));
      y1 = std::max(y1, std::log10(s.y[i]));
    }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x1 = x0 + 1;
  if (y1 - y0 < 1e-12) y1 = y0 + 1;
  x0 = std::floor(x0), x1 = std::ceil(x1), y0 = std::floor(y0), y1 = std::ceil(y1);
  const double pw = W - ML - MR, ph = H - MT - MB;
  auto px = [&](double lx) { return ML + (lx - x0) / (x1 - x0) * pw; };
  auto py = [&](double ly) { return MT + (y1 - ly) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(title) << "</text>\n";
  o << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double e = x0; e <= x1 + 1e-9; e += 1) {
    o << "<line x1=\"" << num(px(e)) << "\" y1=\"" << MT << "\" x2=\"" << num(px(e)) << "\" y2=\"" << MT + ph
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << num(px(e)) << "\" y=\"" << MT + ph + 16 << "\" text-anchor=\"middle\" font-size=\"11\">1e"
      << static_cast<int>(e) << "</text>\n";
  }
  for (double e = y0; e <= y1 + 1e-9; e += 1) {
    o << "<line x1=\"" << ML << "\" y1=\"" << num(py(e)) << "\" x2=\"" << ML + pw << "\" y2=\"" << num(py(e))
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << ML - 6 << "\" y=\"" << num(py(e) + 4) << "\" text-anchor=\"end\" font-size=\"11\">1e"
      << static_cast<int>(e) << "</text>\n";
  }
  o << "<text x=\"" << ML + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
    << esc(xlabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << MT + ph / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << MT + ph / 2 << ")\">" << esc(ylabel) << "</text>\n";
  for (size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* col = kColors[s % 8];
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\"";
    if (ser.dashed) o << " stroke-dasharray=\"5,3\"";
    o << " points=\"";
    for (size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!(ser.x[i] > 0 && ser.y[i] > 0)) continue;
      o << num(px(std::log10(ser.x[i]))) << "," << num(py(std::log10(ser.y[i]))) << " ";
    }
    o << "\"/>\n";
    double ly = MT + 14 + 18.0 * static_cast<double>(s);
    o << "<line x1=\"" << ML + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << ML + pw + 30 << "\" y2=\"" << ly
      << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << ML + pw + 34 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">" << esc(ser.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_heatmap(const RMatrix& z, const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::string& title) {
  const double pw = W - ML - MR, ph = H - MT - MB;
  double lo = 1e300, hi = -1e300;
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      double v = std::log10(std::max(z(i, j), 1e-300));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(hi > lo)) hi = lo + 1;
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(title) << "</text>\n";
  const double cw = pw / std::max<Eigen::Index>(1, z.cols()), ch = ph / std::max<Eigen::Index>(1, z.rows());
  auto color = [&](double v) {
    double s = (std::log10(std::max(v, 1e-300)) - lo) / (hi - lo);
    int r = static_cast<int>(255 * std::clamp(1.5 - std::abs(4 * s - 3), 0.0, 1.0));
    int g = static_cast<int>(255 * std::clamp(1.5 - std::abs(4 * s - 2), 0.0, 1.0));
    int b = static_cast<int>(255 * std::clamp(1.5 - std::abs(4 * s - 1), 0.0, 1.0));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
      double x = ML + static_cast<double>(j) * cw;
      double y = MT + ph - static_cast<double>(i + 1) * ch;
      o << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cw + 0.3) << "\" height=\""
        << num(ch + 0.3) << "\" fill=\"" << color(z(i, j)) << "\"/>\n";
    }
  o << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!xs.empty()) {
    o << "<text x=\"" << ML << "\" y=\"" << MT + ph + 16 << "\" font-size=\"11\">" << tick(xs.front()) << "</text>\n";
    o << "<text x=\"" << ML + pw << "\" y=\"" << MT + ph + 16 << "\" text-anchor=\"end\" font-size=\"11\">"
      << tick(xs.back()) << "</text>\n";
  }
  if (!ys.empty()) {
    o << "<text x=\"" << ML - 6 << "\" y=\"" << MT + ph << "\" text-anchor=\"end\" font-size=\"11\">"
      << tick(ys.front()) << "</text>\n";
    o << "<text x=\"" << ML - 6 << "\" y=\"" << MT + 10 << "\" text-anchor=\"end\" font-size=\"11\">"
      << tick(ys.back()) << "</text>\n";
  }
  o << "<text x=\"" << ML + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">Re c</text>\n";
  o << "<text x=\"16\" y=\"" << MT + ph / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
    << MT + ph / 2 << ")\">Im c</text>\n";
  o << "<text x=\"" << ML + pw + 10 << "\" y=\"" << MT + 14 << "\" font-size=\"11\">log10 sigma</text>\n";
  for (int s = 0; s <= 4; ++s) {
    double v = lo + (hi - lo) * s / 4.0;
    double y = MT + 30 + 20.0 * (4 - s);
    o << "<rect x=\"" << ML + pw + 10 << "\" y=\"" << y << "\" width=\"16\" height=\"16\" fill=\""
      << color(std::pow(10.0, v)) << "\"/>\n";
    o << "<text x=\"" << ML + pw + 32 << "\" y=\"" << y + 12 << "\" font-size=\"11\">" << tick(v) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace idamp
