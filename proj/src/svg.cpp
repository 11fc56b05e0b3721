#include "svarwb/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "svarwb/csv.hpp"

namespace svarwb {

namespace {

constexpr double kWidth = 640, kHeight = 400, kLeft = 60, kRight = 20, kTop = 40, kBottom = 40;

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string fan_chart_svg(const FanChart& chart) {
  const std::size_t H = chart.horizons.size();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  auto widen = [&](const std::vector<double>& v) {
    for (double x : v)
      if (std::isfinite(x)) lo = std::min(lo, x), hi = std::max(hi, x);
  };
  for (const auto& b : chart.bands) widen(b.lower), widen(b.upper);
  widen(chart.center);
  widen(chart.robust_lower);
  widen(chart.robust_upper);
  if (!std::isfinite(lo)) lo = -1, hi = 1;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const int h0 = H ? chart.horizons.front() : 0, h1 = H ? chart.horizons.back() : 1;
  auto x = [&](int h) {
    return kLeft + (h1 == h0 ? 0.5 : double(h - h0) / (h1 - h0)) * (kWidth - kLeft - kRight);
  };
  auto y = [&](double v) { return kTop + (hi - v) / (hi - lo) * (kHeight - kTop - kBottom); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << escape(chart.title) << "</text>\n";
  o << "<g stroke=\"#444\" stroke-width=\"1\">\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
    << kHeight - kBottom << "\"/>\n";
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
    << "\"/>\n</g>\n";
  if (lo < 0 && hi > 0)
    o << "<line x1=\"" << kLeft << "\" y1=\"" << fixed(y(0)) << "\" x2=\"" << kWidth - kRight << "\" y2=\""
      << fixed(y(0)) << "\" stroke=\"#bbb\" stroke-dasharray=\"2,3\"/>\n";
  o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
  for (std::size_t i = 0; i < H; ++i)
    o << "<text x=\"" << fixed(x(chart.horizons[i])) << "\" y=\"" << kHeight - kBottom + 15
      << "\" text-anchor=\"middle\">" << chart.horizons[i] << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << fixed(y(v) + 4) << "\" text-anchor=\"end\">"
      << format_number(std::round(v * 1e4) / 1e4) << "</text>\n";
  }
  o << "</g>\n";

  std::vector<const FanBand*> bands;
  for (const auto& b : chart.bands) bands.push_back(&b);
  std::stable_sort(bands.begin(), bands.end(), [](auto* a, auto* b) { return a->coverage > b->coverage; });
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const FanBand& b = *bands[k];
    if (b.lower.size() != H || b.upper.size() != H || H == 0) continue;
    o << "<polygon fill=\"#1f5fa8\" fill-opacity=\"" << fixed(0.15 + 0.12 * static_cast<double>(k))
      << "\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < H; ++i) o << fixed(x(chart.horizons[i])) << ',' << fixed(y(b.upper[i])) << ' ';
    for (std::size_t i = H; i-- > 0;) o << fixed(x(chart.horizons[i])) << ',' << fixed(y(b.lower[i])) << ' ';
    o << "\"><title>" << format_number(b.coverage) << " band</title></polygon>\n";
  }
  auto polyline = [&](const std::vector<double>& v, const char* style) {
    if (v.size() != H || H == 0) return;
    o << "<polyline fill=\"none\" " << style << " points=\"";
    for (std::size_t i = 0; i < H; ++i) o << fixed(x(chart.horizons[i])) << ',' << fixed(y(v[i])) << ' ';
    o << "\"/>\n";
  };
  polyline(chart.center, "stroke=\"#0b2e59\" stroke-width=\"2\"");
  polyline(chart.robust_lower, "stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"");
  polyline(chart.robust_upper, "stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"");
  o << "</svg>\n";
  return o.str();
}

}  // namespace svarwb
