#pragma once

#include <string>
#include <vector>

namespace svarwb {

struct FanBand {
  double coverage = 0.0;
  std::vector<double> lower, upper;  // one entry per horizon
};

struct FanChart {
  std::string title;
  std::vector<int> horizons;
  std::vector<FanBand> bands;  // drawn widest first
  std::vector<double> center;  // posterior mean
  std::vector<double> robust_lower, robust_upper;  // dashed outline, may be empty
};

// Self-contained SVG document.
std::string fan_chart_svg(const FanChart& chart);

}  // namespace svarwb
