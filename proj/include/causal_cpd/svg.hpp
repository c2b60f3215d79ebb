#ifndef CAUSAL_CPD_SVG_HPP
#define CAUSAL_CPD_SVG_HPP

#include <string>
#include <vector>

namespace ccpd::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG document with axes, tick labels, one polyline per series
/// and a legend.
std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series);

}  // namespace ccpd::svg

#endif  // CAUSAL_CPD_SVG_HPP
