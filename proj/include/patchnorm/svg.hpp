#ifndef PATCHNORM_SVG_HPP
#define PATCHNORM_SVG_HPP

#include <string>
#include <vector>

namespace patchnorm {

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal hand-emitted line chart: axes, ticks, polylines, legend.
std::string render_line_chart(const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series);

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<SvgSeries>& series);

}  // namespace patchnorm

#endif  // PATCHNORM_SVG_HPP
