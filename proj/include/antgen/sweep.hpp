#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace antgen {

// Uniform frequency grid in GHz. The default 0.01..8 GHz with 800 samples
// puts every sample on a 10 MHz multiple.
struct FrequencySweep {
  double f_start = 0.01;
  double f_stop = 8.0;
  std::size_t count = 800;

  double step() const { return (f_stop - f_start) / static_cast<double>(count - 1); }
  double at(std::size_t i) const { return f_start + static_cast<double>(i) * step(); }
  std::vector<double> grid() const;
  void validate() const;

  bool operator==(const FrequencySweep&) const = default;
};

// |S11| in dB sampled on a sweep grid.
struct S11Curve {
  std::vector<double> freq_ghz;
  std::vector<double> s11_db;

  std::size_t size() const { return freq_ghz.size(); }
  // Index of the grid sample nearest to f; throws std::out_of_range when f
  // lies more than half a grid step outside the sweep.
  std::size_t nearest(double f) const;
  void validate() const;

  bool operator==(const S11Curve&) const = default;
};

std::string curve_to_csv(const S11Curve& curve);
S11Curve curve_from_csv(const std::string& text);

}  // namespace antgen
