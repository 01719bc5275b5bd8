#include "antgen/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace antgen {

std::vector<double> FrequencySweep::grid() const {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = at(i);
  return g;
}

void FrequencySweep::validate() const {
  if (!(f_start > 0.0) || !(f_start < f_stop) || !std::isfinite(f_stop))
    throw std::invalid_argument("sweep needs 0 < f_start < f_stop");
  if (count < 2) throw std::invalid_argument("sweep needs at least two samples");
}

std::size_t S11Curve::nearest(double f) const {
  if (freq_ghz.empty()) throw std::out_of_range("empty curve");
  const double half = freq_ghz.size() > 1 ? 0.5 * (freq_ghz[1] - freq_ghz[0]) : 0.0;
  if (f < freq_ghz.front() - half || f > freq_ghz.back() + half)
    throw std::out_of_range("frequency outside the sweep");
  auto it = std::lower_bound(freq_ghz.begin(), freq_ghz.end(), f);
  if (it == freq_ghz.end()) return freq_ghz.size() - 1;
  const auto i = static_cast<std::size_t>(it - freq_ghz.begin());
  if (i > 0 && f - freq_ghz[i - 1] <= freq_ghz[i] - f) return i - 1;
  return i;
}

void S11Curve::validate() const {
  if (freq_ghz.size() != s11_db.size()) throw std::invalid_argument("curve length mismatch");
}

std::string curve_to_csv(const S11Curve& curve) {
  std::ostringstream out;
  out.precision(17);
  out << "freq_ghz,s11_db\n";
  for (std::size_t i = 0; i < curve.size(); ++i)
    out << curve.freq_ghz[i] << ',' << curve.s11_db[i] << '\n';
  return out.str();
}

S11Curve curve_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  S11Curve c;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("malformed curve row: " + line);
    try {
      const double f = std::stod(line.substr(0, comma));
      const double s = std::stod(line.substr(comma + 1));
      c.freq_ghz.push_back(f);
      c.s11_db.push_back(s);
    } catch (const std::invalid_argument&) {
      if (c.freq_ghz.empty()) continue;  // header
      throw std::invalid_argument("malformed curve row: " + line);
    }
  }
  return c;
}

}  // namespace antgen
