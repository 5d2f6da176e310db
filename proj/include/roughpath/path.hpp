#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "roughpath/contract.hpp"

namespace roughpath {

// A d-dimensional path given by samples at strictly increasing times in
// [0,1]. Everything downstream (signatures, solvers, harness) treats the path
// as the piecewise-linear interpolation of these samples.
struct SampledPath {
  std::vector<double> times;
  std::vector<double> values;  // row-major, values[i*dim + c]
  int dim = 0;

  std::size_t num_samples() const { return times.size(); }

  double value(std::size_t i, int c) const { return values[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)]; }
  double& value(std::size_t i, int c) { return values[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(c)]; }

  void check() const {
    require(dim >= 1, "SampledPath: dimension must be >= 1");
    require(times.size() >= 2, "SampledPath: need at least 2 samples");
    require(values.size() == times.size() * static_cast<std::size_t>(dim),
            "SampledPath: values size mismatch");
    require(times.front() >= 0.0 && times.back() <= 1.0, "SampledPath: times must lie in [0,1]");
    for (std::size_t i = 1; i < times.size(); ++i)
      require(times[i] > times[i - 1], "SampledPath: times must be strictly increasing");
  }

  // Index of the last sample with time <= t (clamped to a valid segment start).
  std::size_t segment_index(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i == 0) return 0;
    if (i >= times.size()) return times.size() - 2;
    return i - 1;
  }

  // Piecewise-linear evaluation, constant beyond the sampled range.
  double eval(double t, int c) const {
    if (t <= times.front()) return value(0, c);
    if (t >= times.back()) return value(times.size() - 1, c);
    const std::size_t i = segment_index(t);
    const double w = (t - times[i]) / (times[i + 1] - times[i]);
    return (1.0 - w) * value(i, c) + w * value(i + 1, c);
  }
};

inline SampledPath uniform_grid_path(int dim, std::size_t intervals) {
  SampledPath p;
  p.dim = dim;
  p.times.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    p.times[i] = static_cast<double>(i) / static_cast<double>(intervals);
  p.values.assign((intervals + 1) * static_cast<std::size_t>(dim), 0.0);
  return p;
}

inline void write_path_csv(std::ostream& os, const SampledPath& p) {
  os << "time";
  for (int c = 0; c < p.dim; ++c) os << ",comp_" << (c + 1);
  os << "\n";
  os.precision(17);
  for (std::size_t i = 0; i < p.num_samples(); ++i) {
    os << p.times[i];
    for (int c = 0; c < p.dim; ++c) os << "," << p.value(i, c);
    os << "\n";
  }
}

inline SampledPath read_path_csv(std::istream& is) {
  SampledPath p;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      std::size_t commas = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
      p.dim = static_cast<int>(commas);
      continue;
    }
    std::istringstream ss(line);
    std::string cell;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        p.times.push_back(std::stod(cell));
        first = false;
      } else {
        p.values.push_back(std::stod(cell));
      }
    }
  }
  p.check();
  return p;
}

inline SampledPath read_path_file(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "cannot open path file: " + path);
  return read_path_csv(f);
}

}  // namespace roughpath
