#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "threshaug/random.hpp"

namespace synth {

inline std::string format(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

/// y = sin(3 x1) + x2^2 + N(0, noise^2), x uniform on [-1, 1]^2.
inline void write_sine_csv(const std::filesystem::path& path, std::size_t n, std::uint64_t seed,
                           double noise = 0.1) {
  threshaug::Rng rng(seed);
  std::ofstream out(path);
  out << "x1,x2,y\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = rng.uniform(-1.0, 1.0);
    const double x2 = rng.uniform(-1.0, 1.0);
    const double y = std::sin(3.0 * x1) + x2 * x2 + noise * rng.normal();
    out << format(x1) << ',' << format(x2) << ',' << format(y) << '\n';
  }
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("threshaug_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace synth
