#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "grouptrack/image.hpp"

namespace grouptrack::test {

/// Smoothed uniform noise; enough structure for FAST and BRIEF.
inline GrayImage texture(int width, int height, std::uint64_t seed, int blur = 1) {
  std::mt19937_64 rng(seed);
  std::vector<int> raw(static_cast<std::size_t>(width) * height);
  for (auto& v : raw) v = static_cast<int>(rng() % 256);
  GrayImage out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      int sum = 0, count = 0;
      for (int dy = -blur; dy <= blur; ++dy) {
        for (int dx = -blur; dx <= blur; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= width || yy >= height) continue;
          sum += raw[static_cast<std::size_t>(yy) * width + xx];
          ++count;
        }
      }
      out.at(x, y) = static_cast<std::uint8_t>(sum / count);
    }
  }
  return out;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("grouptrack_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace grouptrack::test
