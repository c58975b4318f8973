#include <algorithm>

#include "grouptrack/error.hpp"
#include "grouptrack/features.hpp"

namespace grouptrack {

namespace {

bool has_arc_of_nine(std::uint32_t mask16) {
  std::uint32_t m = mask16 | (mask16 << 16);
  std::uint32_t run = m;
  for (int i = 1; i < 9; ++i) {
    run &= m >> i;
  }
  return run != 0;
}

}  // namespace

std::vector<Corner> detect_corners(const GrayImage& image, int fast_threshold, std::size_t max_features) {
  if (image.width() < kMinImageSide || image.height() < kMinImageSide) {
    throw InvalidInput("image must be at least 16x16 for corner detection");
  }
  if (fast_threshold < 1) {
    throw InvalidInput("fast threshold must be >= 1");
  }
  if (max_features < 1) {
    throw InvalidInput("max_features must be >= 1");
  }

  const int w = image.width();
  const int h = image.height();
  int offsets[16];
  for (int i = 0; i < 16; ++i) {
    offsets[i] = kFastCircle[i][1] * w + kFastCircle[i][0];
  }

  std::vector<int> score(static_cast<std::size_t>(w) * h, 0);
  std::vector<Corner> raw;
  const std::uint8_t* data = image.pixels().data();

  for (int y = 3; y < h - 3; ++y) {
    for (int x = 3; x < w - 3; ++x) {
      const std::uint8_t* p = data + static_cast<std::size_t>(y) * w + x;
      const int c = *p;
      const int hi = c + fast_threshold;
      const int lo = c - fast_threshold;

      // An arc of 9 always covers at least two of the four compass pixels.
      int bright_compass = 0;
      int dark_compass = 0;
      for (int k = 0; k < 16; k += 4) {
        const int v = p[offsets[k]];
        bright_compass += v > hi;
        dark_compass += v < lo;
      }
      if (bright_compass < 2 && dark_compass < 2) {
        continue;
      }

      std::uint32_t bright = 0;
      std::uint32_t dark = 0;
      int bright_sum = 0;
      int dark_sum = 0;
      for (int k = 0; k < 16; ++k) {
        const int v = p[offsets[k]];
        if (v > hi) {
          bright |= 1u << k;
          bright_sum += v - hi;
        } else if (v < lo) {
          dark |= 1u << k;
          dark_sum += lo - v;
        }
      }
      if (!has_arc_of_nine(bright) && !has_arc_of_nine(dark)) {
        continue;
      }
      const int s = std::max(bright_sum, dark_sum);
      score[static_cast<std::size_t>(y) * w + x] = s;
      raw.push_back({x, y, static_cast<double>(s)});
    }
  }

  std::vector<Corner> kept;
  kept.reserve(raw.size());
  for (const Corner& c : raw) {
    const int s = score[static_cast<std::size_t>(c.y) * w + c.x];
    bool is_max = true;
    for (int dy = -1; dy <= 1 && is_max; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const int q = score[static_cast<std::size_t>(c.y + dy) * w + c.x + dx];
        const bool earlier = dy < 0 || (dy == 0 && dx < 0);
        if (q > s || (q == s && earlier)) {
          is_max = false;
          break;
        }
      }
    }
    if (is_max) {
      kept.push_back(c);
    }
  }

  // kept is in row-major order, so a stable sort breaks response ties by position.
  std::stable_sort(kept.begin(), kept.end(),
                   [](const Corner& a, const Corner& b) { return a.response > b.response; });
  if (kept.size() > max_features) {
    kept.resize(max_features);
  }
  return kept;
}

}  // namespace grouptrack
