#include <algorithm>
#include <random>

#include "grouptrack/error.hpp"
#include "grouptrack/features.hpp"

namespace grouptrack {

BriefPattern::BriefPattern(std::uint64_t seed, std::size_t bits) : seed_(seed) {
  if (bits == 0 || bits % 4 != 0) {
    throw InvalidInput("descriptor bit count must be a positive multiple of 4");
  }
  // Raw engine output reduced by modulo keeps the pattern identical across
  // standard library implementations (distributions are not portable).
  std::mt19937_64 rng(seed);
  constexpr std::uint64_t kSpan = 2 * kPatchRadius + 1;
  auto coord = [&] { return static_cast<std::int8_t>(static_cast<int>(rng() % kSpan) - kPatchRadius); };
  tests_.reserve(bits);
  while (tests_.size() < bits) {
    Test t{coord(), coord(), coord(), coord()};
    if (t.x1 == t.x2 && t.y1 == t.y2) {
      continue;
    }
    tests_.push_back(t);
  }
}

namespace {

// 5x5 box sums with replicated borders. Comparing sums is equivalent to
// comparing means since every window has 25 samples.
std::vector<int> box_sums(const GrayImage& image) {
  const int w = image.width();
  const int h = image.height();
  std::vector<int> horizontal(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* row = image.row(y);
    for (int x = 0; x < w; ++x) {
      int s = 0;
      for (int d = -2; d <= 2; ++d) {
        s += row[std::clamp(x + d, 0, w - 1)];
      }
      horizontal[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
  std::vector<int> out(horizontal.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int s = 0;
      for (int d = -2; d <= 2; ++d) {
        s += horizontal[static_cast<std::size_t>(std::clamp(y + d, 0, h - 1)) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
  return out;
}

}  // namespace

DescribeResult describe(const GrayImage& image, std::span<const Corner> corners, const BriefPattern& pattern) {
  DescribeResult result;
  if (image.empty()) {
    result.filtered = corners.size();
    return result;
  }
  const int w = image.width();
  const int h = image.height();
  const std::vector<int> smooth = box_sums(image);
  const auto tests = pattern.tests();

  for (const Corner& c : corners) {
    if (c.x < kDescriptorBorder || c.y < kDescriptorBorder || c.x >= w - kDescriptorBorder ||
        c.y >= h - kDescriptorBorder) {
      ++result.filtered;
      continue;
    }
    Descriptor d = Descriptor::zeros(tests.size());
    const int* center = smooth.data() + static_cast<std::size_t>(c.y) * w + c.x;
    for (std::size_t i = 0; i < tests.size(); ++i) {
      const auto& t = tests[i];
      const int a = center[t.y1 * w + t.x1];
      const int b = center[t.y2 * w + t.x2];
      if (a < b) {
        d.set_bit(i, true);
      }
    }
    Feature f;
    f.id = static_cast<int>(result.features.size());
    f.position = {static_cast<double>(c.x), static_cast<double>(c.y)};
    f.response = c.response;
    f.descriptor = std::move(d);
    result.features.push_back(std::move(f));
  }
  return result;
}

DescribeResult describe(const GrayImage& image, std::span<const Corner> corners, std::uint64_t seed) {
  return describe(image, corners, BriefPattern(seed));
}

FrameFeatures extract_features(const GrayImage& image, const FrontendConfig& config, int frame_index) {
  const auto corners = detect_corners(image, config.fast_threshold, config.max_features);
  FrameFeatures frame;
  frame.frame_index = frame_index;
  frame.width = image.width();
  frame.height = image.height();
  frame.descriptor_seed = config.seed;
  frame.features = describe(image, corners, config.seed).features;
  return frame;
}

}  // namespace grouptrack
