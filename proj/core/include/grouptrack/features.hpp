#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "grouptrack/descriptor.hpp"
#include "grouptrack/image.hpp"
#include "grouptrack/types.hpp"

namespace grouptrack {

/// Keypoint with a descriptor. `id` indexes the owning FrameFeatures.
struct Feature {
  int id = 0;
  Point2 position;
  double response = 0.0;
  Descriptor descriptor;

  friend bool operator==(const Feature&, const Feature&) = default;
};

/// All features extracted from one frame; ids are 0..size()-1 in order.
struct FrameFeatures {
  int frame_index = 0;
  int width = 0;
  int height = 0;
  std::uint64_t descriptor_seed = 42;
  std::vector<Feature> features;

  std::size_t descriptor_bits() const { return features.empty() ? 256 : features.front().descriptor.size(); }

  /// Throws FormatError if ids are not sequential or descriptor lengths differ.
  void validate() const;

  friend bool operator==(const FrameFeatures&, const FrameFeatures&) = default;
};

struct Corner {
  int x = 0;
  int y = 0;
  double response = 0.0;

  friend bool operator==(const Corner&, const Corner&) = default;
};

inline constexpr int kMinImageSide = 16;
inline constexpr int kPatchRadius = 15;
inline constexpr int kDescriptorBorder = 16;
inline constexpr std::size_t kDefaultDescriptorBits = 256;

/// The 16 Bresenham circle offsets of radius 3 used by the segment test, clockwise from 12 o'clock.
inline constexpr int kFastCircle[16][2] = {{0, -3}, {1, -3},  {2, -2},  {3, -1}, {3, 0},   {3, 1},
                                           {2, 2},  {1, 3},   {0, 3},   {-1, 3}, {-2, 2},  {-3, 1},
                                           {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};

/// FAST-9 corners with 3x3 non-maximum suppression, strongest `max_features` kept.
///
/// Response is the larger of the summed bright excess and summed dark excess
/// over the circle (each pixel contributing |p - c| - threshold). Equal
/// responses are broken by row-major position, earlier wins.
std::vector<Corner> detect_corners(const GrayImage& image, int fast_threshold, std::size_t max_features);

/// 256 point-pair intensity tests inside a 31x31 patch.
class BriefPattern {
 public:
  struct Test {
    std::int8_t x1, y1, x2, y2;
  };

  explicit BriefPattern(std::uint64_t seed, std::size_t bits = kDefaultDescriptorBits);

  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const Test> tests() const noexcept { return tests_; }

 private:
  std::uint64_t seed_;
  std::vector<Test> tests_;
};

struct DescribeResult {
  std::vector<Feature> features;
  std::size_t filtered = 0;  // corners dropped for lying within the border margin
};

/// Binary descriptors on a 5x5 box-smoothed image. Corners closer than 16 px to
/// the border are dropped; kept features get ids 0..n-1 in input order.
DescribeResult describe(const GrayImage& image, std::span<const Corner> corners, const BriefPattern& pattern);
DescribeResult describe(const GrayImage& image, std::span<const Corner> corners, std::uint64_t seed);

struct FrontendConfig {
  int fast_threshold = 5;
  std::size_t max_features = 7000;
  std::uint64_t seed = 42;
};

/// detect_corners followed by describe.
FrameFeatures extract_features(const GrayImage& image, const FrontendConfig& config, int frame_index);

}  // namespace grouptrack
