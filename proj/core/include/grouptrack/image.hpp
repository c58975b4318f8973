#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace grouptrack {

/// 8-bit single channel image, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  const std::vector<std::uint8_t>& pixels() const noexcept { return pixels_; }
  const std::uint8_t* row(int y) const { return pixels_.data() + static_cast<std::size_t>(y) * width_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

/// ITU-R 601 luma, rounded to nearest.
std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Loads a binary PGM (P5) or PNG; color PNGs are converted to luma.
GrayImage load_image(const std::filesystem::path& path);

void save_pgm(const GrayImage& image, const std::filesystem::path& path);

}  // namespace grouptrack
