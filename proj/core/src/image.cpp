#include "grouptrack/image.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "grouptrack/error.hpp"

namespace grouptrack {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : GrayImage(width, height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width <= 0 || height <= 0) {
    throw InvalidInput("image dimensions must be positive");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvalidInput("image buffer length does not match width*height");
  }
}

std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::min(255.0, std::floor(y + 0.5)));
}

namespace {

// Skips whitespace and '#' comments between PGM header tokens.
int read_pgm_token(std::istream& in, const std::string& name) {
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  if (!(in >> value)) {
    throw InvalidInput(name + ": malformed PGM header");
  }
  return value;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InvalidInput("cannot open " + path.string());
  }
  std::array<char, 2> magic{};
  in.read(magic.data(), 2);
  if (magic[0] != 'P' || magic[1] != '5') {
    throw InvalidInput(path.string() + ": only binary PGM (P5) is supported");
  }
  const int width = read_pgm_token(in, path.string());
  const int height = read_pgm_token(in, path.string());
  const int maxval = read_pgm_token(in, path.string());
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw InvalidInput(path.string() + ": invalid PGM header values");
  }
  in.get();  // single whitespace before raster

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<std::uint8_t> pixels(count);
  if (maxval < 256) {
    in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(count));
    if (!in) {
      throw InvalidInput(path.string() + ": truncated PGM raster");
    }
    if (maxval != 255) {
      for (auto& p : pixels) {
        p = static_cast<std::uint8_t>(std::lround(255.0 * std::min<int>(p, maxval) / maxval));
      }
    }
  } else {
    std::vector<unsigned char> raw(count * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) {
      throw InvalidInput(path.string() + ": truncated PGM raster");
    }
    for (std::size_t i = 0; i < count; ++i) {
      const int v = (raw[2 * i] << 8) | raw[2 * i + 1];
      pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * std::min(v, maxval) / maxval));
    }
  }
  return GrayImage(width, height, std::move(pixels));
}

GrayImage load_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw InvalidInput(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    throw InvalidInput(path.string() + ": " + message);
  }
  std::vector<std::uint8_t> gray(static_cast<std::size_t>(image.width) * image.height);
  for (std::size_t i = 0; i < gray.size(); ++i) {
    gray[i] = luma(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  }
  return GrayImage(static_cast<int>(image.width), static_cast<int>(image.height), std::move(gray));
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) {
    throw InvalidInput("cannot open " + path.string());
  }
  std::array<unsigned char, 8> header{};
  probe.read(reinterpret_cast<char*>(header.data()), header.size());
  const auto got = static_cast<std::size_t>(probe.gcount());
  probe.close();
  if (got >= 2 && header[0] == 'P' && header[1] == '5') {
    return load_pgm(path);
  }
  if (got == 8 && png_sig_cmp(header.data(), 0, 8) == 0) {
    return load_png(path);
  }
  throw InvalidInput(path.string() + ": unsupported image format (expected P5 PGM or PNG)");
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidInput("cannot write " + path.string());
  }
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels().data()),
            static_cast<std::streamsize>(image.pixels().size()));
}

}  // namespace grouptrack
