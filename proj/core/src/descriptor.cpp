#include "grouptrack/descriptor.hpp"

#include <bit>
#include <cmath>

#include "grouptrack/error.hpp"

namespace grouptrack {

Descriptor Descriptor::zeros(std::size_t bits) {
  Descriptor d;
  d.kind_ = DescriptorKind::binary;
  d.size_ = bits;
  d.words_.assign((bits + 63) / 64, 0);
  return d;
}

Descriptor Descriptor::real(std::vector<float> values) {
  Descriptor d;
  d.kind_ = DescriptorKind::real;
  d.size_ = values.size();
  d.values_ = std::move(values);
  return d;
}

void Descriptor::set_bit(std::size_t i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (value) {
    words_[i >> 6] |= mask;
  } else {
    words_[i >> 6] &= ~mask;
  }
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Descriptor Descriptor::from_hex(std::string_view hex) {
  if (hex.empty()) {
    throw InvalidInput("empty descriptor");
  }
  Descriptor d = zeros(hex.size() * 4);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const int v = hex_value(hex[i]);
    if (v < 0) {
      throw InvalidInput("invalid hex digit in descriptor");
    }
    for (int b = 0; b < 4; ++b) {
      if (v & (8 >> b)) d.set_bit(i * 4 + b, true);
    }
  }
  return d;
}

std::string Descriptor::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(size_ / 4);
  for (std::size_t i = 0; i + 4 <= size_; i += 4) {
    int v = 0;
    for (int b = 0; b < 4; ++b) {
      if (bit(i + b)) v |= 8 >> b;
    }
    out.push_back(kDigits[v]);
  }
  return out;
}

int hamming_distance(const Descriptor& a, const Descriptor& b) {
  if (a.kind() != DescriptorKind::binary || b.kind() != DescriptorKind::binary) {
    throw InvalidInput("hamming distance requires binary descriptors");
  }
  if (a.size() != b.size()) {
    throw InvalidInput("descriptor length mismatch");
  }
  int d = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    d += std::popcount(wa[i] ^ wb[i]);
  }
  return d;
}

double euclidean_distance(const Descriptor& a, const Descriptor& b) {
  if (a.kind() != DescriptorKind::real || b.kind() != DescriptorKind::real) {
    throw InvalidInput("euclidean distance requires real-valued descriptors");
  }
  if (a.size() != b.size()) {
    throw InvalidInput("descriptor length mismatch");
  }
  double sum = 0.0;
  const auto va = a.values();
  const auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double diff = static_cast<double>(va[i]) - vb[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

}  // namespace grouptrack
