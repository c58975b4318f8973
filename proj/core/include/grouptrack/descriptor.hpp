#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace grouptrack {

enum class DescriptorKind { binary, real };

/// Fixed-length feature signature: either a bit string (compared by Hamming
/// distance) or a float vector (compared by Euclidean distance).
///
/// Bit 0 is the most significant bit of the hex encoding.
class Descriptor {
 public:
  Descriptor() = default;

  static Descriptor zeros(std::size_t bits);
  static Descriptor from_hex(std::string_view hex);
  static Descriptor real(std::vector<float> values);

  DescriptorKind kind() const noexcept { return kind_; }
  /// Bit count for binary descriptors, dimension for real ones.
  std::size_t size() const noexcept { return size_; }

  bool bit(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set_bit(std::size_t i, bool value);
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<const float> values() const noexcept { return values_; }

  std::string to_hex() const;

  friend bool operator==(const Descriptor&, const Descriptor&) = default;

 private:
  DescriptorKind kind_ = DescriptorKind::binary;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<float> values_;
};

/// Number of differing bits. Both descriptors must be binary of equal length.
int hamming_distance(const Descriptor& a, const Descriptor& b);

double euclidean_distance(const Descriptor& a, const Descriptor& b);

}  // namespace grouptrack
