#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "grouptrack/features.hpp"

namespace grouptrack {

/// Text feature file:
///
///   DYNAFEAT v1 <width> <height> <desc_bits> <seed>
///   <id> <x> <y> <response> <hex-descriptor>
///   ...
///
/// Coordinates are written in shortest round-trip decimal form; descriptors are
/// lowercase hex, most significant bit first.
FrameFeatures read_features(std::istream& in, const std::string& source_name, int frame_index = 0);
void write_features(std::ostream& out, const FrameFeatures& frame);

FrameFeatures load_features(const std::filesystem::path& path, int frame_index = 0);
void save_features(const FrameFeatures& frame, const std::filesystem::path& path);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace grouptrack
