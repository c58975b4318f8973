#include "grouptrack/feature_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "grouptrack/error.hpp"
#include "text_util.hpp"

namespace grouptrack {

void FrameFeatures::validate() const {
  if (width <= 0 || height <= 0) {
    throw FormatError("frame dimensions must be positive");
  }
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Feature& f = features[i];
    if (f.id != static_cast<int>(i)) {
      throw FormatError("feature ids must be 0..count-1 in order");
    }
    if (f.descriptor.kind() != features.front().descriptor.kind() ||
        f.descriptor.size() != features.front().descriptor.size()) {
      throw FormatError("descriptor length differs between features");
    }
    if (!(f.position.x >= 0.0 && f.position.x < width && f.position.y >= 0.0 && f.position.y < height)) {
      throw FormatError("feature " + std::to_string(i) + " lies outside the image");
    }
    if (!(f.response >= 0.0)) {
      throw FormatError("feature " + std::to_string(i) + " has a negative response");
    }
  }
}

std::string format_double(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}


FrameFeatures read_features(std::istream& in, const std::string& source_name, int frame_index) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError(source_name, 1, "missing DYNAFEAT header");
  }
  ++line_no;
  const auto header = detail::split_ws(line);
  FrameFeatures frame;
  frame.frame_index = frame_index;
  std::size_t bits = 0;
  if (header.size() != 6 || header[0] != "DYNAFEAT" || header[1] != "v1" || !detail::parse_number(header[2], frame.width) ||
      !detail::parse_number(header[3], frame.height) || !detail::parse_number(header[4], bits) ||
      !detail::parse_number(header[5], frame.descriptor_seed)) {
    throw ParseError(source_name, line_no, "expected 'DYNAFEAT v1 <width> <height> <desc_bits> <seed>'");
  }
  if (frame.width <= 0 || frame.height <= 0 || bits == 0 || bits % 4 != 0) {
    throw ParseError(source_name, line_no, "invalid header values");
  }

  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = detail::split_ws(line);
    if (tokens.empty()) {
      continue;
    }
    Feature f;
    if (tokens.size() != 5 || !detail::parse_number(tokens[0], f.id) || !detail::parse_number(tokens[1], f.position.x) ||
        !detail::parse_number(tokens[2], f.position.y) || !detail::parse_number(tokens[3], f.response)) {
      throw ParseError(source_name, line_no, "expected '<id> <x> <y> <response> <hex-descriptor>'");
    }
    if (tokens[4].size() * 4 != bits) {
      throw FormatError(source_name + ":" + std::to_string(line_no) + ": descriptor has " +
                        std::to_string(tokens[4].size() * 4) + " bits, header declares " + std::to_string(bits));
    }
    try {
      f.descriptor = Descriptor::from_hex(tokens[4]);
    } catch (const InvalidInput& e) {
      throw ParseError(source_name, line_no, e.what());
    }
    if (f.id != static_cast<int>(frame.features.size())) {
      throw ParseError(source_name, line_no, "feature ids must be consecutive from 0");
    }
    frame.features.push_back(std::move(f));
  }
  frame.validate();
  return frame;
}

void write_features(std::ostream& out, const FrameFeatures& frame) {
  for (const Feature& f : frame.features) {
    if (f.descriptor.kind() != DescriptorKind::binary) {
      throw FormatError("feature files only hold binary descriptors");
    }
  }
  out << "DYNAFEAT v1 " << frame.width << ' ' << frame.height << ' ' << frame.descriptor_bits() << ' '
      << frame.descriptor_seed << '\n';
  for (const Feature& f : frame.features) {
    out << f.id << ' ' << format_double(f.position.x) << ' ' << format_double(f.position.y) << ' '
        << format_double(f.response) << ' ' << f.descriptor.to_hex() << '\n';
  }
}

FrameFeatures load_features(const std::filesystem::path& path, int frame_index) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot open " + path.string());
  }
  return read_features(in, path.string(), frame_index);
}

void save_features(const FrameFeatures& frame, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidInput("cannot write " + path.string());
  }
  write_features(out, frame);
}

}  // namespace grouptrack
