#include "grouptrack/ground_truth_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "grouptrack/error.hpp"
#include "grouptrack/feature_io.hpp"
#include "text_util.hpp"

namespace grouptrack {

namespace {

template <typename Fn>
void for_each_record(std::istream& in, const std::string& source_name, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;
    fn(tokens, line_no);
  }
  if (in.bad()) {
    throw ParseError(source_name, line_no, "read failure");
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot open " + path.string());
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidInput("cannot write " + path.string());
  }
  return out;
}

}  // namespace

void write_pairs(std::ostream& out, const std::vector<GroundTruthPair>& pairs) {
  for (const auto& p : pairs) {
    out << p.frame_a << ' ' << p.frame_b << ' ' << p.id_a << ' ' << p.id_b << '\n';
  }
}

std::vector<GroundTruthPair> read_pairs(std::istream& in, const std::string& source_name) {
  std::vector<GroundTruthPair> pairs;
  for_each_record(in, source_name, [&](const auto& tokens, std::size_t line_no) {
    GroundTruthPair p;
    if (tokens.size() != 4 || !detail::parse_number(tokens[0], p.frame_a) ||
        !detail::parse_number(tokens[1], p.frame_b) || !detail::parse_number(tokens[2], p.id_a) ||
        !detail::parse_number(tokens[3], p.id_b) || p.frame_a < 0 || p.frame_b < 0 || p.id_a < 0 || p.id_b < 0) {
      throw ParseError(source_name, line_no, "expected '<frame_a> <frame_b> <id_a> <id_b>'");
    }
    pairs.push_back(p);
  });
  return pairs;
}

void write_poses(std::ostream& out, const std::vector<PoseRecord>& poses) {
  for (const auto& record : poses) {
    out << record.frame;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) out << ' ' << format_double(record.pose.rotation(r, c));
    }
    for (int i = 0; i < 3; ++i) out << ' ' << format_double(record.pose.translation(i));
    out << '\n';
  }
}

std::vector<PoseRecord> read_poses(std::istream& in, const std::string& source_name) {
  std::vector<PoseRecord> poses;
  for_each_record(in, source_name, [&](const auto& tokens, std::size_t line_no) {
    PoseRecord record;
    bool ok = tokens.size() == 13 && detail::parse_number(tokens[0], record.frame) && record.frame >= 0;
    for (int i = 0; ok && i < 9; ++i) {
      ok = detail::parse_number(tokens[1 + i], record.pose.rotation(i / 3, i % 3));
    }
    for (int i = 0; ok && i < 3; ++i) {
      ok = detail::parse_number(tokens[10 + i], record.pose.translation(i));
    }
    if (!ok) {
      throw ParseError(source_name, line_no, "expected frame index, 9 rotation and 3 translation values");
    }
    poses.push_back(record);
  });
  return poses;
}

void write_intrinsics(std::ostream& out, const CameraIntrinsics& k) {
  out << format_double(k.fx) << ' ' << format_double(k.fy) << ' ' << format_double(k.cx) << ' '
      << format_double(k.cy) << '\n';
}

CameraIntrinsics read_intrinsics(std::istream& in, const std::string& source_name) {
  CameraIntrinsics k;
  std::size_t records = 0;
  for_each_record(in, source_name, [&](const auto& tokens, std::size_t line_no) {
    if (++records > 1 || tokens.size() != 4 || !detail::parse_number(tokens[0], k.fx) ||
        !detail::parse_number(tokens[1], k.fy) || !detail::parse_number(tokens[2], k.cx) ||
        !detail::parse_number(tokens[3], k.cy)) {
      throw ParseError(source_name, line_no, "expected a single line 'fx fy cx cy'");
    }
  });
  if (records == 0) {
    throw ParseError(source_name, 1, "missing intrinsics");
  }
  k.validate();
  return k;
}

GroundTruth load_ground_truth(const std::filesystem::path& dir) {
  GroundTruth gt;
  {
    auto in = open_input(dir / "pairs.txt");
    gt.pairs = read_pairs(in, (dir / "pairs.txt").string());
  }
  {
    auto in = open_input(dir / "poses.txt");
    gt.poses = read_poses(in, (dir / "poses.txt").string());
  }
  if (std::filesystem::exists(dir / "intrinsics.txt")) {
    auto in = open_input(dir / "intrinsics.txt");
    gt.intrinsics = read_intrinsics(in, (dir / "intrinsics.txt").string());
    gt.has_intrinsics = true;
  }
  return gt;
}

std::vector<std::filesystem::path> save_sequence(const GeneratedSequence& sequence, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  for (const auto& frame : sequence.frames) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04d.feat", frame.frame_index);
    paths.push_back(dir / name);
    save_features(frame, paths.back());
  }
  {
    auto out = open_output(dir / "pairs.txt");
    write_pairs(out, sequence.pairs);
  }
  {
    std::vector<PoseRecord> poses;
    for (std::size_t i = 0; i < sequence.poses.size(); ++i) {
      poses.push_back({static_cast<int>(i), sequence.poses[i]});
    }
    auto out = open_output(dir / "poses.txt");
    write_poses(out, poses);
  }
  {
    auto out = open_output(dir / "intrinsics.txt");
    write_intrinsics(out, sequence.intrinsics);
  }
  return paths;
}

}  // namespace grouptrack
