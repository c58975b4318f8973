#include <gtest/gtest.h>
#include <png.h>

#include <fstream>
#include <sstream>

#include "grouptrack/error.hpp"
#include "grouptrack/feature_io.hpp"
#include "grouptrack/features.hpp"
#include "grouptrack/image.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace grouptrack;

namespace {

GrayImage white_square() {
  GrayImage img(64, 64, 0);
  for (int y = 30; y < 35; ++y)
    for (int x = 30; x < 35; ++x) img.at(x, y) = 255;
  return img;
}

GrayImage checkerboard() {
  GrayImage img(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) img.at(x, y) = ((x / 8 + y / 8) % 2) ? 255 : 0;
  return img;
}

GrayImage shifted(const GrayImage& src, int dx) {
  GrayImage out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x) out.at(x, y) = src.at(std::clamp(x - dx, 0, src.width() - 1), y);
  return out;
}

}  // namespace

TEST(GrayImage, RejectsBadBuffers) {
  EXPECT_THROW(GrayImage(0, 10), InvalidInput);
  EXPECT_THROW(GrayImage(4, 4, std::vector<std::uint8_t>(15)), InvalidInput);
}

TEST(GrayImage, LumaRoundsToNearest) {
  EXPECT_EQ(luma(255, 255, 255), 255);
  EXPECT_EQ(luma(0, 0, 0), 0);
  EXPECT_EQ(luma(255, 0, 0), 76);   // 76.245
  EXPECT_EQ(luma(0, 255, 0), 150);  // 149.685
  EXPECT_EQ(luma(0, 0, 255), 29);   // 29.07
}

TEST(GrayImage, PgmRoundTrip) {
  const auto dir = test::scratch_dir("pgm");
  const GrayImage img = test::texture(40, 30, 3);
  save_pgm(img, dir / "a.pgm");
  const GrayImage back = load_image(dir / "a.pgm");
  EXPECT_EQ(back.width(), 40);
  EXPECT_EQ(back.pixels(), img.pixels());
}

TEST(GrayImage, PngColorConvertsWithLuma) {
  const auto dir = test::scratch_dir("png");
  std::vector<std::uint8_t> rgb;
  for (int i = 0; i < 20 * 20; ++i) {
    rgb.push_back(static_cast<std::uint8_t>(i % 256));
    rgb.push_back(static_cast<std::uint8_t>((i * 7) % 256));
    rgb.push_back(static_cast<std::uint8_t>((i * 13) % 256));
  }
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = 20;
  image.height = 20;
  image.format = PNG_FORMAT_RGB;
  const auto path = (dir / "c.png").string();
  ASSERT_TRUE(png_image_write_to_file(&image, path.c_str(), 0, rgb.data(), 0, nullptr));
  const GrayImage gray = load_image(path);
  ASSERT_EQ(gray.width(), 20);
  for (int i = 0; i < 400; ++i) {
    EXPECT_EQ(gray.pixels()[i], luma(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]));
  }
}

TEST(GrayImage, UnknownFormatIsRejected) {
  const auto dir = test::scratch_dir("bad_image");
  std::ofstream(dir / "x.pgm") << "hello";
  EXPECT_THROW(load_image(dir / "x.pgm"), Error);
  EXPECT_THROW(load_image(dir / "missing.pgm"), Error);
}

TEST(DetectCorners, UniformImageHasNone) {
  EXPECT_TRUE(detect_corners(GrayImage(64, 64, 128), 5, 7000).empty());
}

TEST(DetectCorners, SquareCornersOnly) {
  const auto corners = detect_corners(white_square(), 5, 7000);
  ASSERT_FALSE(corners.empty());
  const int cx[] = {30, 34};
  for (const auto& c : corners) {
    bool near = false;
    for (int x : cx)
      for (int y : cx) near |= std::abs(c.x - x) <= 4 && std::abs(c.y - y) <= 4;
    EXPECT_TRUE(near) << c.x << "," << c.y;
  }
  EXPECT_EQ(corners, oracle::fast_corners(white_square(), 5));
}

TEST(DetectCorners, CheckerboardMatchesOracle) {
  const auto corners = detect_corners(checkerboard(), 5, 7000);
  EXPECT_EQ(corners.size(), oracle::fast_corners(checkerboard(), 5).size());
  EXPECT_EQ(corners, oracle::fast_corners(checkerboard(), 5));
}

TEST(DetectCorners, RandomTexturesMatchOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GrayImage img = test::texture(48 + static_cast<int>(seed), 40, seed, static_cast<int>(seed % 3));
    for (int threshold : {1, 5, 20}) {
      EXPECT_EQ(detect_corners(img, threshold, 100000), oracle::fast_corners(img, threshold))
          << "seed " << seed << " threshold " << threshold;
    }
  }
}

TEST(DetectCorners, NmsAndCap) {
  const GrayImage img = test::texture(120, 100, 9);
  const auto all = detect_corners(img, 5, 100000);
  ASSERT_GT(all.size(), 50u);
  std::map<std::pair<int, int>, double> at;
  for (const auto& c : all) at[{c.x, c.y}] = c.response;
  for (const auto& c : all) {
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if ((dx || dy) && at.count({c.x + dx, c.y + dy})) FAIL() << "adjacent survivors";
  }
  const auto capped = detect_corners(img, 5, 25);
  ASSERT_EQ(capped.size(), 25u);
  EXPECT_TRUE(std::equal(capped.begin(), capped.end(), all.begin()));
  EXPECT_EQ(detect_corners(img, 5, 100000), all);
}

TEST(DetectCorners, RejectsSmallImagesAndBadArguments) {
  EXPECT_THROW(detect_corners(GrayImage(15, 64), 5, 10), InvalidInput);
  EXPECT_THROW(detect_corners(GrayImage(64, 64), 0, 10), InvalidInput);
  EXPECT_THROW(detect_corners(GrayImage(64, 64), 5, 0), InvalidInput);
}

TEST(Brief, PatternIsSeededAndInsidePatch) {
  const BriefPattern a(42), b(42), c(43);
  ASSERT_EQ(a.tests().size(), 256u);
  EXPECT_TRUE(std::equal(a.tests().begin(), a.tests().end(), b.tests().begin(), [](auto& p, auto& q) {
    return p.x1 == q.x1 && p.y1 == q.y1 && p.x2 == q.x2 && p.y2 == q.y2;
  }));
  bool differs = false;
  for (std::size_t i = 0; i < 256; ++i) differs |= a.tests()[i].x1 != c.tests()[i].x1;
  EXPECT_TRUE(differs);
  for (const auto& t : a.tests()) {
    for (int v : {t.x1, t.y1, t.x2, t.y2}) EXPECT_LE(std::abs(v), kPatchRadius);
    EXPECT_FALSE(t.x1 == t.x2 && t.y1 == t.y2);
  }
}

TEST(Brief, IdenticalImagesGiveIdenticalDescriptors) {
  const GrayImage img = test::texture(80, 80, 1);
  const std::vector<Corner> corners{{40, 40, 1.0}};
  const auto a = describe(img, corners, 42);
  const auto b = describe(img, corners, 42);
  ASSERT_EQ(a.features.size(), 1u);
  EXPECT_EQ(hamming_distance(a.features[0].descriptor, b.features[0].descriptor), 0);
}

TEST(Brief, InvertedImageFlipsEveryBit) {
  const GrayImage img = test::texture(80, 80, 5, 0);
  GrayImage inv(80, 80);
  for (int y = 0; y < 80; ++y)
    for (int x = 0; x < 80; ++x) inv.at(x, y) = 255 - img.at(x, y);
  const std::vector<Corner> corners{{40, 40, 1.0}};
  const auto a = describe(img, corners, 42);
  const auto b = describe(inv, corners, 42);
  EXPECT_EQ(hamming_distance(a.features[0].descriptor, b.features[0].descriptor), 256);
}

TEST(Brief, TranslationConsistent) {
  std::size_t compared = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GrayImage img = test::texture(120, 90, 100 + seed);
    const GrayImage moved = shifted(img, 3);
    std::vector<Corner> a, b;
    for (int y = 20; y < 70; y += 7)
      for (int x = 20; x < 95; x += 9) {
        a.push_back({x, y, 1.0});
        b.push_back({x + 3, y, 1.0});
      }
    const auto da = describe(img, a, 7);
    const auto db = describe(moved, b, 7);
    ASSERT_EQ(da.features.size(), db.features.size());
    for (std::size_t i = 0; i < da.features.size(); ++i) {
      EXPECT_EQ(da.features[i].descriptor, db.features[i].descriptor);
      EXPECT_LE(hamming_distance(da.features[i].descriptor, db.features[i].descriptor), 40);
      ++compared;
    }
  }
  EXPECT_GT(compared, 100u);
}

TEST(Brief, BorderCornersAreFilteredAndCounted) {
  const GrayImage img = test::texture(64, 64, 2);
  const std::vector<Corner> corners{{15, 30, 1}, {16, 30, 1}, {47, 47, 1}, {48, 30, 1}, {30, 15, 1}};
  const auto r = describe(img, corners, 42);
  EXPECT_EQ(r.features.size(), 2u);
  EXPECT_EQ(r.filtered, 3u);
  EXPECT_EQ(r.features[0].id, 0);
  EXPECT_EQ(r.features[1].position, (Point2{47, 47}));
}

TEST(ExtractFeatures, DeterministicAndCapped) {
  const GrayImage img = test::texture(200, 160, 4);
  const FrameFeatures a = extract_features(img, {5, 50, 42}, 3);
  const FrameFeatures b = extract_features(img, {5, 50, 42}, 3);
  EXPECT_EQ(a, b);
  EXPECT_LE(a.features.size(), 50u);
  EXPECT_EQ(a.frame_index, 3);
  EXPECT_NO_THROW(a.validate());
  for (const auto& f : a.features) {
    EXPECT_GE(f.position.x, kDescriptorBorder);
    EXPECT_LT(f.position.x, 200 - kDescriptorBorder);
  }
}

TEST(FeatureIo, EmptyFile) {
  std::istringstream in("DYNAFEAT v1 640 480 256 42\n");
  const auto frame = read_features(in, "mem");
  EXPECT_TRUE(frame.features.empty());
  EXPECT_EQ(frame.width, 640);
  EXPECT_EQ(frame.descriptor_seed, 42u);
}

TEST(FeatureIo, ZeroDescriptorAtExactPosition) {
  std::istringstream in("DYNAFEAT v1 640 480 256 42\n0 10.5 20.25 3 " + std::string(64, '0') + "\n");
  const auto frame = read_features(in, "mem");
  ASSERT_EQ(frame.features.size(), 1u);
  EXPECT_EQ(frame.features[0].position, (Point2{10.5, 20.25}));
  EXPECT_EQ(frame.features[0].descriptor, Descriptor::zeros(256));
}

TEST(FeatureIo, RoundTripIsIdentity) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    FrameFeatures frame = oracle::random_frame(50, 640, 480, rng);
    frame.descriptor_seed = 99;
    for (auto& f : frame.features) f.response = static_cast<double>(rng() % 1000) / 7.0;
    std::stringstream buf;
    write_features(buf, frame);
    EXPECT_EQ(read_features(buf, "mem"), frame);
  }
  const auto dir = test::scratch_dir("feat_io");
  FrameFeatures frame = oracle::random_frame(10, 100, 100, rng, 128);
  save_features(frame, dir / "f.feat");
  EXPECT_EQ(load_features(dir / "f.feat"), frame);
}

TEST(FeatureIo, MalformedLineReportsLineNumber) {
  std::istringstream in("DYNAFEAT v1 640 480 8 42\n0 1 1 1 ff\n1 2 x 1 ff\n");
  try {
    read_features(in, "mem");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(FeatureIo, DescriptorLengthMismatchIsFormatError) {
  std::istringstream in("DYNAFEAT v1 640 480 8 42\n0 1 1 1 ff\n1 2 2 1 fff\n");
  EXPECT_THROW(read_features(in, "mem"), FormatError);
}

TEST(FeatureIo, BadHeaderAndPositions) {
  std::istringstream bad_header("FEAT 640 480\n");
  EXPECT_THROW(read_features(bad_header, "mem"), ParseError);
  std::istringstream outside("DYNAFEAT v1 64 48 8 42\n0 70 1 1 ff\n");
  EXPECT_THROW(read_features(outside, "mem"), FormatError);
}
