#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "facebn/errors.hpp"
#include "facebn/image.hpp"
#include "facebn/textio.hpp"
#include "test_support.hpp"

using namespace facebn;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& text) {
  return std::vector<std::uint8_t>(text.begin(), text.end());
}

std::set<std::string> path_set(const DatasetManifest& m, int class_id) {
  std::set<std::string> out;
  for (const auto& e : m.entries)
    if (e.class_id == class_id) out.insert(e.path.string());
  return out;
}

}  // namespace

TEST_SUITE("imaging") {

TEST_CASE("P2 decoding, including comments and odd whitespace") {
  GrayImage img = decode_pgm(bytes_of("P2\n# a comment\n2 2\n255\n0 10\n20 255\n"));
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.at(0, 0) == 0);
  CHECK(img.at(1, 0) == 10);
  CHECK(img.at(0, 1) == 20);
  CHECK(img.at(1, 1) == 255);

  GrayImage same = decode_pgm(bytes_of("P2 2 2 255 0 10 20 255"));
  CHECK(same == img);
}

TEST_CASE("PGM decoding rejects malformed input") {
  CHECK_THROWS_AS(decode_pgm(bytes_of("P3\n2 2\n255\n0 0 0 0\n")), FormatError);
  CHECK_THROWS_AS(decode_pgm(bytes_of("P2\n2 2\n63\n0 0 0 0\n")), FormatError);   // maxval != 255
  CHECK_THROWS_AS(decode_pgm(bytes_of("P2\n2 2\n255\n0 0 0 256\n")), FormatError);
  CHECK_THROWS_AS(decode_pgm(bytes_of("P2\n2 2\n255\n0 0 0\n")), FormatError);    // truncated
  CHECK_THROWS_AS(decode_pgm(bytes_of("P2\n0 2\n255\n")), FormatError);           // zero width
  CHECK_THROWS_AS(decode_pgm(bytes_of("")), FormatError);

  std::string p5 = "P5\n2 2\n255\n";
  auto truncated = bytes_of(p5);
  truncated.push_back(7);  // 1 of 4 payload bytes
  CHECK_THROWS_AS(decode_pgm(truncated), FormatError);
}

TEST_CASE("encode produces canonical P5 and round trips byte-identically") {
  std::mt19937_64 rng(11);
  GrayImage img = testsupport::random_image(9, 4, rng);
  auto encoded = encode_pgm(img);
  std::string header = "P5\n9 4\n255\n";
  REQUIRE(encoded.size() == header.size() + img.pixel_count());
  CHECK(std::equal(header.begin(), header.end(), encoded.begin()));

  CHECK(decode_pgm(encoded) == img);
  CHECK(encode_pgm(decode_pgm(encoded)) == encoded);
}

TEST_CASE("P2 input re-encodes to the same image as its P5 form") {
  GrayImage ascii = decode_pgm(bytes_of("P2\n2 2\n255\n0 10\n20 255\n"));
  GrayImage binary = decode_pgm(encode_pgm(ascii));
  CHECK(ascii == binary);
}

TEST_CASE("image file IO") {
  testsupport::TempDir dir("imageio");
  std::mt19937_64 rng(3);
  GrayImage img = testsupport::random_image(12, 7, rng);
  save_image(img, dir.path() / "a.pgm");
  CHECK(load_image(dir.path() / "a.pgm") == img);
  CHECK_THROWS_AS(load_image(dir.path() / "missing.pgm"), IoError);
}

TEST_CASE("GrayImage validation") {
  GrayImage ok = GrayImage::filled(1, 2, 9);
  CHECK_NOTHROW(ok.validate());
  GrayImage bad = ok;
  bad.pixels.pop_back();
  CHECK_THROWS_AS(bad.validate(), FormatError);
  CHECK_THROWS_AS(GrayImage{}.validate(), FormatError);
}

TEST_CASE("manifest parsing resolves paths and skips comments") {
  testsupport::TempDir dir("manifest");
  write_text_file((dir.path() / "list.txt").string(),
                  "# header comment\n"
                  "a.pgm 0\n"
                  "\n"
                  "sub/b.pgm 1  # trailing comment\n");
  DatasetManifest m = load_manifest(dir.path() / "list.txt");
  REQUIRE(m.entries.size() == 2);
  CHECK(m.class_count == 2);
  CHECK(m.entries[0].path == dir.path() / "a.pgm");
  CHECK(m.entries[1].path == dir.path() / "sub/b.pgm");
  CHECK(m.entries[1].class_id == 1);
  CHECK(m.indices_of_class(1) == std::vector<std::size_t>{1});
}

TEST_CASE("manifest validation wants contiguous nonempty classes") {
  DatasetManifest gap;
  gap.entries = {{"a.pgm", 0}, {"b.pgm", 2}};
  gap.class_count = 3;
  CHECK_THROWS_AS(gap.validate(), DataError);

  DatasetManifest negative;
  negative.entries = {{"a.pgm", -1}};
  negative.class_count = 1;
  CHECK_THROWS_AS(negative.validate(), DataError);

  DatasetManifest empty;
  CHECK_THROWS_AS(empty.validate(), DataError);
}

TEST_CASE("manifest load/save round trip") {
  testsupport::TempDir dir("manifestrt");
  DatasetManifest m;
  m.entries = {{dir.path() / "x.pgm", 0}, {dir.path() / "y.pgm", 1}, {dir.path() / "z.pgm", 0}};
  m.class_count = 2;
  save_manifest(m, dir.path() / "list.txt");
  DatasetManifest back = load_manifest(dir.path() / "list.txt");
  REQUIRE(back.entries.size() == 3);
  CHECK(back.class_count == 2);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.entries[i].path == m.entries[i].path);
    CHECK(back.entries[i].class_id == m.entries[i].class_id);
  }
}

TEST_CASE("malformed manifest lines fail") {
  testsupport::TempDir dir("manifestbad");
  write_text_file((dir.path() / "a.txt").string(), "a.pgm\n");
  CHECK_THROWS_AS(load_manifest(dir.path() / "a.txt"), FormatError);
  write_text_file((dir.path() / "b.txt").string(), "a.pgm zero\n");
  CHECK_THROWS_AS(load_manifest(dir.path() / "b.txt"), FormatError);
  CHECK_THROWS_AS(load_manifest(dir.path() / "absent.txt"), IoError);
}

TEST_CASE("split is stratified with ceil-sized train classes") {
  DatasetManifest m;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 5; ++i)
      m.entries.push_back({"c" + std::to_string(c) + "_" + std::to_string(i) + ".pgm", c});
  m.class_count = 3;

  auto [train, test] = split_dataset(m, {0.5, 42});
  for (int c = 0; c < 3; ++c) {
    CHECK(train.indices_of_class(c).size() == 3);  // ceil(0.5 * 5)
    CHECK(test.indices_of_class(c).size() == 2);
  }

  // Disjoint union of the original paths.
  std::set<std::string> all, seen;
  for (const auto& e : m.entries) all.insert(e.path.string());
  for (const auto& e : train.entries) CHECK(seen.insert(e.path.string()).second);
  for (const auto& e : test.entries) CHECK(seen.insert(e.path.string()).second);
  CHECK(seen == all);
}

TEST_CASE("split keeps at least one training image per class") {
  DatasetManifest m;
  m.entries = {{"a.pgm", 0}, {"b.pgm", 1}};
  m.class_count = 2;
  auto [train, test] = split_dataset(m, {0.1, 0});
  CHECK(train.entries.size() == 2);  // ceil(0.1 * 1) = 1 per class
  CHECK(test.entries.empty());
}

TEST_CASE("split fraction 1.0 keeps everything in train") {
  DatasetManifest m;
  for (int i = 0; i < 4; ++i) m.entries.push_back({"i" + std::to_string(i) + ".pgm", 0});
  m.class_count = 1;
  auto [train, test] = split_dataset(m, {1.0, 5});
  CHECK(train.entries.size() == 4);
  CHECK(test.entries.empty());
}

TEST_CASE("split rejects out-of-range fractions") {
  DatasetManifest m;
  m.entries = {{"a.pgm", 0}};
  m.class_count = 1;
  CHECK_THROWS_AS(split_dataset(m, {0.0, 0}), SplitError);
  CHECK_THROWS_AS(split_dataset(m, {-0.3, 0}), SplitError);
  CHECK_THROWS_AS(split_dataset(m, {1.2, 0}), SplitError);
}

TEST_CASE("split is deterministic in the seed and varies across seeds") {
  DatasetManifest m;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 40; ++i)
      m.entries.push_back({"c" + std::to_string(c) + "_" + std::to_string(i) + ".pgm", c});
  m.class_count = 2;

  auto [t1a, e1a] = split_dataset(m, {0.5, 1});
  auto [t1b, e1b] = split_dataset(m, {0.5, 1});
  CHECK(path_set(t1a, 0) == path_set(t1b, 0));
  CHECK(path_set(t1a, 1) == path_set(t1b, 1));

  auto [t2, e2] = split_dataset(m, {0.5, 2});
  CHECK((path_set(t1a, 0) != path_set(t2, 0) || path_set(t1a, 1) != path_set(t2, 1)));
}

TEST_CASE("adding a class does not perturb existing classes") {
  DatasetManifest base;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 9; ++i)
      base.entries.push_back({"c" + std::to_string(c) + "_" + std::to_string(i) + ".pgm", c});
  base.class_count = 2;

  DatasetManifest extended = base;
  for (int i = 0; i < 7; ++i) extended.entries.push_back({"c2_" + std::to_string(i) + ".pgm", 2});
  extended.class_count = 3;

  auto [t_base, e_base] = split_dataset(base, {0.6, 9});
  auto [t_ext, e_ext] = split_dataset(extended, {0.6, 9});
  for (int c = 0; c < 2; ++c) {
    CHECK(path_set(t_base, c) == path_set(t_ext, c));
    CHECK(path_set(e_base, c) == path_set(e_ext, c));
  }
}

}  // TEST_SUITE
