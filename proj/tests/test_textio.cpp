#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "facebn/errors.hpp"
#include "facebn/textio.hpp"
#include "test_support.hpp"

using namespace facebn;

TEST_SUITE("textio") {

TEST_CASE("format_double emits the shortest round-trip form") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-3.25) == "-3.25");
}

TEST_CASE("format/parse round trip is exact for awkward doubles") {
  const double values[] = {1.0 / 3.0, 0.1 + 0.2, 1e-308, -1e300,
                           std::nextafter(1.0, 2.0), 6.02214076e23};
  for (double v : values) CHECK(parse_double(format_double(v)) == v);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    double v = (testsupport::unit(rng) - 0.5) * std::pow(10.0, testsupport::pick(rng, 40) - 20);
    CHECK(parse_double(format_double(v)) == v);
  }
}

TEST_CASE("parse_double rejects garbage and trailing junk") {
  CHECK(parse_double("1e5") == 100000.0);
  CHECK(parse_double("-0.5") == -0.5);
  CHECK_THROWS_AS(parse_double(""), FormatError);
  CHECK_THROWS_AS(parse_double("abc"), FormatError);
  CHECK_THROWS_AS(parse_double("1.2.3"), FormatError);
  CHECK_THROWS_AS(parse_double("3x"), FormatError);
}

TEST_CASE("parse_int accepts integers only") {
  CHECK(parse_int("42") == 42);
  CHECK(parse_int("-7") == -7);
  CHECK_THROWS_AS(parse_int("4.2"), FormatError);
  CHECK_THROWS_AS(parse_int(""), FormatError);
  CHECK_THROWS_AS(parse_int("ten"), FormatError);
}

TEST_CASE("trim and split behave on edges") {
  CHECK(trim("  a b \t") == "a b");
  CHECK(trim("") == "");
  CHECK(trim(" \n ") == "");

  CHECK(split("a,b,,c", ',') == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(split("", ',') == std::vector<std::string>{""});

  CHECK(split_whitespace("  a\t b\n") == std::vector<std::string>{"a", "b"});
  CHECK(split_whitespace("").empty());
}

TEST_CASE("text file round trip and missing file error") {
  testsupport::TempDir dir("textio");
  std::string path = (dir.path() / "f.txt").string();
  write_text_file(path, "line one\nline two\n");
  CHECK(read_text_file(path) == "line one\nline two\n");
  CHECK_THROWS_AS(read_text_file((dir.path() / "absent.txt").string()), IoError);
}

}  // TEST_SUITE
