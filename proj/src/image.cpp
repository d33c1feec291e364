#include "facebn/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <string>

#include "facebn/errors.hpp"
#include "facebn/textio.hpp"

namespace facebn {

GrayImage GrayImage::filled(int width, int height, std::uint8_t value) {
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<std::size_t>(width) * height, value);
  img.validate();
  return img;
}

void GrayImage::validate() const {
  if (width < 1 || height < 1) {
    throw FormatError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
  if (pixels.size() != static_cast<std::size_t>(width) * height) {
    throw FormatError("pixel buffer size " + std::to_string(pixels.size()) +
                      " does not match dimensions " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
}

namespace {

constexpr std::size_t kMaxPixels = std::size_t{1} << 30;

// Header tokenizer: skips whitespace and '#' comments, reads one decimal token.
struct PgmCursor {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  bool eof() const { return pos >= bytes.size(); }

  void skip_space_and_comments() {
    while (!eof()) {
      std::uint8_t c = bytes[pos];
      if (c == '#') {
        while (!eof() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(c)) {
        ++pos;
      } else {
        break;
      }
    }
  }

  long next_number(const char* what) {
    skip_space_and_comments();
    if (eof() || !std::isdigit(bytes[pos])) {
      throw FormatError(std::string("PGM header: expected ") + what);
    }
    long value = 0;
    while (!eof() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > 1'000'000'000L) throw FormatError(std::string("PGM header: ") + what + " out of range");
      ++pos;
    }
    return value;
  }
};

}  // namespace

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw FormatError("not a PGM file (magic must be P2 or P5)");
  }
  const bool binary = bytes[1] == '5';
  PgmCursor cur{bytes, 2};

  const long width = cur.next_number("width");
  const long height = cur.next_number("height");
  const long maxval = cur.next_number("maxval");
  if (width < 1 || height < 1) throw FormatError("PGM dimensions must be positive");
  if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) > kMaxPixels) {
    throw FormatError("PGM dimensions unreasonably large");
  }
  if (maxval != 255) {
    throw FormatError("unsupported PGM maxval " + std::to_string(maxval) + " (must be 255)");
  }

  GrayImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  const std::size_t n = static_cast<std::size_t>(width) * height;
  img.pixels.reserve(n);

  if (binary) {
    // Exactly one whitespace byte separates the header from the payload.
    if (cur.eof() || !std::isspace(bytes[cur.pos])) {
      throw FormatError("P5: missing separator before pixel data");
    }
    ++cur.pos;
    if (bytes.size() - cur.pos < n) {
      throw FormatError("P5: truncated pixel data (" + std::to_string(bytes.size() - cur.pos) +
                        " of " + std::to_string(n) + " bytes)");
    }
    img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(cur.pos),
                      bytes.begin() + static_cast<std::ptrdiff_t>(cur.pos + n));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      cur.skip_space_and_comments();
      if (cur.eof()) {
        throw FormatError("P2: truncated pixel data (" + std::to_string(i) + " of " +
                          std::to_string(n) + " values)");
      }
      long v = cur.next_number("pixel value");
      if (v > maxval) throw FormatError("P2: pixel value " + std::to_string(v) + " exceeds maxval");
      img.pixels.push_back(static_cast<std::uint8_t>(v));
    }
  }
  img.validate();
  return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  image.validate();
  std::string header = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                       "\n255\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  bytes.insert(bytes.end(), image.pixels.begin(), image.pixels.end());
  return bytes;
}

GrayImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  try {
    return decode_pgm(bytes);
  } catch (Error& e) {
    e.prepend_context(path.string());
    throw;
  }
}

void save_image(const GrayImage& image, const std::filesystem::path& path) {
  const auto bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

void DatasetManifest::validate() const {
  if (class_count < 1) throw DataError("manifest: class_count must be positive");
  if (entries.empty()) throw DataError("manifest: no entries");
  std::vector<std::int64_t> per_class(static_cast<std::size_t>(class_count), 0);
  for (const auto& e : entries) {
    if (e.class_id < 0 || e.class_id >= class_count) {
      throw DataError("manifest: class id " + std::to_string(e.class_id) + " outside [0, " +
                      std::to_string(class_count) + ")");
    }
    ++per_class[static_cast<std::size_t>(e.class_id)];
  }
  for (int c = 0; c < class_count; ++c) {
    if (per_class[static_cast<std::size_t>(c)] == 0) {
      throw DataError("manifest: class " + std::to_string(c) + " has no entries");
    }
  }
}

std::vector<std::size_t> DatasetManifest::indices_of_class(int class_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].class_id == class_id) out.push_back(i);
  }
  return out;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";

  DatasetManifest manifest;
  int max_class = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto tokens = split_whitespace(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      throw FormatError("manifest line " + std::to_string(line_no) +
                        ": expected '<relative-path> <class-id>'");
    }
    std::int64_t class_id = 0;
    try {
      class_id = parse_int(tokens[1]);
    } catch (const FormatError&) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": bad class id '" +
                        tokens[1] + "'");
    }
    if (class_id < 0 || class_id > 1'000'000) {
      throw FormatError("manifest line " + std::to_string(line_no) + ": class id out of range");
    }
    manifest.entries.push_back({base / tokens[0], static_cast<int>(class_id)});
    max_class = std::max(max_class, static_cast<int>(class_id));
  }
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  manifest.class_count = max_class + 1;
  manifest.validate();
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  manifest.validate();
  const std::filesystem::path base = path.has_parent_path() ? path.parent_path() : ".";
  std::string out;
  for (const auto& e : manifest.entries) {
    const auto rel = e.path.lexically_relative(base);
    const std::string text = rel.empty() ? e.path.string() : rel.string();
    out += text + " " + std::to_string(e.class_id) + "\n";
  }
  write_text_file(path.string(), out);
}

std::pair<DatasetManifest, DatasetManifest> split_dataset(const DatasetManifest& manifest,
                                                          const SplitSpec& spec) {
  manifest.validate();
  if (!(spec.train_fraction > 0.0 && spec.train_fraction <= 1.0)) {
    throw SplitError("train fraction must be in (0, 1], got " +
                     std::to_string(spec.train_fraction));
  }

  std::vector<bool> in_train(manifest.entries.size(), false);
  for (int c = 0; c < manifest.class_count; ++c) {
    auto indices = manifest.indices_of_class(c);
    // Keyed per class so other classes' splits never move.
    std::seed_seq seq{spec.seed, static_cast<std::uint64_t>(c)};
    std::mt19937_64 rng(seq);
    for (std::size_t i = indices.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(indices[i - 1], indices[j]);
    }
    const auto n_train =
        static_cast<std::size_t>(std::ceil(spec.train_fraction * static_cast<double>(indices.size())));
    if (n_train == 0) {
      throw SplitError("class " + std::to_string(c) + " would receive no training images");
    }
    for (std::size_t i = 0; i < std::min(n_train, indices.size()); ++i) {
      in_train[indices[i]] = true;
    }
  }

  DatasetManifest train, test;
  train.class_count = manifest.class_count;
  test.class_count = manifest.class_count;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    (in_train[i] ? train : test).entries.push_back(manifest.entries[i]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace facebn
