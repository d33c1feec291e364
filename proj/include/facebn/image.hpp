#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace facebn {

// Row-major 8-bit grayscale image.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static GrayImage filled(int width, int height, std::uint8_t value);

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  std::size_t pixel_count() const { return pixels.size(); }

  // FormatError unless width, height >= 1 and pixels.size() == width * height.
  void validate() const;

  bool operator==(const GrayImage&) const = default;
};

// PGM (P2 ASCII / P5 binary), maxval 255 only.
GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);  // canonical P5

GrayImage load_image(const std::filesystem::path& path);
void save_image(const GrayImage& image, const std::filesystem::path& path);

struct ManifestEntry {
  std::filesystem::path path;
  int class_id = 0;
};

// Labeled image list. Class ids must be contiguous in [0, class_count) and
// every class must have at least one entry.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  int class_count = 0;

  void validate() const;
  std::vector<std::size_t> indices_of_class(int class_id) const;
};

// One `<relative-path> <class-id>` line per image; '#' starts a comment.
// Paths are resolved against the manifest's directory.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

struct SplitSpec {
  double train_fraction = 0.5;  // in (0, 1]
  std::uint64_t seed = 0;
};

// Stratified split. Each class is shuffled with an RNG keyed by (seed, class)
// and the first ceil(fraction * n) images go to train, so the split is
// deterministic and adding a class never perturbs the others.
std::pair<DatasetManifest, DatasetManifest> split_dataset(const DatasetManifest& manifest,
                                                          const SplitSpec& spec);

}  // namespace facebn
