#pragma once

#include <array>
#include <vector>

#include "facebn/image.hpp"

namespace facebn {

// Rectangular region of an image; non-owning.
struct BlockView {
  const GrayImage* image = nullptr;
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;

  std::uint8_t at(int bx, int by) const { return image->at(x0 + bx, y0 + by); }
};

// 3x3 decomposition, row-major. The first two cuts per axis fall at
// floor(extent / 3); the last block absorbs the remainder.
struct BlockGrid {
  std::array<BlockView, 9> blocks;
};

BlockGrid grid_blocks(const GrayImage& image);  // TooSmallError if width or height < 6

struct GlcmConfig {
  int levels = 8;  // gray-level bins, >= 2
  int dx = 1;      // co-occurrence offset in pixels
  int dy = 0;

  void validate() const;  // ConfigError
};

// Normalized symmetric gray-level co-occurrence matrix.
struct Glcm {
  int levels = 0;
  std::vector<double> p;  // levels x levels, row-major

  double at(int i, int j) const { return p[static_cast<std::size_t>(i) * levels + j]; }
};

Glcm compute_glcm(const BlockView& block, const GlcmConfig& cfg);  // OffsetError

// Six texture descriptors per block: first-order moments of the raw
// intensities plus energy / entropy / contrast / homogeneity of the GLCM.
// Entropy is in nats; the variance divisor is the pixel count.
struct BlockFeatureVector {
  double mean = 0;
  double stddev = 0;
  double energy = 0;
  double entropy = 0;
  double contrast = 0;
  double homogeneity = 0;

  std::array<double, 6> as_array() const {
    return {mean, stddev, energy, entropy, contrast, homogeneity};
  }
};

constexpr int kFeatureCount = 6;
constexpr int kGridBlocks = 9;

BlockFeatureVector block_descriptor(const BlockView& block, const GlcmConfig& cfg);
std::vector<BlockFeatureVector> describe_image(const GrayImage& image, const GlcmConfig& cfg);

}  // namespace facebn
