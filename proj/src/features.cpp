#include "facebn/features.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "facebn/errors.hpp"

namespace facebn {

BlockGrid grid_blocks(const GrayImage& image) {
  image.validate();
  if (image.width < 6 || image.height < 6) {
    throw TooSmallError("image " + std::to_string(image.width) + "x" +
                        std::to_string(image.height) +
                        " too small for a 3x3 grid (need at least 6x6)");
  }
  const int bw = image.width / 3;
  const int bh = image.height / 3;
  const int col_starts[4] = {0, bw, 2 * bw, image.width};
  const int row_starts[4] = {0, bh, 2 * bh, image.height};

  BlockGrid grid;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      BlockView& b = grid.blocks[static_cast<std::size_t>(r) * 3 + c];
      b.image = &image;
      b.x0 = col_starts[c];
      b.y0 = row_starts[r];
      b.width = col_starts[c + 1] - col_starts[c];
      b.height = row_starts[r + 1] - row_starts[r];
    }
  }
  return grid;
}

void GlcmConfig::validate() const {
  if (levels < 2) throw ConfigError("glcm levels must be >= 2, got " + std::to_string(levels));
  if (levels > 256) throw ConfigError("glcm levels must be <= 256, got " + std::to_string(levels));
  if (dx == 0 && dy == 0) throw ConfigError("glcm offset must be nonzero");
}

Glcm compute_glcm(const BlockView& block, const GlcmConfig& cfg) {
  cfg.validate();
  if (std::abs(cfg.dx) >= block.width || std::abs(cfg.dy) >= block.height) {
    throw OffsetError("glcm offset (" + std::to_string(cfg.dx) + "," + std::to_string(cfg.dy) +
                      ") does not fit a " + std::to_string(block.width) + "x" +
                      std::to_string(block.height) + " block");
  }

  const int g = cfg.levels;
  Glcm m;
  m.levels = g;
  m.p.assign(static_cast<std::size_t>(g) * g, 0.0);

  auto bin = [g](std::uint8_t v) { return static_cast<int>(v) * g / 256; };

  std::int64_t total = 0;
  for (int y = 0; y < block.height; ++y) {
    const int yy = y + cfg.dy;
    if (yy < 0 || yy >= block.height) continue;
    for (int x = 0; x < block.width; ++x) {
      const int xx = x + cfg.dx;
      if (xx < 0 || xx >= block.width) continue;
      const int i = bin(block.at(x, y));
      const int j = bin(block.at(xx, yy));
      m.p[static_cast<std::size_t>(i) * g + j] += 1.0;
      m.p[static_cast<std::size_t>(j) * g + i] += 1.0;
      total += 2;
    }
  }
  for (double& v : m.p) v /= static_cast<double>(total);
  return m;
}

BlockFeatureVector block_descriptor(const BlockView& block, const GlcmConfig& cfg) {
  const Glcm m = compute_glcm(block, cfg);

  BlockFeatureVector f;
  const double count = static_cast<double>(block.width) * block.height;
  double sum = 0;
  for (int y = 0; y < block.height; ++y) {
    for (int x = 0; x < block.width; ++x) sum += block.at(x, y);
  }
  f.mean = sum / count;
  double sq = 0;
  for (int y = 0; y < block.height; ++y) {
    for (int x = 0; x < block.width; ++x) {
      const double d = block.at(x, y) - f.mean;
      sq += d * d;
    }
  }
  f.stddev = std::sqrt(sq / count);  // population variance

  for (int i = 0; i < m.levels; ++i) {
    for (int j = 0; j < m.levels; ++j) {
      const double p = m.at(i, j);
      const double d = static_cast<double>(i - j);
      f.energy += p * p;
      if (p > 0) f.entropy -= p * std::log(p);  // 0 ln 0 := 0
      f.contrast += d * d * p;
      f.homogeneity += p / (1.0 + d * d);
    }
  }
  return f;
}

std::vector<BlockFeatureVector> describe_image(const GrayImage& image, const GlcmConfig& cfg) {
  const BlockGrid grid = grid_blocks(image);
  std::vector<BlockFeatureVector> out;
  out.reserve(kGridBlocks);
  for (const BlockView& b : grid.blocks) out.push_back(block_descriptor(b, cfg));
  return out;
}

}  // namespace facebn
