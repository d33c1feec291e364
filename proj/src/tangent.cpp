#include "facebn/tangent.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "facebn/errors.hpp"

namespace facebn {

std::string transform_kind_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::TranslateX: return "tx";
    case TransformKind::TranslateY: return "ty";
    case TransformKind::Rotate: return "rot";
    case TransformKind::Scale: return "scale";
  }
  return "?";
}

TransformKind parse_transform_kind(const std::string& name) {
  if (name == "tx" || name == "translate-x") return TransformKind::TranslateX;
  if (name == "ty" || name == "translate-y") return TransformKind::TranslateY;
  if (name == "rot" || name == "rotate") return TransformKind::Rotate;
  if (name == "scale") return TransformKind::Scale;
  throw ConfigError("unknown transform '" + name + "' (expected tx, ty, rot or scale)");
}

TransformSet TransformSet::defaults() {
  TransformSet t;
  t.kinds = {TransformKind::TranslateX, TransformKind::TranslateY, TransformKind::Rotate,
             TransformKind::Scale};
  t.steps = {1.0, 1.0, 0.02, 0.02};
  return t;
}

void TransformSet::validate() const {
  if (kinds.empty()) throw DataError("transform set must not be empty");
  if (kinds.size() != steps.size()) {
    throw DataError("transform set has " + std::to_string(kinds.size()) + " kinds but " +
                    std::to_string(steps.size()) + " steps");
  }
  std::set<TransformKind> seen;
  for (std::size_t l = 0; l < kinds.size(); ++l) {
    if (!seen.insert(kinds[l]).second) {
      throw DataError("duplicate transform '" + transform_kind_name(kinds[l]) + "'");
    }
    const double s = steps[l];
    if (!(s > 0)) throw StepError("transform step must be positive");
    double bound = 0;
    switch (kinds[l]) {
      case TransformKind::TranslateX:
      case TransformKind::TranslateY: bound = 2.0; break;
      case TransformKind::Rotate: bound = 0.1; break;
      case TransformKind::Scale: bound = 0.1; break;
    }
    if (s > bound) {
      throw StepError("step " + std::to_string(s) + " for '" + transform_kind_name(kinds[l]) +
                      "' exceeds bound " + std::to_string(bound));
    }
  }
}

void TangentBasis::validate() const {
  if (width < 1 || height < 1) throw DimMismatchError("tangent basis has empty dimensions");
  const std::size_t n = static_cast<std::size_t>(width) * height;
  if (steps.size() != vectors.size()) {
    throw DataError("tangent basis has " + std::to_string(vectors.size()) + " vectors but " +
                    std::to_string(steps.size()) + " steps");
  }
  for (const auto& v : vectors) {
    if (v.size() != n) {
      throw DimMismatchError("tangent vector length " + std::to_string(v.size()) +
                             " does not match image size " + std::to_string(n));
    }
    for (double x : v) {
      if (!std::isfinite(x)) throw DataError("tangent vector contains a non-finite value");
    }
  }
}

namespace {

double sample_bilinear_clamped(const GrayImage& img, double fx, double fy) {
  fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
  fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
  const int x0 = static_cast<int>(std::floor(fx));
  const int y0 = static_cast<int>(std::floor(fy));
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double wx = fx - x0;
  const double wy = fy - y0;
  const double top = (1.0 - wx) * img.at(x0, y0) + wx * img.at(x1, y0);
  const double bot = (1.0 - wx) * img.at(x0, y1) + wx * img.at(x1, y1);
  return (1.0 - wy) * top + wy * bot;
}

}  // namespace

std::vector<double> transform_image(const GrayImage& image, TransformKind kind, double amount) {
  image.validate();
  const double cx = (image.width - 1) / 2.0;
  const double cy = (image.height - 1) / 2.0;
  std::vector<double> out(image.pixel_count());
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      double sx = x;
      double sy = y;
      switch (kind) {
        case TransformKind::TranslateX: sx = x + amount; break;
        case TransformKind::TranslateY: sy = y + amount; break;
        case TransformKind::Rotate: {
          const double c = std::cos(amount);
          const double s = std::sin(amount);
          const double rx = x - cx;
          const double ry = y - cy;
          sx = cx + c * rx - s * ry;
          sy = cy + s * rx + c * ry;
          break;
        }
        case TransformKind::Scale: {
          const double f = 1.0 + amount;
          sx = cx + f * (x - cx);
          sy = cy + f * (y - cy);
          break;
        }
      }
      out[static_cast<std::size_t>(y) * image.width + x] = sample_bilinear_clamped(image, sx, sy);
    }
  }
  return out;
}

TangentBasis tangent_basis(const GrayImage& image, const TransformSet& transforms) {
  image.validate();
  transforms.validate();

  TangentBasis basis;
  basis.width = image.width;
  basis.height = image.height;
  basis.steps = transforms.steps;
  basis.vectors.reserve(transforms.count());
  for (std::size_t l = 0; l < transforms.count(); ++l) {
    const double step = transforms.steps[l];
    std::vector<double> moved = transform_image(image, transforms.kinds[l], step);
    for (std::size_t i = 0; i < moved.size(); ++i) {
      moved[i] = (moved[i] - image.pixels[i]) / step;
    }
    basis.vectors.push_back(std::move(moved));
  }
  return basis;
}

double tangent_distance_ss(const GrayImage& x, const GrayImage& mu, const TangentBasis& basis) {
  x.validate();
  mu.validate();
  basis.validate();
  if (x.width != mu.width || x.height != mu.height || x.width != basis.width ||
      x.height != basis.height) {
    throw DimMismatchError("tangent distance: image and basis dimensions differ");
  }

  const std::size_t n = x.pixel_count();
  const int count = static_cast<int>(basis.count());

  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    b[static_cast<Eigen::Index>(i)] =
        static_cast<double>(mu.pixels[i]) - static_cast<double>(x.pixels[i]);
  }

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(count);
  if (count > 0) {
    Eigen::MatrixXd t(static_cast<Eigen::Index>(n), count);
    for (int l = 0; l < count; ++l) {
      for (std::size_t i = 0; i < n; ++i) {
        t(static_cast<Eigen::Index>(i), l) = basis.vectors[static_cast<std::size_t>(l)][i];
      }
    }
    const Eigen::MatrixXd gram = t.transpose() * t;
    const Eigen::VectorXd rhs = t.transpose() * b;
    const double trace = gram.trace();
    if (trace > 0) {
      auto ldlt = gram.ldlt();
      bool deficient = ldlt.info() != Eigen::Success;
      if (!deficient) deficient = ldlt.vectorD().minCoeff() <= 1e-10 * (trace / count);
      if (deficient) {
        const double ridge = 1e-8 * trace / count;
        Eigen::MatrixXd reg = gram;
        reg.diagonal().array() += ridge;
        alpha = reg.ldlt().solve(rhs);
      } else {
        alpha = ldlt.solve(rhs);
      }
    }
  }

  double sq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = -b[static_cast<Eigen::Index>(i)];
    for (int l = 0; l < count; ++l) r += alpha[l] * basis.vectors[static_cast<std::size_t>(l)][i];
    sq += r * r;
  }
  return std::sqrt(sq);
}

std::vector<GrayImage> tangent_augment(const GrayImage& image, const TangentBasis& basis,
                                       const std::vector<std::vector<double>>& alphas) {
  image.validate();
  basis.validate();
  if (image.width != basis.width || image.height != basis.height) {
    throw DimMismatchError("tangent augment: image and basis dimensions differ");
  }

  std::vector<GrayImage> out;
  out.reserve(alphas.size());
  for (const auto& alpha : alphas) {
    if (alpha.size() != basis.count()) {
      throw AlphaError("alpha vector length " + std::to_string(alpha.size()) +
                       " does not match basis size " + std::to_string(basis.count()));
    }
    for (std::size_t l = 0; l < alpha.size(); ++l) {
      if (std::abs(alpha[l]) > 3.0 * basis.steps[l]) {
        throw AlphaError("alpha " + std::to_string(alpha[l]) + " violates locality bound 3*step = " +
                         std::to_string(3.0 * basis.steps[l]));
      }
    }
    GrayImage img;
    img.width = image.width;
    img.height = image.height;
    img.pixels.resize(image.pixel_count());
    for (std::size_t i = 0; i < image.pixel_count(); ++i) {
      double v = image.pixels[i];
      for (std::size_t l = 0; l < alpha.size(); ++l) v += alpha[l] * basis.vectors[l][i];
      img.pixels[i] = static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
    }
    out.push_back(std::move(img));
  }
  return out;
}

}  // namespace facebn
