#pragma once

#include <string>
#include <vector>

#include "facebn/image.hpp"

namespace facebn {

enum class TransformKind { TranslateX, TranslateY, Rotate, Scale };

std::string transform_kind_name(TransformKind kind);
TransformKind parse_transform_kind(const std::string& name);  // "tx","ty","rot","scale"

// Ordered list of image transformations with finite-difference step sizes
// (pixels for translations, radians for rotation, factor delta for scale).
struct TransformSet {
  std::vector<TransformKind> kinds;
  std::vector<double> steps;

  static TransformSet defaults();  // tx, ty, rot, scale with steps 1, 1, 0.02, 0.02

  std::size_t count() const { return kinds.size(); }
  void validate() const;  // StepError on out-of-bound steps, DataError on bad shape
};

// First-order transformation derivatives of one image, one vector per
// transform parameter. `steps` is kept so augmentation can enforce locality.
struct TangentBasis {
  int width = 0;
  int height = 0;
  std::vector<std::vector<double>> vectors;
  std::vector<double> steps;

  std::size_t count() const { return vectors.size(); }
  void validate() const;
};

// Applies a single transform with bilinear interpolation about the image
// center; samples outside the frame are clamped to the edge.
std::vector<double> transform_image(const GrayImage& image, TransformKind kind, double amount);

// T_l = (t(x, step_l) - x) / step_l for each transform in the set.
TangentBasis tangent_basis(const GrayImage& image, const TransformSet& transforms);

// Single-sided tangent distance: min over alpha of |x + sum alpha_l T_l - mu|.
// Solved through the Gram normal equations; a rank-deficient Gram gets a
// ridge of 1e-8 * trace / L.
double tangent_distance_ss(const GrayImage& x, const GrayImage& mu, const TangentBasis& basis);

// First-order resynthesis: clamp(round(x + sum alpha_l T_l)) per pixel.
// Each alpha must satisfy |alpha_l| <= 3 * step_l.
std::vector<GrayImage> tangent_augment(const GrayImage& image, const TangentBasis& basis,
                                       const std::vector<std::vector<double>>& alphas);

}  // namespace facebn
