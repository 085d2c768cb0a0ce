#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

#include "ensemble/image.hpp"
#include "ensemble/labels.hpp"

namespace ensemble {

/// Fixed-length feature vector; extract_features produces values in [0,1].
struct FeatureVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  bool operator==(const FeatureVector&) const = default;
};

/// Gray (BT.601 luma), bilinear resize to side x side, row-major, / 255.
FeatureVector extract_features(const RasterImage& img, int side = 32);

/// One decision and the probability of the decided class.
struct Prediction {
  ClassLabel decision;
  double score = 0.0;
};

// ---------------------------------------------------------------------------
// Logistic classifier trained with mini-batch SGD + momentum.

struct TrainConfig {
  std::size_t mini_batch = 5;
  int max_epochs = 6;
  double learning_rate = 3e-4;  ///< constant over training
  double momentum = 0.9;
  double l2_decay = 1e-4;
  double grad_clip_l2 = 10.0;  ///< clip the batch gradient to this L2 norm
  bool shuffle_each_epoch = true;
  std::uint64_t seed = 0;
  double init_scale = 0.01;  ///< weights start uniform in [-init_scale, init_scale]

  void validate() const;
};

/// Binary logistic model: P(+1 | x) = sigmoid(w.x + b).
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::vector<double> velocity;  ///< momentum state, weights then bias

  std::size_t dim() const noexcept { return weights.size(); }
  bool operator==(const LinearModel&) const = default;
};

/// Seeded small-uniform weights, zero bias, zero velocity.
LinearModel init_linear(std::size_t dim, const TrainConfig& cfg);

/// Mean logistic loss over `batch` plus l2/2 * |w|^2 (bias is not decayed).
double batch_loss(const LinearModel& m, std::span<const FeatureVector> x,
                  std::span<const ClassLabel> y, std::span<const std::size_t> batch,
                  double l2_decay);

/// Gradient of batch_loss; layout matches LinearModel::velocity.
std::vector<double> batch_gradient(const LinearModel& m, std::span<const FeatureVector> x,
                                   std::span<const ClassLabel> y,
                                   std::span<const std::size_t> batch, double l2_decay);

/// Rescales `g` in place to L2 norm `threshold` when it exceeds it.
void clip_l2(std::span<double> g, double threshold);

/// Clips `gradient`, then v <- momentum*v - lr*g and theta <- theta + v.
void sgdm_step(LinearModel& m, std::vector<double> gradient, const TrainConfig& cfg);

/// Full training run; deterministic for a fixed cfg.seed. Labels must be
/// binary with both classes present.
LinearModel sgdm_train(std::span<const FeatureVector> x, std::span<const ClassLabel> y,
                       const TrainConfig& cfg);

/// Decision +1 when P(+1) >= 0.5, else -1; score is the decided class's
/// probability (so always >= 0.5).
Prediction predict(const LinearModel& m, const FeatureVector& x);

// ---------------------------------------------------------------------------
// Nearest centroid.

struct CentroidModel {
  std::vector<ClassLabel> labels;               ///< ascending codes
  std::vector<std::vector<double>> centroids;  ///< one per label

  std::size_t dim() const noexcept { return centroids.empty() ? 0 : centroids.front().size(); }
  bool operator==(const CentroidModel&) const = default;
};

/// Per-class feature means. Needs at least two classes.
CentroidModel nearest_centroid_train(std::span<const FeatureVector> x,
                                     std::span<const ClassLabel> y, LabelSpace space);

/// Nearest centroid wins; score = d_far / (d_near + d_far) where d_far is the
/// runner-up distance. Equal distances give 0.5 and the lower label code.
Prediction nearest_centroid_predict(const CentroidModel& m, const FeatureVector& x);

// ---------------------------------------------------------------------------
// Text serialization (format described in docs/formats.md).

void save_model(const std::filesystem::path& path, const LinearModel& m);
void save_model(const std::filesystem::path& path, const CentroidModel& m);
LinearModel load_linear_model(const std::filesystem::path& path);
CentroidModel load_centroid_model(const std::filesystem::path& path);

}  // namespace ensemble
