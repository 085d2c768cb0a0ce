#include "ensemble/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "ensemble/error.hpp"
#include "ensemble/preprocess.hpp"
#include "ensemble/rng.hpp"

namespace ensemble {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double dot(const std::vector<double>& w, const FeatureVector& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x.values[i];
  return s;
}

double target_of(ClassLabel y) { return y == kPositiveOne ? 1.0 : 0.0; }

void check_training_set(std::span<const FeatureVector> x, std::span<const ClassLabel> y) {
  if (x.size() != y.size()) {
    throw DimensionError("training set has " + std::to_string(x.size()) +
                         " feature vectors but " + std::to_string(y.size()) + " labels");
  }
  if (x.empty()) throw DegenerateTrainingError("empty training set");
  const std::size_t dim = x.front().size();
  if (dim == 0) throw DimensionError("feature vectors are empty");
  for (const auto& v : x) {
    if (v.size() != dim) {
      throw DimensionError("feature dimension " + std::to_string(v.size()) +
                           " differs from " + std::to_string(dim));
    }
    for (double e : v.values) {
      if (!std::isfinite(e)) throw DomainError("non-finite feature value");
    }
  }
}

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

double parse_double(const std::string& tok, const std::filesystem::path& path) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') {
    throw ParseError("'" + path.string() + "': bad number '" + tok + "'");
  }
  return v;
}

std::vector<double> read_values(std::istringstream& line, std::size_t count,
                                 const std::filesystem::path& path) {
  std::vector<double> out;
  out.reserve(count);
  std::string tok;
  while (line >> tok) out.push_back(parse_double(tok, path));
  if (out.size() != count) {
    throw ParseError("'" + path.string() + "': expected " + std::to_string(count) +
                     " values, found " + std::to_string(out.size()));
  }
  return out;
}

// Reads "key rest..." and checks the key.
std::istringstream expect_line(std::istream& in, const std::string& key,
                               const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("'" + path.string() + "': missing '" + key + "' line");
  }
  std::istringstream ss(line);
  std::string got;
  ss >> got;
  if (got != key) {
    throw ParseError("'" + path.string() + "': expected '" + key + "', found '" + got + "'");
  }
  return ss;
}

std::ifstream open_model(const std::filesystem::path& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path.string() + "'");
  int version = 0;
  expect_line(in, "ensemble-model", path) >> version;
  if (version != 1) {
    throw FormatError("'" + path.string() + "': unsupported model version " +
                      std::to_string(version));
  }
  auto ss = expect_line(in, "kind", path);
  std::string got;
  ss >> got;
  if (got != kind) {
    throw FormatError("'" + path.string() + "' holds a " + got + " model, not " + kind);
  }
  return in;
}

std::ofstream create_model(const std::filesystem::path& path, const char* kind) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model file '" + path.string() + "'");
  out << "ensemble-model 1\nkind " << kind << '\n';
  return out;
}

}  // namespace

FeatureVector extract_features(const RasterImage& img, int side) {
  if (side < 1) throw DomainError("feature side must be >= 1");
  const RasterImage small = resize(to_gray(img), side, side);
  FeatureVector f;
  f.values.reserve(small.data().size());
  for (auto p : small.data()) f.values.push_back(p / 255.0);
  return f;
}

void TrainConfig::validate() const {
  if (mini_batch < 1) throw DomainError("mini_batch must be >= 1");
  if (max_epochs < 0) throw DomainError("max_epochs must be >= 0");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("learning_rate must be finite and nonnegative");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw DomainError("momentum must lie in [0,1)");
  if (!(l2_decay >= 0.0)) throw DomainError("l2_decay must be >= 0");
  if (!(grad_clip_l2 > 0.0)) throw DomainError("grad_clip_l2 must be > 0");
  if (!(init_scale >= 0.0)) throw DomainError("init_scale must be >= 0");
}

LinearModel init_linear(std::size_t dim, const TrainConfig& cfg) {
  LinearModel m;
  Rng rng = Rng::stream(cfg.seed, {0});
  m.weights.resize(dim);
  for (auto& w : m.weights) w = rng.uniform(-cfg.init_scale, cfg.init_scale);
  m.velocity.assign(dim + 1, 0.0);
  return m;
}

double batch_loss(const LinearModel& m, std::span<const FeatureVector> x,
                  std::span<const ClassLabel> y, std::span<const std::size_t> batch,
                  double l2_decay) {
  if (batch.empty()) throw DimensionError("empty batch");
  double loss = 0.0;
  for (auto i : batch) {
    const double z = dot(m.weights, x[i]) + m.bias;
    loss += softplus(z) - target_of(y[i]) * z;
  }
  loss /= static_cast<double>(batch.size());
  double norm2 = 0.0;
  for (double w : m.weights) norm2 += w * w;
  return loss + 0.5 * l2_decay * norm2;
}

std::vector<double> batch_gradient(const LinearModel& m, std::span<const FeatureVector> x,
                                   std::span<const ClassLabel> y,
                                   std::span<const std::size_t> batch, double l2_decay) {
  if (batch.empty()) throw DimensionError("empty batch");
  const std::size_t dim = m.dim();
  std::vector<double> g(dim + 1, 0.0);
  for (auto i : batch) {
    if (x[i].size() != dim) throw DimensionError("feature dimension mismatch");
    const double r = sigmoid(dot(m.weights, x[i]) + m.bias) - target_of(y[i]);
    for (std::size_t j = 0; j < dim; ++j) g[j] += r * x[i].values[j];
    g[dim] += r;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t j = 0; j < dim; ++j) g[j] = g[j] * inv + l2_decay * m.weights[j];
  g[dim] *= inv;
  return g;
}

void clip_l2(std::span<double> g, double threshold) {
  double norm2 = 0.0;
  for (double v : g) norm2 += v * v;
  const double norm = std::sqrt(norm2);
  if (norm > threshold) {
    const double s = threshold / norm;
    for (double& v : g) v *= s;
  }
}

void sgdm_step(LinearModel& m, std::vector<double> gradient, const TrainConfig& cfg) {
  const std::size_t dim = m.dim();
  if (gradient.size() != dim + 1 || m.velocity.size() != dim + 1) {
    throw DimensionError("gradient/velocity size does not match model");
  }
  clip_l2(gradient, cfg.grad_clip_l2);
  for (std::size_t j = 0; j <= dim; ++j) {
    m.velocity[j] = cfg.momentum * m.velocity[j] - cfg.learning_rate * gradient[j];
  }
  for (std::size_t j = 0; j < dim; ++j) m.weights[j] += m.velocity[j];
  m.bias += m.velocity[dim];
}

LinearModel sgdm_train(std::span<const FeatureVector> x, std::span<const ClassLabel> y,
                       const TrainConfig& cfg) {
  cfg.validate();
  check_training_set(x, y);
  bool has_neg = false, has_pos = false;
  for (auto label : y) {
    LabelSpace::binary().check(label);
    (label == kPositiveOne ? has_pos : has_neg) = true;
  }
  if (!has_neg || !has_pos) {
    throw DegenerateTrainingError("logistic training needs samples of both classes");
  }

  LinearModel m = init_linear(x.front().size(), cfg);
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::stream(cfg.seed, {1});
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    if (cfg.shuffle_each_epoch) {
      for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[rng.below(i + 1)]);
      }
    }
    for (std::size_t start = 0; start < order.size(); start += cfg.mini_batch) {
      const std::size_t len = std::min(cfg.mini_batch, order.size() - start);
      std::span<const std::size_t> batch(order.data() + start, len);
      sgdm_step(m, batch_gradient(m, x, y, batch, cfg.l2_decay), cfg);
    }
  }
  return m;
}

Prediction predict(const LinearModel& m, const FeatureVector& x) {
  if (x.size() != m.dim()) {
    throw DimensionError("feature dimension " + std::to_string(x.size()) +
                         " does not match model dimension " + std::to_string(m.dim()));
  }
  const double p = sigmoid(dot(m.weights, x) + m.bias);
  if (p >= 0.5) return {kPositiveOne, p};
  return {kNegativeOne, 1.0 - p};
}

CentroidModel nearest_centroid_train(std::span<const FeatureVector> x,
                                     std::span<const ClassLabel> y, LabelSpace space) {
  check_training_set(x, y);
  for (auto label : y) space.check(label);
  CentroidModel m;
  const std::size_t dim = x.front().size();
  std::vector<std::size_t> counts;
  for (auto label : space.codes()) {
    std::vector<double> sum(dim, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (y[i] != label) continue;
      ++count;
      for (std::size_t j = 0; j < dim; ++j) sum[j] += x[i].values[j];
    }
    if (count == 0) continue;
    for (auto& s : sum) s /= static_cast<double>(count);
    m.labels.push_back(label);
    m.centroids.push_back(std::move(sum));
  }
  if (m.labels.size() < 2) {
    throw DegenerateTrainingError("nearest-centroid training needs at least two classes");
  }
  return m;
}

Prediction nearest_centroid_predict(const CentroidModel& m, const FeatureVector& x) {
  if (m.labels.size() < 2) throw DomainError("centroid model has fewer than two classes");
  if (x.size() != m.dim()) {
    throw DimensionError("feature dimension " + std::to_string(x.size()) +
                         " does not match model dimension " + std::to_string(m.dim()));
  }
  std::vector<double> dist(m.labels.size());
  for (std::size_t c = 0; c < m.labels.size(); ++c) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double diff = x.values[j] - m.centroids[c][j];
      d2 += diff * diff;
    }
    dist[c] = std::sqrt(d2);
  }
  // Labels are ascending, so the first minimum is the lower code.
  std::size_t near = 0;
  for (std::size_t c = 1; c < dist.size(); ++c) {
    if (dist[c] < dist[near]) near = c;
  }
  std::size_t far = near == 0 ? 1 : 0;
  for (std::size_t c = 0; c < dist.size(); ++c) {
    if (c != near && dist[c] < dist[far]) far = c;
  }
  const double total = dist[near] + dist[far];
  const double score = total == 0.0 ? 0.5 : dist[far] / total;
  return {m.labels[near], score};
}

void save_model(const std::filesystem::path& path, const LinearModel& m) {
  auto out = create_model(path, "linear");
  out << "dim " << m.dim() << '\n' << "bias " << hex(m.bias) << '\n' << "weights";
  for (double w : m.weights) out << ' ' << hex(w);
  out << "\nvelocity";
  for (double v : m.velocity) out << ' ' << hex(v);
  out << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void save_model(const std::filesystem::path& path, const CentroidModel& m) {
  auto out = create_model(path, "centroid");
  out << "dim " << m.dim() << '\n' << "classes " << m.labels.size() << '\n';
  for (std::size_t c = 0; c < m.labels.size(); ++c) {
    out << "class " << m.labels[c].code;
    for (double v : m.centroids[c]) out << ' ' << hex(v);
    out << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

LinearModel load_linear_model(const std::filesystem::path& path) {
  auto in = open_model(path, "linear");
  std::size_t dim = 0;
  if (!(expect_line(in, "dim", path) >> dim)) throw ParseError("'" + path.string() + "': bad dim");
  LinearModel m;
  std::string tok;
  expect_line(in, "bias", path) >> tok;
  m.bias = parse_double(tok, path);
  auto w = expect_line(in, "weights", path);
  m.weights = read_values(w, dim, path);
  auto v = expect_line(in, "velocity", path);
  m.velocity = read_values(v, dim + 1, path);
  return m;
}

CentroidModel load_centroid_model(const std::filesystem::path& path) {
  auto in = open_model(path, "centroid");
  std::size_t dim = 0, classes = 0;
  if (!(expect_line(in, "dim", path) >> dim)) throw ParseError("'" + path.string() + "': bad dim");
  if (!(expect_line(in, "classes", path) >> classes)) {
    throw ParseError("'" + path.string() + "': bad class count");
  }
  CentroidModel m;
  for (std::size_t c = 0; c < classes; ++c) {
    auto line = expect_line(in, "class", path);
    int code = 0;
    if (!(line >> code)) throw ParseError("'" + path.string() + "': bad class code");
    m.labels.push_back({code});
    m.centroids.push_back(read_values(line, dim, path));
  }
  return m;
}

}  // namespace ensemble
