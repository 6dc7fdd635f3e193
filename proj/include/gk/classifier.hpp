#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gk/codebook.hpp"
#include "gk/error.hpp"

namespace gk {

struct TrainConfig {
  double lambda = 1e-4;       // L2 regularization
  int epochs = 300;
  std::uint64_t seed = 1;
  double weight_factor = 3.0; // positive-vs-negative error weight for thresholds

  void validate() const {
    require(lambda > 0.0, ErrorCode::InvalidArgument, "lambda must be positive");
    require(epochs >= 1, ErrorCode::InvalidArgument, "epochs must be >= 1");
    require(weight_factor > 0.0, ErrorCode::InvalidArgument, "weight_factor must be positive");
  }
};

/// Per-class separating hyperplane, detection threshold and probability calibration.
struct ClassModel {
  std::vector<double> weights;  // length K
  double bias = 0.0;
  double theta = 0.0;           // detection threshold on max-subarray score sums
  double calib_a = 1.0;         // probability = sigmoid(calib_a * decision + calib_b)
  double calib_b = 0.0;
};

/// One-vs-all linear model over sequence histograms. Classes are kept sorted;
/// `mean_train_length` distributes the bias over per-frame scores and
/// `max_train_length` bounds the detector's assignment buffer.
struct GestureModel {
  std::vector<std::string> classes;
  std::vector<ClassModel> per_class;
  double mean_train_length = 1.0;
  std::int64_t max_train_length = 1;
  std::string codebook_digest;       // identity of the codebook this model was trained against
  std::string train_config_digest;

  int index_of(const std::string& class_id) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == class_id) return static_cast<int>(i);
    fail(ErrorCode::UnknownClass, "class '" + class_id + "' not in model");
  }

  int class_count() const { return static_cast<int>(classes.size()); }
  int k() const { return per_class.empty() ? 0 : static_cast<int>(per_class.front().weights.size()); }
};

inline double decision_value(const GestureModel& model, int class_index, const std::vector<double>& h) {
  const auto& cm = model.per_class[static_cast<std::size_t>(class_index)];
  require(h.size() == cm.weights.size(), ErrorCode::DimensionMismatch,
          "histogram length does not match model");
  return std::inner_product(h.begin(), h.end(), cm.weights.begin(), 0.0) + cm.bias;
}

namespace detail {

/// Regularized hinge objective, used by training diagnostics and tests.
inline double hinge_objective(const std::vector<double>& w, double bias, double lambda,
                              const std::vector<std::vector<double>>& xs, const std::vector<int>& ys) {
  double loss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double margin =
        ys[i] * (std::inner_product(xs[i].begin(), xs[i].end(), w.begin(), 0.0) + bias);
    loss += std::max(0.0, 1.0 - margin);
  }
  loss /= static_cast<double>(xs.size());
  const double reg = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
  return loss + 0.5 * lambda * reg;
}

/// Pegasos-style subgradient descent on the binary hinge loss; the bias is
/// unregularized. Deterministic given (data, seed).
inline void train_binary_hinge(const std::vector<std::vector<double>>& xs, const std::vector<int>& ys,
                               const TrainConfig& cfg, std::uint64_t stream, std::vector<double>& w,
                               double& bias) {
  const std::size_t n = xs.size();
  const std::size_t dim = xs.front().size();
  w.assign(dim, 0.0);
  bias = 0.0;
  std::mt19937_64 rng(cfg.seed * 0x9e3779b97f4a7c15ULL + stream);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::int64_t t = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      ++t;
      const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
      const auto& x = xs[idx];
      const double y = ys[idx];
      const double margin = y * (std::inner_product(x.begin(), x.end(), w.begin(), 0.0) + bias);
      const double keep = 1.0 - eta * cfg.lambda;
      for (double& wi : w) wi *= keep;
      if (margin < 1.0) {
        for (std::size_t a = 0; a < dim; ++a) w[a] += eta * y * x[a];
        bias += eta * y;
      }
    }
  }
}

}  // namespace detail

/// Train the one-vs-all model. Thresholds, calibration and sequence-length
/// statistics start at neutral values; the training pipeline fills them in.
inline GestureModel train_ovr(const std::vector<std::vector<double>>& histograms,
                              const std::vector<std::string>& labels, const TrainConfig& cfg) {
  cfg.validate();
  require(histograms.size() == labels.size(), ErrorCode::LengthMismatch,
          "histogram/label count mismatch");
  require(!histograms.empty(), ErrorCode::EmptyInput, "no training histograms");

  std::vector<std::string> classes = labels;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  require(classes.size() >= 2, ErrorCode::DegenerateLabels, "need at least two classes");
  for (const auto& c : classes) {
    const auto count = std::count(labels.begin(), labels.end(), c);
    require(count >= 1, ErrorCode::DegenerateLabels, "class without samples: " + c);
  }

  GestureModel model;
  model.classes = classes;
  model.per_class.resize(classes.size());
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    std::vector<int> ys(histograms.size());
    for (std::size_t i = 0; i < histograms.size(); ++i) ys[i] = labels[i] == classes[ci] ? 1 : -1;
    detail::train_binary_hinge(histograms, ys, cfg, ci, model.per_class[ci].weights,
                               model.per_class[ci].bias);
  }
  return model;
}

/// Per-frame class score: soft weights against the class weight vector, plus
/// the bias spread uniformly over the mean training sequence length.
inline double frame_score(const SoftAssignment& a, const GestureModel& model, int class_index) {
  require(class_index >= 0 && class_index < model.class_count(), ErrorCode::UnknownClass,
          "class index out of range");
  const auto& cm = model.per_class[static_cast<std::size_t>(class_index)];
  double s = 0.0;
  for (const auto& e : a.entries) {
    require(e.cluster >= 0 && e.cluster < static_cast<int>(cm.weights.size()), ErrorCode::OutOfRange,
            "cluster id out of model range");
    s += e.weight * cm.weights[e.cluster];
  }
  return s + cm.bias / model.mean_train_length;
}

inline double frame_score(const SoftAssignment& a, const GestureModel& model, const std::string& cls) {
  return frame_score(a, model, model.index_of(cls));
}

/// Threshold minimizing weight_factor*|{pos < theta}| + |{neg >= theta}| over
/// midpoints of consecutive distinct scores plus below-min/above-max
/// sentinels; ties resolve to the lowest theta.
inline double learn_threshold(const std::vector<double>& pos_scores, const std::vector<double>& neg_scores,
                              double weight_factor) {
  require(!pos_scores.empty() && !neg_scores.empty(), ErrorCode::EmptyScores,
          "threshold learning needs positive and negative scores");
  std::vector<double> all = pos_scores;
  all.insert(all.end(), neg_scores.begin(), neg_scores.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<double> candidates;
  candidates.reserve(all.size() + 1);
  candidates.push_back(all.front() - 1.0);
  for (std::size_t i = 0; i + 1 < all.size(); ++i) candidates.push_back(0.5 * (all[i] + all[i + 1]));
  candidates.push_back(all.back() + 1.0);

  double best_theta = candidates.front();
  double best_cost = std::numeric_limits<double>::infinity();
  for (double theta : candidates) {
    double cost = 0.0;
    for (double s : pos_scores)
      if (s < theta) cost += weight_factor;
    for (double s : neg_scores)
      if (s >= theta) cost += 1.0;
    if (cost < best_cost) {  // strict: ties keep the lowest theta (ascending scan)
      best_cost = cost;
      best_theta = theta;
    }
  }
  return best_theta;
}

struct Calibration {
  double a = 1.0;
  double b = 0.0;
};

inline double calibrated_probability(const Calibration& c, double score) {
  const double z = c.a * score + c.b;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// Platt-style sigmoid fit sigma(a*s + b) by Newton iterations on the
/// cross-entropy with the usual smoothed targets; 100 fixed iterations.
inline Calibration calibrate(const std::vector<double>& scores, const std::vector<int>& labels) {
  require(scores.size() == labels.size(), ErrorCode::LengthMismatch, "score/label count mismatch");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += y > 0 ? 1 : 0;
  const std::size_t n_neg = n - n_pos;
  require(n_pos > 0 && n_neg > 0, ErrorCode::SingleClassLabels,
          "calibration needs both positive and negative labels");

  const double t_pos = (static_cast<double>(n_pos) + 1.0) / (static_cast<double>(n_pos) + 2.0);
  const double t_neg = 1.0 / (static_cast<double>(n_neg) + 2.0);

  double a = 0.0;
  double b = std::log((static_cast<double>(n_neg) + 1.0) / (static_cast<double>(n_pos) + 1.0));
  for (int iter = 0; iter < 100; ++iter) {
    double g_a = 0.0, g_b = 0.0, h_aa = 1e-12, h_ab = 0.0, h_bb = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = scores[i];
      const double target = labels[i] > 0 ? t_pos : t_neg;
      const double z = a * s + b;
      double p;
      if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
      } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
      }
      const double d1 = p - target;
      const double d2 = p * (1.0 - p);
      g_a += d1 * s;
      g_b += d1;
      h_aa += d2 * s * s;
      h_ab += d2 * s;
      h_bb += d2;
    }
    const double det = h_aa * h_bb - h_ab * h_ab;
    if (det <= 0.0) break;
    const double da = (g_a * h_bb - g_b * h_ab) / det;
    const double db = (g_b * h_aa - g_a * h_ab) / det;
    a -= da;
    b -= db;
    if (std::abs(da) < 1e-12 && std::abs(db) < 1e-12) break;
  }
  return {a, b};
}

/// Highest-decision class over the full histogram, with its calibrated probability.
inline std::pair<int, double> classify_histogram(const std::vector<double>& h, const GestureModel& model) {
  require(model.class_count() >= 1, ErrorCode::EmptyInput, "model has no classes");
  int best = 0;
  double best_dec = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < model.class_count(); ++c) {
    const double dec = decision_value(model, c, h);
    if (dec > best_dec) {
      best_dec = dec;
      best = c;
    }
  }
  const auto& cm = model.per_class[static_cast<std::size_t>(best)];
  return {best, calibrated_probability({cm.calib_a, cm.calib_b}, best_dec)};
}

}  // namespace gk
