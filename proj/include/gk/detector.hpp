#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gk/classifier.hpp"
#include "gk/codebook.hpp"
#include "gk/digest.hpp"
#include "gk/error.hpp"
#include "gk/features.hpp"

namespace gk {

/// Trigger behavior of the online detector.
///  - Vanilla: a class fires as soon as its running max-subarray sum exceeds theta.
///  - Generated: additionally requires the last `trailing_quiet` frame scores of
///    that class to be <= 0; `augmentation` controls the training-side histogram
///    mixing that usually accompanies this trigger.
///  - Neutral: the model contains `neutral_class`; its firings reset all
///    detection state and are not emitted.
struct DetectorVariant {
  enum class Kind { Vanilla, Generated, Neutral };
  Kind kind = Kind::Vanilla;
  int trailing_quiet = 5;
  bool augmentation = true;
  std::string neutral_class = "neutral";

  void validate() const {
    if (kind == Kind::Generated)
      require(trailing_quiet >= 1, ErrorCode::InvalidArgument, "trailing_quiet must be >= 1");
  }

  static DetectorVariant vanilla() { return {}; }
  static DetectorVariant generated(int s, bool augment = true) {
    DetectorVariant v;
    v.kind = Kind::Generated;
    v.trailing_quiet = s;
    v.augmentation = augment;
    return v;
  }
  static DetectorVariant neutral(std::string neutral_class) {
    DetectorVariant v;
    v.kind = Kind::Neutral;
    v.neutral_class = std::move(neutral_class);
    return v;
  }
};

inline const char* variant_name(DetectorVariant::Kind k) {
  switch (k) {
    case DetectorVariant::Kind::Vanilla: return "vanilla";
    case DetectorVariant::Kind::Generated: return "generated";
    case DetectorVariant::Kind::Neutral: return "neutral";
  }
  return "vanilla";
}

/// Streaming maximum-subarray accumulator with an empty-subarray floor at 0.
struct KadaneState {
  double best_sum = 0.0;
  std::int64_t best_start = -1;  // -1/-1 encodes the empty span
  std::int64_t best_end = -1;
  double cur_sum = 0.0;
  std::int64_t cur_start = 0;
  std::int64_t last_t = std::numeric_limits<std::int64_t>::min();

  bool has_span() const { return best_start >= 0; }
};

inline KadaneState kadane_step(KadaneState st, double x, std::int64_t t) {
  require(t > st.last_t, ErrorCode::NonMonotonicTime, "kadane_step times must be strictly increasing");
  st.last_t = t;
  if (st.cur_sum <= 0.0) {
    st.cur_sum = x;
    st.cur_start = t;
  } else {
    st.cur_sum += x;
  }
  if (st.cur_sum > st.best_sum) {
    st.best_sum = st.cur_sum;
    st.best_start = st.cur_start;
    st.best_end = t;
  }
  return st;
}

struct MaxSubarray {
  double sum = 0.0;
  std::int64_t start = -1;  // -1/-1 when the empty subarray wins
  std::int64_t end = -1;

  bool empty() const { return start < 0; }
};

/// Batch maximum contiguous sum; the empty subarray (value 0) is allowed.
inline MaxSubarray max_subarray(std::span<const double> scores) {
  KadaneState st;
  for (std::size_t i = 0; i < scores.size(); ++i)
    st = kadane_step(st, scores[i], static_cast<std::int64_t>(i));
  return {st.best_sum, st.best_start, st.best_end};
}

inline MaxSubarray max_subarray(const std::vector<double>& scores) {
  return max_subarray(std::span<const double>(scores.data(), scores.size()));
}

struct DetectionEvent {
  std::string class_id;
  std::int64_t start_frame = 0;
  std::int64_t end_frame = 0;
  double score = 0.0;        // max-subarray sum at trigger time
  double probability = 0.0;  // calibrated probability of class_id on the span histogram
  std::int64_t person_id = 0;
};

/// Identity digest of (layout, descriptor config); stored in the codebook.
inline std::string feature_config_digest(const SkeletonLayout& layout, const GestureletConfig& cfg) {
  Digest d;
  d.str(layout.name).i64(layout.joint_count).i64(layout.dims);
  for (const auto& t : layout.angle_triplets) d.i64(t[0]).i64(t[1]).i64(t[2]);
  for (int idx : layout.hip_center) d.i64(idx);
  d.f64(cfg.alpha).f64(cfg.beta).f64(cfg.gamma).i64(cfg.lag);
  return d.hex();
}

/// Identity digest of a codebook (configuration + centroid content).
inline std::string codebook_digest(const Codebook& cb) {
  Digest d;
  d.str(cb.config_digest).i64(cb.k).i64(cb.dim).u64(cb.seed);
  for (double v : cb.centroids) d.f64(v);
  return d.hex();
}

/// Per-person streaming detector: buffers frames for the symmetric-difference
/// lag, scores each descriptor against every class, advances one Kadane
/// accumulator per class, and fires events per the configured variant.
///
/// Single-writer: one caller advances a given detector. The model, codebook
/// and layout are shared read-only.
class OnlineDetector {
 public:
  struct Diagnostics {
    std::int64_t frames_seen = 0;
    std::int64_t descriptors_scored = 0;
    std::int64_t neutral_resets = 0;
    std::int64_t forced_resets = 0;  // assignment buffer overflow
    std::int64_t events_emitted = 0;
  };

  OnlineDetector(const SkeletonLayout& layout, const GestureletConfig& cfg, const Codebook& cb,
                 const GestureModel& model, int soft_m, DetectorVariant variant,
                 std::int64_t person_id = 0)
      : layout_(&layout),
        cfg_(cfg),
        cb_(&cb),
        model_(&model),
        soft_m_(soft_m),
        variant_(variant),
        person_id_(person_id),
        imputer_(layout) {
    cfg_.validate();
    variant_.validate();
    require(soft_m_ >= 1 && soft_m_ <= cb.k, ErrorCode::InvalidArgument, "soft_m out of range");
    require(cb.config_digest == feature_config_digest(layout, cfg_), ErrorCode::ModelMismatch,
            "codebook was built for a different layout or descriptor config");
    require(model.codebook_digest == codebook_digest(cb), ErrorCode::ModelMismatch,
            "model was trained against a different codebook");
    require(cb.dim == descriptor_dim(layout), ErrorCode::ModelMismatch,
            "codebook dimension does not match layout descriptor size");
    neutral_index_ = -1;
    if (variant_.kind == DetectorVariant::Kind::Neutral)
      neutral_index_ = model.index_of(variant_.neutral_class);
    kadane_.assign(model.class_count(), KadaneState{});
    recent_scores_.assign(model.class_count(), {});
    buffer_bound_ = std::max<std::int64_t>(16, 4 * model.max_train_length);
  }

  std::int64_t person_id() const { return person_id_; }
  const Diagnostics& diagnostics() const { return diag_; }

  /// Feed the next observed frame; returns the events fired at this step.
  /// No events can fire before 2*lag frames have been observed.
  std::vector<DetectionEvent> step(const SkeletonFrame& frame) {
    push_frame(frame);
    std::vector<DetectionEvent> events;
    const std::int64_t i = obs_count_ - 1;
    while (next_k_ <= i - required_right_span(next_k_)) {
      process_descriptor(next_k_, /*series_len=*/-1);
      ++next_k_;
      if (auto ev = check_trigger()) events.push_back(*ev);
      maintain_buffer();
    }
    return events;
  }

  /// End of stream: score the remaining buffered frames with the same
  /// boundary rules batch extraction uses. The detector stays usable only
  /// for inspection afterwards.
  std::vector<DetectionEvent> flush() {
    std::vector<DetectionEvent> events;
    for (; next_k_ < obs_count_; ++next_k_) {
      process_descriptor(next_k_, obs_count_);
      if (auto ev = check_trigger()) events.push_back(*ev);
      maintain_buffer();
    }
    return events;
  }

  /// Clear all detection state (Kadane accumulators, buffered assignments,
  /// trailing score windows). Frame history is kept.
  void reset_detection_state() {
    for (auto& st : kadane_) st = KadaneState{};
    for (auto& rs : recent_scores_) rs.clear();
    assignments_.clear();
  }

 private:
  struct Buffered {
    std::int64_t stream_frame = 0;
    std::vector<double> rel;     // hip-relative positions
    std::vector<double> angles;
  };

  struct StoredAssignment {
    std::int64_t obs_k = 0;
    std::int64_t stream_frame = 0;
    SoftAssignment assignment;
  };

  void push_frame(const SkeletonFrame& frame) {
    frame.validate(*layout_);
    SkeletonFrame imputed = imputer_.apply(frame);
    Buffered b;
    b.stream_frame = frame.frame_index;
    const auto hip = hip_center_of(imputed, *layout_);
    b.rel.resize(static_cast<std::size_t>(layout_->joint_count) * layout_->dims);
    for (int j = 0; j < layout_->joint_count; ++j)
      for (int ax = 0; ax < layout_->dims; ++ax)
        b.rel[static_cast<std::size_t>(j) * layout_->dims + ax] = imputed.coord(j, ax) - hip[ax];
    b.angles = joint_angles(imputed, *layout_);
    window_.push_back(std::move(b));
    const std::size_t cap = static_cast<std::size_t>(2 * cfg_.lag + 1);
    while (window_.size() > cap) window_.pop_front();
    ++obs_count_;
    ++diag_.frames_seen;
  }

  /// Frames k must wait for on the right before its descriptor can be scored
  /// with final-window semantics: k=0 needs the one-sided second-difference
  /// stencil (2*lag), later frames their symmetric span.
  std::int64_t required_right_span(std::int64_t k) const {
    if (k == 0) return 2 * cfg_.lag;
    return std::min<std::int64_t>(cfg_.lag, k);
  }

  const std::vector<double>& rel_at(std::int64_t obs) const {
    return window_[static_cast<std::size_t>(obs - (obs_count_ - static_cast<std::int64_t>(window_.size())))].rel;
  }
  const std::vector<double>& angles_at(std::int64_t obs) const {
    return window_[static_cast<std::size_t>(obs - (obs_count_ - static_cast<std::int64_t>(window_.size())))].angles;
  }
  std::int64_t stream_frame_at(std::int64_t obs) const {
    return window_[static_cast<std::size_t>(obs - (obs_count_ - static_cast<std::int64_t>(window_.size())))].stream_frame;
  }

  void process_descriptor(std::int64_t k, std::int64_t series_len) {
    // series_len < 0: mid-stream, differences may reach lag frames both ways.
    const std::int64_t n = series_len < 0 ? obs_count_ : series_len;
    std::vector<double> vel, acc, angle_speed, unused;
    const auto rel = [&](std::int64_t i) -> const std::vector<double>& { return rel_at(i); };
    const auto ang = [&](std::int64_t i) -> const std::vector<double>& { return angles_at(i); };
    detail::finite_differences(rel, k, n, cfg_.lag, vel, acc);
    detail::finite_differences(ang, k, n, cfg_.lag, angle_speed, unused);
    std::vector<double> g =
        detail::assemble_gesturelet(rel_at(k), vel, acc, angle_speed, cfg_);

    SoftAssignment a = assign(g, *cb_, soft_m_);
    assignments_.push_back({k, stream_frame_at(k), a});
    ++diag_.descriptors_scored;

    for (int c = 0; c < model_->class_count(); ++c) {
      const double s = frame_score(a, *model_, c);
      kadane_[c] = kadane_step(kadane_[c], s, k);
      auto& rs = recent_scores_[c];
      rs.push_back(s);
      while (static_cast<int>(rs.size()) > std::max(1, variant_.trailing_quiet)) rs.pop_front();
    }
  }

  bool class_may_fire(int c) const {
    const auto& st = kadane_[c];
    const auto& cm = model_->per_class[static_cast<std::size_t>(c)];
    if (!(st.best_sum > cm.theta) || !st.has_span()) return false;
    if (variant_.kind == DetectorVariant::Kind::Generated && c != neutral_index_) {
      const auto& rs = recent_scores_[c];
      if (static_cast<int>(rs.size()) < variant_.trailing_quiet) return false;
      for (double s : rs)
        if (s > 0.0) return false;
    }
    return true;
  }

  std::optional<DetectionEvent> check_trigger() {
    int winner = -1;
    double best_margin = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < model_->class_count(); ++c) {
      if (!class_may_fire(c)) continue;
      const double margin = kadane_[c].best_sum - model_->per_class[static_cast<std::size_t>(c)].theta;
      if (margin > best_margin) {  // ties keep the lowest class id
        best_margin = margin;
        winner = c;
      }
    }
    if (winner < 0) return std::nullopt;

    if (winner == neutral_index_) {
      ++diag_.neutral_resets;
      reset_detection_state();
      return std::nullopt;
    }

    const KadaneState st = kadane_[winner];
    DetectionEvent ev;
    ev.class_id = model_->classes[static_cast<std::size_t>(winner)];
    ev.score = st.best_sum;
    ev.person_id = person_id_;

    std::vector<SoftAssignment> span;
    ev.start_frame = st.best_start;
    ev.end_frame = st.best_end;
    for (const auto& sa : assignments_) {
      if (sa.obs_k < st.best_start || sa.obs_k > st.best_end) continue;
      if (sa.obs_k == st.best_start) ev.start_frame = sa.stream_frame;
      if (sa.obs_k == st.best_end) ev.end_frame = sa.stream_frame;
      span.push_back(sa.assignment);
    }
    if (!span.empty()) {
      const std::vector<double> h = sequence_histogram(span, cb_->k);
      const auto& cm = model_->per_class[static_cast<std::size_t>(winner)];
      ev.probability =
          calibrated_probability({cm.calib_a, cm.calib_b}, decision_value(*model_, winner, h));
    }
    ++diag_.events_emitted;
    reset_detection_state();
    return ev;
  }

  void maintain_buffer() {
    std::int64_t min_live = std::numeric_limits<std::int64_t>::max();
    for (const auto& st : kadane_) {
      if (st.cur_sum > 0.0) min_live = std::min(min_live, st.cur_start);
      if (st.has_span()) min_live = std::min(min_live, st.best_start);
    }
    while (!assignments_.empty() && assignments_.front().obs_k < min_live) assignments_.pop_front();
    if (static_cast<std::int64_t>(assignments_.size()) > buffer_bound_) {
      ++diag_.forced_resets;
      reset_detection_state();
    }
  }

  const SkeletonLayout* layout_;
  GestureletConfig cfg_;
  const Codebook* cb_;
  const GestureModel* model_;
  int soft_m_;
  DetectorVariant variant_;
  std::int64_t person_id_;
  FrameImputer imputer_;

  std::deque<Buffered> window_;
  std::int64_t obs_count_ = 0;
  std::int64_t next_k_ = 0;
  int neutral_index_ = -1;
  std::vector<KadaneState> kadane_;
  std::vector<std::deque<double>> recent_scores_;
  std::deque<StoredAssignment> assignments_;
  std::int64_t buffer_bound_ = 0;
  Diagnostics diag_;
};

/// Labeled histograms for classifier training. With augmentation on, each
/// sequence additionally contributes a histogram over its own assignments
/// concatenated with the first quarter of a uniformly drawn other-class
/// sequence's assignments, still labeled with the original class.
struct LabeledHistogram {
  std::vector<double> histogram;
  std::string label;
};

inline std::vector<LabeledHistogram> generate_augmented_histograms(
    const std::vector<SkeletonSequence>& sequences, const Codebook& cb, const GestureletConfig& cfg,
    const SkeletonLayout& layout, int soft_m, std::uint64_t seed, bool augmentation) {
  require(!sequences.empty(), ErrorCode::EmptyInput, "no sequences");
  std::vector<std::vector<SoftAssignment>> per_seq;
  std::vector<std::string> labels;
  per_seq.reserve(sequences.size());
  for (const auto& seq : sequences) {
    require(seq.label.has_value(), ErrorCode::DegenerateLabels, "unlabeled training sequence");
    labels.push_back(*seq.label);
    std::vector<SoftAssignment> as;
    for (const auto& g : extract_sequence(seq, cfg, layout)) as.push_back(assign(g, cb, soft_m));
    per_seq.push_back(std::move(as));
  }

  std::vector<LabeledHistogram> out;
  out.reserve(sequences.size() * (augmentation ? 2 : 1));
  for (std::size_t i = 0; i < per_seq.size(); ++i)
    out.push_back({sequence_histogram(per_seq[i], cb.k), labels[i]});

  if (!augmentation) return out;

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < per_seq.size(); ++i) {
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < per_seq.size(); ++j)
      if (labels[j] != labels[i]) others.push_back(j);
    require(!others.empty(), ErrorCode::InvalidArgument,
            "histogram augmentation needs at least two classes");
    const std::size_t j = others[rng() % others.size()];
    const std::size_t prefix = std::max<std::size_t>(1, (per_seq[j].size() + 3) / 4);
    std::vector<SoftAssignment> mixed = per_seq[i];
    mixed.insert(mixed.end(), per_seq[j].begin(), per_seq[j].begin() + static_cast<std::ptrdiff_t>(prefix));
    out.push_back({sequence_histogram(mixed, cb.k), labels[i]});
  }
  return out;
}

}  // namespace gk
