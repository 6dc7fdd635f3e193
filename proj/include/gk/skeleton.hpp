#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gk/error.hpp"

namespace gk {

/// Joint set description: names, hip reference, angle triplets and OKS falloffs.
/// Indices are 0-based. `hip_center` holds one joint index, or two indices whose
/// arithmetic mean is the hip reference.
struct SkeletonLayout {
  std::string name;
  int joint_count = 0;                              // J
  int dims = 2;                                     // D: 2 or 3
  std::vector<std::string> joint_names;             // J entries
  std::vector<int> hip_center;                      // 1 or 2 indices
  std::vector<std::array<int, 3>> angle_triplets;   // (proximal, vertex, distal)
  std::vector<double> oks_kappas;                   // J positive falloff constants

  void validate() const {
    require(joint_count > 0, ErrorCode::InvalidArgument, "layout joint_count must be positive");
    require(dims == 2 || dims == 3, ErrorCode::InvalidArgument, "layout dims must be 2 or 3");
    require(static_cast<int>(joint_names.size()) == joint_count, ErrorCode::InvalidArgument,
            "layout joint_names size mismatch");
    require(hip_center.size() == 1 || hip_center.size() == 2, ErrorCode::InvalidArgument,
            "hip_center must hold one or two indices");
    for (int idx : hip_center)
      require(idx >= 0 && idx < joint_count, ErrorCode::InvalidArgument, "hip index out of range");
    require(!angle_triplets.empty(), ErrorCode::InvalidArgument, "layout needs at least one angle triplet");
    for (const auto& t : angle_triplets) {
      for (int idx : t)
        require(idx >= 0 && idx < joint_count, ErrorCode::InvalidArgument, "triplet index out of range");
      require(t[0] != t[1] && t[1] != t[2] && t[0] != t[2], ErrorCode::InvalidArgument,
              "triplet members must be pairwise distinct");
    }
    require(static_cast<int>(oks_kappas.size()) == joint_count, ErrorCode::InvalidArgument,
            "oks_kappas size mismatch");
    for (double k : oks_kappas)
      require(k > 0.0, ErrorCode::InvalidArgument, "oks_kappas must be positive");
  }

  int angle_count() const { return static_cast<int>(angle_triplets.size()); }
};

/// One observed skeleton. Joints are flat row-major (joint-major): joints[j*dims + axis].
struct SkeletonFrame {
  std::int64_t frame_index = 0;
  double timestamp_s = 0.0;
  int dims = 2;
  std::vector<double> joints;
  std::vector<double> confidence;   // J values in [0,1]
  std::vector<bool> valid;          // J flags

  int joint_count() const { return static_cast<int>(confidence.size()); }

  double coord(int joint, int axis) const { return joints[static_cast<std::size_t>(joint) * dims + axis]; }
  double& coord(int joint, int axis) { return joints[static_cast<std::size_t>(joint) * dims + axis]; }

  void validate(const SkeletonLayout& layout) const {
    require(dims == layout.dims, ErrorCode::LayoutMismatch, "frame dims do not match layout");
    const auto j = static_cast<std::size_t>(layout.joint_count);
    require(joints.size() == j * static_cast<std::size_t>(dims), ErrorCode::LayoutMismatch,
            "frame joint count does not match layout");
    require(confidence.size() == j && valid.size() == j, ErrorCode::LayoutMismatch,
            "frame confidence/validity size mismatch");
    for (double c : confidence)
      require(c >= 0.0 && c <= 1.0, ErrorCode::InvalidArgument, "confidence outside [0,1]");
  }
};

/// Time-ordered frames of one person. frame_index must be strictly increasing.
struct SkeletonSequence {
  std::string layout_ref;
  std::vector<SkeletonFrame> frames;
  std::optional<std::string> label;
  std::string source_id;

  static SkeletonSequence create(std::string layout_ref, std::vector<SkeletonFrame> frames,
                                 std::optional<std::string> label = std::nullopt,
                                 std::string source_id = {}) {
    SkeletonSequence seq{std::move(layout_ref), std::move(frames), std::move(label), std::move(source_id)};
    seq.validate();
    return seq;
  }

  void validate() const {
    for (std::size_t i = 1; i < frames.size(); ++i)
      require(frames[i].frame_index > frames[i - 1].frame_index, ErrorCode::NonMonotonicFrames,
              "frame_index must be strictly increasing");
  }

  std::int64_t length() const { return static_cast<std::int64_t>(frames.size()); }
};

/// Per-class labeled spans over a frame timeline; bounds inclusive.
struct LabeledTimeline {
  struct Segment {
    std::string class_id;
    std::int64_t start_frame = 0;
    std::int64_t end_frame = 0;
  };

  std::int64_t length_frames = 0;
  std::vector<Segment> segments;

  void validate() const {
    for (const auto& s : segments)
      require(s.start_frame >= 0 && s.start_frame <= s.end_frame && s.end_frame < length_frames,
              ErrorCode::InvalidArgument, "segment bounds out of range");
    auto sorted = segments;
    std::sort(sorted.begin(), sorted.end(), [](const Segment& a, const Segment& b) {
      return std::tie(a.class_id, a.start_frame) < std::tie(b.class_id, b.start_frame);
    });
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i].class_id == sorted[i - 1].class_id)
        require(sorted[i].start_frame > sorted[i - 1].end_frame, ErrorCode::InvalidArgument,
                "same-class segments overlap");
  }
};

/// Axis-aligned box, lo/hi per dimension.
struct Box {
  std::vector<double> lo, hi;

  int dims() const { return static_cast<int>(lo.size()); }

  double extent(int axis) const { return hi[axis] - lo[axis]; }

  double area() const {
    double a = 1.0;
    for (int ax = 0; ax < dims(); ++ax) a *= extent(ax);
    return a;
  }
};

/// Tight hull over valid joints only.
inline Box bounding_box(const SkeletonFrame& frame) {
  const int j_count = frame.joint_count();
  Box box;
  box.lo.assign(frame.dims, std::numeric_limits<double>::infinity());
  box.hi.assign(frame.dims, -std::numeric_limits<double>::infinity());
  bool any = false;
  for (int j = 0; j < j_count; ++j) {
    if (!frame.valid[j]) continue;
    any = true;
    for (int ax = 0; ax < frame.dims; ++ax) {
      box.lo[ax] = std::min(box.lo[ax], frame.coord(j, ax));
      box.hi[ax] = std::max(box.hi[ax], frame.coord(j, ax));
    }
  }
  require(any, ErrorCode::NoValidJoints, "bounding_box needs at least one valid joint");
  return box;
}

/// Hip reference of a frame: the hip joint, or the mean of the two hip joints.
inline std::array<double, 3> hip_center_of(const SkeletonFrame& frame, const SkeletonLayout& layout) {
  std::array<double, 3> hip{0.0, 0.0, 0.0};
  for (int ax = 0; ax < frame.dims; ++ax) {
    double sum = 0.0;
    for (int idx : layout.hip_center) sum += frame.coord(idx, ax);
    hip[ax] = sum / static_cast<double>(layout.hip_center.size());
  }
  return hip;
}

/// Stateful per-track imputation: invalid joints take their last valid observation;
/// joints never observed fall back to the frame's hip center (hip joints themselves
/// fall back to the mean of whatever is valid in the frame).
class FrameImputer {
 public:
  explicit FrameImputer(const SkeletonLayout& layout) : layout_(&layout) {
    last_valid_.assign(static_cast<std::size_t>(layout.joint_count) * layout.dims,
                       std::numeric_limits<double>::quiet_NaN());
    seen_.assign(layout.joint_count, false);
  }

  SkeletonFrame apply(const SkeletonFrame& in) {
    in.validate(*layout_);
    SkeletonFrame out = in;
    const int j_count = layout_->joint_count;
    const int d = layout_->dims;

    for (int j = 0; j < j_count; ++j) {
      if (!in.valid[j]) continue;
      seen_[j] = true;
      for (int ax = 0; ax < d; ++ax) last_valid_[static_cast<std::size_t>(j) * d + ax] = in.coord(j, ax);
    }

    // Fallback for joints without history: hip center, itself imputed first.
    std::array<double, 3> fallback{0.0, 0.0, 0.0};
    double hip_terms = 0.0;
    for (int idx : layout_->hip_center) {
      if (seen_[idx]) {
        for (int ax = 0; ax < d; ++ax) fallback[ax] += last_valid_[static_cast<std::size_t>(idx) * d + ax];
        hip_terms += 1.0;
      }
    }
    if (hip_terms > 0.0) {
      for (int ax = 0; ax < d; ++ax) fallback[ax] /= hip_terms;
    } else {
      double n = 0.0;
      for (int j = 0; j < j_count; ++j) {
        if (!in.valid[j]) continue;
        for (int ax = 0; ax < d; ++ax) fallback[ax] += in.coord(j, ax);
        n += 1.0;
      }
      if (n > 0.0)
        for (int ax = 0; ax < d; ++ax) fallback[ax] /= n;
    }

    for (int j = 0; j < j_count; ++j) {
      if (in.valid[j]) continue;
      for (int ax = 0; ax < d; ++ax)
        out.coord(j, ax) = seen_[j] ? last_valid_[static_cast<std::size_t>(j) * d + ax] : fallback[ax];
      out.valid[j] = true;
    }
    return out;
  }

 private:
  const SkeletonLayout* layout_;
  std::vector<double> last_valid_;
  std::vector<bool> seen_;
};

/// Whole-sequence imputation (forward scan, causal).
inline SkeletonSequence impute_sequence(const SkeletonSequence& seq, const SkeletonLayout& layout) {
  FrameImputer imp(layout);
  SkeletonSequence out = seq;
  for (auto& f : out.frames) f = imp.apply(f);
  return out;
}

namespace layouts {

inline SkeletonLayout make_coco18() {
  SkeletonLayout l;
  l.name = "coco18";
  l.joint_count = 18;
  l.dims = 2;
  l.joint_names = {"nose",      "neck",      "r_shoulder", "r_elbow", "r_wrist", "l_shoulder",
                   "l_elbow",   "l_wrist",   "r_hip",      "r_knee",  "r_ankle", "l_hip",
                   "l_knee",    "l_ankle",   "r_eye",      "l_eye",   "r_ear",   "l_ear"};
  l.hip_center = {8, 11};
  l.angle_triplets = {
      {2, 3, 4},    // right elbow
      {5, 6, 7},    // left elbow
      {1, 2, 3},    // right shoulder
      {1, 5, 6},    // left shoulder
      {8, 9, 10},   // right knee
      {11, 12, 13}, // left knee
      {1, 8, 9},    // right hip
      {1, 11, 12},  // left hip
  };
  // COCO keypoint falloffs; neck reuses the shoulder constant.
  l.oks_kappas = {0.026, 0.079, 0.079, 0.072, 0.062, 0.079, 0.072, 0.062, 0.107,
                  0.087, 0.089, 0.107, 0.087, 0.089, 0.025, 0.025, 0.035, 0.035};
  l.validate();
  return l;
}

inline SkeletonLayout make_ntu25() {
  SkeletonLayout l;
  l.name = "ntu25";
  l.joint_count = 25;
  l.dims = 3;
  l.joint_names = {"spine_base",   "spine_mid",  "neck",        "head",        "l_shoulder",
                   "l_elbow",      "l_wrist",    "l_hand",      "r_shoulder",  "r_elbow",
                   "r_wrist",      "r_hand",     "l_hip",       "l_knee",      "l_ankle",
                   "l_foot",       "r_hip",      "r_knee",      "r_ankle",     "r_foot",
                   "spine_shoulder", "l_hand_tip", "l_thumb",   "r_hand_tip",  "r_thumb"};
  l.hip_center = {0};
  l.angle_triplets = {
      {4, 5, 6},    // left elbow
      {8, 9, 10},   // right elbow
      {20, 4, 5},   // left shoulder
      {20, 8, 9},   // right shoulder
      {12, 13, 14}, // left knee
      {16, 17, 18}, // right knee
      {0, 12, 13},  // left hip
      {0, 16, 17},  // right hip
  };
  l.oks_kappas.assign(25, 0.08);
  l.validate();
  return l;
}

}  // namespace layouts

inline const SkeletonLayout& coco18_layout() {
  static const SkeletonLayout l = layouts::make_coco18();
  return l;
}

inline const SkeletonLayout& ntu25_layout() {
  static const SkeletonLayout l = layouts::make_ntu25();
  return l;
}

inline const SkeletonLayout& layout_by_name(const std::string& name) {
  if (name == "coco18") return coco18_layout();
  if (name == "ntu25") return ntu25_layout();
  fail(ErrorCode::ConfigError, "unknown layout '" + name + "' (expected coco18 or ntu25)");
}

}  // namespace gk
