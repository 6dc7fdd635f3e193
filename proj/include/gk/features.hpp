#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gk/error.hpp"
#include "gk/skeleton.hpp"

namespace gk {

/// Weights of the descriptor blocks and the finite-difference half-window.
struct GestureletConfig {
  double alpha = 0.8;  // velocity weight
  double beta = 0.4;   // acceleration weight
  double gamma = 1.0;  // angle-speed weight
  int lag = 2;         // symmetric half-window, in frames

  void validate() const {
    require(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma) && alpha >= 0.0 &&
                beta >= 0.0 && gamma >= 0.0,
            ErrorCode::InvalidArgument, "descriptor weights must be finite and nonnegative");
    require(lag >= 1, ErrorCode::InvalidArgument, "lag must be >= 1");
  }
};

/// Per-frame unit-norm descriptor: [hip-relative positions, alpha*velocity,
/// beta*acceleration, gamma*angle speed]. The kinematic block is normalized to
/// unit norm before the angle block is appended (angles are scale-free), then
/// the concatenation is normalized again; an all-zero raw vector stays all-zero.
struct Gesturelet {
  std::int64_t frame_index = 0;
  std::vector<double> vector;
};

inline int descriptor_dim(const SkeletonLayout& layout) {
  return layout.dims * layout.joint_count * 3 + layout.angle_count();
}

/// Angle at each triplet's vertex between the (vertex->proximal) and
/// (vertex->distal) bones, in [0, pi]. A zero-length bone yields angle 0 and
/// sets the triplet's degeneracy flag.
inline std::vector<double> joint_angles(const SkeletonFrame& frame, const SkeletonLayout& layout,
                                        std::vector<bool>* degenerate = nullptr) {
  const int a_count = layout.angle_count();
  std::vector<double> angles(a_count, 0.0);
  if (degenerate) degenerate->assign(a_count, false);
  for (int a = 0; a < a_count; ++a) {
    const auto& t = layout.angle_triplets[a];
    double dot = 0.0, n1 = 0.0, n2 = 0.0;
    for (int ax = 0; ax < frame.dims; ++ax) {
      const double u = frame.coord(t[0], ax) - frame.coord(t[1], ax);
      const double v = frame.coord(t[2], ax) - frame.coord(t[1], ax);
      dot += u * v;
      n1 += u * u;
      n2 += v * v;
    }
    if (n1 <= 0.0 || n2 <= 0.0) {
      if (degenerate) (*degenerate)[a] = true;
      angles[a] = 0.0;
      continue;
    }
    double c = dot / std::sqrt(n1 * n2);
    c = std::max(-1.0, std::min(1.0, c));
    angles[a] = std::acos(c);
  }
  return angles;
}

namespace detail {

/// Symmetric (or boundary one-sided) finite differences of a vector-valued
/// series accessed through `at(t) -> const std::vector<double>&`, frames
/// [0, n). Spans shrink near boundaries: s = min(lag, t, n-1-t); at the ends
/// one-sided differences with span min(lag, frames available on the open side)
/// are used, and the second difference falls back to exact zero when even the
/// one-sided stencil does not fit.
template <typename At>
inline void finite_differences(const At& at, std::int64_t t, std::int64_t n, int lag,
                               std::vector<double>& velocity, std::vector<double>& acceleration) {
  const auto dim = at(t).size();
  velocity.assign(dim, 0.0);
  acceleration.assign(dim, 0.0);
  if (n <= 1) return;

  const std::int64_t s = std::min<std::int64_t>(lag, std::min(t, n - 1 - t));
  if (s >= 1) {
    const auto& fwd = at(t + s);
    const auto& bwd = at(t - s);
    const auto& mid = at(t);
    const double inv_v = 1.0 / (2.0 * static_cast<double>(s));
    const double inv_a = 1.0 / (static_cast<double>(s) * static_cast<double>(s));
    for (std::size_t i = 0; i < dim; ++i) {
      velocity[i] = (fwd[i] - bwd[i]) * inv_v;
      acceleration[i] = (fwd[i] + bwd[i] - 2.0 * mid[i]) * inv_a;
    }
    return;
  }

  if (t == 0) {
    const std::int64_t f = std::min<std::int64_t>(lag, n - 1);
    const auto& a0 = at(0);
    const auto& a1 = at(f);
    const double inv = 1.0 / static_cast<double>(f);
    for (std::size_t i = 0; i < dim; ++i) velocity[i] = (a1[i] - a0[i]) * inv;
    if (2 * f <= n - 1) {
      const auto& a2 = at(2 * f);
      const double inv_a = inv * inv;
      for (std::size_t i = 0; i < dim; ++i) acceleration[i] = (a2[i] - 2.0 * a1[i] + a0[i]) * inv_a;
    }
  } else {  // t == n-1
    const std::int64_t b = std::min<std::int64_t>(lag, t);
    const auto& a0 = at(t);
    const auto& a1 = at(t - b);
    const double inv = 1.0 / static_cast<double>(b);
    for (std::size_t i = 0; i < dim; ++i) velocity[i] = (a0[i] - a1[i]) * inv;
    if (t - 2 * b >= 0) {
      const auto& a2 = at(t - 2 * b);
      const double inv_a = inv * inv;
      for (std::size_t i = 0; i < dim; ++i) acceleration[i] = (a0[i] - 2.0 * a1[i] + a2[i]) * inv_a;
    }
  }
}

/// Assemble the descriptor from its raw blocks (two-stage normalization).
inline std::vector<double> assemble_gesturelet(const std::vector<double>& pos,
                                               const std::vector<double>& vel,
                                               const std::vector<double>& acc,
                                               const std::vector<double>& angle_speed,
                                               const GestureletConfig& cfg) {
  std::vector<double> out;
  out.reserve(pos.size() * 3 + angle_speed.size());
  double kin_sq = 0.0;
  for (double v : pos) {
    out.push_back(v);
    kin_sq += v * v;
  }
  for (double v : vel) {
    const double w = cfg.alpha * v;
    out.push_back(w);
    kin_sq += w * w;
  }
  for (double v : acc) {
    const double w = cfg.beta * v;
    out.push_back(w);
    kin_sq += w * w;
  }
  if (kin_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(kin_sq);
    for (double& v : out) v *= inv;
  }
  for (double v : angle_speed) out.push_back(cfg.gamma * v);

  double total_sq = 0.0;
  for (double v : out) total_sq += v * v;
  if (total_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(total_sq);
    for (double& v : out) v *= inv;
  }
  return out;
}

}  // namespace detail

/// Precomputed per-frame hip-relative positions and triplet angles of a
/// sequence after imputation; the common substrate for descriptor extraction.
struct FeatureSeries {
  const SkeletonLayout* layout = nullptr;
  std::vector<std::vector<double>> rel_positions;  // per frame, D*J
  std::vector<std::vector<double>> angles;         // per frame, A
  std::vector<std::int64_t> frame_indices;

  std::int64_t length() const { return static_cast<std::int64_t>(rel_positions.size()); }
};

inline FeatureSeries build_feature_series(const SkeletonSequence& seq, const SkeletonLayout& layout) {
  seq.validate();
  FeatureSeries fs;
  fs.layout = &layout;
  fs.rel_positions.reserve(seq.frames.size());
  fs.angles.reserve(seq.frames.size());
  FrameImputer imputer(layout);
  for (const auto& raw : seq.frames) {
    SkeletonFrame f = imputer.apply(raw);
    const auto hip = hip_center_of(f, layout);
    std::vector<double> rel(static_cast<std::size_t>(layout.joint_count) * layout.dims);
    for (int j = 0; j < layout.joint_count; ++j)
      for (int ax = 0; ax < layout.dims; ++ax)
        rel[static_cast<std::size_t>(j) * layout.dims + ax] = f.coord(j, ax) - hip[ax];
    fs.rel_positions.push_back(std::move(rel));
    fs.angles.push_back(joint_angles(f, layout));
    fs.frame_indices.push_back(f.frame_index);
  }
  return fs;
}

struct JointKinematics {
  std::vector<double> position;      // hip-relative, D*J
  std::vector<double> velocity;      // coordinate units per frame
  std::vector<double> acceleration;  // per frame^2
};

inline JointKinematics kinematics_at(const FeatureSeries& fs, std::int64_t t, int lag) {
  require(t >= 0 && t < fs.length(), ErrorCode::OutOfRange, "frame index out of range");
  JointKinematics k;
  k.position = fs.rel_positions[static_cast<std::size_t>(t)];
  const auto at = [&](std::int64_t i) -> const std::vector<double>& {
    return fs.rel_positions[static_cast<std::size_t>(i)];
  };
  detail::finite_differences(at, t, fs.length(), lag, k.velocity, k.acceleration);
  return k;
}

inline std::vector<double> angle_speed_at(const FeatureSeries& fs, std::int64_t t, int lag) {
  require(t >= 0 && t < fs.length(), ErrorCode::OutOfRange, "frame index out of range");
  const auto at = [&](std::int64_t i) -> const std::vector<double>& {
    return fs.angles[static_cast<std::size_t>(i)];
  };
  std::vector<double> speed, unused;
  detail::finite_differences(at, t, fs.length(), lag, speed, unused);
  return speed;
}

inline Gesturelet gesturelet_at(const FeatureSeries& fs, std::int64_t t, const GestureletConfig& cfg) {
  cfg.validate();
  JointKinematics k = kinematics_at(fs, t, cfg.lag);
  std::vector<double> angle_speed = angle_speed_at(fs, t, cfg.lag);
  Gesturelet g;
  g.frame_index = fs.frame_indices[static_cast<std::size_t>(t)];
  g.vector = detail::assemble_gesturelet(k.position, k.velocity, k.acceleration, angle_speed, cfg);
  return g;
}

/// Hip-relative positions plus symmetric-difference velocity and acceleration
/// at frame t of the sequence.
inline JointKinematics joint_kinematics(const SkeletonSequence& seq, std::int64_t t,
                                        const SkeletonLayout& layout, int lag) {
  require(!seq.frames.empty(), ErrorCode::EmptySequence, "joint_kinematics on empty sequence");
  require(lag >= 1, ErrorCode::InvalidArgument, "lag must be >= 1");
  FeatureSeries fs = build_feature_series(seq, layout);
  return kinematics_at(fs, t, lag);
}

inline Gesturelet extract_gesturelet(const SkeletonSequence& seq, std::int64_t t,
                                     const GestureletConfig& cfg, const SkeletonLayout& layout) {
  require(!seq.frames.empty(), ErrorCode::EmptySequence, "extract_gesturelet on empty sequence");
  FeatureSeries fs = build_feature_series(seq, layout);
  return gesturelet_at(fs, t, cfg);
}

/// One gesturelet per frame, order preserved.
inline std::vector<Gesturelet> extract_sequence(const SkeletonSequence& seq, const GestureletConfig& cfg,
                                                const SkeletonLayout& layout) {
  require(!seq.frames.empty(), ErrorCode::EmptySequence, "extract_sequence on empty sequence");
  FeatureSeries fs = build_feature_series(seq, layout);
  std::vector<Gesturelet> out;
  out.reserve(seq.frames.size());
  for (std::int64_t t = 0; t < fs.length(); ++t) out.push_back(gesturelet_at(fs, t, cfg));
  return out;
}

}  // namespace gk
