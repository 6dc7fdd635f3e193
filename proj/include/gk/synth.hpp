#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gk/error.hpp"
#include "gk/rand.hpp"
#include "gk/skeleton.hpp"

namespace gk {

/// Parametric 18-joint 2-D gesture generator; the stand-in training/evaluation
/// corpus for desk-scale runs. Every sequence is lead-in rest + active gesture
/// + lead-out rest with additive Gaussian coordinate noise, deterministic
/// under the seed.
struct SynthConfig {
  std::vector<std::string> classes = {"bowing", "clapping", "drinking", "jumping", "waving", "neutral"};
  int sequences_per_class = 60;
  double duration_mean = 48.0;   // active-gesture frames
  double duration_jitter = 10.0; // uniform +/- jitter on the active duration
  int rest_padding = 8;          // rest frames on each side of the gesture
  double noise_sigma = 0.012;    // coordinate noise, body height is ~1.7 units
  std::uint64_t seed = 7;

  void validate() const {
    require(!classes.empty(), ErrorCode::InvalidArgument, "no classes configured");
    for (const auto& c : classes)
      require(c == "bowing" || c == "clapping" || c == "drinking" || c == "jumping" ||
                  c == "waving" || c == "neutral",
              ErrorCode::ConfigError, "unknown synthetic class: " + c);
    require(sequences_per_class >= 1, ErrorCode::InvalidArgument, "sequences_per_class must be >= 1");
    require(duration_mean - duration_jitter >= 5.0, ErrorCode::InvalidArgument,
            "active duration must stay >= 5 frames");
    require(rest_padding >= 0, ErrorCode::InvalidArgument, "rest_padding must be >= 0");
    require(noise_sigma >= 0.0, ErrorCode::InvalidArgument, "noise_sigma must be >= 0");
  }
};

struct SynthDataset {
  std::vector<SkeletonSequence> sequences;              // label set on each
  std::vector<LabeledTimeline> timelines;               // full-span, one per sequence
};

namespace detail {

inline const std::array<std::array<double, 2>, 18>& synth_base_pose() {
  static const std::array<std::array<double, 2>, 18> base = {{
      {0.00, 1.62},   // nose
      {0.00, 1.45},   // neck
      {-0.18, 1.45},  // r_shoulder
      {-0.22, 1.18},  // r_elbow
      {-0.24, 0.93},  // r_wrist
      {0.18, 1.45},   // l_shoulder
      {0.22, 1.18},   // l_elbow
      {0.24, 0.93},   // l_wrist
      {-0.10, 0.95},  // r_hip
      {-0.11, 0.50},  // r_knee
      {-0.12, 0.06},  // r_ankle
      {0.10, 0.95},   // l_hip
      {0.11, 0.50},   // l_knee
      {0.12, 0.06},   // l_ankle
      {-0.03, 1.66},  // r_eye
      {0.03, 1.66},   // l_eye
      {-0.07, 1.63},  // r_ear
      {0.07, 1.63},   // l_ear
  }};
  return base;
}

inline double smoothstep(double u) {
  u = std::max(0.0, std::min(1.0, u));
  return u * u * (3.0 - 2.0 * u);
}

/// Ramp-hold-return envelope over [0,1]: 0 -> 1 during the first quarter,
/// hold, 1 -> 0 during the last quarter.
inline double rhr_envelope(double u) {
  if (u < 0.25) return smoothstep(u / 0.25);
  if (u > 0.75) return smoothstep((1.0 - u) / 0.25);
  return 1.0;
}

struct Pose18 {
  std::array<std::array<double, 2>, 18> p;

  void lerp_joint(int j, double tx, double ty, double w) {
    p[static_cast<std::size_t>(j)][0] += (tx - p[static_cast<std::size_t>(j)][0]) * w;
    p[static_cast<std::size_t>(j)][1] += (ty - p[static_cast<std::size_t>(j)][1]) * w;
  }
};

/// Pose of class `cls` at active-phase position u in [0,1); `params` carries
/// the per-sequence randomized shape constants.
struct GestureParams {
  double period = 16.0;      // oscillation period, frames
  double phase = 0.0;
  double sway_period = 60.0; // neutral sway
  double sway_phase = 0.0;
  std::array<double, 18> offset_x{};  // neutral per-sequence stance offsets
  std::array<double, 18> offset_y{};
};

inline Pose18 gesture_pose(const std::string& cls, double frame_in_active, double active_len,
                           const GestureParams& gp) {
  Pose18 pose{synth_base_pose()};
  const double u = active_len > 1.0 ? frame_in_active / (active_len - 1.0) : 0.0;
  const double env = rhr_envelope(u);
  const double osc = std::sin(2.0 * M_PI * frame_in_active / gp.period + gp.phase);

  if (cls == "waving") {
    // Right arm raised, forearm swinging sideways.
    const double wave = 0.15 * osc * env;
    pose.lerp_joint(4, -0.30 + wave, 1.58, env);
    pose.lerp_joint(3, -0.26 + 0.5 * wave, 1.33, env);
  } else if (cls == "clapping") {
    // Hands meet in front of the chest and bounce apart.
    const double gap = 0.05 + 0.14 * (0.5 + 0.5 * std::cos(2.0 * M_PI * frame_in_active / gp.period));
    pose.lerp_joint(4, -gap, 1.20, env);
    pose.lerp_joint(7, gap, 1.20, env);
    pose.lerp_joint(3, -0.5 * gap - 0.12, 1.20, env);
    pose.lerp_joint(6, 0.5 * gap + 0.12, 1.20, env);
  } else if (cls == "drinking") {
    // Right hand to the mouth, hold, and back.
    pose.lerp_joint(4, -0.04, 1.58, env);
    pose.lerp_joint(3, -0.18, 1.30, env);
  } else if (cls == "bowing") {
    // Upper body pitches forward around the hip center.
    const double phi = 0.9 * env;
    const double c = std::cos(phi), s = std::sin(phi);
    const double hx = 0.0, hy = 0.95;  // mid-hip of the base pose
    for (int j : {0, 1, 2, 3, 4, 5, 6, 7, 14, 15, 16, 17}) {
      const double dx = pose.p[static_cast<std::size_t>(j)][0] - hx;
      const double dy = pose.p[static_cast<std::size_t>(j)][1] - hy;
      pose.p[static_cast<std::size_t>(j)][0] = hx + c * dx + s * dy;
      pose.p[static_cast<std::size_t>(j)][1] = hy - s * dx + c * dy;
    }
  } else if (cls == "jumping") {
    // Hop cycles: crouch with planted ankles, then airborne rise.
    const double cyc = std::sin(2.0 * M_PI * frame_in_active / (1.5 * gp.period));
    if (cyc > 0.0) {
      const double rise = 0.12 * cyc * env;
      for (auto& pt : pose.p) pt[1] += rise;
    } else {
      const double crouch = 0.10 * -cyc * env;
      for (int j = 0; j < 18; ++j) {
        if (j == 10 || j == 13) continue;  // ankles stay planted
        if (j == 9 || j == 12) {           // knees: half drop, slight forward
          pose.p[static_cast<std::size_t>(j)][1] -= 0.5 * crouch;
          pose.p[static_cast<std::size_t>(j)][0] += (j == 9 ? -0.04 : 0.04) * (crouch / 0.10);
        } else {
          pose.p[static_cast<std::size_t>(j)][1] -= crouch;
        }
      }
    }
  } else if (cls == "neutral") {
    // Idle stance: per-sequence offsets plus a slow sway.
    const double sway = 0.015 * std::sin(2.0 * M_PI * frame_in_active / gp.sway_period + gp.sway_phase);
    for (int j = 0; j < 18; ++j) {
      pose.p[static_cast<std::size_t>(j)][0] += gp.offset_x[static_cast<std::size_t>(j)];
      pose.p[static_cast<std::size_t>(j)][1] += gp.offset_y[static_cast<std::size_t>(j)];
    }
    for (int j : {0, 1, 2, 3, 4, 5, 6, 7, 14, 15, 16, 17})
      pose.p[static_cast<std::size_t>(j)][0] += sway;
  }
  return pose;
}

}  // namespace detail

/// Generate one sequence of class `cls`. Exposed for targeted tests; most
/// callers use synth_gestures.
inline SkeletonSequence synth_sequence(const std::string& cls, const SynthConfig& cfg,
                                       std::mt19937_64& rng, std::string source_id) {
  const SkeletonLayout& layout = coco18_layout();
  const std::int64_t jitter = static_cast<std::int64_t>(cfg.duration_jitter);
  const std::int64_t active = static_cast<std::int64_t>(cfg.duration_mean) +
                              (jitter > 0 ? static_cast<std::int64_t>(rng() % (2 * jitter + 1)) - jitter : 0);
  const std::int64_t total = active + 2 * cfg.rest_padding;

  detail::GestureParams gp;
  gp.period = 14.0 + static_cast<double>(rng() % 5);  // 14..18 frames
  gp.phase = 0.0;
  gp.sway_period = 40.0 + static_cast<double>(rng() % 41);  // 40..80
  gp.sway_phase = 2.0 * M_PI * detail::uniform01(rng);
  for (int j = 0; j < 18; ++j) {
    gp.offset_x[static_cast<std::size_t>(j)] = 0.05 * (detail::uniform01(rng) - 0.5);
    gp.offset_y[static_cast<std::size_t>(j)] = 0.05 * (detail::uniform01(rng) - 0.5);
  }

  SkeletonSequence seq;
  seq.layout_ref = layout.name;
  seq.label = cls;
  seq.source_id = std::move(source_id);
  seq.frames.reserve(static_cast<std::size_t>(total));
  for (std::int64_t t = 0; t < total; ++t) {
    detail::Pose18 pose{detail::synth_base_pose()};
    if (cls == "neutral") {
      pose = detail::gesture_pose(cls, static_cast<double>(t), static_cast<double>(total), gp);
    } else if (t >= cfg.rest_padding && t < cfg.rest_padding + active) {
      pose = detail::gesture_pose(cls, static_cast<double>(t - cfg.rest_padding),
                                  static_cast<double>(active), gp);
    }
    SkeletonFrame f;
    f.frame_index = t;
    f.timestamp_s = static_cast<double>(t) / 30.0;
    f.dims = 2;
    f.joints.resize(36);
    f.confidence.assign(18, 1.0);
    f.valid.assign(18, true);
    for (int j = 0; j < 18; ++j) {
      f.joints[static_cast<std::size_t>(j) * 2 + 0] =
          pose.p[static_cast<std::size_t>(j)][0] + cfg.noise_sigma * detail::gauss(rng);
      f.joints[static_cast<std::size_t>(j) * 2 + 1] =
          pose.p[static_cast<std::size_t>(j)][1] + cfg.noise_sigma * detail::gauss(rng);
    }
    seq.frames.push_back(std::move(f));
  }
  return seq;
}

inline SynthDataset synth_gestures(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  SynthDataset ds;
  for (const auto& cls : cfg.classes) {
    for (int i = 0; i < cfg.sequences_per_class; ++i) {
      SkeletonSequence seq = synth_sequence(cls, cfg, rng, cls + "_" + std::to_string(i));
      LabeledTimeline tl;
      tl.length_frames = seq.length();
      tl.segments.push_back({cls, 0, seq.length() - 1});
      ds.sequences.push_back(std::move(seq));
      ds.timelines.push_back(std::move(tl));
    }
  }
  return ds;
}

}  // namespace gk
