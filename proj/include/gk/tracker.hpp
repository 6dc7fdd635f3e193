#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gk/error.hpp"
#include "gk/skeleton.hpp"

namespace gk {

/// Intersection over union of two axis-aligned boxes. Zero-measure union
/// (two coincident degenerate boxes) is defined as 1.
inline double iou(const Box& a, const Box& b) {
  require(a.dims() == b.dims(), ErrorCode::DimensionMismatch, "iou boxes differ in dimension");
  double inter = 1.0;
  for (int ax = 0; ax < a.dims(); ++ax) {
    const double lo = std::max(a.lo[ax], b.lo[ax]);
    const double hi = std::min(a.hi[ax], b.hi[ax]);
    if (hi < lo) return 0.0;
    inter *= hi - lo;
  }
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return a.lo == b.lo && a.hi == b.hi ? 1.0 : 0.0;
  return inter / uni;
}

namespace detail {

/// Area-like scale of a box: area for 2-D, volume^(2/3) for 3-D.
inline double scale_sq(const Box& b) {
  if (b.dims() == 2) return b.area();
  return std::pow(std::max(b.area(), 0.0), 2.0 / 3.0);
}

}  // namespace detail

/// Object keypoint similarity: mean over jointly valid joints of
/// exp(-d^2 / (2 s^2 kappa^2)), where s^2 is the area of `a`'s bounding box
/// (the established-track side).
inline double oks(const SkeletonFrame& a, const SkeletonFrame& b, const SkeletonLayout& layout) {
  a.validate(layout);
  b.validate(layout);
  const double s_sq = std::max(detail::scale_sq(bounding_box(a)), 1e-12);
  double sum = 0.0;
  int common = 0;
  for (int j = 0; j < layout.joint_count; ++j) {
    if (!a.valid[j] || !b.valid[j]) continue;
    double d_sq = 0.0;
    for (int ax = 0; ax < layout.dims; ++ax) {
      const double d = a.coord(j, ax) - b.coord(j, ax);
      d_sq += d * d;
    }
    const double kappa = layout.oks_kappas[static_cast<std::size_t>(j)];
    sum += std::exp(-d_sq / (2.0 * s_sq * kappa * kappa));
    ++common;
  }
  require(common > 0, ErrorCode::NoCommonJoints, "oks needs at least one jointly valid joint");
  return sum / static_cast<double>(common);
}

/// Minimum-cost assignment (Hungarian algorithm, O(n^3) shortest augmenting
/// paths with potentials). Rectangular inputs are padded to square with a
/// constant; with all dummy cells equal, the optimal assignment among real
/// cells is unaffected by the padding value. Returns (row, col) pairs for
/// real cells only, every index of the smaller side matched exactly once.
inline std::vector<std::pair<int, int>> hungarian(const std::vector<std::vector<double>>& cost) {
  const int rows = static_cast<int>(cost.size());
  if (rows == 0) return {};
  const int cols = static_cast<int>(cost.front().size());
  if (cols == 0) return {};
  for (const auto& row : cost) {
    require(static_cast<int>(row.size()) == cols, ErrorCode::DimensionMismatch,
            "cost matrix rows differ in length");
    for (double v : row)
      require(std::isfinite(v), ErrorCode::NonFiniteCost, "cost matrix must be finite");
  }
  const int n = std::max(rows, cols);
  const auto at = [&](int r, int c) -> double {
    return (r < rows && c < cols) ? cost[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] : 0.0;
  };

  const double kInf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation; way[c] backtracks the augmenting path.
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> match(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
  for (int r = 1; r <= n; ++r) {
    match[0] = r;
    int j0 = 0;
    std::vector<double> min_v(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<bool> used(static_cast<std::size_t>(n) + 1, false);
    do {
      used[static_cast<std::size_t>(j0)] = true;
      const int i0 = match[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = at(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < min_v[static_cast<std::size_t>(j)]) {
          min_v[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (min_v[static_cast<std::size_t>(j)] < delta) {
          delta = min_v[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          min_v[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::pair<int, int>> out;
  for (int j = 1; j <= n; ++j) {
    const int r = match[static_cast<std::size_t>(j)];
    if (r >= 1 && r <= rows && j <= cols) out.emplace_back(r - 1, j - 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct TrackerConfig {
  enum class Similarity { IoU, OKS };
  Similarity similarity = Similarity::IoU;
  double gate = -1.0;  // minimum similarity to accept a match; <0 selects 0.3 (IoU) / 0.5 (OKS)
  int max_misses = 5;
  int min_hits = 3;

  double resolved_gate() const {
    if (gate >= 0.0) return gate;
    return similarity == Similarity::IoU ? 0.3 : 0.5;
  }

  void validate() const {
    require(resolved_gate() >= 0.0 && resolved_gate() <= 1.0, ErrorCode::InvalidArgument,
            "gate must be in [0,1]");
    require(max_misses >= 1 && min_hits >= 1, ErrorCode::InvalidArgument,
            "max_misses and min_hits must be >= 1");
  }
};

struct Track {
  std::int64_t id = 0;
  SkeletonFrame last_frame;
  int hits = 1;
  int misses = 0;
  bool confirmed = false;
};

/// Frame-to-frame association of skeleton detections to persistent tracks via
/// minimum-cost assignment on (1 - similarity), with gating, tentative-track
/// birth and miss-based death. Single-writer.
class Tracker {
 public:
  Tracker(TrackerConfig cfg, const SkeletonLayout& layout) : cfg_(cfg), layout_(&layout) {
    cfg_.validate();
  }

  /// Associates detections to tracks; returns one track id per detection
  /// (new ids for unmatched detections). Dead tracks are pruned.
  std::vector<std::int64_t> step(const std::vector<SkeletonFrame>& detections) {
    const double gate = cfg_.resolved_gate();
    const int n_tracks = static_cast<int>(tracks_.size());
    const int n_dets = static_cast<int>(detections.size());
    std::vector<std::int64_t> det_track(static_cast<std::size_t>(n_dets), -1);
    std::vector<bool> track_matched(static_cast<std::size_t>(n_tracks), false);

    if (n_tracks > 0 && n_dets > 0) {
      std::vector<std::vector<double>> sim(static_cast<std::size_t>(n_tracks),
                                           std::vector<double>(static_cast<std::size_t>(n_dets), 0.0));
      std::vector<std::vector<double>> cost = sim;
      for (int i = 0; i < n_tracks; ++i) {
        for (int j = 0; j < n_dets; ++j) {
          const double s = similarity(tracks_[static_cast<std::size_t>(i)].last_frame,
                                      detections[static_cast<std::size_t>(j)]);
          sim[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
          cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1.0 - s;
        }
      }
      for (const auto& [ti, dj] : hungarian(cost)) {
        if (sim[static_cast<std::size_t>(ti)][static_cast<std::size_t>(dj)] < gate) continue;
        auto& tr = tracks_[static_cast<std::size_t>(ti)];
        tr.last_frame = detections[static_cast<std::size_t>(dj)];
        ++tr.hits;
        tr.misses = 0;
        if (tr.hits >= cfg_.min_hits) tr.confirmed = true;
        track_matched[static_cast<std::size_t>(ti)] = true;
        det_track[static_cast<std::size_t>(dj)] = tr.id;
      }
    }

    for (int i = 0; i < n_tracks; ++i)
      if (!track_matched[static_cast<std::size_t>(i)]) ++tracks_[static_cast<std::size_t>(i)].misses;

    for (int j = 0; j < n_dets; ++j) {
      if (det_track[static_cast<std::size_t>(j)] >= 0) continue;
      Track t;
      t.id = next_id_++;
      t.last_frame = detections[static_cast<std::size_t>(j)];
      t.confirmed = cfg_.min_hits <= 1;
      tracks_.push_back(std::move(t));
      det_track[static_cast<std::size_t>(j)] = tracks_.back().id;
    }

    std::erase_if(tracks_, [this](const Track& t) { return t.misses >= cfg_.max_misses; });
    return det_track;
  }

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackerConfig& config() const { return cfg_; }

 private:
  double similarity(const SkeletonFrame& a, const SkeletonFrame& b) const {
    if (cfg_.similarity == TrackerConfig::Similarity::IoU)
      return iou(bounding_box(a), bounding_box(b));
    return oks(a, b, *layout_);
  }

  TrackerConfig cfg_;
  const SkeletonLayout* layout_;
  std::vector<Track> tracks_;
  std::int64_t next_id_ = 0;
};

}  // namespace gk
