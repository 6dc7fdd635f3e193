#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gk/error.hpp"
#include "gk/skeleton.hpp"

namespace gk {

/// Per-frame outcome of comparing a prediction timeline against ground truth
/// for one class. Positive ground-truth frames are one of {TP, Us, Ue, F, D};
/// negative frames one of {TN, Os, Oe, M, I}.
enum class FrameCat : std::uint8_t {
  TN,  // true negative
  TP,  // true positive
  Us,  // underfill at event start
  Ue,  // underfill at event end
  F,   // fragmentation gap inside a detected event
  D,   // deletion: event entirely missed
  Os,  // overfill before the event
  Oe,  // overfill after the event
  M,   // merge: prediction bridging two events
  I,   // insertion: prediction with no event overlap
};

struct CategoryCounts {
  std::int64_t tp = 0, us = 0, ue = 0, f = 0, d = 0;
  std::int64_t tn = 0, os = 0, oe = 0, m = 0, i = 0;

  std::int64_t positives() const { return tp + us + ue + f + d; }
  std::int64_t negatives() const { return tn + os + oe + m + i; }
};

struct ClassRates {
  // Positive-side rates (fractions of ground-truth positive frames).
  std::optional<double> tpr, usr, uer, fr, dr;
  // Negative-side rates (fractions of ground-truth negative frames).
  std::optional<double> tnr, osr, oer, mr, ir;
  CategoryCounts counts;
};

namespace detail {

struct Interval {
  std::int64_t start = 0, end = 0;  // inclusive
};

inline std::vector<bool> binary_timeline(const LabeledTimeline& tl, const std::string& cls) {
  std::vector<bool> b(static_cast<std::size_t>(tl.length_frames), false);
  for (const auto& s : tl.segments) {
    if (s.class_id != cls) continue;
    for (std::int64_t t = s.start_frame; t <= s.end_frame; ++t) b[static_cast<std::size_t>(t)] = true;
  }
  return b;
}

inline std::vector<Interval> runs(const std::vector<bool>& b) {
  std::vector<Interval> out;
  std::int64_t n = static_cast<std::int64_t>(b.size());
  for (std::int64_t t = 0; t < n; ++t) {
    if (!b[static_cast<std::size_t>(t)]) continue;
    std::int64_t s = t;
    while (t + 1 < n && b[static_cast<std::size_t>(t + 1)]) ++t;
    out.push_back({s, t});
  }
  return out;
}

}  // namespace detail

/// Frame-by-frame categorization for one class. Ground-truth events touched by
/// a prediction split into Us / TP / F / Ue; untouched events are deletions.
/// Predictions with no ground-truth overlap are insertions; otherwise their
/// negative frames split into Os / M / Oe around the bridged events.
inline std::vector<FrameCat> categorize(const LabeledTimeline& gt, const LabeledTimeline& pred,
                                        const std::string& cls) {
  require(gt.length_frames == pred.length_frames, ErrorCode::LengthMismatch,
          "ground-truth and prediction timelines differ in length");
  const auto g = detail::binary_timeline(gt, cls);
  const auto p = detail::binary_timeline(pred, cls);
  const std::int64_t n = gt.length_frames;
  std::vector<FrameCat> cat(static_cast<std::size_t>(n), FrameCat::TN);

  for (std::int64_t t = 0; t < n; ++t) {
    if (g[static_cast<std::size_t>(t)])
      cat[static_cast<std::size_t>(t)] = p[static_cast<std::size_t>(t)] ? FrameCat::TP : FrameCat::D;
    else if (p[static_cast<std::size_t>(t)])
      cat[static_cast<std::size_t>(t)] = FrameCat::I;
  }

  // Positive side: refine non-TP frames of each ground-truth event.
  for (const auto& ev : detail::runs(g)) {
    std::int64_t first_tp = -1, last_tp = -1;
    for (std::int64_t t = ev.start; t <= ev.end; ++t) {
      if (cat[static_cast<std::size_t>(t)] == FrameCat::TP) {
        if (first_tp < 0) first_tp = t;
        last_tp = t;
      }
    }
    if (first_tp < 0) continue;  // untouched event: frames stay D (deletion)
    for (std::int64_t t = ev.start; t <= ev.end; ++t) {
      auto& c = cat[static_cast<std::size_t>(t)];
      if (c == FrameCat::TP) continue;
      c = t < first_tp ? FrameCat::Us : (t > last_tp ? FrameCat::Ue : FrameCat::F);
    }
  }

  // Negative side: refine predicted frames of each prediction event.
  for (const auto& ev : detail::runs(p)) {
    std::int64_t first_gt = -1, last_gt = -1;
    for (std::int64_t t = ev.start; t <= ev.end; ++t) {
      if (g[static_cast<std::size_t>(t)]) {
        if (first_gt < 0) first_gt = t;
        last_gt = t;
      }
    }
    if (first_gt < 0) continue;  // no overlap: frames stay I (insertion)
    for (std::int64_t t = ev.start; t <= ev.end; ++t) {
      auto& c = cat[static_cast<std::size_t>(t)];
      if (c != FrameCat::I) continue;
      c = t < first_gt ? FrameCat::Os : (t > last_gt ? FrameCat::Oe : FrameCat::M);
    }
  }

  return cat;
}

inline CategoryCounts count_categories(const std::vector<FrameCat>& cats) {
  CategoryCounts c;
  for (FrameCat fc : cats) {
    switch (fc) {
      case FrameCat::TP: ++c.tp; break;
      case FrameCat::Us: ++c.us; break;
      case FrameCat::Ue: ++c.ue; break;
      case FrameCat::F: ++c.f; break;
      case FrameCat::D: ++c.d; break;
      case FrameCat::TN: ++c.tn; break;
      case FrameCat::Os: ++c.os; break;
      case FrameCat::Oe: ++c.oe; break;
      case FrameCat::M: ++c.m; break;
      case FrameCat::I: ++c.i; break;
    }
  }
  return c;
}

/// Category counts to rates. A side with zero ground-truth frames reports
/// absent rates rather than zeros.
inline ClassRates rates(const CategoryCounts& counts) {
  ClassRates r;
  r.counts = counts;
  const double pos = static_cast<double>(counts.positives());
  const double neg = static_cast<double>(counts.negatives());
  if (pos > 0) {
    r.tpr = counts.tp / pos;
    r.usr = counts.us / pos;
    r.uer = counts.ue / pos;
    r.fr = counts.f / pos;
    r.dr = counts.d / pos;
  }
  if (neg > 0) {
    r.tnr = counts.tn / neg;
    r.osr = counts.os / neg;
    r.oer = counts.oe / neg;
    r.mr = counts.m / neg;
    r.ir = counts.i / neg;
  }
  return r;
}

inline ClassRates rates(const LabeledTimeline& gt, const LabeledTimeline& pred, const std::string& cls) {
  return rates(count_categories(categorize(gt, pred, cls)));
}

/// Segment-based evaluation of a detector run: per-class rate decomposition
/// plus run metadata. Rates are averages over evaluation repetitions; counts
/// are totals.
struct MetricsReport {
  struct ClassEntry {
    ClassRates mean;              // rates averaged over repetitions
    CategoryCounts total_counts;  // summed over repetitions
    int repetitions_with_positives = 0;
    int repetitions_with_negatives = 0;
  };

  std::map<std::string, ClassEntry> per_class;
  std::uint64_t seed = 0;
  int repetitions = 0;
  std::int64_t total_frames = 0;
  std::string variant;
};

}  // namespace gk
