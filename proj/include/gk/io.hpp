#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gk/error.hpp"
#include "gk/skeleton.hpp"

namespace gk {

/// One person observation inside a stream frame.
struct PersonObs {
  std::vector<double> joints;  // flat J*D
  std::vector<double> conf;    // J
  std::optional<std::int64_t> id;
};

/// One line of the skeleton stream: a timestamp plus all persons in view.
struct StreamFrame {
  double t = 0.0;
  std::vector<PersonObs> persons;
};

inline SkeletonFrame to_skeleton_frame(const PersonObs& p, const SkeletonLayout& layout,
                                       std::int64_t frame_index, double timestamp) {
  SkeletonFrame f;
  f.frame_index = frame_index;
  f.timestamp_s = timestamp;
  f.dims = layout.dims;
  f.joints = p.joints;
  f.confidence = p.conf;
  f.valid.resize(p.conf.size());
  for (std::size_t j = 0; j < p.conf.size(); ++j) f.valid[j] = p.conf[j] > 0.0;
  f.validate(layout);
  return f;
}

/// Incremental reader for the line-delimited skeleton stream. One record per
/// line: {"t": seconds, "persons": [{"joints": [[x,y],...], "conf": [...],
/// "id": optional}]}. Joint counts are validated against the layout when one
/// is given. Errors carry the 1-based line number.
class StreamReader {
 public:
  explicit StreamReader(std::istream& in, const SkeletonLayout* layout = nullptr)
      : in_(&in), layout_(layout) {}

  bool next(StreamFrame& out) {
    std::string line;
    while (std::getline(*in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      out = parse_line(line);
      return true;
    }
    return false;
  }

  std::int64_t line_number() const { return line_no_; }

 private:
  StreamFrame parse_line(const std::string& line) const {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no_) + ": " + e.what());
    }
    StreamFrame f;
    try {
      f.t = j.at("t").get<double>();
      for (const auto& pj : j.at("persons")) {
        PersonObs p;
        const auto& joints = pj.at("joints");
        for (const auto& pt : joints) {
          require(pt.is_array() && (pt.size() == 2 || pt.size() == 3), ErrorCode::ParseError,
                  "line " + std::to_string(line_no_) + ": joint must be [x,y] or [x,y,z]");
          for (const auto& v : pt) p.joints.push_back(v.get<double>());
        }
        p.conf = pj.at("conf").get<std::vector<double>>();
        if (pj.contains("id")) p.id = pj.at("id").get<std::int64_t>();
        require(p.conf.size() == joints.size(), ErrorCode::ParseError,
                "line " + std::to_string(line_no_) + ": conf/joints count mismatch");
        if (layout_) {
          require(static_cast<int>(joints.size()) == layout_->joint_count, ErrorCode::LayoutMismatch,
                  "line " + std::to_string(line_no_) + ": expected " +
                      std::to_string(layout_->joint_count) + " joints, got " +
                      std::to_string(joints.size()));
          require(p.joints.size() ==
                      static_cast<std::size_t>(layout_->joint_count) * layout_->dims,
                  ErrorCode::LayoutMismatch,
                  "line " + std::to_string(line_no_) + ": joint dimensionality mismatch");
        }
        f.persons.push_back(std::move(p));
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no_) + ": " + e.what());
    }
    return f;
  }

  std::istream* in_;
  const SkeletonLayout* layout_;
  std::int64_t line_no_ = 0;
};

inline std::vector<StreamFrame> parse_stream(std::istream& in, const SkeletonLayout* layout = nullptr) {
  StreamReader reader(in, layout);
  std::vector<StreamFrame> frames;
  StreamFrame f;
  while (reader.next(f)) frames.push_back(std::move(f));
  return frames;
}

inline void write_stream_frame(std::ostream& out, const StreamFrame& f, int dims) {
  nlohmann::json j;
  j["t"] = f.t;
  j["persons"] = nlohmann::json::array();
  for (const auto& p : f.persons) {
    nlohmann::json pj;
    auto joints = nlohmann::json::array();
    for (std::size_t i = 0; i < p.joints.size(); i += static_cast<std::size_t>(dims)) {
      auto pt = nlohmann::json::array();
      for (int ax = 0; ax < dims; ++ax) pt.push_back(p.joints[i + static_cast<std::size_t>(ax)]);
      joints.push_back(std::move(pt));
    }
    pj["joints"] = std::move(joints);
    pj["conf"] = p.conf;
    if (p.id) pj["id"] = *p.id;
    j["persons"].push_back(std::move(pj));
  }
  out << j.dump() << '\n';
}

inline void write_stream(std::ostream& out, const std::vector<StreamFrame>& frames, int dims) {
  for (const auto& f : frames) write_stream_frame(out, f, dims);
}

/// Single-person convenience: a sequence as a stream (confidence carried over).
inline void write_sequence_as_stream(std::ostream& out, const SkeletonSequence& seq) {
  for (const auto& fr : seq.frames) {
    StreamFrame sf;
    sf.t = fr.timestamp_s;
    PersonObs p;
    p.joints = fr.joints;
    p.conf = fr.confidence;
    for (std::size_t j = 0; j < fr.confidence.size(); ++j)
      if (!fr.valid[j]) p.conf[j] = 0.0;
    sf.persons.push_back(std::move(p));
    write_stream_frame(out, sf, fr.dims);
  }
}

inline SkeletonSequence read_sequence_from_stream(std::istream& in, const SkeletonLayout& layout,
                                                  std::optional<std::string> label = std::nullopt,
                                                  std::string source_id = {}) {
  SkeletonSequence seq;
  seq.layout_ref = layout.name;
  seq.label = std::move(label);
  seq.source_id = std::move(source_id);
  StreamReader reader(in, &layout);
  StreamFrame f;
  std::int64_t idx = 0;
  while (reader.next(f)) {
    require(f.persons.size() == 1, ErrorCode::ParseError,
            "line " + std::to_string(reader.line_number()) + ": expected exactly one person");
    seq.frames.push_back(to_skeleton_frame(f.persons.front(), layout, idx++, f.t));
  }
  seq.validate();
  return seq;
}

namespace detail {

inline std::string read_nonempty_line(std::istream& in, std::int64_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") != std::string::npos) return line;
  }
  fail(ErrorCode::TruncatedFile, "unexpected end of file at line " + std::to_string(line_no));
}

}  // namespace detail

/// Ground-truth record list: {"class", "start_frame", "end_frame"} per line.
inline LabeledTimeline read_ground_truth(std::istream& in, std::int64_t length_frames) {
  LabeledTimeline tl;
  tl.length_frames = length_frames;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      tl.segments.push_back({j.at("class").get<std::string>(), j.at("start_frame").get<std::int64_t>(),
                             j.at("end_frame").get<std::int64_t>()});
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  tl.validate();
  return tl;
}

inline void write_ground_truth(std::ostream& out, const LabeledTimeline& tl) {
  for (const auto& s : tl.segments) {
    nlohmann::json j{{"class", s.class_id}, {"start_frame", s.start_frame}, {"end_frame", s.end_frame}};
    out << j.dump() << '\n';
  }
}

/// Parser for the NTU .skeleton text layout: frame count; per frame a body
/// count, then per body a header line, the joint count and one line per joint
/// whose first three floats are x, y, z (trailing values ignored). Returns
/// the 25-joint 3-D sequence of the body present in the most frames.
inline SkeletonSequence parse_ntu_skeleton(std::istream& in, std::string source_id = {}) {
  const SkeletonLayout& layout = ntu25_layout();
  std::int64_t line_no = 0;

  const auto parse_int = [&](const std::string& line, ErrorCode code) -> std::int64_t {
    std::istringstream ss(line);
    std::int64_t v;
    if (!(ss >> v)) fail(code, "expected an integer at line " + std::to_string(line_no));
    return v;
  };

  std::string line = detail::read_nonempty_line(in, line_no);
  const std::int64_t frame_count = parse_int(line, ErrorCode::MalformedHeader);
  require(frame_count >= 0, ErrorCode::MalformedHeader, "negative frame count");

  struct BodyTrack {
    std::vector<SkeletonFrame> frames;
  };
  std::map<std::string, BodyTrack> bodies;

  for (std::int64_t t = 0; t < frame_count; ++t) {
    line = detail::read_nonempty_line(in, line_no);
    const std::int64_t body_count = parse_int(line, ErrorCode::MalformedHeader);
    require(body_count >= 0, ErrorCode::MalformedHeader, "negative body count");
    for (std::int64_t b = 0; b < body_count; ++b) {
      line = detail::read_nonempty_line(in, line_no);  // body header; first token is the body id
      std::istringstream hs(line);
      std::string body_id;
      if (!(hs >> body_id)) fail(ErrorCode::MalformedHeader, "empty body header at line " + std::to_string(line_no));
      line = detail::read_nonempty_line(in, line_no);
      const std::int64_t joint_count = parse_int(line, ErrorCode::MalformedHeader);
      require(joint_count == layout.joint_count, ErrorCode::LayoutMismatch,
              "expected 25 joints, got " + std::to_string(joint_count) + " at line " +
                  std::to_string(line_no));
      SkeletonFrame f;
      f.frame_index = t;
      f.timestamp_s = static_cast<double>(t) / 30.0;
      f.dims = 3;
      f.joints.resize(static_cast<std::size_t>(joint_count) * 3);
      f.confidence.assign(static_cast<std::size_t>(joint_count), 1.0);
      f.valid.assign(static_cast<std::size_t>(joint_count), true);
      for (std::int64_t j = 0; j < joint_count; ++j) {
        line = detail::read_nonempty_line(in, line_no);
        std::istringstream js(line);
        double x, y, z;
        if (!(js >> x >> y >> z))
          fail(ErrorCode::TruncatedFile,
               "joint line with fewer than 3 floats at line " + std::to_string(line_no));
        f.joints[static_cast<std::size_t>(j) * 3 + 0] = x;
        f.joints[static_cast<std::size_t>(j) * 3 + 1] = y;
        f.joints[static_cast<std::size_t>(j) * 3 + 2] = z;
      }
      bodies[body_id].frames.push_back(std::move(f));
    }
  }

  SkeletonSequence seq;
  seq.layout_ref = layout.name;
  seq.source_id = std::move(source_id);
  const BodyTrack* best = nullptr;
  std::string best_id;
  for (const auto& [id, track] : bodies) {
    if (!best || track.frames.size() > best->frames.size()) {
      best = &track;
      best_id = id;
    }
  }
  if (best) seq.frames = best->frames;
  seq.validate();
  return seq;
}

/// Writer matching parse_ntu_skeleton, used for round-trip checks and to
/// export synthetic data in NTU form.
inline void write_ntu_skeleton(std::ostream& out, const SkeletonSequence& seq,
                               const std::string& body_id = "72057594037931101") {
  out << seq.frames.size() << '\n';
  for (const auto& f : seq.frames) {
    out << 1 << '\n';
    out << body_id << " 0 1 1 1 1 0 0 0 0.0" << '\n';
    out << f.joint_count() << '\n';
    char buf[128];
    for (int j = 0; j < f.joint_count(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g 0 0 0 0 1 0 0 0 2", f.coord(j, 0),
                    f.coord(j, 1), f.coord(j, 2));
      out << buf << '\n';
    }
  }
}

}  // namespace gk
