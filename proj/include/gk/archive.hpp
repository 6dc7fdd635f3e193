#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "gk/classifier.hpp"
#include "gk/codebook.hpp"
#include "gk/detector.hpp"
#include "gk/digest.hpp"
#include "gk/error.hpp"
#include "gk/skeleton.hpp"

namespace gk {

/// Everything a detector needs, serialized as one versioned JSON file with
/// per-part content digests. format_version is 1.
struct ModelArchive {
  static constexpr int kFormatVersion = 1;

  SkeletonLayout layout;
  GestureletConfig features;
  int soft_m = 2;
  Codebook codebook;
  GestureModel model;
  DetectorVariant variant;

  OnlineDetector make_detector(std::int64_t person_id = 0) const {
    return OnlineDetector(layout, features, codebook, model, soft_m, variant, person_id);
  }
};

namespace detail {

inline nlohmann::json layout_to_json(const SkeletonLayout& l) {
  nlohmann::json j;
  j["name"] = l.name;
  j["joint_count"] = l.joint_count;
  j["dims"] = l.dims;
  j["joint_names"] = l.joint_names;
  j["hip_center"] = l.hip_center;
  auto trips = nlohmann::json::array();
  for (const auto& t : l.angle_triplets) trips.push_back({t[0], t[1], t[2]});
  j["angle_triplets"] = std::move(trips);
  j["oks_kappas"] = l.oks_kappas;
  return j;
}

inline SkeletonLayout layout_from_json(const nlohmann::json& j) {
  SkeletonLayout l;
  l.name = j.at("name").get<std::string>();
  l.joint_count = j.at("joint_count").get<int>();
  l.dims = j.at("dims").get<int>();
  l.joint_names = j.at("joint_names").get<std::vector<std::string>>();
  l.hip_center = j.at("hip_center").get<std::vector<int>>();
  for (const auto& t : j.at("angle_triplets"))
    l.angle_triplets.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
  l.oks_kappas = j.at("oks_kappas").get<std::vector<double>>();
  l.validate();
  return l;
}

inline std::string part_digest(const nlohmann::json& j) {
  Digest d;
  d.str(j.dump());
  return d.hex();
}

}  // namespace detail

inline nlohmann::json archive_to_json(const ModelArchive& a) {
  nlohmann::json j;
  j["format_version"] = ModelArchive::kFormatVersion;
  j["layout"] = detail::layout_to_json(a.layout);
  j["features"] = {{"alpha", a.features.alpha},
                   {"beta", a.features.beta},
                   {"gamma", a.features.gamma},
                   {"lag", a.features.lag},
                   {"soft_m", a.soft_m}};
  j["codebook"] = {{"k", a.codebook.k},
                   {"dim", a.codebook.dim},
                   {"seed", a.codebook.seed},
                   {"config_digest", a.codebook.config_digest},
                   {"centroids", a.codebook.centroids}};
  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t i = 0; i < a.model.classes.size(); ++i) {
    const auto& cm = a.model.per_class[i];
    classes.push_back({{"id", a.model.classes[i]},
                       {"weights", cm.weights},
                       {"bias", cm.bias},
                       {"theta", cm.theta},
                       {"calib_a", cm.calib_a},
                       {"calib_b", cm.calib_b}});
  }
  j["model"] = {{"classes", std::move(classes)},
                {"mean_train_length", a.model.mean_train_length},
                {"max_train_length", a.model.max_train_length},
                {"codebook_digest", a.model.codebook_digest},
                {"train_config_digest", a.model.train_config_digest}};
  j["variant"] = {{"kind", variant_name(a.variant.kind)},
                  {"trailing_quiet", a.variant.trailing_quiet},
                  {"augmentation", a.variant.augmentation},
                  {"neutral_class", a.variant.neutral_class}};
  j["digests"] = {{"layout", detail::part_digest(j["layout"])},
                  {"features", detail::part_digest(j["features"])},
                  {"codebook", detail::part_digest(j["codebook"])},
                  {"model", detail::part_digest(j["model"])},
                  {"variant", detail::part_digest(j["variant"])}};
  return j;
}

inline ModelArchive archive_from_json(const nlohmann::json& j) {
  require(j.contains("format_version"), ErrorCode::ParseError, "missing format_version");
  const int version = j.at("format_version").get<int>();
  require(version == ModelArchive::kFormatVersion, ErrorCode::VersionUnsupported,
          "archive format_version " + std::to_string(version) + " is not supported");

  const auto& digests = j.at("digests");
  for (const char* part : {"layout", "features", "codebook", "model", "variant"}) {
    const std::string stored = digests.at(part).get<std::string>();
    const std::string actual = detail::part_digest(j.at(part));
    require(stored == actual, ErrorCode::DigestMismatch,
            std::string("archive part '") + part + "' does not match its digest");
  }

  ModelArchive a;
  a.layout = detail::layout_from_json(j.at("layout"));
  const auto& fj = j.at("features");
  a.features.alpha = fj.at("alpha").get<double>();
  a.features.beta = fj.at("beta").get<double>();
  a.features.gamma = fj.at("gamma").get<double>();
  a.features.lag = fj.at("lag").get<int>();
  a.soft_m = fj.at("soft_m").get<int>();

  const auto& cj = j.at("codebook");
  a.codebook.k = cj.at("k").get<int>();
  a.codebook.dim = cj.at("dim").get<int>();
  a.codebook.seed = cj.at("seed").get<std::uint64_t>();
  a.codebook.config_digest = cj.at("config_digest").get<std::string>();
  a.codebook.centroids = cj.at("centroids").get<std::vector<double>>();
  require(a.codebook.centroids.size() ==
              static_cast<std::size_t>(a.codebook.k) * static_cast<std::size_t>(a.codebook.dim),
          ErrorCode::ParseError, "centroid array size mismatch");

  const auto& mj = j.at("model");
  for (const auto& cls : mj.at("classes")) {
    a.model.classes.push_back(cls.at("id").get<std::string>());
    ClassModel cm;
    cm.weights = cls.at("weights").get<std::vector<double>>();
    cm.bias = cls.at("bias").get<double>();
    cm.theta = cls.at("theta").get<double>();
    cm.calib_a = cls.at("calib_a").get<double>();
    cm.calib_b = cls.at("calib_b").get<double>();
    a.model.per_class.push_back(std::move(cm));
  }
  a.model.mean_train_length = mj.at("mean_train_length").get<double>();
  a.model.max_train_length = mj.at("max_train_length").get<std::int64_t>();
  a.model.codebook_digest = mj.at("codebook_digest").get<std::string>();
  a.model.train_config_digest = mj.at("train_config_digest").get<std::string>();

  const auto& vj = j.at("variant");
  const std::string kind = vj.at("kind").get<std::string>();
  if (kind == "vanilla")
    a.variant.kind = DetectorVariant::Kind::Vanilla;
  else if (kind == "generated")
    a.variant.kind = DetectorVariant::Kind::Generated;
  else if (kind == "neutral")
    a.variant.kind = DetectorVariant::Kind::Neutral;
  else
    fail(ErrorCode::ParseError, "unknown variant kind: " + kind);
  a.variant.trailing_quiet = vj.at("trailing_quiet").get<int>();
  a.variant.augmentation = vj.at("augmentation").get<bool>();
  a.variant.neutral_class = vj.at("neutral_class").get<std::string>();
  return a;
}

inline void save_model(const ModelArchive& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::ConfigError, "cannot open for writing: " + path);
  out << archive_to_json(a).dump(1) << '\n';
  require(out.good(), ErrorCode::ConfigError, "write failed: " + path);
}

inline ModelArchive load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::ConfigError, "cannot open model archive: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("model archive: ") + e.what());
  }
  return archive_from_json(j);
}

}  // namespace gk
