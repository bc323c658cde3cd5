#include "relpose/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "relpose/bench.hpp"
#include "relpose/synth.hpp"

namespace relpose {

// ---------------------------------------------------------------------------
// JsonReader

void JsonReader::fail(const std::string& message) const {
  throw ParseError(path_ + ": " + message);
}

JsonReader JsonReader::operator[](std::string_view key) const {
  if (!value_->is_object()) fail("expected an object");
  const auto it = value_->find(std::string(key));
  if (it == value_->end()) throw ParseError(path_ + "." + std::string(key) + ": missing field");
  return {*it, path_ + "." + std::string(key)};
}

JsonReader JsonReader::operator[](std::size_t index) const {
  if (!value_->is_array()) fail("expected an array");
  if (index >= value_->size()) fail("index " + std::to_string(index) + " out of range");
  return {(*value_)[index], path_ + "[" + std::to_string(index) + "]"};
}

std::optional<JsonReader> JsonReader::find(std::string_view key) const {
  if (!value_->is_object()) fail("expected an object");
  const auto it = value_->find(std::string(key));
  if (it == value_->end() || it->is_null()) return std::nullopt;
  return JsonReader(*it, path_ + "." + std::string(key));
}

bool JsonReader::has(std::string_view key) const { return find(key).has_value(); }

std::size_t JsonReader::size() const {
  if (!value_->is_array()) fail("expected an array");
  return value_->size();
}

double JsonReader::number() const {
  if (!value_->is_number()) fail("expected a number");
  return value_->get<double>();
}

std::int64_t JsonReader::integer() const {
  if (!value_->is_number_integer()) fail("expected an integer");
  return value_->get<std::int64_t>();
}

std::uint64_t JsonReader::unsigned_integer() const {
  if (!value_->is_number_integer() || (value_->is_number_integer() && !value_->is_number_unsigned() &&
                                       value_->get<std::int64_t>() < 0)) {
    fail("expected a non-negative integer");
  }
  return value_->get<std::uint64_t>();
}

bool JsonReader::boolean() const {
  if (!value_->is_boolean()) fail("expected a boolean");
  return value_->get<bool>();
}

std::string JsonReader::string() const {
  if (!value_->is_string()) fail("expected a string");
  return value_->get<std::string>();
}

std::vector<double> JsonReader::numbers() const {
  std::vector<double> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i].number());
  return out;
}

Vec3 JsonReader::vec3() const {
  if (!value_->is_array() || value_->size() != 3) fail("expected 3 numbers");
  const auto v = numbers();
  return {v[0], v[1], v[2]};
}

void JsonReader::reject_unknown(std::initializer_list<std::string_view> allowed) const {
  if (!value_->is_object()) fail("expected an object");
  for (const auto& item : value_->items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ParseError(path_ + "." + item.key() + ": unknown field");
    }
  }
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json candidates_json(const std::vector<Candidate>& cands) {
  Json out = Json::array();
  for (const Candidate& c : cands) out.push_back(Json::array({c.source_index, c.target_index}));
  return out;
}

std::vector<Candidate> candidates_from_json(const JsonReader& j) {
  std::vector<Candidate> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const JsonReader pair = j[i];
    if (pair.size() != 2) pair.fail("expected [source_index, target_index]");
    out.push_back({static_cast<std::size_t>(pair[0].unsigned_integer()),
                   static_cast<std::size_t>(pair[1].unsigned_integer())});
  }
  return out;
}

template <typename T>
void read_optional(const JsonReader& j, std::string_view key, T& field) {
  const auto v = j.find(key);
  if (!v) return;
  if constexpr (std::is_same_v<T, double>) {
    field = v->number();
  } else if constexpr (std::is_same_v<T, bool>) {
    field = v->boolean();
  } else if constexpr (std::is_same_v<T, int>) {
    field = static_cast<int>(v->integer());
  } else if constexpr (std::is_same_v<T, std::size_t>) {
    field = static_cast<std::size_t>(v->unsigned_integer());
  } else {
    static_assert(sizeof(T) == 0, "unsupported field type");
  }
}

}  // namespace

Json to_json(const KeypointSet& set) {
  Json points = Json::array();
  for (const Keypoint& kp : set) {
    points.push_back({{"p", vec_json(kp.position)},
                      {"n", vec_json(kp.normal)},
                      {"f", std::vector<double>(kp.descriptor.data(),
                                                kp.descriptor.data() + kp.descriptor.size())}});
  }
  return {{"id", set.id()}, {"k", set.descriptor_length()}, {"points", std::move(points)}};
}

KeypointSet keypoint_set_from_json(const JsonReader& j) {
  j.reject_unknown({"id", "k", "points"});
  const auto k = static_cast<std::size_t>(j["k"].unsigned_integer());
  const JsonReader pts = j["points"];
  std::vector<Keypoint> points;
  points.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const JsonReader p = pts[i];
    p.reject_unknown({"p", "n", "f"});
    const auto f = p["f"].numbers();
    if (f.size() != k) p["f"].fail("expected " + std::to_string(k) + " numbers");
    Keypoint kp;
    kp.position = p["p"].vec3();
    kp.normal = p["n"].vec3();
    kp.descriptor = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    points.push_back(std::move(kp));
  }
  try {
    return {j["id"].string(), std::move(points), k};
  } catch (const InvalidArgument& e) {
    j.fail(e.what());
  }
}

Json to_json(const RigidTransform& t) {
  Json r = Json::array();
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) r.push_back(t.rotation()(i, k));
  }
  return {{"R", std::move(r)}, {"t", vec_json(t.translation())}};
}

RigidTransform transform_from_json(const JsonReader& j) {
  j.reject_unknown({"R", "t"});
  const auto r = j["R"].numbers();
  if (r.size() != 9) j["R"].fail("expected 9 row-major numbers");
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) m(i, k) = r[static_cast<std::size_t>(3 * i + k)];
  }
  try {
    return {m, j["t"].vec3()};
  } catch (const InvalidArgument& e) {
    j["R"].fail(e.what());
  }
}

Json to_json(const ConsistencyParams& g) {
  return {{"gamma1", g.gamma1}, {"gamma2", g.gamma2}, {"gamma3", g.gamma3},
          {"gamma4", g.gamma4}, {"gamma5", g.gamma5}};
}

ConsistencyParams gamma_from_json(const JsonReader& j) {
  j.reject_unknown({"gamma1", "gamma2", "gamma3", "gamma4", "gamma5"});
  ConsistencyParams g{j["gamma1"].number(), j["gamma2"].number(), j["gamma3"].number(),
                      j["gamma4"].number(), j["gamma5"].number()};
  try {
    g.validate();
  } catch (const InvalidArgument& e) {
    j.fail(e.what());
  }
  return g;
}

Json to_json(const SolverConfig& c) {
  Json j = {{"delta", c.delta},
            {"alpha", c.alpha},
            {"epsilon", c.epsilon},
            {"outer_iters", c.outer_iters},
            {"irls_iters", c.irls_iters},
            {"power_iters", c.power_iters},
            {"power_tol", c.power_tol},
            {"prune_threshold", c.prune_threshold},
            {"max_candidates", c.max_candidates},
            {"report_fraction", c.report_fraction},
            {"mode", to_string(c.mode)}};
  if (c.per_iter_gammas) {
    Json list = Json::array();
    for (const auto& g : *c.per_iter_gammas) list.push_back(to_json(g));
    j["per_iter_gammas"] = std::move(list);
  }
  return j;
}

SolverConfig config_from_json(const JsonReader& j) {
  j.reject_unknown({"delta", "alpha", "epsilon", "outer_iters", "irls_iters", "power_iters",
                    "power_tol", "prune_threshold", "max_candidates", "report_fraction", "mode",
                    "per_iter_gammas"});
  SolverConfig c;
  read_optional(j, "delta", c.delta);
  read_optional(j, "alpha", c.alpha);
  read_optional(j, "epsilon", c.epsilon);
  read_optional(j, "outer_iters", c.outer_iters);
  read_optional(j, "irls_iters", c.irls_iters);
  read_optional(j, "power_iters", c.power_iters);
  read_optional(j, "power_tol", c.power_tol);
  read_optional(j, "prune_threshold", c.prune_threshold);
  read_optional(j, "max_candidates", c.max_candidates);
  read_optional(j, "report_fraction", c.report_fraction);
  if (const auto mode = j.find("mode")) {
    try {
      c.mode = mode_from_string(mode->string());
    } catch (const InvalidArgument& e) {
      mode->fail(e.what());
    }
  }
  if (const auto list = j.find("per_iter_gammas")) {
    std::vector<ConsistencyParams> gammas;
    for (std::size_t i = 0; i < list->size(); ++i) gammas.push_back(gamma_from_json((*list)[i]));
    c.per_iter_gammas = std::move(gammas);
  }
  try {
    c.validate();
  } catch (const InvalidArgument& e) {
    j.fail(e.what());
  }
  return c;
}

Json to_json(const GenSpec& s) {
  return {{"source_points", s.source_points},
          {"target_points", s.target_points},
          {"scene_points", s.scene_points},
          {"room_size", vec_json(s.room_size)},
          {"clutter_boxes", s.clutter_boxes},
          {"symmetric_room", s.symmetric_room},
          {"min_spacing", s.min_spacing},
          {"descriptor_length", s.descriptor_length},
          {"descriptor_noise", s.descriptor_noise},
          {"position_noise", s.position_noise},
          {"normal_noise", s.normal_noise},
          {"outlier_rate", s.outlier_rate},
          {"decoy_descriptors", s.decoy_descriptors},
          {"overlap_target", s.overlap_target},
          {"overlap_radius", s.overlap_radius},
          {"rotation", s.rotation == RotationSampling::full ? "full" : "yaw"},
          {"yaw_max_deg", s.yaw_max_deg},
          {"t_max", s.t_max}};
}

GenSpec gen_spec_from_json(const JsonReader& j) {
  j.reject_unknown({"source_points", "target_points", "scene_points", "room_size",
                    "clutter_boxes", "symmetric_room", "min_spacing", "descriptor_length",
                    "descriptor_noise", "position_noise", "normal_noise", "outlier_rate",
                    "decoy_descriptors", "overlap_target", "overlap_radius", "rotation",
                    "yaw_max_deg", "t_max"});
  GenSpec s;
  read_optional(j, "source_points", s.source_points);
  read_optional(j, "target_points", s.target_points);
  read_optional(j, "scene_points", s.scene_points);
  if (const auto room = j.find("room_size")) s.room_size = room->vec3();
  read_optional(j, "clutter_boxes", s.clutter_boxes);
  read_optional(j, "symmetric_room", s.symmetric_room);
  read_optional(j, "min_spacing", s.min_spacing);
  read_optional(j, "descriptor_length", s.descriptor_length);
  read_optional(j, "descriptor_noise", s.descriptor_noise);
  read_optional(j, "position_noise", s.position_noise);
  read_optional(j, "normal_noise", s.normal_noise);
  read_optional(j, "outlier_rate", s.outlier_rate);
  read_optional(j, "decoy_descriptors", s.decoy_descriptors);
  read_optional(j, "overlap_target", s.overlap_target);
  read_optional(j, "overlap_radius", s.overlap_radius);
  if (const auto rot = j.find("rotation")) {
    const std::string name = rot->string();
    if (name == "full") {
      s.rotation = RotationSampling::full;
    } else if (name == "yaw") {
      s.rotation = RotationSampling::yaw;
    } else {
      rot->fail("expected \"full\" or \"yaw\"");
    }
  }
  read_optional(j, "yaw_max_deg", s.yaw_max_deg);
  read_optional(j, "t_max", s.t_max);
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    j.fail(e.what());
  }
  return s;
}

Json to_json(const MatchResult& r) {
  return {{"status", to_string(r.status)},
          {"message", r.message},
          {"transform", to_json(r.transform)},
          {"candidates", candidates_json(r.candidates)},
          {"indicator", r.indicator},
          {"selected", candidates_json(r.selected)},
          {"objective_trace", r.objective_trace},
          {"pruning",
           {{"pairs_considered", r.pruning.pairs_considered},
            {"pairs_passing_threshold", r.pruning.pairs_passing_threshold},
            {"pairs_kept", r.pruning.pairs_kept}}},
          {"low_confidence", r.low_confidence}};
}

MatchResult match_result_from_json(const JsonReader& j) {
  MatchResult r;
  const std::string status = j["status"].string();
  if (status == "ok") {
    r.status = SolveStatus::ok;
  } else if (status == "unmatchable") {
    r.status = SolveStatus::unmatchable;
  } else if (status == "degenerate") {
    r.status = SolveStatus::degenerate;
  } else {
    j["status"].fail("unknown status");
  }
  r.message = j["message"].string();
  r.transform = transform_from_json(j["transform"]);
  r.candidates = candidates_from_json(j["candidates"]);
  r.indicator = j["indicator"].numbers();
  r.selected = candidates_from_json(j["selected"]);
  r.objective_trace = j["objective_trace"].numbers();
  const JsonReader p = j["pruning"];
  r.pruning.pairs_considered = p["pairs_considered"].unsigned_integer();
  r.pruning.pairs_passing_threshold = p["pairs_passing_threshold"].unsigned_integer();
  r.pruning.pairs_kept = p["pairs_kept"].unsigned_integer();
  r.low_confidence = j["low_confidence"].boolean();
  return r;
}

namespace {

Json number_or_null(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

}  // namespace

Json to_json(const BinStats& b) {
  Json j = {{"bin", b.label}, {"count", b.count}, {"failures", b.failures}};
  const char* rot_keys[] = {"acc@3", "acc@10", "acc@45"};
  const char* trans_keys[] = {"acc@0.1", "acc@0.25", "acc@0.5"};
  for (std::size_t k = 0; k < 3; ++k) {
    j[rot_keys[k]] = number_or_null(b.rotation_accuracy[k]);
    j[trans_keys[k]] = number_or_null(b.translation_accuracy[k]);
  }
  j["mean_rot"] = number_or_null(b.mean_rotation);
  j["med_rot"] = number_or_null(b.median_rotation);
  j["mean_t"] = number_or_null(b.mean_translation);
  j["med_t"] = number_or_null(b.median_translation);
  return j;
}

Json to_json(const MetricsReport& report) {
  Json bins = Json::array();
  for (const BinStats& b : report.bins) bins.push_back(to_json(b));
  Json pairs = Json::array();
  for (const PairOutcome& p : report.pairs) {
    pairs.push_back({{"rotation_deg", p.rotation_deg},
                     {"translation_m", p.translation_m},
                     {"overlap", p.overlap},
                     {"bin", p.bin},
                     {"failed", p.failed}});
  }
  return {{"mode", report.mode},
          {"pairs", std::move(pairs)},
          {"bins", std::move(bins)},
          {"identity_baseline", to_json(report.identity_baseline)},
          {"failures", report.failures}};
}

Json scenario_to_json(const ScenarioPair& pair, const GenSpec* spec) {
  Json j = {{"source", to_json(pair.source)},
            {"target", to_json(pair.target)},
            {"gt", to_json(pair.ground_truth)},
            {"inliers", candidates_json(pair.inlier_map)},
            {"overlap", pair.overlap_ratio},
            {"overlap_radius", pair.overlap_radius},
            {"seed", pair.seed}};
  if (spec) j["gen_spec"] = to_json(*spec);
  return j;
}

ScenarioPair scenario_from_json(const JsonReader& j) {
  j.reject_unknown({"source", "target", "gt", "inliers", "overlap", "overlap_radius", "seed",
                    "gen_spec"});
  ScenarioPair pair;
  pair.source = keypoint_set_from_json(j["source"]);
  pair.target = keypoint_set_from_json(j["target"]);
  pair.ground_truth = transform_from_json(j["gt"]);
  pair.inlier_map = candidates_from_json(j["inliers"]);
  for (std::size_t i = 0; i < pair.inlier_map.size(); ++i) {
    const Candidate& c = pair.inlier_map[i];
    if (c.source_index >= pair.source.size() || c.target_index >= pair.target.size()) {
      j["inliers"][i].fail("index out of range");
    }
  }
  pair.overlap_ratio = j["overlap"].number();
  if (!(pair.overlap_ratio >= 0.0 && pair.overlap_ratio <= 1.0)) {
    j["overlap"].fail("expected a value in [0, 1]");
  }
  if (const auto r = j.find("overlap_radius")) pair.overlap_radius = r->number();
  pair.seed = j["seed"].unsigned_integer();
  if (const auto spec = j.find("gen_spec")) gen_spec_from_json(*spec);
  return pair;
}

Json manifest_to_json(const std::vector<ManifestEntry>& entries) {
  Json out = Json::array();
  for (const ManifestEntry& e : entries) out.push_back({{"path", e.path}, {"bin", e.bin}});
  return out;
}

std::vector<ManifestEntry> manifest_from_json(const JsonReader& j) {
  std::vector<ManifestEntry> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const JsonReader e = j[i];
    e.reject_unknown({"path", "bin"});
    out.push_back({e["path"].string(), e.has("bin") ? e["bin"].string() : std::string()});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open for reading");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": invalid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << text;
  if (!out) throw IoError(path.string() + ": write failed");
}

void write_json_file(const std::filesystem::path& path, const Json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

ScenarioPair load_scenario(const std::filesystem::path& path) {
  return load_file(path, [](const JsonReader& j) { return scenario_from_json(j); });
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  auto entries = load_file(path, [](const JsonReader& j) { return manifest_from_json(j); });
  const std::filesystem::path dir = path.parent_path();
  for (ManifestEntry& e : entries) {
    const std::filesystem::path p(e.path);
    if (p.is_relative()) e.path = (dir / p).string();
  }
  return entries;
}

GammaFile load_gamma(const std::filesystem::path& path) {
  return load_file(path, [](const JsonReader& j) {
    GammaFile out;
    if (j.has("gamma")) {
      out.gamma = gamma_from_json(j["gamma"]);
      if (const auto list = j.find("per_iter_gammas")) {
        std::vector<ConsistencyParams> gammas;
        for (std::size_t i = 0; i < list->size(); ++i) gammas.push_back(gamma_from_json((*list)[i]));
        out.per_iter_gammas = std::move(gammas);
      }
    } else {
      out.gamma = gamma_from_json(j);
    }
    return out;
  });
}

SolverConfig load_config(const std::filesystem::path& path) {
  return load_file(path, [](const JsonReader& j) { return config_from_json(j); });
}

}  // namespace relpose
