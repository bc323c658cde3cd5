#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "relpose/bench.hpp"
#include "relpose/io.hpp"
#include "relpose/solver.hpp"
#include "relpose/synth.hpp"

using namespace relpose;
namespace fs = std::filesystem;

namespace {

std::string parse_error(const Json& doc, auto&& parse) {
  try {
    parse(JsonReader(doc, "$"));
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("keypoint sets round trip exactly") {
  GenSpec spec;
  spec.source_points = spec.target_points = 10;
  spec.position_noise = 0.01;
  const ScenarioPair p = generate(spec, 1);
  const Json j = to_json(p.source);
  const KeypointSet back = keypoint_set_from_json(JsonReader(j, "$"));
  REQUIRE(back.size() == p.source.size());
  CHECK(back.id() == p.source.id());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].position == p.source[i].position);
    CHECK(back[i].normal == p.source[i].normal);
    CHECK(back[i].descriptor == p.source[i].descriptor);
  }
  // Also through text.
  const Json reparsed = Json::parse(j.dump(2));
  CHECK(keypoint_set_from_json(JsonReader(reparsed, "$"))[3].position == p.source[3].position);
}

TEST_CASE("scenario pairs round trip") {
  GenSpec spec;
  spec.source_points = spec.target_points = 12;
  spec.outlier_rate = 0.25;
  const ScenarioPair p = generate(spec, 2);
  const Json j = Json::parse(scenario_to_json(p, &spec).dump());
  const ScenarioPair q = scenario_from_json(JsonReader(j, "$"));
  CHECK(q.ground_truth.matrix() == p.ground_truth.matrix());
  CHECK(q.inlier_map == p.inlier_map);
  CHECK(q.overlap_ratio == p.overlap_ratio);
  CHECK(q.seed == 2);
  CHECK(j["gen_spec"]["outlier_rate"] == 0.25);
}

TEST_CASE("config, gamma and generator settings round trip") {
  SolverConfig c;
  c.mode = Mode::sm;
  c.outer_iters = 2;
  c.per_iter_gammas = std::vector<ConsistencyParams>{{0.2, 0.1, 0.3, 0.3, 0.3}, {}};
  const Json j = to_json(c);
  const SolverConfig back = config_from_json(JsonReader(j, "$"));
  CHECK(back.mode == Mode::sm);
  CHECK(back.epsilon == c.epsilon);
  REQUIRE(back.per_iter_gammas);
  CHECK((*back.per_iter_gammas)[0] == ConsistencyParams{0.2, 0.1, 0.3, 0.3, 0.3});

  const ConsistencyParams g{0.11, 0.06, 0.21, 0.22, 0.23};
  const Json gj = to_json(g);
  CHECK(gamma_from_json(JsonReader(gj, "$")) == g);

  GenSpec s;
  s.rotation = RotationSampling::yaw;
  s.room_size = Vec3(4, 4, 2.5);
  const Json sj = to_json(s);
  const GenSpec sb = gen_spec_from_json(JsonReader(sj, "$"));
  CHECK(sb.rotation == RotationSampling::yaw);
  CHECK(sb.room_size == s.room_size);
}

TEST_CASE("partial configs fall back to defaults") {
  const Json j = Json::parse(R"({"mode": "r+sm", "delta": 10})");
  const SolverConfig c = config_from_json(JsonReader(j, "$"));
  CHECK(c.mode == Mode::r_sm);
  CHECK(c.delta == 10.0);
  CHECK(c.outer_iters == SolverConfig{}.outer_iters);
}

TEST_CASE("match results round trip") {
  GenSpec spec;
  spec.source_points = spec.target_points = 15;
  const ScenarioPair p = generate(spec, 3);
  const MatchResult r = solve(p.source, p.target, {}, SolverConfig{});
  const Json j = Json::parse(to_json(r).dump());
  const MatchResult back = match_result_from_json(JsonReader(j, "$"));
  CHECK(back.status == r.status);
  CHECK(back.transform.matrix() == r.transform.matrix());
  CHECK(back.candidates == r.candidates);
  CHECK(back.indicator == r.indicator);
  CHECK(back.selected == r.selected);
  CHECK(back.objective_trace == r.objective_trace);
  CHECK(back.pruning.pairs_kept == r.pruning.pairs_kept);
}

TEST_CASE("parse errors name the offending field") {
  const Json bad_normal = Json::parse(
      R"({"id": "s", "k": 2, "points": [{"p": [0,0,0], "n": [0,0,1], "f": [1,2]},
                                         {"p": [0,0,0], "n": [0,1], "f": [1,2]}]})");
  CHECK(parse_error(bad_normal, keypoint_set_from_json) == "$.points[1].n: expected 3 numbers");

  const Json bad_len = Json::parse(R"({"id": "s", "k": 3, "points": [{"p": [0,0,0], "n": [0,0,1], "f": [1,2]}]})");
  CHECK(parse_error(bad_len, keypoint_set_from_json) == "$.points[0].f: expected 3 numbers");

  const Json not_unit = Json::parse(R"({"id": "s", "k": 1, "points": [{"p": [0,0,0], "n": [0,0,2], "f": [1]}]})");
  CHECK(parse_error(not_unit, keypoint_set_from_json).find("non-unit normal") != std::string::npos);

  const Json unknown = Json::parse(R"({"gamma1": 1, "gamma2": 1, "gamma3": 1, "gamma4": 1, "gamma5": 1, "gamma6": 1})");
  CHECK(parse_error(unknown, gamma_from_json) == "$.gamma6: unknown field");

  const Json missing = Json::parse(R"({"gamma1": 1})");
  CHECK(parse_error(missing, gamma_from_json) == "$.gamma2: missing field");

  const Json bad_mode = Json::parse(R"({"mode": "icp"})");
  CHECK(parse_error(bad_mode, config_from_json).rfind("$.mode:", 0) == 0);

  const Json bad_rot = Json::parse(R"({"R": [1,0,0,0,1,0,0,0,-1], "t": [0,0,0]})");
  CHECK(parse_error(bad_rot, transform_from_json).rfind("$.R:", 0) == 0);

  const Json neg = Json::parse(R"({"source_points": -3})");
  CHECK(parse_error(neg, gen_spec_from_json) == "$.source_points: expected a non-negative integer");
}

TEST_CASE("files: errors carry the file name") {
  TempDir dir("relpose_io_test");
  const fs::path bad = dir.path / "bad.json";
  write_text_file(bad, "{ not json");
  CHECK_THROWS_AS(read_json_file(bad), ParseError);
  CHECK_THROWS_AS(read_json_file(dir.path / "missing.json"), IoError);

  const fs::path wrong = dir.path / "gamma.json";
  write_json_file(wrong, Json::parse(R"({"gamma1": 0})"));
  try {
    load_gamma(wrong);
    FAIL("expected a ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind(wrong.string() + ": ", 0) == 0);
  }
}

TEST_CASE("gamma files accept bare and wrapped forms") {
  TempDir dir("relpose_gamma_test");
  const ConsistencyParams g{0.3, 0.2, 0.1, 0.1, 0.1};
  write_json_file(dir.path / "bare.json", to_json(g));
  CHECK(load_gamma(dir.path / "bare.json").gamma == g);
  CHECK_FALSE(load_gamma(dir.path / "bare.json").per_iter_gammas);

  Json wrapped = {{"gamma", to_json(g)}, {"per_iter_gammas", Json::array({to_json(g), to_json(g)})},
                  {"final_loss", 0.1}};
  write_json_file(dir.path / "tuned.json", wrapped);
  const GammaFile f = load_gamma(dir.path / "tuned.json");
  CHECK(f.gamma == g);
  REQUIRE(f.per_iter_gammas);
  CHECK(f.per_iter_gammas->size() == 2);
}

TEST_CASE("manifest paths resolve against the manifest directory") {
  TempDir dir("relpose_manifest_test");
  write_json_file(dir.path / "manifest.json", manifest_to_json({{"a.json", "[0.5,1]"}, {"/abs/b.json", ""}}));
  const auto entries = load_manifest(dir.path / "manifest.json");
  CHECK(entries[0].path == (dir.path / "a.json").string());
  CHECK(entries[0].bin == "[0.5,1]");
  CHECK(entries[1].path == "/abs/b.json");
}

TEST_CASE("json writer is two-space indented with a trailing newline") {
  TempDir dir("relpose_writer_test");
  write_json_file(dir.path / "x.json", Json{{"a", 1}});
  std::ifstream in(dir.path / "x.json");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == "{\n  \"a\": 1\n}\n");
}

TEST_CASE("empty bins serialize statistics as null") {
  const BinStats empty = summarize("[0,0.1)", {});
  const Json j = to_json(empty);
  CHECK(j["count"] == 0);
  CHECK(j["med_rot"].is_null());
  CHECK(j["acc@3"].is_null());
}
