#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "relpose/core.hpp"

namespace relpose {

struct GenSpec;
struct ManifestEntry;
struct MetricsReport;
struct BinStats;

using Json = nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed document; the message names the file (when known) and the
/// field path, e.g. "pair.json: source.points[3].n: expected 3 numbers".
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Typed, path-tracking view over a JSON value.
class JsonReader {
 public:
  JsonReader(const Json& value, std::string path) : value_(&value), path_(std::move(path)) {}

  JsonReader operator[](std::string_view key) const;
  JsonReader operator[](std::size_t index) const;
  std::optional<JsonReader> find(std::string_view key) const;
  bool has(std::string_view key) const;

  std::size_t size() const;
  double number() const;
  std::int64_t integer() const;
  std::uint64_t unsigned_integer() const;
  bool boolean() const;
  std::string string() const;
  std::vector<double> numbers() const;
  Vec3 vec3() const;

  /// Fails on keys outside `allowed`.
  void reject_unknown(std::initializer_list<std::string_view> allowed) const;

  const Json& raw() const { return *value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const;

 private:
  const Json* value_;
  std::string path_;
};

Json to_json(const KeypointSet& set);
Json to_json(const RigidTransform& t);
Json to_json(const ConsistencyParams& g);
Json to_json(const SolverConfig& c);
Json to_json(const GenSpec& spec);
Json to_json(const MatchResult& r);
Json to_json(const BinStats& b);
/// Mirrors the CSV report; NaN statistics of empty bins become null.
Json to_json(const MetricsReport& report);

KeypointSet keypoint_set_from_json(const JsonReader& j);
RigidTransform transform_from_json(const JsonReader& j);
ConsistencyParams gamma_from_json(const JsonReader& j);
SolverConfig config_from_json(const JsonReader& j);
GenSpec gen_spec_from_json(const JsonReader& j);
MatchResult match_result_from_json(const JsonReader& j);

Json scenario_to_json(const ScenarioPair& pair, const GenSpec* spec = nullptr);
ScenarioPair scenario_from_json(const JsonReader& j);

Json manifest_to_json(const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> manifest_from_json(const JsonReader& j);

Json read_json_file(const std::filesystem::path& path);
/// Two-space indented dump with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& value);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Parses `path` with `parse`, prefixing any ParseError with the file name.
template <typename F>
auto load_file(const std::filesystem::path& path, F&& parse) {
  const Json doc = read_json_file(path);
  try {
    return parse(JsonReader(doc, "$"));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

ScenarioPair load_scenario(const std::filesystem::path& path);

/// Manifest entries with paths resolved against the manifest directory.
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

struct GammaFile {
  ConsistencyParams gamma;
  std::optional<std::vector<ConsistencyParams>> per_iter_gammas;
};

/// Accepts a bare gamma object or a tuner output {"gamma": ..., "per_iter_gammas": ...}.
GammaFile load_gamma(const std::filesystem::path& path);
SolverConfig load_config(const std::filesystem::path& path);

}  // namespace relpose
