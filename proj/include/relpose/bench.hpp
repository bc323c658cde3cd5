#pragma once

#include <array>
#include <string>
#include <vector>

#include "relpose/core.hpp"

namespace relpose {

inline constexpr std::array<double, 3> kRotationThresholdsDeg{3.0, 10.0, 45.0};
inline constexpr std::array<double, 3> kTranslationThresholdsM{0.1, 0.25, 0.5};
inline constexpr std::array<const char*, 3> kBinLabels{"[0.5,1]", "[0.1,0.5)", "[0,0.1)"};

/// Scores assigned to failed solves.
inline constexpr double kFailureRotationDeg = 180.0;
inline constexpr double kFailureTranslationM = 10.0;

struct PairOutcome {
  double rotation_deg = 0.0;
  double translation_m = 0.0;
  double overlap = 0.0;
  std::string bin;
  bool failed = false;
};

/// Accuracies are percentages; statistics are NaN for an empty bin.
struct BinStats {
  std::string label;
  std::size_t count = 0;
  std::size_t failures = 0;
  std::array<double, 3> rotation_accuracy{};
  std::array<double, 3> translation_accuracy{};
  double mean_rotation = 0.0;
  double median_rotation = 0.0;
  double mean_translation = 0.0;
  double median_translation = 0.0;
};

struct MetricsReport {
  std::string mode;
  std::vector<PairOutcome> pairs;
  std::array<BinStats, 3> bins;
  /// Predicting R = I, t = 0 on the non-overlap bin.
  BinStats identity_baseline;
  std::size_t failures = 0;
};

BinStats summarize(const std::string& label, const std::vector<PairOutcome>& outcomes);

/// Identity-pose statistics over the given pairs.
BinStats identity_baseline(const std::vector<ScenarioPair>& pairs);

/// Pose errors for one solve; failed solves get the maximal error.
PairOutcome score(const MatchResult& result, const ScenarioPair& pair);

MetricsReport evaluate(const std::vector<ScenarioPair>& pairs, const ConsistencyParams& gamma,
                       const SolverConfig& config);

double median(std::vector<double> values);

/// Header: bin,acc@3,acc@10,acc@45,acc@0.1,acc@0.25,acc@0.5,mean_rot,med_rot,mean_t,med_t
std::string report_csv(const MetricsReport& report);

}  // namespace relpose
