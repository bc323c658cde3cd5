#include "relpose/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "relpose/geometry.hpp"
#include "relpose/solver.hpp"
#include "relpose/synth.hpp"

namespace relpose {

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

BinStats summarize(const std::string& label, const std::vector<PairOutcome>& outcomes) {
  BinStats s;
  s.label = label;
  s.count = outcomes.size();
  if (outcomes.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.rotation_accuracy.fill(nan);
    s.translation_accuracy.fill(nan);
    s.mean_rotation = s.median_rotation = s.mean_translation = s.median_translation = nan;
    return s;
  }
  std::vector<double> rot;
  std::vector<double> trans;
  for (const PairOutcome& o : outcomes) {
    rot.push_back(o.rotation_deg);
    trans.push_back(o.translation_m);
    s.failures += o.failed ? 1 : 0;
  }
  const auto n = static_cast<double>(outcomes.size());
  for (std::size_t k = 0; k < 3; ++k) {
    const auto within_r = std::count_if(rot.begin(), rot.end(),
                                        [&](double e) { return e <= kRotationThresholdsDeg[k]; });
    const auto within_t = std::count_if(
        trans.begin(), trans.end(), [&](double e) { return e <= kTranslationThresholdsM[k]; });
    s.rotation_accuracy[k] = 100.0 * static_cast<double>(within_r) / n;
    s.translation_accuracy[k] = 100.0 * static_cast<double>(within_t) / n;
  }
  double sum_r = 0.0;
  double sum_t = 0.0;
  for (std::size_t i = 0; i < rot.size(); ++i) {
    sum_r += rot[i];
    sum_t += trans[i];
  }
  s.mean_rotation = sum_r / n;
  s.mean_translation = sum_t / n;
  s.median_rotation = median(rot);
  s.median_translation = median(trans);
  return s;
}

PairOutcome score(const MatchResult& result, const ScenarioPair& pair) {
  PairOutcome o;
  o.overlap = pair.overlap_ratio;
  o.bin = overlap_bin(pair.overlap_ratio);
  if (!result.ok()) {
    o.failed = true;
    o.rotation_deg = kFailureRotationDeg;
    o.translation_m = kFailureTranslationM;
    return o;
  }
  o.rotation_deg = rotation_error(result.transform.rotation(), pair.ground_truth.rotation());
  o.translation_m = std::min(kFailureTranslationM,
                             translation_error(result.transform, pair.ground_truth,
                                               barycenter(pair.source)));
  return o;
}

BinStats identity_baseline(const std::vector<ScenarioPair>& pairs) {
  std::vector<PairOutcome> outcomes;
  outcomes.reserve(pairs.size());
  MatchResult identity;
  for (const ScenarioPair& pair : pairs) outcomes.push_back(score(identity, pair));
  return summarize("identity", outcomes);
}

MetricsReport evaluate(const std::vector<ScenarioPair>& pairs, const ConsistencyParams& gamma,
                       const SolverConfig& config) {
  if (pairs.empty()) throw InvalidArgument("evaluate: corpus is empty");
  MetricsReport report;
  report.mode = to_string(config.mode);
  for (const ScenarioPair& pair : pairs) {
    report.pairs.push_back(score(solve(pair.source, pair.target, gamma, config), pair));
    report.failures += report.pairs.back().failed ? 1 : 0;
  }
  std::vector<ScenarioPair> non_overlap;
  for (std::size_t b = 0; b < kBinLabels.size(); ++b) {
    std::vector<PairOutcome> members;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (report.pairs[i].bin != kBinLabels[b]) continue;
      members.push_back(report.pairs[i]);
      if (b == 2) non_overlap.push_back(pairs[i]);
    }
    report.bins[b] = summarize(kBinLabels[b], members);
  }
  report.identity_baseline = identity_baseline(non_overlap);
  return report;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string report_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "bin,acc@3,acc@10,acc@45,acc@0.1,acc@0.25,acc@0.5,mean_rot,med_rot,mean_t,med_t\n";
  for (const BinStats& b : report.bins) {
    out << b.label;
    for (double v : b.rotation_accuracy) out << ',' << fmt(v);
    for (double v : b.translation_accuracy) out << ',' << fmt(v);
    out << ',' << fmt(b.mean_rotation) << ',' << fmt(b.median_rotation) << ','
        << fmt(b.mean_translation) << ',' << fmt(b.median_translation) << '\n';
  }
  return out.str();
}

}  // namespace relpose
