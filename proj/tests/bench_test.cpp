#include <cmath>
#include <sstream>

#include "doctest.h"
#include "relpose/bench.hpp"
#include "relpose/geometry.hpp"
#include "relpose/synth.hpp"

using namespace relpose;

namespace {

PairOutcome outcome(double rot, double trans, bool failed = false) {
  PairOutcome o;
  o.rotation_deg = rot;
  o.translation_m = trans;
  o.failed = failed;
  return o;
}

}  // namespace

TEST_CASE("median") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(std::isnan(median({})));
}

TEST_CASE("summary statistics") {
  const BinStats s = summarize("x", {outcome(1, 0.05), outcome(5, 0.2), outcome(20, 0.4),
                                     outcome(180, 10, true)});
  CHECK(s.count == 4);
  CHECK(s.failures == 1);
  CHECK(s.rotation_accuracy[0] == 25.0);
  CHECK(s.rotation_accuracy[1] == 50.0);
  CHECK(s.rotation_accuracy[2] == 75.0);
  CHECK(s.translation_accuracy[0] == 25.0);
  CHECK(s.translation_accuracy[1] == 50.0);
  CHECK(s.translation_accuracy[2] == 75.0);
  CHECK(s.mean_rotation == doctest::Approx(51.5));
  CHECK(s.median_rotation == doctest::Approx(12.5));
  CHECK(s.median_translation == doctest::Approx(0.3));
}

TEST_CASE("thresholds are inclusive") {
  const BinStats s = summarize("x", {outcome(3.0, 0.1)});
  CHECK(s.rotation_accuracy[0] == 100.0);
  CHECK(s.translation_accuracy[0] == 100.0);
}

TEST_CASE("failed solves get the maximal error") {
  GenSpec spec;
  spec.source_points = spec.target_points = 10;
  const ScenarioPair p = generate(spec, 1);
  MatchResult failed;
  failed.status = SolveStatus::degenerate;
  const PairOutcome o = score(failed, p);
  CHECK(o.failed);
  CHECK(o.rotation_deg == kFailureRotationDeg);
  CHECK(o.translation_m == kFailureTranslationM);
  CHECK(o.bin == "[0.5,1]");

  MatchResult exact;
  exact.transform = p.ground_truth;
  const PairOutcome good = score(exact, p);
  CHECK(good.rotation_deg < 1e-9);
  CHECK(good.translation_m < 1e-12);
}

TEST_CASE("translation scores are capped") {
  GenSpec spec;
  spec.source_points = spec.target_points = 10;
  const ScenarioPair p = generate(spec, 2);
  MatchResult far;
  far.transform = RigidTransform(Mat3::Identity(), Vec3(1000, 0, 0));
  CHECK(score(far, p).translation_m == kFailureTranslationM);
}

TEST_CASE("evaluate bins pairs by overlap and reports the identity baseline") {
  GenSpec high, low;
  high.source_points = high.target_points = 20;
  low = high;
  low.overlap_target = 0.0;
  std::vector<ScenarioPair> pairs;
  for (std::uint64_t s = 0; s < 3; ++s) pairs.push_back(generate(high, s));
  for (std::uint64_t s = 0; s < 2; ++s) pairs.push_back(generate(low, s));
  const MetricsReport r = evaluate(pairs, {}, SolverConfig{});
  CHECK(r.mode == "r_sm");
  CHECK(r.pairs.size() == 5);
  CHECK(r.bins[0].count == 3);
  CHECK(r.bins[1].count == 0);
  CHECK(r.bins[2].count == 2);
  CHECK(r.bins[0].median_rotation < 1.0);
  CHECK(r.identity_baseline.count == 2);
  double mean = 0;
  for (std::size_t i = 3; i < 5; ++i) {
    mean += rotation_error(Mat3::Identity(), pairs[i].ground_truth.rotation()) / 2;
  }
  CHECK(r.identity_baseline.mean_rotation == doctest::Approx(mean));
  CHECK_THROWS_AS(evaluate({}, {}, SolverConfig{}), InvalidArgument);
}

TEST_CASE("csv report layout") {
  MetricsReport r;
  r.bins[0] = summarize("[0.5,1]", {outcome(2, 0.3)});
  r.bins[1] = summarize("[0.1,0.5)", {});
  r.bins[2] = summarize("[0,0.1)", {});
  std::istringstream csv(report_csv(r));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "bin,acc@3,acc@10,acc@45,acc@0.1,acc@0.25,acc@0.5,mean_rot,med_rot,mean_t,med_t");
  std::getline(csv, line);
  CHECK(line ==
        "[0.5,1],100.000000,100.000000,100.000000,0.000000,0.000000,100.000000,2.000000,2.000000,"
        "0.300000,0.300000");
  std::getline(csv, line);
  CHECK(line == "[0.1,0.5),nan,nan,nan,nan,nan,nan,nan,nan,nan,nan");
}
