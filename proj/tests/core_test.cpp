#include <cmath>

#include "doctest.h"
#include "relpose/core.hpp"
#include "test_util.hpp"

using namespace relpose;

TEST_CASE("keypoint set validates normals and descriptor lengths") {
  Keypoint a{Vec3(0, 0, 0), Vec3(0, 0, 1), Descriptor::Ones(4)};
  Keypoint b{Vec3(1, 0, 0), Vec3(0, 1, 0), Descriptor::Ones(4)};
  KeypointSet s("v", {a, b});
  CHECK(s.size() == 2);
  CHECK(s.descriptor_length() == 4);
  CHECK(s.id() == "v");

  Keypoint bad_normal = b;
  bad_normal.normal = Vec3(0, 2, 0);
  CHECK_THROWS_AS(KeypointSet("v", {a, bad_normal}), InvalidArgument);

  Keypoint short_desc = b;
  short_desc.descriptor = Descriptor::Ones(3);
  CHECK_THROWS_AS(KeypointSet("v", {a, short_desc}), InvalidArgument);
  CHECK_THROWS_AS(KeypointSet("v", {a}, 5), InvalidArgument);

  Keypoint nan_pos = b;
  nan_pos.position.x() = std::nan("");
  CHECK_THROWS_AS(KeypointSet("v", {a, nan_pos}), InvalidArgument);
}

TEST_CASE("normals within 1e-6 of unit length are accepted") {
  Keypoint a{Vec3::Zero(), Vec3(0, 0, 1 + 5e-7), Descriptor::Ones(2)};
  CHECK_NOTHROW(KeypointSet("v", {a}));
  a.normal.z() = 1 + 2e-6;
  CHECK_THROWS_AS(KeypointSet("v", {a}), InvalidArgument);
}

TEST_CASE("empty keypoint set keeps the default descriptor length") {
  KeypointSet s("e", {});
  CHECK(s.empty());
  CHECK(s.descriptor_length() == kDefaultDescriptorLength);
}

TEST_CASE("rigid transform rejects non-rotations") {
  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1;
  CHECK_THROWS_AS(RigidTransform(reflect, Vec3::Zero()), InvalidArgument);
  CHECK_THROWS_AS(RigidTransform(2.0 * Mat3::Identity(), Vec3::Zero()), InvalidArgument);
  CHECK_THROWS_AS(RigidTransform(Mat3::Identity(), Vec3(INFINITY, 0, 0)), InvalidArgument);
}

TEST_CASE("orthonormalized projects onto SO(3)") {
  Rng rng(3);
  const Mat3 r = random_rotation(rng);
  Mat3 noisy = r;
  noisy(0, 1) += 1e-3;
  const RigidTransform t = RigidTransform::orthonormalized(noisy, Vec3(1, 2, 3));
  CHECK(RigidTransform::is_rotation(t.rotation()));
  CHECK((t.rotation() - r).norm() < 2e-3);

  Mat3 reflect = Mat3::Identity();
  reflect(0, 0) = -1;
  CHECK(RigidTransform::orthonormalized(reflect, Vec3::Zero()).rotation().determinant() ==
        doctest::Approx(1.0));
}

TEST_CASE("transform application and matrix form") {
  const Mat3 rz = axis_angle(Vec3::UnitZ(), M_PI / 2);
  const RigidTransform t(rz, Vec3(1, 0, 0));
  const Vec3 p = t(Vec3(1, 0, 0));
  CHECK(p.x() == doctest::Approx(1.0));
  CHECK(p.y() == doctest::Approx(1.0));
  CHECK(t.rotate(Vec3(1, 0, 0)).y() == doctest::Approx(1.0));
  const auto m = t.matrix();
  CHECK(m(0, 3) == 1.0);
  CHECK((m.leftCols<3>() - rz).norm() == 0.0);
}

TEST_CASE("consistency params round trip and validation") {
  ConsistencyParams g;
  CHECK(ConsistencyParams::from_array(g.as_array()) == g);
  CHECK_NOTHROW(g.validate());
  g.gamma3 = 0.0;
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
  g.gamma3 = NAN;
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
}

TEST_CASE("mode names") {
  for (Mode m : {Mode::nr, Mode::r, Mode::sm, Mode::r_sm}) {
    CHECK(mode_from_string(to_string(m)) == m);
  }
  CHECK(mode_from_string("r+sm") == Mode::r_sm);
  CHECK_THROWS_AS(mode_from_string("ransac"), InvalidArgument);
  CHECK(uses_spectral(Mode::sm));
  CHECK(uses_spectral(Mode::r_sm));
  CHECK_FALSE(uses_spectral(Mode::r));
  CHECK_FALSE(uses_spectral(Mode::nr));
}

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  SolverConfig bad = c;
  bad.alpha = 2.5;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = c;
  bad.prune_threshold = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = c;
  bad.outer_iters = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = c;
  bad.per_iter_gammas = std::vector<ConsistencyParams>(2);
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad.per_iter_gammas = std::vector<ConsistencyParams>(static_cast<std::size_t>(c.outer_iters));
  CHECK_NOTHROW(bad.validate());
}

TEST_CASE("rng streams are reproducible and roughly standard") {
  Rng a(42), b(42);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  Rng rng(7);
  double sum = 0, sum2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum2 / n - 1.0) < 0.01);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(rng.index(7) < 7);
  }
  CHECK(mix_seed(1) != mix_seed(2));
}
