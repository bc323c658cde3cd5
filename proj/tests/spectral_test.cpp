#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "relpose/matching.hpp"
#include "relpose/spectral.hpp"
#include "test_util.hpp"

using namespace relpose;

namespace {

Eigen::MatrixXd random_nonnegative(Rng& rng, Eigen::Index n, double density) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      if (rng.uniform() < density) a(i, j) = a(j, i) = rng.uniform();
    }
  }
  return a;
}

}  // namespace

TEST_CASE("power iteration matches a dense eigensolver") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto n = static_cast<Eigen::Index>(2 + rng.index(49));
    const Eigen::MatrixXd a = random_nonnegative(rng, n, 1.0);
    const EigenPair p = max_eigenvector(a);
    const auto [v, lambda] = oracle::leading_eigenpair(a);
    CHECK_FALSE(p.low_confidence);
    CHECK_FALSE(p.degenerate);
    CHECK(oracle::vector_angle(p.vector, v) < 1e-6);
    CHECK(p.eigenvalue == doctest::Approx(lambda).epsilon(1e-9));
    CHECK(p.vector.norm() == doctest::Approx(1.0));
    CHECK((p.vector.array() >= 0.0).all());
  }
}

TEST_CASE("sparse matrices converge given a larger budget") {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a = random_nonnegative(rng, 30, 0.3);
    a.diagonal().array() += 1.0;  // aperiodic and connected enough for a clear gap
    const EigenPair p = max_eigenvector(a, 5000, 1e-12);
    const auto [v, lambda] = oracle::leading_eigenpair(a);
    CHECK(oracle::vector_angle(p.vector, v) < 1e-6);
    CHECK(p.eigenvalue == doctest::Approx(lambda).epsilon(1e-9));
  }
}

TEST_CASE("zero matrix is degenerate and returns the uniform vector") {
  const EigenPair p = max_eigenvector(Eigen::MatrixXd::Zero(4, 4));
  CHECK(p.degenerate);
  CHECK(p.eigenvalue == 0.0);
  CHECK((p.vector - Eigen::VectorXd::Constant(4, 0.5)).norm() == 0.0);
}

TEST_CASE("budget exhaustion is flagged") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.0, 0.999;
  const EigenPair p = max_eigenvector(a, 3, 1e-12);
  CHECK(p.low_confidence);
  CHECK(p.iterations == 3);
}

TEST_CASE("invalid inputs are rejected") {
  Eigen::MatrixXd neg = Eigen::MatrixXd::Ones(3, 3);
  neg(0, 1) = -0.1;
  CHECK_THROWS_AS(max_eigenvector(neg), InvalidArgument);
  CHECK_THROWS_AS(max_eigenvector(Eigen::MatrixXd::Ones(2, 3)), InvalidArgument);
  CHECK_THROWS_AS(max_eigenvector(Eigen::MatrixXd::Ones(2, 2), 0), InvalidArgument);
}

TEST_CASE("consistent block dominates the indicator") {
  // Candidates 0..4 agree with each other, 5..9 are scattered noise.
  Rng rng(23);
  Eigen::MatrixXd a = random_nonnegative(rng, 10, 1.0) * 0.1;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) a(i, j) = 1.0;
  }
  a.diagonal().setZero();
  AffinityMatrix am{a, false};
  const EigenPair p = max_eigenvector(am);
  CHECK(p.vector.head(5).minCoeff() > 2.0 * p.vector.tail(5).maxCoeff());
}
