#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spca/procrustes.hpp"
#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace spca;
namespace tu = testutil;

namespace {

Matrix rotation2(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), -std::sin(theta),
       std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace

TEST_CASE("polar factor of an orthonormal matrix is itself") {
  Matrix q = tu::random_orthonormal(8, 3, 17);
  CHECK((polar_factor(q) - q).norm() <= 1e-12);
  CHECK((polar_factor(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm() <= 1e-14);
}

TEST_CASE("polar factor of a positive diagonal is the identity") {
  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 5.0, 2.0, 0.1;
  CHECK((polar_factor(d) - Matrix::Identity(3, 3)).norm() <= 1e-12);
}

TEST_CASE("polar factor undoes a known rotation times stretch") {
  // m = R(theta) * diag(s): the orthonormal factor is exactly R(theta).
  Matrix stretch = Matrix::Zero(2, 2);
  stretch.diagonal() << 4.0, 0.25;
  double theta = 0.6;
  Matrix m = rotation2(theta) * stretch;
  CHECK((polar_factor(m) - rotation2(theta)).norm() <= 1e-12);
}

TEST_CASE("polar factor maximizes the trace objective against random competitors") {
  for (int t = 0; t < 100; ++t) {
    auto seed = 4000 + static_cast<std::uint64_t>(t);
    Index p = 3 + static_cast<Index>(t % 6);
    Index k = 1 + static_cast<Index>(t % 3);
    Matrix m = tu::gaussian(p, k, seed);
    Matrix a = polar_factor(m);
    CHECK((a.transpose() * a - Matrix::Identity(k, k)).norm() <= 1e-8);
    double best = (m.transpose() * a).trace();
    for (int c = 0; c < 50; ++c) {
      Matrix comp = tu::random_orthonormal(p, k, seed * 100 + static_cast<std::uint64_t>(c));
      CHECK(best >= (m.transpose() * comp).trace() - 1e-9);
    }
  }
}

TEST_CASE("2x2 polar factor matches a brute-force angle search") {
  // Sweep rotations and reflections; the closed-form optimum must land within
  // grid resolution of the best grid point's objective.
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> uang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> us(0.05, 3.0);
  for (int t = 0; t < 5; ++t) {
    Matrix stretch = Matrix::Zero(2, 2);
    stretch.diagonal() << us(rng), us(rng);
    double theta = uang(rng);
    Matrix m = rotation2(theta) * stretch;
    Matrix a = polar_factor(m);

    const int grid = 1000000;
    double best_obj = -1e300;
    double best_theta = 0.0;
    bool best_reflect = false;
    for (int i = 0; i < grid; ++i) {
      double ang = -std::numbers::pi + (2.0 * std::numbers::pi * i) / grid;
      double c = std::cos(ang), s = std::sin(ang);
      // det +1 family: [[c, -s], [s, c]]; det -1 family: [[c, s], [s, -c]].
      double obj_rot = m(0, 0) * c - m(0, 1) * s + m(1, 0) * s + m(1, 1) * c;
      double obj_ref = m(0, 0) * c + m(0, 1) * s + m(1, 0) * s - m(1, 1) * c;
      if (obj_rot > best_obj) {
        best_obj = obj_rot;
        best_theta = ang;
        best_reflect = false;
      }
      if (obj_ref > best_obj) {
        best_obj = obj_ref;
        best_theta = ang;
        best_reflect = true;
      }
    }
    CHECK(!best_reflect);  // a rotation times a positive stretch stays a rotation
    double got_theta = std::atan2(a(1, 0), a(0, 0));
    double diff = std::remainder(got_theta - best_theta, 2.0 * std::numbers::pi);
    CHECK(std::abs(diff) <= 1e-4);
    CHECK((m.transpose() * a).trace() >= best_obj - 1e-9);
  }
}

TEST_CASE("procrustes_update solves the quadratic subproblem") {
  for (int t = 0; t < 30; ++t) {
    auto seed = 6000 + static_cast<std::uint64_t>(t);
    Matrix x = tu::gaussian(12, 7, seed);
    Matrix b = tu::gaussian(7, 3, seed + 1);
    Matrix a = procrustes_update(x, b);
    CHECK((a.transpose() * a - Matrix::Identity(3, 3)).norm() <= 1e-8);
    // Minimizing ||x - x b a^T||_F^2 over orthonormal a is maximizing
    // trace((x^T x b)^T a); check against random competitors.
    double res = (x - x * b * a.transpose()).squaredNorm();
    for (int c = 0; c < 25; ++c) {
      Matrix comp = tu::random_orthonormal(7, 3, seed * 50 + static_cast<std::uint64_t>(c));
      CHECK(res <= (x - x * b * comp.transpose()).squaredNorm() + 1e-9);
    }
    // Same update through the oracle.
    CHECK((a - tu::polar_oracle(x.transpose() * (x * b))).norm() <= 1e-9);
  }
}

TEST_CASE("procrustes_update with sparse outliers removed") {
  Matrix x = tu::gaussian(10, 6, 81);
  Matrix s = Matrix::Zero(10, 6);
  s(2, 3) = 5.0;
  s(7, 1) = -4.0;
  Matrix b = tu::gaussian(6, 2, 82);
  Matrix a = procrustes_update(x, b, s);
  CHECK((a - tu::polar_oracle((x - s).transpose() * (x * b))).norm() <= 1e-10);

  // s = x zeroes the subproblem matrix; the completion must stay orthonormal
  // and deterministic.
  Matrix a0 = procrustes_update(x, b, x);
  CHECK((a0.transpose() * a0 - Matrix::Identity(2, 2)).norm() <= 1e-8);
  Matrix a0b = procrustes_update(x, b, x);
  CHECK(tu::bitwise_equal(a0, a0b));
}
