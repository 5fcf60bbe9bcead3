#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spca/robust.hpp"
#include "spca/solver.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace spca;
namespace tu = testutil;

namespace {

struct Corrupted {
  Matrix x;
  Matrix mask;  // 1.0 where a spike was planted
};

// Plant sign-alternating spikes on distinct entries chosen by a seeded draw.
Corrupted plant_spikes(const Matrix& clean, double fraction, double magnitude,
                       std::uint64_t seed) {
  Corrupted out{clean, Matrix::Zero(clean.rows(), clean.cols())};
  const Index total = clean.size();
  const Index count = static_cast<Index>(std::llround(fraction * static_cast<double>(total)));
  std::vector<Index> cells(static_cast<std::size_t>(total));
  for (Index i = 0; i < total; ++i) cells[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(cells.begin(), cells.end(), rng);
  std::bernoulli_distribution coin(0.5);
  for (Index t = 0; t < count; ++t) {
    Index cell = cells[static_cast<std::size_t>(t)];
    Index i = cell % clean.rows(), j = cell / clean.rows();
    out.x(i, j) += coin(rng) ? magnitude : -magnitude;
    out.mask(i, j) = 1.0;
  }
  return out;
}

double support_f1(const Matrix& mask, const Matrix& s) {
  double tp = 0, fp = 0, fn = 0;
  for (Index j = 0; j < mask.cols(); ++j)
    for (Index i = 0; i < mask.rows(); ++i) {
      bool truth = mask(i, j) != 0.0;
      bool hit = s(i, j) != 0.0;
      if (truth && hit) ++tp;
      if (!truth && hit) ++fp;
      if (truth && !hit) ++fn;
    }
  double denom = 2 * tp + fp + fn;
  return denom == 0.0 ? 1.0 : 2 * tp / denom;
}

}  // namespace

TEST_CASE("huber penalty closed form") {
  CHECK(huber_loss(0.0, 1.0) == 0.0);
  CHECK(huber_loss(0.5, 1.0) == doctest::Approx(0.125));
  CHECK(huber_loss(1.0, 1.0) == doctest::Approx(0.5));
  CHECK(huber_loss(2.0, 1.0) == doctest::Approx(1.5));
  CHECK(huber_loss(-2.0, 1.0) == doctest::Approx(1.5));
  CHECK(huber_loss(2.0, 0.5) == doctest::Approx(0.875));
  // Continuity at the elbow.
  CHECK(huber_loss(std::nextafter(1.0, 0.0), 1.0) ==
        doctest::Approx(huber_loss(std::nextafter(1.0, 2.0), 1.0)).epsilon(1e-12));

  Matrix m(2, 2);
  m << 0.5, -2.0, 0.0, 1.0;
  CHECK(huber_loss(m, 1.0) == doctest::Approx(0.125 + 1.5 + 0.0 + 0.5));

  CHECK_THROWS_AS(huber_loss(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(huber_loss(m, -1.0), std::invalid_argument);
}

TEST_CASE("huber equals the Moreau envelope of the scaled l1 norm") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(-3.0, 3.0), uk(0.1, 2.0);
  for (int t = 0; t < 100; ++t) {
    double x = ux(rng), kappa = uk(rng);
    auto envelope = [&](double s) { return 0.5 * (s - x) * (s - x) + kappa * std::abs(s); };
    double s_star = tu::grid_minimize(envelope, -4.0, 4.0, 1e-4);
    CHECK(envelope(s_star) == doctest::Approx(huber_loss(x, kappa)).epsilon(1e-3));
    double soft = std::copysign(std::max(std::abs(x) - kappa, 0.0), x);
    CHECK(std::abs(s_star - soft) <= 2e-4);
  }
}

TEST_CASE("default kappa is positive, deterministic, and scales with the data") {
  Matrix x = tu::gaussian(30, 20, 23) + tu::matrix_with_spectrum(30, 20, {8.0, 5.0}, 24);
  double k1 = default_huber_kappa(x, 2);
  CHECK(k1 > 0.0);
  CHECK(default_huber_kappa(x, 2) == k1);
  double k3 = default_huber_kappa(3.0 * x, 2);
  CHECK(k3 == doctest::Approx(3.0 * k1).epsilon(1e-9));
  // Exactly low-rank input: the residual vanishes but kappa stays positive.
  Matrix lr = tu::matrix_with_spectrum(20, 15, {4.0, 2.0}, 25);
  CHECK(default_huber_kappa(lr, 2) > 0.0);
}

TEST_CASE("huge kappa reduces to the plain solver with an all-zero spike matrix") {
  Matrix x = tu::matrix_with_spectrum(30, 22, {7.0, 4.0, 2.0}, 31) + tu::gaussian(30, 22, 32, 0.05);
  SolverConfig cfg;
  cfg.rank = 3;

  // Unregularized: both paths converge and coincide.
  SpcaResult plain = solve(x, cfg);
  cfg.huber_kappa = 1e6;
  SpcaResult robust = solve_robust(x, cfg);
  REQUIRE(robust.s.has_value());
  CHECK(robust.s->cwiseAbs().maxCoeff() == 0.0);
  CHECK(robust.huber_kappa == 1e6);
  CHECK(robust.converged());
  CHECK(plain.converged());
  CHECK((robust.b - plain.b).norm() <= 1e-6 * std::max(1.0, plain.b.norm()));
  CHECK((robust.a - plain.a).norm() <= 1e-6);

  // Regularized: compare the iterates at a matched budget (this instance has
  // a slow objective tail, so neither path reaches the tolerance quickly).
  cfg.regularizer.kind = Regularizer::l1;
  cfg.regularizer.alpha = 0.02;
  cfg.max_iter = 400;
  cfg.huber_kappa.reset();
  SpcaResult plain_l1 = solve(x, cfg);
  cfg.huber_kappa = 1e6;
  SpcaResult robust_l1 = solve_robust(x, cfg);
  CHECK(robust_l1.s->cwiseAbs().maxCoeff() == 0.0);
  CHECK((robust_l1.b - plain_l1.b).norm() <= 1e-6 * std::max(1.0, plain_l1.b.norm()));
}

TEST_CASE("tiny kappa pushes the whole residual into the spike matrix") {
  Matrix x = tu::gaussian(15, 12, 41);
  SolverConfig cfg;
  cfg.rank = 2;
  cfg.huber_kappa = 1e-9;
  SpcaResult r = solve_robust(x, cfg);
  REQUIRE(r.s.has_value());
  Matrix residual = x - x * r.b * r.a.transpose() - *r.s;
  CHECK(residual.cwiseAbs().maxCoeff() <= 1e-9 + 1e-15);
}

TEST_CASE("the spike matrix is exactly the soft threshold of the final residual") {
  Matrix clean = tu::matrix_with_spectrum(25, 18, {6.0, 3.0}, 51);
  Corrupted c = plant_spikes(clean, 0.05, 8.0, 52);
  SolverConfig cfg;
  cfg.rank = 2;
  cfg.huber_kappa = 2.0;
  SpcaResult r = solve_robust(c.x, cfg);
  REQUIRE(r.s.has_value());
  Matrix residual = c.x - (c.x * r.b) * r.a.transpose();
  Matrix expect(residual.rows(), residual.cols());
  for (Index j = 0; j < residual.cols(); ++j)
    for (Index i = 0; i < residual.rows(); ++i)
      expect(i, j) = std::copysign(std::max(std::abs(residual(i, j)) - 2.0, 0.0), residual(i, j));
  CHECK((expect - *r.s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("objective decreases every cycle") {
  const Regularizer kinds[] = {Regularizer::none, Regularizer::l1, Regularizer::l1_ridge};
  int instance = 0;
  for (Regularizer kind : kinds) {
    for (int t = 0; t < 4; ++t, ++instance) {
      auto seed = 6100 + static_cast<std::uint64_t>(instance);
      Matrix clean = tu::matrix_with_spectrum(20, 16, {5.0, 3.0}, seed);
      Corrupted c = plant_spikes(clean, 0.06, 6.0, seed + 1);
      SolverConfig cfg;
      cfg.rank = 2;
      cfg.regularizer.kind = kind;
      cfg.regularizer.alpha = kind == Regularizer::none ? 0.0 : 0.03;
      cfg.regularizer.beta = kind == Regularizer::l1_ridge ? 0.01 : 0.0;
      cfg.huber_kappa = 1.5;
      cfg.max_iter = 200;
      SpcaResult r = solve_robust(c.x, cfg);
      REQUIRE(r.objective_trace.size() == static_cast<std::size_t>(r.iterations) + 1);
      REQUIRE(r.stationarity_trace.size() == static_cast<std::size_t>(r.iterations));
      for (std::size_t i = 0; i + 1 < r.objective_trace.size(); ++i)
        CHECK(r.objective_trace[i + 1] <= r.objective_trace[i] + 1e-12);
    }
  }
}

TEST_CASE("planted spikes are recovered on low-rank data") {
  Matrix clean = tu::matrix_with_spectrum(40, 60, {20.0, 12.0}, 61);
  double sigma = std::sqrt(clean.squaredNorm() / static_cast<double>(clean.size()));
  Corrupted c = plant_spikes(clean, 0.04, 10.0 * sigma, 62);
  SolverConfig cfg;
  cfg.rank = 2;
  cfg.huber_kappa = 10.0 * sigma / 3.0;
  cfg.max_iter = 300;
  SpcaResult r = solve_robust(c.x, cfg);
  REQUIRE(r.s.has_value());
  CHECK(support_f1(c.mask, *r.s) >= 0.9);
  // Subtracting the identified spikes reconstructs the clean matrix far
  // better than projecting the corrupted data.
  double err_robust = (clean - (c.x - *r.s) * r.b * r.a.transpose()).norm();
  SpcaResult naive = solve(c.x, cfg);
  double err_naive = (clean - c.x * naive.b * naive.a.transpose()).norm();
  CHECK(err_robust < 0.5 * err_naive);
}

TEST_CASE("converged objective satisfies the Huber identity") {
  Matrix clean = tu::matrix_with_spectrum(24, 20, {5.0, 2.5}, 71);
  Corrupted c = plant_spikes(clean, 0.05, 5.0, 72);
  SolverConfig cfg;
  cfg.rank = 2;
  cfg.regularizer.kind = Regularizer::l1;
  cfg.regularizer.alpha = 0.02;
  cfg.huber_kappa = 1.0;
  cfg.tol = 1e-10;
  cfg.max_iter = 500;
  SpcaResult r = solve_robust(c.x, cfg);
  REQUIRE(r.s.has_value());
  double split = objective_robust(c.x, r.a, r.b, *r.s, cfg.regularizer, 1.0);
  Matrix residual = c.x - (c.x * r.b) * r.a.transpose();
  double huber = huber_loss(residual, 1.0) + eval_psi(cfg.regularizer, r.b);
  CHECK(std::abs(split - huber) <= 1e-8 * std::max(1.0, std::abs(huber)));
  CHECK(split == doctest::Approx(r.objective_trace.back()).epsilon(1e-10));
}

TEST_CASE("objective_robust with zero spikes matches the plain objective") {
  Matrix x = tu::gaussian(14, 10, 81);
  Matrix b = tu::gaussian(10, 2, 82);
  Matrix a = tu::random_orthonormal(10, 2, 83);
  RegularizerSpec spec;
  spec.kind = Regularizer::l1;
  spec.alpha = 0.1;
  Matrix s0 = Matrix::Zero(14, 10);
  CHECK(objective_robust(x, a, b, s0, spec, 2.0) ==
        doctest::Approx(objective_value(x, a, b, spec)).epsilon(1e-12));
}

TEST_CASE("robust solve is deterministic") {
  Matrix clean = tu::matrix_with_spectrum(20, 15, {4.0, 2.0}, 91);
  Corrupted c = plant_spikes(clean, 0.05, 4.0, 92);
  SolverConfig cfg;
  cfg.rank = 2;
  cfg.huber_kappa = 1.0;
  SpcaResult r1 = solve_robust(c.x, cfg);
  SpcaResult r2 = solve_robust(c.x, cfg);
  CHECK(tu::bitwise_equal(r1.b, r2.b));
  CHECK(tu::bitwise_equal(r1.a, r2.a));
  CHECK(tu::bitwise_equal(*r1.s, *r2.s));
}

TEST_CASE("robust solve rejects bad configurations") {
  Matrix x = tu::gaussian(12, 9, 95);
  SolverConfig cfg;
  cfg.rank = 2;

  SolverConfig bad_kappa = cfg;
  bad_kappa.huber_kappa = 0.0;
  CHECK_THROWS_AS(solve_robust(x, bad_kappa), std::invalid_argument);

  SolverConfig sketchy = cfg;
  sketchy.randomized = true;
  CHECK_THROWS_AS(solve_robust(x, sketchy), std::invalid_argument);

  SolverConfig bad_rank = cfg;
  bad_rank.rank = 100;
  CHECK_THROWS_AS(solve_robust(x, bad_rank), std::invalid_argument);

  CHECK_THROWS_AS(default_huber_kappa(x, 0), std::invalid_argument);
  CHECK_THROWS_AS(default_huber_kappa(Matrix(), 1), std::invalid_argument);
}
