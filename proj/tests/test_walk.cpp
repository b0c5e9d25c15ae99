#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "qwalk/errors.hpp"
#include "qwalk/walk.hpp"

using namespace qwalk;

namespace {

double dot(const RealVector3& a, const RealVector3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool near(Amplitude a, Amplitude b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("coin parameter and mixing angle domains") {
  CHECK_THROWS_AS(CoinParameter(-0.1), DomainError);
  CHECK_THROWS_AS(CoinParameter(1.1), DomainError);
  CHECK_THROWS_AS(CoinParameter(std::nan("")), DomainError);
  CHECK(CoinParameter(0.0).degenerate());
  CHECK(CoinParameter(1.0).degenerate());
  CHECK_FALSE(CoinParameter(0.5).degenerate());
  CHECK_THROWS_AS(MixingAngle(-1e-9), DomainError);
  CHECK_THROWS_AS(MixingAngle(3.2), DomainError);
  CHECK_NOTHROW(MixingAngle(std::numbers::pi));
}

TEST_CASE("build_coin matches the closed-form special cases") {
  const RealMatrix3 grover{{{-1.0 / 3, 2.0 / 3, 2.0 / 3}, {2.0 / 3, -1.0 / 3, 2.0 / 3}, {2.0 / 3, 2.0 / 3, -1.0 / 3}}};
  const RealMatrix3 permutation{{{0, 0, 1}, {0, -1, 0}, {1, 0, 0}}};
  const RealMatrix3 diagonal{{{-1, 0, 0}, {0, 1, 0}, {0, 0, -1}}};
  const auto g = build_coin(CoinParameter(1.0 / std::numbers::sqrt3)).matrix;
  const auto p = build_coin(CoinParameter(0.0)).matrix;
  const auto d = build_coin(CoinParameter(1.0)).matrix;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(near(g[i][j], grover[i][j], 1e-15));
      CHECK(p[i][j] == permutation[i][j]);
      CHECK(d[i][j] == diagonal[i][j]);
    }
  }
}

TEST_CASE("coin is symmetric, orthogonal and has the stated eigenbasis") {
  for (int k = 0; k <= 200; ++k) {
    const double rho = k / 200.0;
    const CoinOperator c = build_coin(CoinParameter(rho));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        CHECK(c.matrix[i][j] == c.matrix[j][i]);
        double ctc = 0.0;
        for (int l = 0; l < 3; ++l) ctc += c.matrix[l][i] * c.matrix[l][j];
        CHECK(near(ctc, i == j ? 1.0 : 0.0, 1e-12));
      }
    }
    const RealVector3* vecs[] = {&c.sigma_plus, &c.sigma1_minus, &c.sigma2_minus};
    for (int v = 0; v < 3; ++v) {
      const RealVector3 cv = c.apply(*vecs[v]);
      for (int i = 0; i < 3; ++i) CHECK(near(cv[i], c.eigenvalues[v] * (*vecs[v])[i], 1e-12));
      for (int w = 0; w < 3; ++w) CHECK(near(dot(*vecs[v], *vecs[w]), v == w ? 1.0 : 0.0, 1e-12));
    }
  }
}

TEST_CASE("theta_c examples") {
  CHECK(theta_c(CoinParameter(1.0)).value() == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
  CHECK(theta_c(CoinParameter(0.0)).value() == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  const CoinParameter grover(1.0 / std::numbers::sqrt3);
  const double tc = theta_c(grover).value();
  CHECK(tc == doctest::Approx(std::acos(-std::sqrt(2.0 / 3.0))).epsilon(1e-15));
  CHECK(tc == doctest::Approx(2.52611).epsilon(1e-6));
  CHECK(std::abs(decompose_symmetric_input(MixingAngle(tc), grover).alpha) < 1e-12);
  for (int k = 0; k <= 100; ++k) {
    const double t = theta_c(CoinParameter(k / 100.0)).value();
    CHECK(t >= std::numbers::pi / 2);
    CHECK(t <= std::numbers::pi);
  }
}

TEST_CASE("initial_state examples") {
  const double rho = 1.0 / std::numbers::sqrt3;
  {
    const auto init = initial_state(MixingAngle(0.0), CoinParameter(0.4), 5);
    CHECK(init.state.at(0) == Spinor{0.0, 1.0, 0.0});
    CHECK(near(init.decomposition.alpha, 0.4, 1e-15));
    CHECK(near(init.decomposition.beta, -std::sqrt(1 - 0.16), 1e-15));
    CHECK(init.decomposition.gamma == 0.0);
  }
  {
    const auto init = initial_state(MixingAngle(std::numbers::pi / 2), CoinParameter(rho), 5);
    const Spinor s = init.state.at(0);
    CHECK(near(s.left, std::numbers::sqrt2 / 2, 1e-15));
    CHECK(near(s.stay, 0.0, 1e-16));
    CHECK(near(s.right, std::numbers::sqrt2 / 2, 1e-15));
    CHECK(near(init.decomposition.alpha, std::sqrt(2.0 / 3.0), 1e-15));
    CHECK(near(init.decomposition.beta, 1.0 / std::numbers::sqrt3, 1e-15));
  }
  {
    // At theta_c the input is sigma1- up to a global sign.
    const CoinParameter r(rho);
    const auto init = initial_state(theta_c(r), r, 5);
    const CoinOperator coin = build_coin(r);
    const RealVector3 v = symmetric_coin_state(theta_c(r));
    CHECK(near(std::abs(dot(v, coin.sigma1_minus)), 1.0, 1e-12));
    CHECK(near(init.decomposition.alpha, 0.0, 1e-12));
  }
  CHECK_THROWS_AS(initial_state(MixingAngle(1.0), CoinParameter(0.5), 0), DomainError);
}

TEST_CASE("decomposition is complete and matches the projection") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 500; ++n) {
    const CoinParameter rho(u(rng));
    const MixingAngle theta(std::numbers::pi * u(rng));
    const CoinOperator coin = build_coin(rho);
    const InputDecomposition d = decompose_symmetric_input(theta, rho);
    CHECK(d.gamma == 0.0);
    CHECK(near(d.alpha * d.alpha + d.beta * d.beta + d.gamma * d.gamma, 1.0, 1e-12));
    const RealVector3 v = symmetric_coin_state(theta);
    const RealVector3 back = d.reconstruct(coin);
    for (int i = 0; i < 3; ++i) CHECK(near(back[i], v[i], 1e-12));
    const InputDecomposition p = decompose(v, coin);
    CHECK(near(p.alpha, d.alpha, 1e-12));
    CHECK(near(p.beta, d.beta, 1e-12));
    CHECK(near(p.gamma, 0.0, 1e-12));
  }
}

TEST_CASE("one step from |S> at the origin") {
  for (double rho : {0.0, 0.2, 1.0 / std::numbers::sqrt3, 0.9, 1.0}) {
    WalkState state(3);
    state.set(0, Spinor{0.0, 1.0, 0.0});
    step(state, build_coin(CoinParameter(rho)));
    const double off = rho * std::sqrt(2 - 2 * rho * rho);
    CHECK(near(state.at(-1).left, off, 1e-15));
    CHECK(near(state.at(0).stay, 2 * rho * rho - 1, 1e-15));
    CHECK(near(state.at(1).right, off, 1e-15));
    CHECK(state.at(-1).stay == Amplitude{});
    CHECK(state.at(-1).right == Amplitude{});
    CHECK(state.at(1).left == Amplitude{});
    CHECK(state.at(0).left == Amplitude{});
    CHECK(state.at(0).right == Amplitude{});
    CHECK(state.time() == 1);
  }
}

TEST_CASE("rho = 1 keeps |S> at the origin forever") {
  WalkState state(50);
  state.set(0, Spinor{0.0, 1.0, 0.0});
  const CoinOperator coin = build_coin(CoinParameter(1.0));
  for (int t = 0; t < 50; ++t) step(state, coin);
  CHECK(state.at(0) == Spinor{0.0, 1.0, 0.0});
  CHECK(state.norm_squared() == 1.0);
}

TEST_CASE("sigma2- flips sign under the coin before the shift") {
  const CoinOperator coin = build_coin(CoinParameter(0.37));
  WalkState state(2);
  state.set(0, Spinor{coin.sigma2_minus[0], coin.sigma2_minus[1], coin.sigma2_minus[2]});
  step(state, coin);
  CHECK(near(state.at(-1).left, -coin.sigma2_minus[0], 1e-15));
  CHECK(near(state.at(0).stay, -coin.sigma2_minus[1], 1e-15));
  CHECK(near(state.at(1).right, -coin.sigma2_minus[2], 1e-15));
}

TEST_CASE("step refuses to leave the lattice") {
  WalkState state(2);
  state.set(0, Spinor{0.3, 0.8, 0.52});
  const CoinOperator coin = build_coin(CoinParameter(0.6));
  step(state, coin);
  step(state, coin);
  const WalkState before = state;
  CHECK_THROWS_AS(step(state, coin), CapacityError);
  CHECK(state.time() == before.time());
  for (int x = -2; x <= 2; ++x) CHECK(state.at(x) == before.at(x));
}

TEST_CASE("unitarity for random states over 1000 steps") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  for (int run = 0; run < 100; ++run) {
    const CoinParameter rho(u(rng));
    const CoinOperator coin = build_coin(rho);
    WalkState state(1010);
    double norm = 0.0;
    std::vector<Spinor> init;
    for (int x = -5; x <= 5; ++x) {
      Spinor s{{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}};
      init.push_back(s);
      norm += s.norm_squared();
    }
    const double scale = 1.0 / std::sqrt(norm);
    for (int x = -5; x <= 5; ++x) {
      Spinor s = init[static_cast<std::size_t>(x + 5)];
      s.left *= scale;
      s.stay *= scale;
      s.right *= scale;
      state.set(x, s);
    }
    const double n0 = state.norm_squared();
    for (int t = 0; t < 1000; ++t) step(state, coin);
    CHECK(std::abs(state.norm_squared() - n0) < 1e-10);
  }
}

TEST_CASE("light cone and reflection symmetry of the theta input") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int run = 0; run < 10; ++run) {
    const CoinParameter rho(u(rng));
    auto init = initial_state(MixingAngle(std::numbers::pi * u(rng)), rho, 300);
    WalkState& state = init.state;
    const CoinOperator coin = build_coin(rho);
    for (int t = 1; t <= 200; ++t) {
      step(state, coin);
      CHECK(std::abs(state.norm_squared() - 1.0) < 1e-12);
      for (int x = t + 1; x <= 300; ++x) {
        REQUIRE(state.at(x) == Spinor{});
        REQUIRE(state.at(-x) == Spinor{});
      }
      for (int x = 1; x <= t; ++x) REQUIRE(near(state.at(x).norm_squared(), state.at(-x).norm_squared(), 1e-12));
    }
  }
}
