// Copyright 2026 The ottopics Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles/transport_lp.hpp"
#include "ottopics/errors.hpp"
#include "ottopics/sinkhorn.hpp"

using namespace ottopics;

namespace {

Matrix random_cost(std::size_t v, std::size_t k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix c(v, k);
  for (double& x : c.data()) x = u(rng);
  return c;
}

Vector row_sums(const Matrix& m) {
  Vector s(m.rows(), 0.0);
  for (std::size_t j = 0; j < m.rows(); ++j) {
    for (double x : m.row(j)) s[j] += x;
  }
  return s;
}

Vector col_sums(const Matrix& m) {
  Vector s(m.cols(), 0.0);
  for (std::size_t j = 0; j < m.rows(); ++j) {
    for (std::size_t k = 0; k < m.cols(); ++k) s[k] += m(j, k);
  }
  return s;
}

double mean(const Vector& v) { return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size()); }

}  // namespace

TEST_CASE("equal costs give the independent coupling") {
  OtProblem p{Matrix(2, 2, 1.0), {0.5, 0.5}, {0.5, 0.5}};
  const TransportPlan t = solve(p, SinkhornConfig{});
  for (double x : t.plan.data()) CHECK(std::abs(x - 0.25) < 1e-12);
  CHECK(t.converged);
}

TEST_CASE("diagonal cost at small epsilon approaches the identity coupling") {
  OtProblem p{Matrix(2, 2, Vector{0.0, 1.0, 1.0, 0.0}), {0.5, 0.5}, {0.5, 0.5}};
  SinkhornConfig cfg;
  cfg.epsilon = 0.001;
  const TransportPlan t = solve(p, cfg);
  CHECK(t.plan(0, 1) < 1e-3);
  CHECK(t.plan(1, 0) < 1e-3);
  CHECK(std::abs(t.plan(0, 0) - 0.5) < 1e-3);
  CHECK(std::abs(t.plan(1, 1) - 0.5) < 1e-3);
}

TEST_CASE("marginals: rows exact, columns within tolerance, entries nonnegative") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix c = random_cost(40, 5, rng);
    Vector s{0.1, 0.3, 0.2, 0.25, 0.15};
    const TransportPlan t = solve(OtProblem::with_uniform_rows(c, s), SinkhornConfig{});
    REQUIRE(t.converged);
    for (double r : row_sums(t.plan)) CHECK(std::abs(r - 1.0 / 40.0) < 1e-12);
    const Vector cs = col_sums(t.plan);
    double l1 = 0.0;
    for (std::size_t k = 0; k < 5; ++k) l1 += std::abs(cs[k] - s[k]);
    CHECK(l1 <= 0.005);
    CHECK(std::abs(l1 - t.marginal_error) < 1e-12);
    for (double x : t.plan.data()) CHECK(x >= 0.0);
  }
}

TEST_CASE("plan is invariant to positive rescaling of the cost") {
  std::mt19937_64 rng(2);
  const Matrix c = random_cost(8, 3, rng);
  Matrix scaled = c;
  for (double& x : scaled.data()) x *= 37.5;
  const Vector s{0.2, 0.3, 0.5};
  const TransportPlan a = solve(OtProblem::with_uniform_rows(c, s), SinkhornConfig{});
  const TransportPlan b = solve(OtProblem::with_uniform_rows(scaled, s), SinkhornConfig{});
  CHECK(std::abs(b.cost_scale - 37.5 * a.cost_scale) < 1e-12);
  for (std::size_t i = 0; i < a.plan.size(); ++i) {
    CHECK(std::abs(a.plan.data()[i] - b.plan.data()[i]) < 1e-14);
  }
}

TEST_CASE("entropic cost approaches the LP optimum from above as epsilon shrinks") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix c = random_cost(6, 3, rng);
    const Vector rows(6, 1.0 / 6.0);
    const Vector cols{0.2, 0.5, 0.3};
    const auto lp = testing::solve_transport_lp(Vector(c.data().begin(), c.data().end()), 6, 3,
                                                rows, cols);
    REQUIRE(std::isfinite(lp.cost));
    double previous = std::numeric_limits<double>::infinity();
    for (double eps : {0.1, 0.01, 0.001}) {
      SinkhornConfig cfg;
      cfg.epsilon = eps;
      cfg.stop_tolerance = 1e-9;
      cfg.max_iterations = 200000;
      const TransportPlan t = solve(OtProblem{c, rows, cols}, cfg);
      const double cost = transport_cost(c, t.plan);
      // Costs lie in [0, 1], so a column violation of d can undercut the LP by at most d.
      CHECK(cost >= lp.cost - t.marginal_error - 1e-12);
      CHECK(cost <= previous + 1e-12);
      previous = cost;
    }
    CHECK(previous <= lp.cost * 1.02);
  }
}

TEST_CASE("eps = 0.01 on a 6x3 instance is within 2% of the exact optimum") {
  std::mt19937_64 rng(99);
  const Matrix c = random_cost(6, 3, rng);
  const Vector rows(6, 1.0 / 6.0), cols(3, 1.0 / 3.0);
  const auto lp =
      testing::solve_transport_lp(Vector(c.data().begin(), c.data().end()), 6, 3, rows, cols);
  SinkhornConfig cfg;
  cfg.epsilon = 0.01;
  cfg.stop_tolerance = 1e-9;
  cfg.max_iterations = 100000;
  const double cost = transport_cost(c, solve(OtProblem{c, rows, cols}, cfg).plan);
  CHECK(std::abs(cost - lp.cost) <= 0.02 * lp.cost);
}

TEST_CASE("LP oracle: hand-solvable instance") {
  // Two sources, two sinks, diagonal is free.
  const auto lp = testing::solve_transport_lp({0.0, 1.0, 1.0, 0.0}, 2, 2, {0.5, 0.5}, {0.5, 0.5});
  CHECK(lp.cost == 0.0);
  // Unequal marginals force 0.2 across the expensive edge.
  const auto lp2 = testing::solve_transport_lp({0.0, 1.0, 1.0, 0.0}, 2, 2, {0.7, 0.3}, {0.5, 0.5});
  CHECK(std::abs(lp2.cost - 0.2) < 1e-12);
}

TEST_CASE("plan_row_entropy: one-hot and uniform rows") {
  TransportPlan t;
  t.plan = Matrix(2, 4, Vector{0.5, 0.0, 0.0, 0.0, 0.125, 0.125, 0.125, 0.125});
  const Vector h = plan_row_entropy(t);
  CHECK(h[0] == 0.0);
  CHECK(std::abs(h[1] - std::log(4.0)) < 1e-12);
}

TEST_CASE("row entropy shrinks with epsilon") {
  std::mt19937_64 rng(31);
  const Matrix c = random_cost(50, 5, rng);
  const Vector s(5, 0.2);
  double previous = std::numeric_limits<double>::infinity();
  for (double eps : {1.0, 0.1, 0.05}) {
    SinkhornConfig cfg;
    cfg.epsilon = eps;
    const TransportPlan t = solve(OtProblem::with_uniform_rows(c, s), cfg);
    REQUIRE(t.converged);
    const double h = mean(plan_row_entropy(t));
    CHECK(h < previous);
    previous = h;
  }
}

TEST_CASE("non-convergence is reported, not thrown") {
  std::mt19937_64 rng(8);
  const Matrix c = random_cost(30, 4, rng);
  SinkhornConfig cfg;
  cfg.max_iterations = 1;
  cfg.stop_tolerance = 1e-15;
  const TransportPlan t = solve(OtProblem::with_uniform_rows(c, Vector(4, 0.25)), cfg);
  CHECK_FALSE(t.converged);
  CHECK(t.iterations_used == 1);
  CHECK(t.marginal_error > 1e-15);
}

TEST_CASE("validation: shapes, weights, config") {
  CHECK_THROWS_AS(solve(OtProblem{Matrix(), {}, {}}, SinkhornConfig{}), ShapeError);
  CHECK_THROWS_AS(solve(OtProblem{Matrix(2, 2, 1.0), {0.5, 0.5}, {0.6, 0.6}}, SinkhornConfig{}),
                  ValidationError);
  CHECK_THROWS_AS(solve(OtProblem{Matrix(2, 2, -1.0), {0.5, 0.5}, {0.5, 0.5}}, SinkhornConfig{}),
                  ValidationError);
  SinkhornConfig bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}
