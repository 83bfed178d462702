#include <doctest.h>

#include <chrono>
#include <cmath>
#include <vector>

#include "mco/objectives.hpp"
#include "test_support.hpp"

using namespace mco;

TEST_CASE("known values by hand") {
  ObjectiveSpec sphere = get_objective("sphere", 2);
  CHECK(evaluate(sphere, std::vector<double>{0.0, 0.0}) == 0.0);
  CHECK(evaluate(sphere, std::vector<double>{1.0, 2.0}) == 5.0);

  ObjectiveSpec rosen = get_objective("rosenbrock", 4);
  CHECK(evaluate(rosen, std::vector<double>(4, 1.0)) == 0.0);

  ObjectiveSpec ackley = get_objective("ackley", 3);
  CHECK(std::abs(evaluate(ackley, std::vector<double>(3, 0.0))) < 1e-12);

  // zakharov at (1, 0): 1 + (0.5*1*1)^2 + (0.5*1*1)^4 = 1.3125
  ObjectiveSpec zak = get_objective("zakharov", 2);
  CHECK(evaluate(zak, std::vector<double>{1.0, 0.0}) == doctest::Approx(1.3125).epsilon(1e-15));

  ObjectiveSpec rast = get_objective("rastrigin", 2);
  CHECK(std::abs(evaluate(rast, std::vector<double>{0.0, 0.0})) < 1e-12);
}

TEST_CASE("bounds follow the published hypercubes") {
  CHECK(get_objective("sphere", 30).lower[0] == -30.0);
  CHECK(get_objective("sphere", 30).upper[29] == 30.0);
  CHECK(get_objective("griewank", 30).lower[0] == -600.0);
  CHECK(get_objective("griewank", 30).upper[0] == 600.0);
  CHECK(get_objective("ackley", 5).upper[0] == 32.768);
  CHECK(get_objective("dejong-f4", 5).upper[0] == 20.0);
  CHECK(get_objective("zakharov", 5).upper[0] == 10.0);
  CHECK(get_objective("levy-standard", 5).upper[0] == 10.0);
}

TEST_CASE("registry errors") {
  CHECK_THROWS_AS(get_objective("unknown", 5), std::out_of_range);
  CHECK_THROWS_AS(get_objective("rosenbrock", 1), std::invalid_argument);
  CHECK_THROWS_AS(get_objective("levy-standard", 1), std::invalid_argument);
  CHECK_THROWS_AS(get_objective("sphere", 0), std::invalid_argument);
}

TEST_CASE("evaluate input validation") {
  ObjectiveSpec sphere = get_objective("sphere", 3);
  CHECK_THROWS_AS(evaluate(sphere, std::vector<double>{1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(
      evaluate(sphere, std::vector<double>{1.0, std::numeric_limits<double>::infinity(), 0.0}),
      std::invalid_argument);
}

TEST_CASE("known minimum is attained to 1e-12 for n in {2, 5, 30}") {
  for (const auto& info : list_objectives()) {
    for (int n : {2, 5, 30}) {
      ObjectiveSpec obj = get_objective(info.name, n);
      auto km = known_minimum(obj);
      REQUIRE(km.has_value());
      CHECK(std::abs(evaluate(obj, km->point) - km->value) < 1e-12);
    }
  }
}

TEST_CASE("custom objective without optimum reports absent") {
  ObjectiveSpec custom;
  custom.name = "custom";
  custom.n = 1;
  custom.lower = {-1.0};
  custom.upper = {1.0};
  custom.fn = [](std::span<const double> x) { return x[0]; };
  CHECK_FALSE(known_minimum(custom).has_value());
}

TEST_CASE("evaluation is deterministic bit for bit") {
  ObjectiveSpec grie = get_objective("griewank", 7);
  std::vector<double> x{1.0, -3.5, 400.0, 0.25, -7.0, 2.0, 599.0};
  CHECK(evaluate(grie, x) == evaluate(grie, x));
}

TEST_CASE("nonnegative forms never dip below their minimum on random probes") {
  const char* names[] = {"sphere", "rastrigin", "griewank", "ackley", "dejong-f4", "zakharov"};
  for (const char* name : names) {
    ObjectiveSpec obj = get_objective(name, 6);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<double> x(6);
      for (int d = 0; d < 6; ++d)
        x[d] = obj.lower[d] +
               (obj.upper[d] - obj.lower[d]) * mco::test::u01(11, trial, d, 0);
      CHECK(evaluate(obj, x) >= -1e-9);
    }
  }
}

TEST_CASE("the verbatim levy variant is unbounded below, the standard one is not") {
  ObjectiveSpec paper = get_objective("levy-paper", 2);
  ObjectiveSpec standard = get_objective("levy-standard", 2);
  // away from x = 1 the two variants differ by the sign of the middle sum
  std::vector<double> x{9.5, 0.0};
  CHECK(evaluate(paper, x) < 0.0);
  CHECK(evaluate(standard, x) > 0.0);
  // both are exactly 0 at the all-ones point
  CHECK(std::abs(evaluate(paper, std::vector<double>{1.0, 1.0})) < 1e-12);
  CHECK(std::abs(evaluate(standard, std::vector<double>{1.0, 1.0})) < 1e-12);
}

TEST_CASE("cost injection changes timing only, never the value") {
  ObjectiveSpec cheap = get_objective("sphere", 4);
  ObjectiveSpec costly = get_objective("sphere", 4);
  costly.eval_cost_us = 200.0;
  std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  CHECK(evaluate(cheap, x) == evaluate(costly, x));

  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 10; ++i) evaluate(costly, x);
  double elapsed =
      std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  CHECK(elapsed >= 10 * 200.0 * 0.9);
}
