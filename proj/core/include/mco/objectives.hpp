#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mco {

// A benchmark objective: evaluation function, box bounds, and (when known)
// the global optimum. eval_cost_us injects a busy-wait per call so that
// parallel speedup is measurable on otherwise cheap functions; it never
// changes the returned value.
struct ObjectiveSpec {
  std::string name;
  int n = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::optional<double> best_value;
  std::optional<std::vector<double>> best_point;
  double eval_cost_us = 0.0;
  std::function<double(std::span<const double>)> fn;
};

double evaluate(const ObjectiveSpec& obj, std::span<const double> x);

// Registry of the eight benchmark functions (the Levy entry ships in two
// variants, see list_objectives). Throws std::out_of_range for unknown names
// and std::invalid_argument for an unsupported dimension.
ObjectiveSpec get_objective(const std::string& name, int n);

struct KnownMinimum {
  double value;
  std::vector<double> point;
};
std::optional<KnownMinimum> known_minimum(const ObjectiveSpec& obj);

struct ObjectiveInfo {
  std::string name;
  int default_n;
  double lower, upper;
  std::optional<double> best_value;
};
std::vector<ObjectiveInfo> list_objectives();

}  // namespace mco
