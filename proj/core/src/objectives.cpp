#include "mco/objectives.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mco {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sphere(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double rosenbrock(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    double a = x[i + 1] - x[i] * x[i];
    double b = 1.0 - x[i];
    s += 100.0 * a * a + b * b;
  }
  return s;
}

double rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(kTwoPi * v);
  return s;
}

double griewank(std::span<const double> x) {
  double s = 0.0, prod = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += x[i] * x[i];
    prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return s / 4000.0 - prod + 1.0;
}

double ackley(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double sq = 0.0, cs = 0.0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(kTwoPi * v);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::numbers::e;
}

double dejong_f4(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double v = x[i] * x[i];
    s += static_cast<double>(i + 1) * v * v;
  }
  return s;
}

// Per-index sum of the three printed terms: x_i^2 + (0.5 i x_i)^2 + (0.5 i x_i)^4.
double zakharov(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double t = 0.5 * static_cast<double>(i + 1) * x[i];
    s += x[i] * x[i] + t * t + t * t * t * t;
  }
  return s;
}

double levy_terms(std::span<const double> x, double sign) {
  const std::size_t n = x.size();
  double s1 = std::sin(std::numbers::pi * x[0]);
  double sn = std::sin(kTwoPi * x[n - 1]);
  double s = s1 * s1 + (x[n - 1] - 1.0) * (x[n - 1] - 1.0) * (1.0 + sn * sn);
  double mid = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double si = std::sin(std::numbers::pi * x[i] + 1.0);
    mid += (x[i] - 1.0) * (x[i] - 1.0) * (1.0 + 10.0 * si * si);
  }
  return s + sign * mid;
}

double levy_standard(std::span<const double> x) { return levy_terms(x, +1.0); }
// Verbatim printed form with the minus sign; unbounded below, kept for reference.
double levy_paper(std::span<const double> x) { return levy_terms(x, -1.0); }

void spin_wait(double us) {
  if (us <= 0.0) return;
  using clock = std::chrono::steady_clock;
  auto deadline =
      clock::now() + std::chrono::duration_cast<clock::duration>(
                         std::chrono::duration<double, std::micro>(us));
  while (clock::now() < deadline) {
  }
}

struct Entry {
  const char* name;
  double lower, upper;
  int min_n;
  double (*fn)(std::span<const double>);
  // best point pattern: every coordinate equals this value
  double best_coord;
};

constexpr Entry kRegistry[] = {
    {"sphere", -30.0, 30.0, 1, sphere, 0.0},
    {"rosenbrock", -30.0, 30.0, 2, rosenbrock, 1.0},
    {"rastrigin", -30.0, 30.0, 1, rastrigin, 0.0},
    {"griewank", -600.0, 600.0, 1, griewank, 0.0},
    {"ackley", -32.768, 32.768, 1, ackley, 0.0},
    {"dejong-f4", -20.0, 20.0, 1, dejong_f4, 0.0},
    {"zakharov", -10.0, 10.0, 1, zakharov, 0.0},
    {"levy-standard", -10.0, 10.0, 2, levy_standard, 1.0},
    {"levy-paper", -10.0, 10.0, 2, levy_paper, 1.0},
};

}  // namespace

double evaluate(const ObjectiveSpec& obj, std::span<const double> x) {
  if (static_cast<int>(x.size()) != obj.n)
    throw std::invalid_argument("evaluate: dimension mismatch for " + obj.name);
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument("evaluate: non-finite input");
  spin_wait(obj.eval_cost_us);
  return obj.fn(x);
}

ObjectiveSpec get_objective(const std::string& name, int n) {
  for (const Entry& e : kRegistry) {
    if (name != e.name) continue;
    if (n < e.min_n)
      throw std::invalid_argument("objective " + name + " requires n >= " +
                                  std::to_string(e.min_n));
    ObjectiveSpec spec;
    spec.name = e.name;
    spec.n = n;
    spec.lower.assign(n, e.lower);
    spec.upper.assign(n, e.upper);
    spec.best_value = 0.0;
    spec.best_point = std::vector<double>(n, e.best_coord);
    spec.fn = e.fn;
    return spec;
  }
  throw std::out_of_range("unknown objective: " + name);
}

std::optional<KnownMinimum> known_minimum(const ObjectiveSpec& obj) {
  if (!obj.best_value || !obj.best_point) return std::nullopt;
  return KnownMinimum{*obj.best_value, *obj.best_point};
}

std::vector<ObjectiveInfo> list_objectives() {
  std::vector<ObjectiveInfo> out;
  for (const Entry& e : kRegistry)
    out.push_back({e.name, 30, e.lower, e.upper, 0.0});
  return out;
}

}  // namespace mco
