#include "mco/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "mco/rng.hpp"

namespace mco {

Digraph::Digraph(int q, bool directed) : q_(q), directed_(directed) {
  if (q < 1) throw std::invalid_argument("Digraph: q must be >= 1");
  adj_.assign(static_cast<std::size_t>(q) * q, 0);
  neighbors_.resize(q);
}

void Digraph::check_node(int i) const {
  if (i < 0 || i >= q_) throw std::invalid_argument("Digraph: node index out of range");
}

void Digraph::add_edge(int i, int j) {
  check_node(i);
  check_node(j);
  if (i == j) throw std::invalid_argument("Digraph: self loops are not allowed");
  if (!adj_[idx(i, j)]) {
    adj_[idx(i, j)] = 1;
    neighbors_[i].push_back(j);
    std::sort(neighbors_[i].begin(), neighbors_[i].end());
  }
  if (!directed_ && !adj_[idx(j, i)]) {
    adj_[idx(j, i)] = 1;
    neighbors_[j].push_back(i);
    std::sort(neighbors_[j].begin(), neighbors_[j].end());
  }
}

Eigen::MatrixXd Digraph::adjacency() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(q_, q_);
  for (int i = 0; i < q_; ++i)
    for (int j = 0; j < q_; ++j) A(i, j) = adj_[idx(i, j)];
  return A;
}

Eigen::MatrixXd Digraph::degree_matrix() const {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(q_, q_);
  for (int i = 0; i < q_; ++i) D(i, i) = static_cast<double>(neighbors_[i].size());
  return D;
}

Eigen::MatrixXd Digraph::laplacian() const {
  // Integer row sums by construction: degree(i) - #neighbors(i) = 0.
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(q_, q_);
  for (int i = 0; i < q_; ++i) {
    L(i, i) = static_cast<double>(neighbors_[i].size());
    for (int j : neighbors_[i]) L(i, j) = -1.0;
  }
  return L;
}

GraphKind graph_kind_from_string(const std::string& name) {
  if (name == "complete") return GraphKind::kComplete;
  if (name == "ring") return GraphKind::kRing;
  if (name == "star") return GraphKind::kStar;
  if (name == "erdos-renyi") return GraphKind::kErdosRenyi;
  throw std::invalid_argument("unknown graph kind: " + name);
}

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::kComplete: return "complete";
    case GraphKind::kRing: return "ring";
    case GraphKind::kStar: return "star";
    case GraphKind::kErdosRenyi: return "erdos-renyi";
  }
  return "?";
}

Digraph build_graph(GraphKind kind, int q, double p, std::uint64_t seed) {
  if (q < 1) throw std::invalid_argument("build_graph: q must be >= 1");
  switch (kind) {
    case GraphKind::kComplete: {
      Digraph g(q, false);
      for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j) g.add_edge(i, j);
      return g;
    }
    case GraphKind::kRing: {
      Digraph g(q, false);
      for (int i = 0; i < q; ++i) {
        int j = (i + 1) % q;
        if (i != j) g.add_edge(i, j);
      }
      return g;
    }
    case GraphKind::kStar: {
      Digraph g(q, false);
      for (int i = 1; i < q; ++i) g.add_edge(0, i);
      return g;
    }
    case GraphKind::kErdosRenyi: {
      if (p < 0.0 || p > 1.0) throw std::invalid_argument("erdos-renyi: p must be in [0,1]");
      Digraph g(q, true);
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) {
          if (i == j) continue;
          std::uint64_t lane = static_cast<std::uint64_t>(i) * q + j;
          if (rng::uniform(seed, rng::Stream::kTopology, 0, lane, 0) < p) g.add_edge(i, j);
        }
      return g;
    }
  }
  throw std::invalid_argument("build_graph: bad kind");
}

bool is_strongly_connected(const Digraph& g) {
  const int q = g.q();
  auto reach_all = [&](auto next) {
    std::vector<char> seen(q, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < q; ++v) {
        if (!seen[v] && next(u, v)) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == q;
  };
  // forward reachability from node 0 and reachability in the reversed graph
  return reach_all([&](int u, int v) { return g.edge(u, v); }) &&
         reach_all([&](int u, int v) { return g.edge(v, u); });
}

bool check_laplacian_argument_bound(const Eigen::MatrixXd& L, int q, double tol) {
  if (q < 2) throw std::invalid_argument("check_laplacian_argument_bound: q must be >= 2");
  const double limit = std::numbers::pi / 2.0 - std::numbers::pi / q + tol;
  Eigen::EigenSolver<Eigen::MatrixXd> es(L, /*computeEigenvectors=*/false);
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    std::complex<double> lam = es.eigenvalues()(k);
    if (std::abs(lam) <= tol) continue;  // the zero eigenvalue is exempt
    if (std::abs(std::arg(lam)) > limit) return false;
  }
  return true;
}

TopologySchedule TopologySchedule::fixed(Digraph g) {
  TopologySchedule s;
  s.mode_ = Mode::kStatic;
  s.q_ = g.q();
  s.graphs_.push_back(std::move(g));
  return s;
}

TopologySchedule TopologySchedule::periodic(std::vector<Digraph> graphs) {
  if (graphs.empty()) throw std::invalid_argument("periodic schedule: empty graph list");
  TopologySchedule s;
  s.mode_ = Mode::kPeriodic;
  s.q_ = graphs.front().q();
  for (const auto& g : graphs)
    if (g.q() != s.q_) throw std::invalid_argument("periodic schedule: node counts differ");
  s.graphs_ = std::move(graphs);
  return s;
}

TopologySchedule TopologySchedule::seeded_random(int q, double p, std::uint64_t seed) {
  if (q < 1) throw std::invalid_argument("seeded_random schedule: q must be >= 1");
  TopologySchedule s;
  s.mode_ = Mode::kSeededRandom;
  s.q_ = q;
  s.p_ = p;
  s.seed_ = seed;
  return s;
}

Digraph TopologySchedule::topology_at(std::int64_t t) const {
  if (t < 0) throw std::invalid_argument("topology_at: t must be >= 0");
  switch (mode_) {
    case Mode::kStatic:
      return graphs_.front();
    case Mode::kPeriodic:
      return graphs_[static_cast<std::size_t>(t) % graphs_.size()];
    case Mode::kSeededRandom:
      // keyed by (seed, t): a pure function of its arguments
      return build_graph(GraphKind::kErdosRenyi, q_, p_,
                         rng::bits(seed_, rng::Stream::kSchedule, static_cast<std::uint64_t>(t), 0, 0));
  }
  throw std::logic_error("topology_at: bad mode");
}

int TopologySchedule::q() const { return q_; }

std::string digraph_to_json(const Digraph& g) {
  nlohmann::json j;
  j["q"] = g.q();
  j["directed"] = g.directed();
  nlohmann::json edges = nlohmann::json::array();
  for (int i = 0; i < g.q(); ++i)
    for (int k : g.out_neighbors(i)) {
      if (!g.directed() && k < i) continue;
      edges.push_back({i, k});
    }
  j["edges"] = std::move(edges);
  return j.dump();
}

Digraph digraph_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Digraph g(j.at("q").get<int>(), j.at("directed").get<bool>());
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("digraph_from_json: edge entries must be [i, j]");
    g.add_edge(e[0].get<int>(), e[1].get<int>());
  }
  return g;
}

}  // namespace mco
