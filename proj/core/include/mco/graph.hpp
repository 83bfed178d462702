#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace mco {

// Node-fixed communication graph with 0/1 adjacency and no self loops.
// Row i of the adjacency lists the out-neighbors of node i, the agents
// whose state agent i reads.
class Digraph {
 public:
  Digraph(int q, bool directed);

  int q() const { return q_; }
  bool directed() const { return directed_; }

  bool edge(int i, int j) const { return adj_[idx(i, j)] != 0; }
  // Adds i->j; for undirected graphs also j->i. Self loops are rejected.
  void add_edge(int i, int j);

  const std::vector<int>& out_neighbors(int i) const { return neighbors_[i]; }

  Eigen::MatrixXd adjacency() const;
  Eigen::MatrixXd degree_matrix() const;
  // L = Delta - A; rows sum to zero exactly (integer arithmetic).
  Eigen::MatrixXd laplacian() const;

  bool operator==(const Digraph& other) const = default;

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * q_ + j; }
  void check_node(int i) const;

  int q_;
  bool directed_;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<int>> neighbors_;
};

enum class GraphKind { kComplete, kRing, kStar, kErdosRenyi };

GraphKind graph_kind_from_string(const std::string& name);
std::string to_string(GraphKind kind);

// Deterministic in (kind, q, p, seed). Complete/ring/star are undirected;
// erdos-renyi draws each ordered pair independently (directed).
Digraph build_graph(GraphKind kind, int q, double p = 0.5, std::uint64_t seed = 0);

bool is_strongly_connected(const Digraph& g);

// Argument bound on Laplacian eigenvalues: every eigenvalue with |lambda| > tol
// must satisfy |arg lambda| <= pi/2 - pi/q + tol.
bool check_laplacian_argument_bound(const Eigen::MatrixXd& L, int q, double tol);

// Time-varying topology: the same fixed graph, a periodic list, or a fresh
// seeded Erdos-Renyi draw per t. topology_at is a pure function of (schedule, t).
class TopologySchedule {
 public:
  static TopologySchedule fixed(Digraph g);
  static TopologySchedule periodic(std::vector<Digraph> graphs);
  static TopologySchedule seeded_random(int q, double p, std::uint64_t seed);

  Digraph topology_at(std::int64_t t) const;
  int q() const;

 private:
  TopologySchedule() = default;
  enum class Mode { kStatic, kPeriodic, kSeededRandom };
  Mode mode_ = Mode::kStatic;
  std::vector<Digraph> graphs_;
  int q_ = 0;
  double p_ = 0.5;
  std::uint64_t seed_ = 0;
};

// JSON wire format: {"q": int, "directed": bool, "edges": [[i, j], ...]},
// 0-based node indices. Undirected graphs list each edge once with i < j.
std::string digraph_to_json(const Digraph& g);
Digraph digraph_from_json(const std::string& text);

}  // namespace mco
