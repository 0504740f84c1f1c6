#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace leadform {

/// 1-based agent index, as used in scenario files and reports.
using Agent = int;

/// Directed information-flow edge: `to` listens to `from` (from ∈ N_to).
struct Edge {
    Agent from = 0;
    Agent to = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

class CommGraph {
public:
    CommGraph() = default;

    int size() const noexcept { return n_; }
    Agent leader() const noexcept { return leader_; }
    const std::set<Edge>& edges() const noexcept { return edges_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    bool has_edge(Agent from, Agent to) const { return edges_.contains(Edge{from, to}); }
    bool is_follower(Agent i) const noexcept { return i != leader_; }

    /// Agents whose state `i` receives, ascending.
    const std::vector<Agent>& in_neighbors(Agent i) const { return in_.at(static_cast<std::size_t>(i - 1)); }
    /// Agents that receive the state of `j`, ascending.
    const std::vector<Agent>& out_neighbors(Agent j) const { return out_.at(static_cast<std::size_t>(j - 1)); }

    std::vector<Agent> followers() const;

private:
    friend CommGraph build_graph(int n, Agent leader, const std::vector<Edge>& edges);

    int n_ = 0;
    Agent leader_ = 0;
    std::set<Edge> edges_;
    std::vector<std::vector<Agent>> in_;
    std::vector<std::vector<Agent>> out_;
};

/// Throws IndexOutOfRange, SelfLoop or DuplicateEdge.
CommGraph build_graph(int n, Agent leader, const std::vector<Edge>& edges);

/// Every agent reachable from the leader along edge direction.
bool has_rooted_spanning_tree(const CommGraph& g);

bool is_acyclic(const CommGraph& g);

/// Agents of one directed cycle, in traversal order, if any exists.
std::optional<std::vector<Agent>> find_cycle(const CommGraph& g);

/// Kahn order with the leader preferred, then lowest index among ready agents.
/// Throws CycleDetected.
std::vector<Agent> topological_order(const CommGraph& g);

/// Hop distance from the leader to the farthest reachable agent.
int leader_eccentricity(const CommGraph& g);

struct StructuralReport {
    std::size_t edge_count = 0;
    std::size_t min_edges = 0;  // n - 1
    std::size_t max_edges = 0;  // n(n - 1)/2
    bool spanning_tree = false;
    bool acyclic = false;
    bool at_min_edges = false;
    bool within_max = false;
    bool beta_unique = false;
    bool leader_isolated = false;  // leader receives nothing
    std::optional<std::vector<Agent>> cycle;

    /// Both structural hypotheses needed for local pole placement hold.
    bool synthesizable() const noexcept { return spanning_tree && acyclic; }
};

StructuralReport structural_report(const CommGraph& g);

}  // namespace leadform
