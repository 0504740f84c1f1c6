#include "leadform/graph.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "leadform/errors.hpp"

namespace leadform {

std::vector<Agent> CommGraph::followers() const {
    std::vector<Agent> out;
    out.reserve(static_cast<std::size_t>(n_ > 0 ? n_ - 1 : 0));
    for (Agent i = 1; i <= n_; ++i) {
        if (i != leader_) out.push_back(i);
    }
    return out;
}

CommGraph build_graph(int n, Agent leader, const std::vector<Edge>& edges) {
    if (n < 2) {
        throw Error(ErrorCode::IndexOutOfRange, "agent count must be at least 2, got " + std::to_string(n));
    }
    if (leader < 1 || leader > n) {
        throw Error(ErrorCode::IndexOutOfRange, "leader " + std::to_string(leader) + " outside [1, " + std::to_string(n) + "]");
    }
    CommGraph g;
    g.n_ = n;
    g.leader_ = leader;
    g.in_.resize(static_cast<std::size_t>(n));
    g.out_.resize(static_cast<std::size_t>(n));
    for (const auto& e : edges) {
        if (e.from < 1 || e.from > n || e.to < 1 || e.to > n) {
            throw Error(ErrorCode::IndexOutOfRange,
                        "edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " outside [1, " + std::to_string(n) + "]");
        }
        if (e.from == e.to) {
            throw Error(ErrorCode::SelfLoop, "agent " + std::to_string(e.from) + " listens to itself");
        }
        if (!g.edges_.insert(e).second) {
            throw Error(ErrorCode::DuplicateEdge, "edge " + std::to_string(e.from) + "->" + std::to_string(e.to) + " listed twice");
        }
    }
    // std::set order is (from, to), so both adjacency lists come out sorted
    // after a final sort of the in-lists.
    for (const auto& e : g.edges_) {
        g.in_[static_cast<std::size_t>(e.to - 1)].push_back(e.from);
        g.out_[static_cast<std::size_t>(e.from - 1)].push_back(e.to);
    }
    for (auto& list : g.in_) std::sort(list.begin(), list.end());
    return g;
}

namespace {

std::vector<int> bfs_distances(const CommGraph& g) {
    std::vector<int> dist(static_cast<std::size_t>(g.size()), -1);
    std::queue<Agent> frontier;
    dist[static_cast<std::size_t>(g.leader() - 1)] = 0;
    frontier.push(g.leader());
    while (!frontier.empty()) {
        Agent j = frontier.front();
        frontier.pop();
        for (Agent i : g.out_neighbors(j)) {
            auto& d = dist[static_cast<std::size_t>(i - 1)];
            if (d < 0) {
                d = dist[static_cast<std::size_t>(j - 1)] + 1;
                frontier.push(i);
            }
        }
    }
    return dist;
}

}  // namespace

bool has_rooted_spanning_tree(const CommGraph& g) {
    auto dist = bfs_distances(g);
    return std::none_of(dist.begin(), dist.end(), [](int d) { return d < 0; });
}

int leader_eccentricity(const CommGraph& g) {
    auto dist = bfs_distances(g);
    return *std::max_element(dist.begin(), dist.end());
}

std::optional<std::vector<Agent>> find_cycle(const CommGraph& g) {
    enum class Mark { White, Grey, Black };
    const auto n = static_cast<std::size_t>(g.size());
    std::vector<Mark> mark(n, Mark::White);
    std::vector<Agent> parent(n, 0);

    // Iterative DFS; a grey successor closes a cycle.
    for (Agent root = 1; root <= g.size(); ++root) {
        if (mark[static_cast<std::size_t>(root - 1)] != Mark::White) continue;
        std::vector<std::pair<Agent, std::size_t>> stack{{root, 0}};
        mark[static_cast<std::size_t>(root - 1)] = Mark::Grey;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            const auto& succ = g.out_neighbors(v);
            if (next == succ.size()) {
                mark[static_cast<std::size_t>(v - 1)] = Mark::Black;
                stack.pop_back();
                continue;
            }
            Agent w = succ[next++];
            auto& mw = mark[static_cast<std::size_t>(w - 1)];
            if (mw == Mark::Grey) {
                std::vector<Agent> cycle{w};
                for (Agent u = v; u != w; u = parent[static_cast<std::size_t>(u - 1)]) cycle.push_back(u);
                std::reverse(cycle.begin() + 1, cycle.end());
                return cycle;
            }
            if (mw == Mark::White) {
                mw = Mark::Grey;
                parent[static_cast<std::size_t>(w - 1)] = v;
                stack.emplace_back(w, 0);
            }
        }
    }
    return std::nullopt;
}

bool is_acyclic(const CommGraph& g) { return !find_cycle(g).has_value(); }

std::vector<Agent> topological_order(const CommGraph& g) {
    const auto n = static_cast<std::size_t>(g.size());
    std::vector<std::size_t> indegree(n);
    for (Agent i = 1; i <= g.size(); ++i) indegree[static_cast<std::size_t>(i - 1)] = g.in_neighbors(i).size();

    // Leader sorts ahead of every follower; ties among followers by index.
    auto key = [&](Agent a) { return a == g.leader() ? 0 : a; };
    auto later = [&](Agent a, Agent b) { return key(a) > key(b); };
    std::priority_queue<Agent, std::vector<Agent>, decltype(later)> ready(later);
    for (Agent i = 1; i <= g.size(); ++i) {
        if (indegree[static_cast<std::size_t>(i - 1)] == 0) ready.push(i);
    }

    std::vector<Agent> order;
    order.reserve(n);
    while (!ready.empty()) {
        Agent j = ready.top();
        ready.pop();
        order.push_back(j);
        for (Agent i : g.out_neighbors(j)) {
            if (--indegree[static_cast<std::size_t>(i - 1)] == 0) ready.push(i);
        }
    }
    if (order.size() != n) {
        std::string msg = "no topological order, cycle through agents";
        if (auto cycle = find_cycle(g)) {
            for (Agent a : *cycle) msg += " " + std::to_string(a);
        }
        throw Error(ErrorCode::CycleDetected, msg);
    }
    return order;
}

StructuralReport structural_report(const CommGraph& g) {
    StructuralReport r;
    const auto n = static_cast<std::size_t>(g.size());
    r.edge_count = g.edge_count();
    r.min_edges = n - 1;
    r.max_edges = n * (n - 1) / 2;
    r.spanning_tree = has_rooted_spanning_tree(g);
    r.cycle = find_cycle(g);
    r.acyclic = !r.cycle.has_value();
    r.at_min_edges = r.edge_count == r.min_edges;
    r.within_max = r.edge_count <= r.max_edges;
    r.leader_isolated = g.in_neighbors(g.leader()).empty();
    r.beta_unique = true;
    for (Agent i : g.followers()) {
        if (g.in_neighbors(i).size() != 1) r.beta_unique = false;
    }
    return r;
}

}  // namespace leadform
