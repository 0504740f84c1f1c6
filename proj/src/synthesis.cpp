#include "leadform/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "leadform/errors.hpp"

namespace leadform {

namespace {

std::string edge_name(Agent i, Agent j) { return "beta_" + std::to_string(i) + std::to_string(j); }

}  // namespace

PoleSpec PoleSpec::from_assignment(std::map<Agent, double> by_agent) {
    PoleSpec spec;
    for (const auto& [agent, pole] : by_agent) spec.lambdas.push_back(pole);
    spec.by_agent = std::move(by_agent);
    return spec;
}

bool PoleSpec::has_unstable() const {
    return std::any_of(lambdas.begin(), lambdas.end(), [](double l) { return l >= 0.0; });
}

std::vector<Complex> PoleSpec::with_leader_zero() const {
    std::vector<Complex> out(lambdas.begin(), lambdas.end());
    out.emplace_back(0.0, 0.0);
    return out;
}

Vector Formation::as_vector() const { return Eigen::Map<const Vector>(f.data(), static_cast<Eigen::Index>(f.size())); }

std::vector<Agent> Formation::zero_entries() const {
    std::vector<Agent> out;
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (f[k] == 0.0) out.push_back(static_cast<Agent>(k + 1));
    }
    return out;
}

std::string_view to_string(BetaPolicy::Kind kind) {
    switch (kind) {
        case BetaPolicy::Kind::TreeUnique: return "tree-unique";
        case BetaPolicy::Kind::MinNorm: return "min-norm";
        case BetaPolicy::Kind::Pinned: return "pinned";
    }
    return "?";
}

BetaPolicy::Kind parse_policy(std::string_view name) {
    if (name == "tree-unique") return BetaPolicy::Kind::TreeUnique;
    if (name == "min-norm") return BetaPolicy::Kind::MinNorm;
    if (name == "pinned") return BetaPolicy::Kind::Pinned;
    throw Error(ErrorCode::ParseError, "unknown beta policy '" + std::string(name) + "'");
}

GainSet assign_diagonal(const CommGraph& g, const PoleSpec& poles) {
    if (!has_rooted_spanning_tree(g)) {
        throw Error(ErrorCode::StructuralViolation, "some agent is not reachable from leader " + std::to_string(g.leader()));
    }
    if (auto cycle = find_cycle(g)) {
        std::string msg = "directed cycle through agents";
        for (Agent a : *cycle) msg += " " + std::to_string(a);
        throw Error(ErrorCode::StructuralViolation, msg + "; poles would depend on the inter-agent gains");
    }
    const auto followers = g.followers();
    if (poles.lambdas.size() != followers.size()) {
        throw Error(ErrorCode::PoleCountMismatch, "expected " + std::to_string(followers.size()) + " follower poles, got " +
                                                      std::to_string(poles.lambdas.size()));
    }

    GainSet gains;
    gains.n = g.size();
    gains.leader = g.leader();
    gains.diag.assign(static_cast<std::size_t>(g.size()), 0.0);

    if (!poles.by_agent.empty()) {
        if (poles.by_agent.size() != followers.size()) {
            throw Error(ErrorCode::PoleCountMismatch, "per-agent pole map must name every follower exactly once");
        }
        for (const auto& [agent, pole] : poles.by_agent) {
            if (agent < 1 || agent > g.size() || agent == g.leader()) {
                throw Error(ErrorCode::PoleCountMismatch, "per-agent pole given for non-follower " + std::to_string(agent));
            }
            gains.diag[static_cast<std::size_t>(agent - 1)] = pole;
        }
    } else {
        std::vector<double> sorted = poles.lambdas;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        for (std::size_t k = 0; k < followers.size(); ++k) gains.diag[static_cast<std::size_t>(followers[k] - 1)] = sorted[k];
    }
    for (Agent i : followers) {
        if (gains.diagonal(i) == 0.0) {
            throw Error(ErrorCode::ZeroFollowerPole, "follower " + std::to_string(i) + " assigned the pole 0");
        }
    }
    return gains;
}

std::vector<double> solve_beta_row(Agent agent, double diag, double own_target,
                                   std::span<const double> neighbor_targets,
                                   std::span<const std::optional<double>> pinned,
                                   BetaPolicy::Kind kind) {
    const std::size_t m = neighbor_targets.size();
    if (m == 0) {
        throw Error(ErrorCode::StructuralViolation, "follower " + std::to_string(agent) + " has no in-neighbor");
    }
    const double rhs0 = -(diag * own_target);
    std::vector<double> beta(m, 0.0);

    if (kind == BetaPolicy::Kind::TreeUnique) {
        if (m != 1) {
            throw Error(ErrorCode::PolicyMismatch, "tree-unique policy needs one in-neighbor, agent " + std::to_string(agent) +
                                                       " has " + std::to_string(m));
        }
        if (neighbor_targets[0] == 0.0) {
            throw Error(ErrorCode::RowUnsolvable, "agent " + std::to_string(agent) + ": neighbor target is 0");
        }
        beta[0] = rhs0 / neighbor_targets[0];
        return beta;
    }

    double rhs = rhs0;
    double scale = std::abs(rhs0);
    std::vector<std::size_t> free;
    for (std::size_t k = 0; k < m; ++k) {
        if (k < pinned.size() && pinned[k].has_value()) {
            beta[k] = *pinned[k];
            rhs -= beta[k] * neighbor_targets[k];
            scale += std::abs(beta[k] * neighbor_targets[k]);
        } else {
            free.push_back(k);
        }
    }
    const double tol = 1e-9 * std::max(1.0, scale);
    const bool any_pinned = free.size() != m;

    double norm2 = 0.0;
    for (auto k : free) norm2 += neighbor_targets[k] * neighbor_targets[k];
    if (norm2 == 0.0) {
        if (std::abs(rhs) > tol) {
            throw Error(any_pinned ? ErrorCode::PinnedInconsistent : ErrorCode::RowUnsolvable,
                        "agent " + std::to_string(agent) + ": row residual " + std::to_string(rhs) +
                            " cannot be absorbed by the free weights");
        }
        return beta;
    }
    std::vector<std::size_t> nonzero;
    for (auto k : free) {
        if (neighbor_targets[k] != 0.0) nonzero.push_back(k);
    }
    if (nonzero.size() == 1) {
        beta[nonzero[0]] = rhs / neighbor_targets[nonzero[0]];
    } else {
        for (auto k : free) beta[k] = rhs * neighbor_targets[k] / norm2;
    }
    return beta;
}

GainSet solve_betas(const CommGraph& g, const GainSet& gains, const Formation& f, const BetaPolicy& policy) {
    if (!gains.has_diag() || gains.n != g.size()) {
        throw Error(ErrorCode::IncompleteGains, "diagonal gains must be assigned before solving betas");
    }
    if (f.size() != g.size()) {
        throw Error(ErrorCode::DimensionMismatch, "formation has " + std::to_string(f.size()) + " entries for " +
                                                      std::to_string(g.size()) + " agents");
    }
    for (const auto& [edge, value] : policy.pinned) {
        if (!g.has_edge(edge.from, edge.to)) {
            throw Error(ErrorCode::PinnedInconsistent, "pinned " + edge_name(edge.to, edge.from) + " is not a graph edge");
        }
    }

    GainSet out = gains;
    out.betas.clear();
    const auto row_kind = policy.kind == BetaPolicy::Kind::Pinned ? BetaPolicy::Kind::MinNorm : policy.kind;

    for (Agent j : g.in_neighbors(g.leader())) {
        if (auto it = policy.pinned.find(Edge{j, g.leader()}); it != policy.pinned.end() && it->second != 0.0) {
            throw Error(ErrorCode::PinnedInconsistent, "the leader takes no feedback, " + edge_name(g.leader(), j) + " must be 0");
        }
        out.betas[Edge{j, g.leader()}] = 0.0;
    }
    for (Agent i : g.followers()) {
        const auto& nbrs = g.in_neighbors(i);
        std::vector<double> targets;
        std::vector<std::optional<double>> pinned;
        for (Agent j : nbrs) {
            targets.push_back(f.target(j));
            if (auto it = policy.pinned.find(Edge{j, i}); it != policy.pinned.end()) {
                pinned.emplace_back(it->second);
            } else {
                pinned.emplace_back(std::nullopt);
            }
        }
        auto row = solve_beta_row(i, gains.diagonal(i), f.target(i), targets, pinned, row_kind);
        for (std::size_t k = 0; k < nbrs.size(); ++k) out.betas[Edge{nbrs[k], i}] = row[k];
    }
    return out;
}

Matrix build_closed_loop(const CommGraph& g, const GainSet& gains) {
    if (!gains.has_diag() || gains.n != g.size()) throw Error(ErrorCode::IncompleteGains, "diagonal gains missing");
    const auto n = static_cast<Eigen::Index>(g.size());
    Matrix a = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) a(i, i) = gains.diag[static_cast<std::size_t>(i)];
    for (const auto& e : g.edges()) {
        auto it = gains.betas.find(e);
        if (it == gains.betas.end()) throw Error(ErrorCode::IncompleteGains, "no gain for " + edge_name(e.to, e.from));
        a(e.to - 1, e.from - 1) = it->second;
    }
    for (const auto& [e, value] : gains.betas) {
        if (!g.has_edge(e.from, e.to)) {
            throw Error(ErrorCode::StructuralViolation, edge_name(e.to, e.from) + " set on a missing edge");
        }
    }
    return a;
}

Decomposition decompose_closed_loop(const Matrix& a, Agent leader) {
    if (a.rows() != a.cols()) throw Error(ErrorCode::NonSquare, "closed-loop matrix must be square");
    const int n = static_cast<int>(a.rows());
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && a(i, j) != 0.0) edges.push_back(Edge{j + 1, i + 1});
        }
    }
    Decomposition d{build_graph(n, leader, edges), {}};
    d.gains.n = n;
    d.gains.leader = leader;
    for (int i = 0; i < n; ++i) d.gains.diag.push_back(a(i, i));
    for (const auto& e : edges) d.gains.betas[e] = a(e.to - 1, e.from - 1);
    return d;
}

FormationReport verify_formation(const Matrix& a, const Formation& f, std::span<const Complex> follower_poles) {
    if (a.rows() != a.cols()) throw Error(ErrorCode::NonSquare, "closed-loop matrix must be square");
    if (f.size() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "formation size does not match the matrix");
    FormationReport r;
    r.kernel_residual = (a * f.as_vector()).cwiseAbs().maxCoeff();
    r.kernel_ok = r.kernel_residual < kKernelTolerance;
    r.spectrum = spectrum(a);
    r.requested.assign(follower_poles.begin(), follower_poles.end());
    r.requested.emplace_back(0.0, 0.0);
    r.spectrum_distance = multiset_distance(r.spectrum, r.requested);
    r.spectrum_matches = r.spectrum_distance <= kSpectrumTolerance;
    return r;
}

FormationReport verify_formation(const Matrix& a, const Formation& f, const PoleSpec& poles) {
    std::vector<Complex> follower(poles.lambdas.begin(), poles.lambdas.end());
    return verify_formation(a, f, follower);
}

Synthesis synthesize(const CommGraph& g, const PoleSpec& poles, const Formation& f, const BetaPolicy& policy) {
    auto gains = solve_betas(g, assign_diagonal(g, poles), f, policy);
    auto a = build_closed_loop(g, gains);
    auto report = verify_formation(a, f, poles);
    return {std::move(gains), std::move(a), std::move(report)};
}

}  // namespace leadform
