#include "leadform/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <string>

#include "leadform/errors.hpp"

namespace leadform {

OffsetTable OffsetTable::from_formation(const CommGraph& g, const Formation& f) {
    OffsetTable t;
    for (const auto& e : g.edges()) {
        if (e.to == g.leader()) continue;
        t.set(e.to, e.from, f.target(e.to) - f.target(e.from));
    }
    return t;
}

std::optional<double> OffsetTable::gamma(Agent i, Agent j) const {
    if (auto it = gammas.find(Edge{j, i}); it != gammas.end()) return it->second;
    return std::nullopt;
}

CocycleReport check_cocycle(const OffsetTable& offsets) {
    CocycleReport r;

    // Known differences d(i, j) = f_i - f_j, both orientations.
    std::map<std::pair<Agent, Agent>, double> diff;
    std::set<Agent> agents;
    auto note = [&](double v, std::vector<Agent> who) {
        if (v > r.max_violation) {
            r.max_violation = v;
            r.worst = std::move(who);
        }
    };
    for (const auto& [e, g] : offsets.gammas) {
        Agent i = e.to, j = e.from;
        agents.insert(i);
        agents.insert(j);
        if (auto it = diff.find({j, i}); it != diff.end() && offsets.gammas.contains(Edge{i, j})) {
            // both directions stored: antisymmetry
            note(std::abs(it->second + g), {i, j});
        }
        diff[{i, j}] = g;
        diff.try_emplace({j, i}, -g);
    }

    std::vector<Agent> list(agents.begin(), agents.end());
    for (std::size_t a = 0; a < list.size(); ++a) {
        for (std::size_t b = a + 1; b < list.size(); ++b) {
            for (std::size_t c = b + 1; c < list.size(); ++c) {
                Agent i = list[a], j = list[b], k = list[c];
                auto ij = diff.find({i, j});
                auto jk = diff.find({j, k});
                auto ik = diff.find({i, k});
                if (ij == diff.end() || jk == diff.end() || ik == diff.end()) continue;
                ++r.triples_checked;
                note(std::abs(ij->second + jk->second - ik->second), {i, j, k});
            }
        }
    }

    // Potentials on a BFS forest; each non-tree edge closes one cycle.
    std::map<Agent, std::vector<std::pair<Agent, double>>> adj;
    for (const auto& [e, g] : offsets.gammas) {
        adj[e.to].emplace_back(e.from, -g);  // f_from = f_to - gamma
        adj[e.from].emplace_back(e.to, g);
    }
    std::map<Agent, double> potential;
    std::map<Agent, Agent> tree_parent;
    for (Agent root : list) {
        if (potential.contains(root)) continue;
        potential[root] = 0.0;
        tree_parent[root] = 0;
        std::queue<Agent> q;
        q.push(root);
        while (!q.empty()) {
            Agent u = q.front();
            q.pop();
            for (auto [v, delta] : adj[u]) {
                if (!potential.contains(v)) {
                    potential[v] = potential[u] + delta;
                    tree_parent[v] = u;
                    q.push(v);
                }
            }
        }
    }
    for (const auto& [e, g] : offsets.gammas) {
        Agent i = e.to, j = e.from;
        if (tree_parent[i] == j || tree_parent[j] == i) continue;
        ++r.cycles_checked;
        note(std::abs(potential[i] - potential[j] - g), {i, j});
    }
    return r;
}

LocalKnowledge::LocalKnowledge(Agent id, bool is_leader, double diag, std::vector<Agent> in_neighbors,
                               std::map<Agent, double> offsets)
    : id_(id), is_leader_(is_leader), diag_(diag), in_neighbors_(std::move(in_neighbors)), offsets_(std::move(offsets)) {}

double LocalKnowledge::diagonal() const {
    if (audit_) audit_->push_back({id_, Read::Kind::OwnDiagonal, id_});
    return diag_;
}

double LocalKnowledge::offset(Agent j) const {
    if (audit_) audit_->push_back({id_, Read::Kind::Offset, j});
    return offsets_.at(j);
}

void LocalKnowledge::note_target_read(Agent j) const {
    if (audit_) audit_->push_back({id_, Read::Kind::NeighborTarget, j});
}

bool agent_step(const LocalKnowledge& local, AgentState& state, std::span<const TargetMessage> inbox, int round) {
    if (local.is_leader()) return false;
    const auto& nbrs = local.in_neighbors();
    for (const auto& msg : inbox) {
        if (std::binary_search(nbrs.begin(), nbrs.end(), msg.from)) state.known_targets[msg.from] = msg.target;
    }

    bool resolved_now = false;
    if (!state.resolved() && !state.known_targets.empty()) {
        auto [j, fj] = *state.known_targets.begin();  // lowest index sender
        local.note_target_read(j);
        state.own_target = fj + local.offset(j);
        state.round_resolved = round;
        resolved_now = true;
    }
    if (!state.resolved()) return false;

    const double fi = *state.own_target;
    for (const auto& msg : inbox) {
        if (!state.known_targets.contains(msg.from)) continue;
        local.note_target_read(msg.from);
        double implied = msg.target + local.offset(msg.from);
        if (std::abs(implied - fi) > 1e-9 * std::max(1.0, std::abs(fi))) {
            throw Error(ErrorCode::InconsistentOffsets,
                        "agent " + std::to_string(state.id) + ": neighbor " + std::to_string(msg.from) + " implies f = " +
                            std::to_string(implied) + " but f = " + std::to_string(fi) + " was already resolved");
        }
    }

    if (!state.has_gains() && state.known_targets.size() == nbrs.size()) {
        std::vector<double> targets;
        for (Agent j : nbrs) {
            local.note_target_read(j);
            targets.push_back(state.known_targets.at(j));
        }
        auto row = solve_beta_row(state.id, local.diagonal(), fi, targets, {}, BetaPolicy::Kind::MinNorm);
        for (std::size_t k = 0; k < nbrs.size(); ++k) state.beta_row[nbrs[k]] = row[k];
        state.round_gains = round;
    }
    return resolved_now;
}

Formation ProtocolRun::formation() const {
    if (!complete_) throw Error(ErrorCode::Unreachable, "protocol has not resolved every agent");
    Formation f;
    for (const auto& s : states_) f.f.push_back(*s.own_target);
    return f;
}

GainSet ProtocolRun::gains() const {
    if (!complete_) throw Error(ErrorCode::Unreachable, "protocol has not resolved every agent");
    GainSet out = diag_only_;
    out.betas.clear();
    for (const auto& s : states_) {
        for (const auto& [j, b] : s.beta_row) out.betas[Edge{j, s.id}] = b;
    }
    return out;
}

ProtocolRun init_protocol(const CommGraph& g, const OffsetTable& offsets, const GainSet& gains) {
    // Reachability is left to run_rounds, which reports Unreachable.
    if (!is_acyclic(g)) throw Error(ErrorCode::StructuralViolation, "graph has a directed cycle");
    if (!gains.has_diag() || gains.n != g.size()) throw Error(ErrorCode::IncompleteGains, "diagonal gains missing");

    ProtocolRun run;
    run.graph_ = g;
    run.diag_only_ = gains;
    run.diag_only_.betas.clear();
    for (Agent i = 1; i <= g.size(); ++i) {
        std::map<Agent, double> row;
        std::vector<Agent> nbrs;
        if (i != g.leader()) {
            nbrs = g.in_neighbors(i);
            for (Agent j : nbrs) {
                auto gamma = offsets.gamma(i, j);
                if (!gamma) {
                    throw Error(ErrorCode::MissingOffset,
                                "no offset gamma_" + std::to_string(i) + std::to_string(j) + " for edge " + std::to_string(j) +
                                    "->" + std::to_string(i));
                }
                row[j] = *gamma;
            }
        }
        run.locals_.emplace_back(i, i == g.leader(), gains.diagonal(i), std::move(nbrs), std::move(row));
        run.states_.push_back(AgentState{i, {}, std::nullopt, {}, -1, -1});
    }
    return run;
}

ProtocolRun run_rounds(ProtocolRun run, double leader_target) {
    const CommGraph& g = run.graph_;
    for (auto& s : run.states_) s = AgentState{s.id, {}, std::nullopt, {}, -1, -1};
    run.trace_.clear();
    run.audit_.clear();
    run.complete_ = false;
    run.leader_target_ = leader_target;
    for (auto& local : run.locals_) local.attach_audit(&run.audit_);

    auto& leader = run.states_[static_cast<std::size_t>(g.leader() - 1)];
    leader.own_target = leader_target;
    leader.round_resolved = 0;
    leader.round_gains = 0;
    for (Agent j : g.in_neighbors(g.leader())) leader.beta_row[j] = 0.0;
    run.trace_.push_back({0, g.leader(), TraceEntry::Event::Resolve, leader_target, {}});
    run.trace_.push_back({0, g.leader(), TraceEntry::Event::Gains, leader_target, leader.beta_row});

    std::vector<Agent> senders{g.leader()};
    run.resolution_rounds_ = 0;
    run.gain_rounds_ = 0;
    for (int round = 1; !senders.empty(); ++round) {
        std::vector<std::vector<TargetMessage>> inbox(static_cast<std::size_t>(g.size()));
        for (Agent j : senders) {
            for (Agent i : g.out_neighbors(j)) {
                inbox[static_cast<std::size_t>(i - 1)].push_back({j, *run.agent(j).own_target});
            }
        }
        // Each step touches only its own state, so the loop body is
        // independent across agents.
        std::vector<Agent> next;
        for (Agent i = 1; i <= g.size(); ++i) {
            auto& state = run.states_[static_cast<std::size_t>(i - 1)];
            const bool had_gains = state.has_gains();
            const auto& box = inbox[static_cast<std::size_t>(i - 1)];
            if (box.empty()) continue;
            if (agent_step(run.locals_[static_cast<std::size_t>(i - 1)], state, box, round)) {
                next.push_back(i);
                run.resolution_rounds_ = round;
                run.trace_.push_back({round, i, TraceEntry::Event::Resolve, *state.own_target, {}});
            }
            if (!had_gains && state.has_gains()) {
                run.gain_rounds_ = round;
                run.trace_.push_back({round, i, TraceEntry::Event::Gains, *state.own_target, state.beta_row});
            }
        }
        senders = std::move(next);
    }
    for (auto& local : run.locals_) local.attach_audit(nullptr);

    std::string missing;
    for (const auto& s : run.states_) {
        if (!s.resolved() || !s.has_gains()) missing += " " + std::to_string(s.id);
    }
    if (!missing.empty()) throw Error(ErrorCode::Unreachable, "agents never resolved:" + missing);
    run.complete_ = true;
    return run;
}

ProtocolRun retarget(const ProtocolRun& run, double new_leader_target) { return run_rounds(run, new_leader_target); }

}  // namespace leadform
