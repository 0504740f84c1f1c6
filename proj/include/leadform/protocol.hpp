#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leadform/graph.hpp"
#include "leadform/synthesis.hpp"

namespace leadform {

/// Relative targets gamma_ij = f_i - f_j, keyed by the edge (j -> i) along
/// which agent i learns f_j.
struct OffsetTable {
    std::map<Edge, double> gammas;

    static OffsetTable from_formation(const CommGraph& g, const Formation& f);

    std::optional<double> gamma(Agent i, Agent j) const;
    void set(Agent i, Agent j, double value) { gammas[Edge{j, i}] = value; }
};

struct CocycleReport {
    std::size_t triples_checked = 0;
    std::size_t cycles_checked = 0;    // independent cycles of the offset graph
    double max_violation = 0.0;
    std::vector<Agent> worst;          // agents involved in the worst violation

    bool consistent(double tol = 1e-9) const noexcept { return max_violation <= tol; }
};

/// Checks gamma_ij + gamma_jk = gamma_ik on every triple where all three
/// offsets are known (either orientation), plus every independent cycle of
/// the undirected offset graph.
CocycleReport check_cocycle(const OffsetTable& offsets);

/// What an agent is configured with before the protocol starts: its own
/// closed-loop diagonal and the offsets to its in-neighbors. Reads are
/// recorded when an audit log is attached.
class LocalKnowledge {
public:
    struct Read {
        enum class Kind { OwnDiagonal, Offset, NeighborTarget };
        Agent reader = 0;
        Kind kind = Kind::OwnDiagonal;
        Agent subject = 0;  // neighbor for Offset / NeighborTarget
    };

    LocalKnowledge(Agent id, bool is_leader, double diag, std::vector<Agent> in_neighbors, std::map<Agent, double> offsets);

    Agent id() const noexcept { return id_; }
    bool is_leader() const noexcept { return is_leader_; }
    const std::vector<Agent>& in_neighbors() const noexcept { return in_neighbors_; }
    double diagonal() const;
    double offset(Agent j) const;
    void note_target_read(Agent j) const;

    void attach_audit(std::vector<Read>* log) noexcept { audit_ = log; }

private:
    Agent id_;
    bool is_leader_;
    double diag_;
    std::vector<Agent> in_neighbors_;
    std::map<Agent, double> offsets_;
    std::vector<Read>* audit_ = nullptr;
};

struct AgentState {
    Agent id = 0;
    std::map<Agent, double> known_targets;  // f_j heard from in-neighbors
    std::optional<double> own_target;
    std::map<Agent, double> beta_row;       // beta_ij by j, once every f_j is heard
    int round_resolved = -1;
    int round_gains = -1;

    bool resolved() const noexcept { return own_target.has_value(); }
    bool has_gains() const noexcept { return round_gains >= 0; }
};

/// f_j sent by agent j once it knows its own target.
struct TargetMessage {
    Agent from = 0;
    double target = 0.0;
};

/// One synchronous step of agent i: absorb the inbox, resolve f_i from the
/// lowest-index sender, check agreement with the others, and compute the
/// beta row once every in-neighbor has reported. Returns true when the agent
/// resolved its own target in this step.
bool agent_step(const LocalKnowledge& local, AgentState& state, std::span<const TargetMessage> inbox, int round);

struct TraceEntry {
    enum class Event { Resolve, Gains };
    int round = 0;
    Agent agent = 0;
    Event event = Event::Resolve;
    double target = 0.0;
    std::map<Agent, double> beta_row;
};

class ProtocolRun {
public:
    const CommGraph& graph() const noexcept { return graph_; }
    const std::vector<AgentState>& agents() const noexcept { return states_; }
    const AgentState& agent(Agent i) const { return states_.at(static_cast<std::size_t>(i - 1)); }
    const std::vector<TraceEntry>& trace() const noexcept { return trace_; }
    const std::vector<LocalKnowledge::Read>& audit() const noexcept { return audit_; }
    /// Rounds until every target was known (the leader resolves in round 0).
    int resolution_rounds() const noexcept { return resolution_rounds_; }
    /// Rounds until every beta row was computed.
    int gain_rounds() const noexcept { return gain_rounds_; }
    bool complete() const noexcept { return complete_; }
    std::optional<double> leader_target() const noexcept { return leader_target_; }

    /// Resolved formation and gains; throw Unreachable before completion.
    Formation formation() const;
    GainSet gains() const;

private:
    friend ProtocolRun init_protocol(const CommGraph&, const OffsetTable&, const GainSet&);
    friend ProtocolRun run_rounds(ProtocolRun, double);

    CommGraph graph_;
    GainSet diag_only_;
    std::vector<LocalKnowledge> locals_;
    std::vector<AgentState> states_;
    std::vector<TraceEntry> trace_;
    std::vector<LocalKnowledge::Read> audit_;
    int resolution_rounds_ = 0;
    int gain_rounds_ = 0;
    bool complete_ = false;
    std::optional<double> leader_target_;
};

/// Hands each agent its local configuration. Throws StructuralViolation (cycle),
/// MissingOffset, IncompleteGains.
ProtocolRun init_protocol(const CommGraph& g, const OffsetTable& offsets, const GainSet& gains);

/// Synchronous rounds from a fresh leader target. Throws Unreachable,
/// InconsistentOffsets.
ProtocolRun run_rounds(ProtocolRun run, double leader_target);

/// Same offsets and gains, new leader target.
ProtocolRun retarget(const ProtocolRun& run, double new_leader_target);

}  // namespace leadform
