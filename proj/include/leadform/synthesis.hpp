#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leadform/graph.hpp"
#include "leadform/spectrum.hpp"

namespace leadform {

/// Requested follower poles. The leader always carries the structural pole 0.
///
/// `by_agent`, when non-empty, fixes which follower receives which pole;
/// otherwise poles are sorted descending and handed out in agent index order.
struct PoleSpec {
    std::vector<double> lambdas;
    std::map<Agent, double> by_agent;

    static PoleSpec from_assignment(std::map<Agent, double> by_agent);

    /// True when some pole is >= 0; synthesis still works but the followers
    /// do not converge.
    bool has_unstable() const;
    std::vector<Complex> with_leader_zero() const;
};

/// Closed-loop gains. The canonical quantity is the diagonal entry a_ii of A;
/// the self-feedback gain of the control law is alpha_i = -a_ii.
struct GainSet {
    int n = 0;
    Agent leader = 0;
    std::vector<double> diag;          // a_ii by agent-1; empty until assigned
    std::map<Edge, double> betas;      // beta_ij keyed by (j -> i)

    bool has_diag() const noexcept { return static_cast<int>(diag.size()) == n && n > 0; }
    double diagonal(Agent i) const { return diag.at(static_cast<std::size_t>(i - 1)); }
    double alpha(Agent i) const { return -diagonal(i); }
    /// beta_ij, i.e. the weight agent i puts on x_j.
    double beta(Agent i, Agent j) const { return betas.at(Edge{j, i}); }
};

struct Formation {
    std::vector<double> f;  // f_i by agent-1
    std::string axis = "x";

    int size() const noexcept { return static_cast<int>(f.size()); }
    double target(Agent i) const { return f.at(static_cast<std::size_t>(i - 1)); }
    Vector as_vector() const;
    std::vector<Agent> zero_entries() const;
};

struct BetaPolicy {
    enum class Kind { TreeUnique, MinNorm, Pinned };

    Kind kind = Kind::MinNorm;
    std::map<Edge, double> pinned;  // honoured when kind == Pinned

    static BetaPolicy tree_unique() { return {Kind::TreeUnique, {}}; }
    static BetaPolicy min_norm() { return {Kind::MinNorm, {}}; }
    static BetaPolicy pin(std::map<Edge, double> values) { return {Kind::Pinned, std::move(values)}; }
};

std::string_view to_string(BetaPolicy::Kind kind);
BetaPolicy::Kind parse_policy(std::string_view name);

/// Sets follower diagonals to the requested poles and the leader's to 0.
/// Throws StructuralViolation, PoleCountMismatch, ZeroFollowerPole.
GainSet assign_diagonal(const CommGraph& g, const PoleSpec& poles);

/// Solves a_ii f_i + sum_j beta_ij f_j = 0 for one agent's row.
///
/// `pinned[k]` fixes the k-th weight. With a single free weight the solution
/// is rhs / f_j; with several it is the minimum-norm one. The centralized
/// solver and the distributed protocol both go through here.
std::vector<double> solve_beta_row(Agent agent, double diag, double own_target,
                                   std::span<const double> neighbor_targets,
                                   std::span<const std::optional<double>> pinned,
                                   BetaPolicy::Kind kind);

/// Fills betas for every edge. Leader in-edges get 0.
/// Throws RowUnsolvable, PolicyMismatch, PinnedInconsistent, IncompleteGains.
GainSet solve_betas(const CommGraph& g, const GainSet& gains, const Formation& f, const BetaPolicy& policy);

/// n x n matrix: diag on the diagonal, beta_ij at (i, j). Throws IncompleteGains.
Matrix build_closed_loop(const CommGraph& g, const GainSet& gains);

/// Graph and gains read back off a closed-loop matrix; every nonzero
/// off-diagonal entry becomes an edge.
struct Decomposition {
    CommGraph graph;
    GainSet gains;
};
Decomposition decompose_closed_loop(const Matrix& a, Agent leader);

struct FormationReport {
    double kernel_residual = 0.0;     // ||A F||_inf
    std::vector<Complex> spectrum;
    std::vector<Complex> requested;   // Λ ∪ {0}
    double spectrum_distance = 0.0;
    bool spectrum_matches = false;    // distance <= kSpectrumTolerance
    bool kernel_ok = false;           // residual < kKernelTolerance

    bool ok() const noexcept { return spectrum_matches && kernel_ok; }
};

inline constexpr double kSpectrumTolerance = 1e-6;
inline constexpr double kKernelTolerance = 1e-9;

/// `follower_poles` excludes the leader's 0, which is appended here.
FormationReport verify_formation(const Matrix& a, const Formation& f, std::span<const Complex> follower_poles);
FormationReport verify_formation(const Matrix& a, const Formation& f, const PoleSpec& poles);

struct Synthesis {
    GainSet gains;
    Matrix closed_loop;
    FormationReport report;
};

/// assign_diagonal + solve_betas + build_closed_loop + verify_formation.
Synthesis synthesize(const CommGraph& g, const PoleSpec& poles, const Formation& f, const BetaPolicy& policy);

}  // namespace leadform
