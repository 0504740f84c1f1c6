#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "leadform/graph.hpp"
#include "leadform/protocol.hpp"
#include "leadform/sim.hpp"
#include "leadform/synthesis.hpp"

namespace leadform {

struct Retarget {
    double at = 0.0;      // simulation time of the switch
    double target = 0.0;  // new leader target on this axis
};

/// One spatial axis: either absolute targets or offsets plus a leader target.
struct AxisSpec {
    std::string label = "x";
    std::optional<std::vector<double>> formation;
    std::optional<OffsetTable> offsets;
    std::optional<double> leader_target;
    std::vector<Retarget> retargets;
    std::optional<std::vector<double>> x0;
};

struct SimulationSpec {
    std::optional<double> dt;
    std::optional<double> horizon;
    std::optional<double> leader_gain;
    LeaderLaw::Mode mode = LeaderLaw::Mode::Proportional;
    double withdraw_time = 0.0;
    double tolerance = 1e-9;
};

struct Scenario {
    std::string name;
    int agents = 0;
    Agent leader = 0;
    std::vector<Edge> edges;
    PoleSpec poles;
    BetaPolicy policy;
    std::vector<AxisSpec> axes;
    std::optional<Matrix> matrix;  // a given closed loop, used instead of synthesis
    SimulationSpec simulation;

    CommGraph graph() const { return build_graph(agents, leader, edges); }
};

/// Parses the JSON scenario format (see README). Throws ParseError.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace leadform
