#include "leadform/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "leadform/errors.hpp"

namespace leadform {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

const json& require(const json& j, const char* key) {
    if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
    return j.at(key);
}

std::vector<double> numbers(const json& j, const char* what) {
    if (!j.is_array()) fail(std::string(what) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) fail(std::string(what) + " must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

LeaderLaw::Mode parse_mode(const std::string& name) {
    if (name == "none") return LeaderLaw::Mode::None;
    if (name == "hold") return LeaderLaw::Mode::Hold;
    if (name == "proportional") return LeaderLaw::Mode::Proportional;
    if (name == "withdraw_at") return LeaderLaw::Mode::WithdrawAt;
    if (name == "withdraw_on_converge") return LeaderLaw::Mode::WithdrawOnConverge;
    fail("unknown leader mode '" + name + "'");
}

// [i, j, value] triples or {"agent": i, "neighbor": j, <field>: value}.
std::tuple<Agent, Agent, double> triple(const json& t, const char* field) {
    if (t.is_array() && t.size() == 3) return {t[0].get<Agent>(), t[1].get<Agent>(), t[2].get<double>()};
    if (t.is_object()) return {require(t, "agent").get<Agent>(), require(t, "neighbor").get<Agent>(), require(t, field).get<double>()};
    fail(std::string("expected [agent, neighbor, ") + field + "]");
}

Scenario from_json(const json& j) {
    Scenario s;
    s.name = j.value("name", "scenario");
    s.agents = require(j, "agents").get<int>();
    s.leader = j.value("leader", s.agents);

    if (j.contains("matrix")) {
        const auto& rows = j.at("matrix");
        if (!rows.is_array() || rows.size() != static_cast<std::size_t>(s.agents)) fail("matrix must have one row per agent");
        Matrix a(s.agents, s.agents);
        for (int r = 0; r < s.agents; ++r) {
            auto row = numbers(rows[static_cast<std::size_t>(r)], "matrix row");
            if (row.size() != static_cast<std::size_t>(s.agents)) fail("matrix must be square");
            for (int c = 0; c < s.agents; ++c) a(r, c) = row[static_cast<std::size_t>(c)];
        }
        s.matrix = a;
    }

    if (j.contains("edges")) {
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) fail("edges must be [from, to] pairs");
            s.edges.push_back(Edge{e[0].get<Agent>(), e[1].get<Agent>()});
        }
    } else if (s.matrix) {
        for (int i = 0; i < s.agents; ++i) {
            for (int k = 0; k < s.agents; ++k) {
                if (i != k && (*s.matrix)(i, k) != 0.0) s.edges.push_back(Edge{k + 1, i + 1});
            }
        }
    } else {
        fail("missing field 'edges'");
    }

    if (j.contains("pole_assignment")) {
        std::map<Agent, double> by_agent;
        for (const auto& [key, value] : j.at("pole_assignment").items()) by_agent[std::stoi(key)] = value.get<double>();
        s.poles = PoleSpec::from_assignment(std::move(by_agent));
    } else if (j.contains("poles")) {
        s.poles.lambdas = numbers(j.at("poles"), "poles");
    }

    s.policy.kind = parse_policy(j.value("policy", std::string("min-norm")));
    if (j.contains("pinned")) {
        for (const auto& p : j.at("pinned")) {
            auto [i, nb, value] = triple(p, "beta");
            s.policy.pinned[Edge{nb, i}] = value;
        }
        s.policy.kind = BetaPolicy::Kind::Pinned;
    }

    for (const auto& a : require(j, "axes")) {
        AxisSpec axis;
        axis.label = a.value("label", std::string("x"));
        if (a.contains("formation")) axis.formation = numbers(a.at("formation"), "formation");
        if (a.contains("offsets")) {
            OffsetTable t;
            for (const auto& o : a.at("offsets")) {
                auto [i, nb, gamma] = triple(o, "gamma");
                t.set(i, nb, gamma);
            }
            axis.offsets = std::move(t);
        }
        if (a.contains("leader_target")) axis.leader_target = a.at("leader_target").get<double>();
        if (axis.formation.has_value() == axis.offsets.has_value()) {
            fail("axis '" + axis.label + "' needs exactly one of 'formation' or 'offsets'");
        }
        if (axis.offsets && !axis.leader_target) fail("axis '" + axis.label + "' gives offsets without 'leader_target'");
        if (axis.formation && axis.formation->size() != static_cast<std::size_t>(s.agents)) {
            fail("axis '" + axis.label + "' formation needs " + std::to_string(s.agents) + " entries");
        }
        if (a.contains("retarget")) {
            if (!axis.offsets) fail("axis '" + axis.label + "': retargeting needs offsets");
            for (const auto& r : a.at("retarget")) axis.retargets.push_back({require(r, "at").get<double>(), require(r, "target").get<double>()});
        }
        if (a.contains("x0")) axis.x0 = numbers(a.at("x0"), "x0");
        s.axes.push_back(std::move(axis));
    }
    if (s.axes.empty()) fail("at least one axis is required");

    if (j.contains("simulation")) {
        const auto& sim = j.at("simulation");
        if (sim.contains("dt")) s.simulation.dt = sim.at("dt").get<double>();
        if (sim.contains("horizon")) s.simulation.horizon = sim.at("horizon").get<double>();
        if (sim.contains("leader_gain")) s.simulation.leader_gain = sim.at("leader_gain").get<double>();
        if (sim.contains("leader_mode")) s.simulation.mode = parse_mode(sim.at("leader_mode").get<std::string>());
        s.simulation.withdraw_time = sim.value("withdraw_time", 0.0);
        s.simulation.tolerance = sim.value("tolerance", 1e-9);
    }
    return s;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    try {
        return from_json(json::parse(text));
    } catch (const json::exception& e) {
        fail(e.what());
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open scenario '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace leadform
