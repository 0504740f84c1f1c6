#include "leadform/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "leadform/bipartite.hpp"
#include "leadform/errors.hpp"
#include "leadform/export.hpp"
#include "leadform/protocol.hpp"
#include "leadform/scenario.hpp"
#include "leadform/sim.hpp"
#include "leadform/synthesis.hpp"

namespace leadform {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v, const char* spec = "%.6g") {
    std::array<char, 48> buf{};
    std::snprintf(buf.data(), buf.size(), spec, v);
    return buf.data();
}

std::string fmt(Complex z) {
    if (z.imag() == 0.0) return fmt(z.real());
    return fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) + "i";
}

json complex_json(Complex z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

json spectrum_json(const std::vector<Complex>& zs) {
    json out = json::array();
    for (auto z : zs) out.push_back(complex_json(z));
    return out;
}

bool is_input_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::IndexOutOfRange:
        case ErrorCode::SelfLoop:
        case ErrorCode::DuplicateEdge:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::PoleCountMismatch:
        case ErrorCode::MissingOffset:
        case ErrorCode::NonSquare:
            return true;
        default:
            return false;
    }
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return is_input_error(e.code()) ? kExitInputError : kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

Scenario require_scenario(const CommandOptions& opts) {
    if (!opts.scenario) throw Error(ErrorCode::ParseError, "--scenario is required");
    auto s = load_scenario(*opts.scenario);
    if (opts.policy) {
        s.policy.kind = parse_policy(*opts.policy);
        if (s.policy.kind != BetaPolicy::Kind::Pinned) s.policy.pinned.clear();
    }
    return s;
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::ParseError, "cannot write '" + path.string() + "'");
    os << content;
}

std::string agents_list(const std::vector<Agent>& agents) {
    std::string out;
    for (Agent a : agents) out += (out.empty() ? "" : " ") + std::to_string(a);
    return out;
}

// Absolute targets for an axis: given directly, or resolved from the offsets
// by the protocol with the axis' initial leader target.
Formation axis_formation(const CommGraph& g, const GainSet& diag, const AxisSpec& axis) {
    if (axis.formation) return Formation{*axis.formation, axis.label};
    auto run = run_rounds(init_protocol(g, *axis.offsets, diag), *axis.leader_target);
    auto f = run.formation();
    f.axis = axis.label;
    return f;
}

OffsetTable axis_offsets(const CommGraph& g, const AxisSpec& axis) {
    if (axis.offsets) return *axis.offsets;
    return OffsetTable::from_formation(g, Formation{*axis.formation, axis.label});
}

double axis_leader_target(const Scenario& s, const AxisSpec& axis) {
    if (axis.leader_target) return *axis.leader_target;
    return (*axis.formation)[static_cast<std::size_t>(s.leader - 1)];
}

json gains_json(const CommGraph& g, const GainSet& gains) {
    json rows = json::array();
    for (Agent i = 1; i <= g.size(); ++i) {
        json betas = json::array();
        for (Agent j : g.in_neighbors(i)) betas.push_back({{"neighbor", j}, {"beta", gains.beta(i, j)}});
        rows.push_back({{"agent", i}, {"a_ii", gains.diagonal(i)}, {"alpha", gains.alpha(i)}, {"betas", betas}});
    }
    return rows;
}

void print_gains(std::ostream& out, const CommGraph& g, const GainSet& gains) {
    out << std::left << std::setw(7) << "agent" << std::setw(12) << "a_ii" << std::setw(12) << "alpha" << "betas\n";
    for (Agent i = 1; i <= g.size(); ++i) {
        out << std::left << std::setw(7) << i << std::setw(12) << fmt(gains.diagonal(i)) << std::setw(12)
            << fmt(gains.alpha(i) == 0.0 ? 0.0 : gains.alpha(i));
        for (Agent j : g.in_neighbors(i)) out << "beta_" << i << "," << j << "=" << fmt(gains.beta(i, j)) << "  ";
        out << "\n";
    }
}

void print_report(std::ostream& out, const FormationReport& r) {
    out << "spectrum:";
    for (auto z : r.spectrum) out << "  " << fmt(z);
    out << "\nrequested:";
    for (auto z : r.requested) out << "  " << fmt(z);
    out << "\nspectrum distance: " << fmt(r.spectrum_distance, "%.3g") << (r.spectrum_matches ? "  (match)" : "  (MISMATCH)")
        << "\nkernel residual |A F|_inf: " << fmt(r.kernel_residual, "%.3g") << (r.kernel_ok ? "  (ok)" : "  (FAIL)") << "\n";
}

json report_json(const FormationReport& r) {
    return {{"kernel_residual", r.kernel_residual},
            {"kernel_ok", r.kernel_ok},
            {"spectrum", spectrum_json(r.spectrum)},
            {"requested", spectrum_json(r.requested)},
            {"spectrum_distance", r.spectrum_distance},
            {"spectrum_matches", r.spectrum_matches}};
}

json trace_json(const ProtocolRun& run) {
    json rounds = json::array();
    for (const auto& t : run.trace()) {
        json row = json::object();
        for (const auto& [j, b] : t.beta_row) row[std::to_string(j)] = b;
        json entry = {{"round", t.round},
                      {"agent", t.agent},
                      {"event", t.event == TraceEntry::Event::Resolve ? "resolve" : "gains"},
                      {"target", t.target}};
        if (t.event == TraceEntry::Event::Gains) entry["betas"] = row;
        rounds.push_back(entry);
    }
    return {{"leader_target", *run.leader_target()},
            {"resolution_rounds", run.resolution_rounds()},
            {"gain_rounds", run.gain_rounds()},
            {"trace", rounds}};
}

void print_trace(std::ostream& out, const ProtocolRun& run) {
    out << "leader target " << fmt(*run.leader_target()) << "\n";
    for (const auto& t : run.trace()) {
        out << "  round " << t.round << "  agent " << t.agent;
        if (t.event == TraceEntry::Event::Resolve) {
            out << "  resolves f = " << fmt(t.target) << "\n";
        } else {
            out << "  gains:";
            if (t.beta_row.empty()) out << " (none)";
            for (const auto& [j, b] : t.beta_row) out << " beta_" << t.agent << "," << j << "=" << fmt(b);
            out << "\n";
        }
    }
    out << "  resolved in " << run.resolution_rounds() << " round(s), gains complete after " << run.gain_rounds()
        << " round(s)\n";
}

double slowest_nonzero(const std::vector<Complex>& zs) {
    double m = std::numeric_limits<double>::infinity();
    for (auto z : zs) {
        if (std::abs(z) > 1e-9) m = std::min(m, std::abs(z.real()));
    }
    return std::isfinite(m) && m > 0.0 ? m : 1.0;
}

double fastest(const std::vector<Complex>& zs) {
    double m = 0.0;
    for (auto z : zs) m = std::max(m, std::abs(z));
    return m > 0.0 ? m : 1.0;
}

LeaderLaw make_law(const SimulationSpec& sim, double target, double gain) {
    LeaderLaw law;
    law.mode = sim.mode;
    law.target = target;
    law.gain = gain;
    law.withdraw_time = sim.withdraw_time;
    law.tolerance = sim.tolerance;
    return law;
}

struct AxisPlan {
    AxisSystem system;
    Formation final_formation;
    double last_switch = 0.0;
    std::vector<ProtocolRun> runs;  // one per segment when offsets drive the axis
};

}  // namespace

int cmd_check(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto s = require_scenario(opts);
        auto g = s.graph();
        auto r = structural_report(g);
        if (opts.json) {
            json j = {{"scenario", s.name},
                      {"agents", g.size()},
                      {"leader", g.leader()},
                      {"edges", r.edge_count},
                      {"min_edges", r.min_edges},
                      {"max_edges", r.max_edges},
                      {"spanning_tree", r.spanning_tree},
                      {"acyclic", r.acyclic},
                      {"at_min_edges", r.at_min_edges},
                      {"within_max", r.within_max},
                      {"beta_unique", r.beta_unique},
                      {"pass", r.synthesizable()}};
            if (r.cycle) j["cycle"] = *r.cycle;
            out << j.dump(2) << "\n";
        } else {
            out << "scenario: " << s.name << "\n"
                << "agents: " << g.size() << "  leader: " << g.leader() << "\n"
                << "edges: " << r.edge_count << " (min " << r.min_edges << ", max " << r.max_edges << ")"
                << "  at_min: " << (r.at_min_edges ? "yes" : "no") << "  within_max: " << (r.within_max ? "yes" : "no") << "\n"
                << "rooted spanning tree: " << (r.spanning_tree ? "yes" : "no") << "\n"
                << "acyclic: " << (r.acyclic ? "yes" : "no");
            if (r.cycle) out << "  (cycle through agents " << agents_list(*r.cycle) << ")";
            out << "\n"
                << "beta unique: " << (r.beta_unique ? "yes" : "no") << "\n"
                << "result: " << (r.synthesizable() ? "PASS" : "FAIL") << "\n";
        }
        return r.synthesizable() ? kExitOk : kExitFailure;
    });
}

int cmd_synth(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto s = require_scenario(opts);
        auto g = s.graph();
        if (s.poles.has_unstable()) err << "warning: some requested poles are not negative; followers will not converge\n";
        auto diag = assign_diagonal(g, s.poles);

        bool ok = true;
        json axes = json::array();
        for (const auto& axis : s.axes) {
            auto f = axis_formation(g, diag, axis);
            auto gains = solve_betas(g, diag, f, s.policy);
            auto a = build_closed_loop(g, gains);
            auto report = verify_formation(a, f, s.poles);
            ok = ok && report.ok();
            json matrix = json::array();
            for (Eigen::Index r = 0; r < a.rows(); ++r) {
                json row = json::array();
                for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
                matrix.push_back(row);
            }
            axes.push_back({{"axis", axis.label},
                            {"policy", to_string(s.policy.kind)},
                            {"formation", f.f},
                            {"gains", gains_json(g, gains)},
                            {"matrix", matrix},
                            {"verification", report_json(report)}});
            if (!opts.json) {
                out << "axis " << axis.label << "  policy " << to_string(s.policy.kind) << "\n";
                print_gains(out, g, gains);
                print_report(out, report);
                out << "verification: " << (report.ok() ? "PASS" : "FAIL") << "\n\n";
            }
        }
        json doc = {{"scenario", s.name}, {"agents", g.size()}, {"leader", g.leader()}, {"axes", axes}};
        if (opts.json) out << doc.dump(2) << "\n";
        if (opts.out_dir) write_file(*opts.out_dir / "gains.json", doc.dump(2) + "\n");
        return ok ? kExitOk : kExitFailure;
    });
}

int cmd_protocol(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto s = require_scenario(opts);
        auto g = s.graph();
        auto diag = assign_diagonal(g, s.poles);

        json axes = json::array();
        for (const auto& axis : s.axes) {
            auto run = run_rounds(init_protocol(g, axis_offsets(g, axis), diag), axis_leader_target(s, axis));
            json runs = json::array({trace_json(run)});
            if (!opts.json) {
                out << "axis " << axis.label << "\n";
                print_trace(out, run);
            }
            for (const auto& r : axis.retargets) {
                run = retarget(run, r.target);
                runs.push_back(trace_json(run));
                if (!opts.json) {
                    out << "retarget at t = " << fmt(r.at) << "\n";
                    print_trace(out, run);
                }
            }
            if (!opts.json) {
                out << "final gains\n";
                print_gains(out, g, run.gains());
                out << "\n";
            }
            axes.push_back({{"axis", axis.label}, {"runs", runs}, {"gains", gains_json(g, run.gains())}});
        }
        json doc = {{"scenario", s.name}, {"axes", axes}};
        if (opts.json) out << doc.dump(2) << "\n";
        if (opts.out_dir) write_file(*opts.out_dir / "protocol.json", doc.dump(2) + "\n");
        return kExitOk;
    });
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto s = require_scenario(opts);
        auto g = s.graph();
        const int n = g.size();

        std::vector<AxisPlan> plans;
        double fast = 1.0, slow = 1.0;
        std::optional<GainSet> diag;
        if (!s.matrix) {
            diag = assign_diagonal(g, s.poles);
            fast = default_leader_gain(s.poles);
            std::vector<Complex> poles(s.poles.lambdas.begin(), s.poles.lambdas.end());
            slow = slowest_nonzero(poles);
        } else {
            auto spec = spectrum(*s.matrix);
            fast = fastest(spec);
            slow = slowest_nonzero(spec);
        }
        const double gain = s.simulation.leader_gain.value_or(fast);
        const double dt = opts.dt.value_or(s.simulation.dt.value_or(std::clamp(0.1 / std::max(fast, gain), 1e-4, 1e-1)));

        for (const auto& axis : s.axes) {
            AxisPlan plan;
            plan.system.axis = axis.label;
            plan.system.x0 = Vector::Zero(n);
            if (axis.x0) plan.system.x0 = Eigen::Map<const Vector>(axis.x0->data(), static_cast<Eigen::Index>(axis.x0->size()));
            if (plan.system.x0.size() != n) throw Error(ErrorCode::DimensionMismatch, "x0 on axis " + axis.label);

            if (s.matrix) {
                if (!axis.formation) throw Error(ErrorCode::ParseError, "a given matrix needs absolute formations");
                plan.final_formation = Formation{*axis.formation, axis.label};
                const double target = axis_leader_target(s, axis);
                plan.system.segments.push_back({*s.matrix, make_law(s.simulation, target, gain), 0.0});
            } else if (axis.offsets) {
                auto run = run_rounds(init_protocol(g, *axis.offsets, *diag), *axis.leader_target);
                double start = 0.0;
                std::vector<std::pair<double, ProtocolRun>> stages{{0.0, run}};
                for (const auto& r : axis.retargets) {
                    run = retarget(run, r.target);
                    stages.emplace_back(r.at, run);
                }
                for (std::size_t k = 0; k < stages.size(); ++k) {
                    const auto& [at, stage] = stages[k];
                    start = at;
                    auto a = build_closed_loop(g, stage.gains());
                    plan.system.segments.push_back({a, make_law(s.simulation, *stage.leader_target(), gain), 0.0});
                    if (k > 0) plan.system.segments[k - 1].duration = at - stages[k - 1].first;
                    plan.runs.push_back(stage);
                }
                plan.last_switch = start;
                plan.final_formation = stages.back().second.formation();
                plan.final_formation.axis = axis.label;
            } else {
                Formation f{*axis.formation, axis.label};
                auto gains = solve_betas(g, *diag, f, s.policy);
                plan.final_formation = f;
                plan.system.segments.push_back(
                    {build_closed_loop(g, gains), make_law(s.simulation, axis_leader_target(s, axis), gain), 0.0});
            }
            plans.push_back(std::move(plan));
        }

        double last_switch = 0.0;
        for (const auto& p : plans) last_switch = std::max(last_switch, p.last_switch);
        const double horizon = opts.horizon.value_or(s.simulation.horizon.value_or(last_switch + 20.0 / slow));
        std::vector<AxisSystem> systems;
        for (auto& p : plans) {
            auto& segs = p.system.segments;
            double used = 0.0;
            for (std::size_t k = 0; k + 1 < segs.size(); ++k) used += segs[k].duration;
            segs.back().duration = horizon - used;
            if (segs.back().duration <= 0.0) throw Error(ErrorCode::ParseError, "horizon ends before the last retarget");
            systems.push_back(p.system);
        }
        auto trajectories = simulate_nd(systems, dt, g.leader());

        bool all_settled = true;
        json summary = json::array();
        if (!opts.json) out << "scenario " << s.name << "  dt " << fmt(dt) << "  horizon " << fmt(horizon) << "\n";
        for (std::size_t k = 0; k < trajectories.size(); ++k) {
            const auto& traj = trajectories[k];
            const auto& f = plans[k].final_formation;
            const Vector err_vec = traj.final_state() - f.as_vector();
            const double final_error = err_vec.cwiseAbs().maxCoeff();
            const bool ok = settled(traj.final_state(), f);
            all_settled = all_settled && ok;
            std::optional<double> rate;
            try {
                rate = fit_rates(traj, f, plans[k].last_switch, g.leader()).slowest;
            } catch (const Error&) {
            }
            json entry = {{"axis", traj.axis},
                          {"final_state", std::vector<double>(traj.final_state().data(), traj.final_state().data() + n)},
                          {"formation", f.f},
                          {"final_error", final_error},
                          {"settled", ok}};
            if (rate) entry["slowest_rate"] = *rate;
            if (traj.withdrawn_at) entry["input_withdrawn_at"] = *traj.withdrawn_at;
            summary.push_back(entry);
            if (!opts.json) {
                out << "axis " << traj.axis << ": final error " << fmt(final_error, "%.3g") << (ok ? " (settled)" : " (NOT settled)");
                if (rate) out << "  slowest fitted rate " << fmt(*rate, "%.4g");
                if (traj.withdrawn_at) out << "  input withdrawn at t=" << fmt(*traj.withdrawn_at);
                out << "\n  final   ";
                for (int i = 0; i < n; ++i) out << " " << fmt(traj.final_state()(i));
                out << "\n  target  ";
                for (int i = 0; i < n; ++i) out << " " << fmt(f.f[static_cast<std::size_t>(i)]);
                out << "\n";
            }
            if (opts.out_dir) {
                std::ostringstream csv;
                write_csv(csv, traj);
                write_file(*opts.out_dir / ("trajectory_" + traj.axis + ".csv"), csv.str());
                write_file(*opts.out_dir / ("trajectory_" + traj.axis + ".svg"),
                           svg_time_plot(traj, s.name + ": axis " + traj.axis));
            }
        }
        if (opts.out_dir && trajectories.size() == 2) {
            write_file(*opts.out_dir / "paths.svg", svg_path_plot(trajectories[0], trajectories[1], s.name + ": paths"));
        }
        json doc = {{"scenario", s.name}, {"dt", dt}, {"horizon", horizon}, {"axes", summary}};
        if (opts.json) out << doc.dump(2) << "\n";
        if (opts.out_dir) write_file(*opts.out_dir / "summary.json", doc.dump(2) + "\n");
        return all_settled ? kExitOk : kExitFailure;
    });
}

namespace {

struct OracleCheck {
    Polynomial matching;
    Polynomial leverrier;
    double coefficient_gap = 0.0;
    bool agree = false;
};

OracleCheck cross_check(const Matrix& a) {
    OracleCheck c{char_poly_matchings(a), characteristic_polynomial(a)};
    for (std::size_t k = 0; k < c.matching.size(); ++k) {
        double scale = std::max(1.0, std::abs(c.matching[k]));
        c.coefficient_gap = std::max(c.coefficient_gap, std::abs(c.matching[k] - c.leverrier[k]) / scale);
    }
    c.agree = c.coefficient_gap <= 1e-9;
    return c;
}

std::vector<Complex> parse_poles(const json& j) {
    std::vector<Complex> out;
    for (const auto& p : j) {
        if (p.is_number()) {
            out.emplace_back(p.get<double>(), 0.0);
        } else if (p.is_array() && p.size() == 2) {
            out.emplace_back(p[0].get<double>(), p[1].get<double>());
        } else {
            throw Error(ErrorCode::ParseError, "poles must be numbers or [re, im] pairs");
        }
    }
    return out;
}

void print_poly(std::ostream& out, const char* label, const Polynomial& p) {
    out << label;
    for (double c : p) out << " " << fmt(c == 0.0 ? 0.0 : c, "%.10g");
    out << "\n";
}

}  // namespace

int cmd_verify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        struct Case {
            std::string label;
            Matrix a;
            std::optional<Formation> f;
            std::optional<std::vector<Complex>> poles;
            double tolerance = kSpectrumTolerance;
        };
        std::vector<Case> cases;

        if (opts.matrix) {
            std::ifstream in(*opts.matrix);
            if (!in) throw Error(ErrorCode::ParseError, "cannot open matrix file '" + opts.matrix->string() + "'");
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw Error(ErrorCode::ParseError, e.what());
            }
            if (!j.contains("matrix")) throw Error(ErrorCode::ParseError, "matrix file needs a 'matrix' field");
            const auto& rows = j.at("matrix");
            const auto n = static_cast<Eigen::Index>(rows.size());
            Matrix a(n, n);
            for (Eigen::Index r = 0; r < n; ++r) {
                if (rows[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(n)) {
                    throw Error(ErrorCode::NonSquare, "matrix must be square");
                }
                for (Eigen::Index c = 0; c < n; ++c) a(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
            }
            Case c{opts.matrix->filename().string(), a, std::nullopt, std::nullopt};
            if (j.contains("formation")) c.f = Formation{j.at("formation").get<std::vector<double>>(), "x"};
            if (j.contains("poles")) c.poles = parse_poles(j.at("poles"));
            // published poles are often rounded; the file may say how far
            if (j.contains("tolerance")) c.tolerance = j.at("tolerance").get<double>();
            cases.push_back(std::move(c));
        } else if (opts.random_size > 0) {
            std::mt19937_64 rng(opts.seed);
            std::uniform_real_distribution<double> value(-2.0, 2.0);
            std::bernoulli_distribution present(0.5);
            Matrix a = Matrix::Zero(opts.random_size, opts.random_size);
            for (int r = 0; r < opts.random_size; ++r) {
                for (int c = 0; c < opts.random_size; ++c) {
                    if (r == c || present(rng)) a(r, c) = value(rng);
                }
            }
            cases.push_back({"random(n=" + std::to_string(opts.random_size) + ", seed=" + std::to_string(opts.seed) + ")", a,
                             std::nullopt, std::nullopt});
        } else if (opts.scenario) {
            auto s = require_scenario(opts);
            auto g = s.graph();
            if (s.matrix) {
                for (const auto& axis : s.axes) {
                    std::optional<Formation> f;
                    if (axis.formation) f = Formation{*axis.formation, axis.label};
                    cases.push_back({s.name + "/" + axis.label, *s.matrix, f, std::nullopt});
                }
            } else {
                auto diag = assign_diagonal(g, s.poles);
                std::vector<Complex> poles(s.poles.lambdas.begin(), s.poles.lambdas.end());
                for (const auto& axis : s.axes) {
                    auto f = axis_formation(g, diag, axis);
                    auto gains = solve_betas(g, diag, f, s.policy);
                    cases.push_back({s.name + "/" + axis.label, build_closed_loop(g, gains), f, poles});
                }
            }
        } else {
            throw Error(ErrorCode::ParseError, "verify needs --matrix, --scenario or --random");
        }

        bool ok = true;
        json results = json::array();
        for (const auto& c : cases) {
            auto check = cross_check(c.a);
            auto spec = spectrum(c.a);
            json entry = {{"case", c.label},
                          {"matching_coefficients", check.matching},
                          {"leverrier_coefficients", check.leverrier},
                          {"coefficient_gap", check.coefficient_gap},
                          {"coefficients_agree", check.agree},
                          {"spectrum", spectrum_json(spec)}};
            bool case_ok = check.agree;
            if (!opts.json) {
                out << "case " << c.label << "\n";
                print_poly(out, "  det(sI-A) by matchings:", check.matching);
                print_poly(out, "  det(sI-A) numeric:     ", check.leverrier);
                out << "  coefficient gap " << fmt(check.coefficient_gap, "%.3g") << (check.agree ? " (agree)" : " (DISAGREE)") << "\n";
                out << "  spectrum:";
                for (auto z : spec) out << "  " << fmt(z);
                out << "\n";
            }
            if (c.f) {
                if (c.f->size() != c.a.rows()) throw Error(ErrorCode::DimensionMismatch, "formation size does not match the matrix");
                auto report = verify_formation(c.a, *c.f, c.poles.value_or(std::vector<Complex>{}));
                entry["kernel_residual"] = report.kernel_residual;
                entry["kernel_ok"] = report.kernel_ok;
                case_ok = case_ok && report.kernel_ok;
                if (!opts.json) {
                    out << "  kernel residual |A F|_inf: " << fmt(report.kernel_residual, "%.3g")
                        << (report.kernel_ok ? " (ok)" : " (FAIL)") << "\n";
                }
            }
            if (c.poles) {
                std::vector<Complex> requested = *c.poles;
                requested.emplace_back(0.0, 0.0);
                double dist = multiset_distance(spec, requested);
                bool match = dist <= c.tolerance;
                entry["requested"] = spectrum_json(requested);
                entry["spectrum_distance"] = dist;
                entry["spectrum_matches"] = match;
                entry["tolerance"] = c.tolerance;
                case_ok = case_ok && match;
                if (!opts.json) {
                    out << "  distance to requested poles " << fmt(dist, "%.3g") << " (tolerance " << fmt(c.tolerance, "%.3g")
                        << (match ? ", match)" : ", MISMATCH)") << "\n";
                }
            }
            entry["pass"] = case_ok;
            results.push_back(entry);
            ok = ok && case_ok;
            if (!opts.json) out << "  result: " << (case_ok ? "PASS" : "FAIL") << "\n";
        }
        if (opts.json) out << json{{"cases", results}}.dump(2) << "\n";
        if (opts.out_dir) write_file(*opts.out_dir / "verify.json", json{{"cases", results}}.dump(2) + "\n");
        return ok ? kExitOk : kExitFailure;
    });
}

}  // namespace leadform
