#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/stl.h>

#include "leadform/bipartite.hpp"
#include "leadform/errors.hpp"
#include "leadform/graph.hpp"
#include "leadform/protocol.hpp"
#include "leadform/sim.hpp"
#include "leadform/spectrum.hpp"
#include "leadform/synthesis.hpp"

namespace py = pybind11;
using namespace leadform;

namespace {

using PairMap = std::map<std::pair<Agent, Agent>, double>;

// Python side keys beta and gamma by (i, j): agent i listening to j.
std::map<Edge, double> to_edges(const PairMap& m) {
    std::map<Edge, double> out;
    for (const auto& [ij, v] : m) out[Edge{ij.second, ij.first}] = v;
    return out;
}

PairMap from_edges(const std::map<Edge, double>& m) {
    PairMap out;
    for (const auto& [e, v] : m) out[{e.to, e.from}] = v;
    return out;
}

PoleSpec to_poles(const py::object& poles) {
    if (py::isinstance<py::dict>(poles)) return PoleSpec::from_assignment(poles.cast<std::map<Agent, double>>());
    return PoleSpec{poles.cast<std::vector<double>>(), {}};
}

py::dict report_dict(const FormationReport& r) {
    py::dict d;
    d["kernel_residual"] = r.kernel_residual;
    d["spectrum"] = r.spectrum;
    d["requested"] = r.requested;
    d["spectrum_distance"] = r.spectrum_distance;
    d["spectrum_matches"] = r.spectrum_matches;
    d["kernel_ok"] = r.kernel_ok;
    d["ok"] = r.ok();
    return d;
}

py::dict gains_dict(const GainSet& g) {
    py::dict d;
    d["diag"] = g.diag;
    d["betas"] = from_edges(g.betas);
    return d;
}

GainSet diag_gains(const CommGraph& g, const std::vector<double>& diag) {
    GainSet gains;
    gains.n = g.size();
    gains.leader = g.leader();
    gains.diag = diag;
    return gains;
}

}  // namespace

PYBIND11_MODULE(_leadform, m) {
    m.doc() = "Leader-follower formation synthesis";

    static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error.ptr(), exc.ptr());
        }
    });

    py::class_<CommGraph>(m, "CommGraph")
        .def_property_readonly("size", &CommGraph::size)
        .def_property_readonly("leader", &CommGraph::leader)
        .def_property_readonly("edges", [](const CommGraph& g) {
            std::vector<std::pair<Agent, Agent>> out;
            for (const auto& e : g.edges()) out.emplace_back(e.from, e.to);
            return out;
        })
        .def("in_neighbors", &CommGraph::in_neighbors)
        .def("out_neighbors", &CommGraph::out_neighbors)
        .def("__repr__", [](const CommGraph& g) {
            return "<CommGraph n=" + std::to_string(g.size()) + " leader=" + std::to_string(g.leader()) +
                   " edges=" + std::to_string(g.edge_count()) + ">";
        });

    m.def(
        "build_graph",
        [](int n, Agent leader, const std::vector<std::pair<Agent, Agent>>& edges) {
            std::vector<Edge> es;
            for (const auto& [from, to] : edges) es.push_back(Edge{from, to});
            return build_graph(n, leader, es);
        },
        py::arg("n"), py::arg("leader"), py::arg("edges"),
        "Edges are (from, to) pairs: `to` listens to `from`.");

    m.def("structural_report", [](const CommGraph& g) {
        auto r = structural_report(g);
        py::dict d;
        d["edge_count"] = r.edge_count;
        d["min_edges"] = r.min_edges;
        d["max_edges"] = r.max_edges;
        d["spanning_tree"] = r.spanning_tree;
        d["acyclic"] = r.acyclic;
        d["at_min_edges"] = r.at_min_edges;
        d["within_max"] = r.within_max;
        d["beta_unique"] = r.beta_unique;
        d["leader_isolated"] = r.leader_isolated;
        d["cycle"] = r.cycle;
        d["synthesizable"] = r.synthesizable();
        return d;
    });
    m.def("topological_order", &topological_order);
    m.def("leader_eccentricity", &leader_eccentricity);

    m.def(
        "synthesize",
        [](const CommGraph& g, const py::object& poles, const std::vector<double>& formation, const std::string& policy,
           const PairMap& pinned) {
            BetaPolicy p{parse_policy(policy), to_edges(pinned)};
            auto s = synthesize(g, to_poles(poles), Formation{formation}, p);
            py::dict d = gains_dict(s.gains);
            d["closed_loop"] = s.closed_loop;
            d["report"] = report_dict(s.report);
            return d;
        },
        py::arg("graph"), py::arg("poles"), py::arg("formation"), py::arg("policy") = "min-norm",
        py::arg("pinned") = PairMap{},
        "`poles` is a list (sorted onto followers by index) or a dict agent -> pole.");

    m.def(
        "verify_formation",
        [](const Matrix& a, const std::vector<double>& formation, const std::vector<Complex>& follower_poles) {
            return report_dict(verify_formation(a, Formation{formation}, follower_poles));
        },
        py::arg("a"), py::arg("formation"), py::arg("follower_poles"));

    m.def("characteristic_polynomial", &characteristic_polynomial);
    m.def("char_poly_matchings", &char_poly_matchings);
    m.def("polynomial_roots", &polynomial_roots);
    m.def("spectrum", &spectrum);
    m.def("perfect_matching_count", [](const Matrix& a, std::size_t limit) {
        return enumerate_perfect_matchings(pencil_bipartite(a), limit).size();
    }, py::arg("a"), py::arg("limit") = 100000);

    py::class_<ProtocolRun>(m, "ProtocolRun")
        .def_property_readonly("complete", &ProtocolRun::complete)
        .def_property_readonly("resolution_rounds", &ProtocolRun::resolution_rounds)
        .def_property_readonly("gain_rounds", &ProtocolRun::gain_rounds)
        .def_property_readonly("leader_target", &ProtocolRun::leader_target)
        .def_property_readonly("formation", [](const ProtocolRun& r) { return r.formation().f; })
        .def_property_readonly("betas", [](const ProtocolRun& r) { return from_edges(r.gains().betas); })
        .def_property_readonly("audit_size", [](const ProtocolRun& r) { return r.audit().size(); })
        .def("retarget", &retarget, py::arg("leader_target"));

    m.def(
        "run_protocol",
        [](const CommGraph& g, const PairMap& offsets, const std::vector<double>& diag, double leader_target) {
            return run_rounds(init_protocol(g, OffsetTable{to_edges(offsets)}, diag_gains(g, diag)), leader_target);
        },
        py::arg("graph"), py::arg("offsets"), py::arg("diag"), py::arg("leader_target"),
        "`offsets[(i, j)]` is f_i - f_j for every edge j -> i.");

    m.def("offsets_from_formation", [](const CommGraph& g, const std::vector<double>& formation) {
        return from_edges(OffsetTable::from_formation(g, Formation{formation}).gammas);
    });

    py::enum_<LeaderLaw::Mode>(m, "LeaderMode")
        .value("none", LeaderLaw::Mode::None)
        .value("hold", LeaderLaw::Mode::Hold)
        .value("proportional", LeaderLaw::Mode::Proportional)
        .value("withdraw_at", LeaderLaw::Mode::WithdrawAt)
        .value("withdraw_on_converge", LeaderLaw::Mode::WithdrawOnConverge);

    m.def(
        "simulate",
        [](const Matrix& a, const Vector& x0, LeaderLaw::Mode mode, double target, double gain, double dt,
           double horizon, double withdraw_time, double tolerance, int leader) {
            LeaderLaw law{mode, target, gain, withdraw_time, tolerance};
            auto t = simulate(a, x0, law, dt, horizon, leader);
            Matrix states(static_cast<Eigen::Index>(t.samples()), a.rows());
            for (std::size_t k = 0; k < t.samples(); ++k) states.row(static_cast<Eigen::Index>(k)) = t.states[k].transpose();
            py::dict d;
            d["times"] = t.times;
            d["states"] = states;
            d["input"] = t.input;
            d["withdrawn_at"] = t.withdrawn_at;
            return d;
        },
        py::arg("a"), py::arg("x0"), py::arg("mode") = LeaderLaw::Mode::Proportional, py::arg("target") = 0.0,
        py::arg("gain") = 1.0, py::arg("dt") = 0.01, py::arg("horizon") = 10.0, py::arg("withdraw_time") = 0.0,
        py::arg("tolerance") = 1e-9, py::arg("leader") = -1,
        "RK4 run; `states` has one row per sample. The leader defaults to the last agent.");

    m.def("settled", [](const Vector& x, const std::vector<double>& formation, double rel_tol) {
        return settled(x, Formation{formation}, rel_tol);
    }, py::arg("x"), py::arg("formation"), py::arg("rel_tol") = 1e-3);
}
