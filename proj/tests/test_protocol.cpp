#include <doctest.h>

#include <random>
#include <set>

#include "leadform/errors.hpp"
#include "leadform/protocol.hpp"
#include "test_support.hpp"

using namespace leadform;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::ParseError;
}

struct HexAxis {
    CommGraph g;
    GainSet diag;
    OffsetTable offsets;
};

HexAxis hex_axis(const std::vector<double>& coords) {
    testing::Hexagon hex;
    auto g = build_graph(6, 6, hex.edges);
    auto diag = assign_diagonal(g, PoleSpec::from_assignment(hex.poles));
    return {g, diag, OffsetTable::from_formation(g, Formation{coords})};
}

}  // namespace

TEST_CASE("offset tables") {
    auto g = build_graph(3, 3, {{3, 2}, {2, 1}, {3, 1}});
    auto t = OffsetTable::from_formation(g, Formation{{1, 4, 9}});
    CHECK(t.gammas.size() == 3);
    CHECK(*t.gamma(1, 2) == -3.0);
    CHECK(*t.gamma(2, 3) == -5.0);
    CHECK(*t.gamma(1, 3) == -8.0);
    CHECK_FALSE(t.gamma(2, 1).has_value());
}

TEST_CASE("check_cocycle") {
    OffsetTable bad;
    bad.set(1, 2, 1);
    bad.set(2, 3, 1);
    bad.set(1, 3, 3);
    auto r = check_cocycle(bad);
    CHECK(r.max_violation == doctest::Approx(1.0));
    CHECK_FALSE(r.consistent());
    CHECK(r.triples_checked >= 1);
    std::set<Agent> worst(r.worst.begin(), r.worst.end());
    CHECK(worst == std::set<Agent>{1, 2, 3});

    OffsetTable good = bad;
    good.set(1, 3, 2);
    CHECK(check_cocycle(good).consistent());
    CHECK(check_cocycle(good).max_violation == 0.0);

    OffsetTable anti;
    anti.set(1, 2, 1);
    anti.set(2, 1, -0.5);
    CHECK(check_cocycle(anti).max_violation == doctest::Approx(0.5));

    // a 4-cycle with no closed triple is caught through its cycle
    OffsetTable ring;
    ring.set(1, 2, 1);
    ring.set(2, 3, 1);
    ring.set(3, 4, 1);
    ring.set(4, 1, 1);
    auto rr = check_cocycle(ring);
    CHECK(rr.cycles_checked == 1);
    CHECK(rr.max_violation == doctest::Approx(4.0));

    testing::Hexagon hex;
    CHECK(check_cocycle(hex_axis(hex.x).offsets).consistent());
    CHECK(check_cocycle(hex_axis(hex.y).offsets).consistent());

    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 6;
        auto edges = testing::random_edges(n, 0.5, rng);
        std::vector<double> f;
        for (int k = 0; k < n; ++k) f.push_back(testing::random_nonzero(rng));
        OffsetTable t;
        for (const auto& e : edges) t.set(e.to, e.from, f[e.to - 1] - f[e.from - 1]);
        CHECK(check_cocycle(t).consistent());
    }
}

TEST_CASE("init_protocol") {
    testing::Hexagon hex;
    auto h = hex_axis(hex.x);
    auto run = init_protocol(h.g, h.offsets, h.diag);
    CHECK(run.agents().size() == 6);
    for (const auto& s : run.agents()) CHECK_FALSE(s.resolved());
    CHECK_FALSE(run.complete());
    CHECK_FALSE(run.leader_target().has_value());
    CHECK(code_of([&] { run.formation(); }) == ErrorCode::Unreachable);

    auto pair = build_graph(2, 2, {{2, 1}});
    OffsetTable one;
    one.set(1, 2, 1.0);
    auto ready = init_protocol(pair, one, assign_diagonal(pair, PoleSpec{{-1}, {}}));
    CHECK_FALSE(ready.agent(1).resolved());

    CHECK(code_of([&] { init_protocol(pair, OffsetTable{}, assign_diagonal(pair, PoleSpec{{-1}, {}})); }) ==
          ErrorCode::MissingOffset);
    CHECK(code_of([&] { init_protocol(pair, one, GainSet{2, 2, {}, {}}); }) == ErrorCode::IncompleteGains);
    auto cyclic = build_graph(3, 3, {{3, 2}, {2, 1}, {1, 2}});
    OffsetTable c;
    c.set(2, 3, 0);
    c.set(1, 2, 0);
    c.set(2, 1, 0);
    CHECK(code_of([&] { init_protocol(cyclic, c, GainSet{3, 3, {-1, -2, 0}, {}}); }) ==
          ErrorCode::StructuralViolation);
}

TEST_CASE("run_rounds on a pair") {
    auto pair = build_graph(2, 2, {{2, 1}});
    OffsetTable one;
    one.set(1, 2, 1.0);
    auto run = run_rounds(init_protocol(pair, one, assign_diagonal(pair, PoleSpec{{-1}, {}})), 5.0);
    CHECK(run.complete());
    CHECK(run.formation().f == std::vector<double>{6, 5});
    CHECK(run.resolution_rounds() == 1);
    CHECK(run.agent(2).round_resolved == 0);
    CHECK(run.agent(1).round_resolved == 1);
    // -1 * 6 + beta * 5 = 0
    CHECK(run.gains().beta(1, 2) == doctest::Approx(1.2));
}

TEST_CASE("hexagon resolves in three rounds") {
    testing::Hexagon hex;
    auto rx = run_rounds(init_protocol(hex_axis(hex.x).g, hex_axis(hex.x).offsets, hex_axis(hex.x).diag), 3.0);
    auto ry = run_rounds(init_protocol(hex_axis(hex.y).g, hex_axis(hex.y).offsets, hex_axis(hex.y).diag), -1.829);
    REQUIRE(rx.complete());
    REQUIRE(ry.complete());
    CHECK(rx.resolution_rounds() == 3);
    CHECK(rx.resolution_rounds() == leader_eccentricity(rx.graph()));
    auto fx = rx.formation().f;
    auto fy = ry.formation().f;
    for (int k = 0; k < 6; ++k) {
        CHECK(fx[k] == doctest::Approx(hex.x[k]).epsilon(1e-12));
        CHECK(fy[k] == doctest::Approx(hex.y[k]).epsilon(1e-12));
    }
    // perimeter order 1,2,3,6,4,5: every side has length 2
    const int ring[] = {0, 1, 2, 5, 3, 4};
    for (int k = 0; k < 6; ++k) {
        int a = ring[k], b = ring[(k + 1) % 6];
        CHECK(std::hypot(fx[a] - fx[b], fy[a] - fy[b]) == doctest::Approx(2.0).epsilon(1e-12));
    }

    auto h = hex_axis(hex.x);
    auto central = solve_betas(h.g, h.diag, rx.formation(), BetaPolicy::tree_unique());
    CHECK(rx.gains().betas == central.betas);
}

TEST_CASE("retarget translates the formation") {
    testing::Hexagon hex;
    auto hx = hex_axis(hex.x);
    auto hy = hex_axis(hex.y);
    auto rx = run_rounds(init_protocol(hx.g, hx.offsets, hx.diag), 3.0);
    auto ry = run_rounds(init_protocol(hy.g, hy.offsets, hy.diag), -1.829);
    auto mx = retarget(rx, 7.0);
    auto my = retarget(ry, -3.829);
    for (Agent i = 1; i <= 6; ++i) {
        CHECK(mx.formation().target(i) - rx.formation().target(i) == doctest::Approx(4.0).epsilon(1e-12));
        CHECK(my.formation().target(i) - ry.formation().target(i) == doctest::Approx(-2.0).epsilon(1e-12));
    }
    CHECK(mx.gains().betas == solve_betas(hx.g, hx.diag, mx.formation(), BetaPolicy::tree_unique()).betas);

    auto same = retarget(rx, 3.0);
    CHECK(same.gains().betas == rx.gains().betas);

    // chain shifted by +10 against a centralized solve
    auto chain = build_graph(3, 3, {{3, 2}, {2, 1}});
    auto diag = assign_diagonal(chain, PoleSpec{{-1, -2}, {}});
    Formation f{{1, 2, 4}};
    auto run = run_rounds(init_protocol(chain, OffsetTable::from_formation(chain, f), diag), 4.0);
    auto shifted = retarget(run, 14.0);
    CHECK(shifted.formation().f == std::vector<double>{11, 12, 14});
    CHECK(shifted.gains().betas == solve_betas(chain, diag, Formation{{11, 12, 14}}, BetaPolicy::min_norm()).betas);
}

TEST_CASE("corrupted offsets on a diamond") {
    // 4 -> 2, 4 -> 3, 2 -> 1, 3 -> 1: agent 1 hears from two sides
    auto g = build_graph(4, 4, {{4, 2}, {4, 3}, {2, 1}, {3, 1}});
    auto diag = assign_diagonal(g, PoleSpec{{-1, -2, -3}, {}});
    auto offsets = OffsetTable::from_formation(g, Formation{{1, 2, 3, 4}});
    auto ok = run_rounds(init_protocol(g, offsets, diag), 4.0);
    CHECK(ok.formation().f == std::vector<double>{1, 2, 3, 4});
    CHECK(ok.gains().betas == solve_betas(g, diag, ok.formation(), BetaPolicy::min_norm()).betas);

    offsets.set(1, 3, offsets.gamma(1, 3).value() + 0.5);
    CHECK_FALSE(check_cocycle(offsets).consistent());
    CHECK(code_of([&] { run_rounds(init_protocol(g, offsets, diag), 4.0); }) == ErrorCode::InconsistentOffsets);
}

TEST_CASE("unreachable agents") {
    auto g = build_graph(3, 3, {{3, 2}});
    OffsetTable t;
    t.set(2, 3, 1.0);
    GainSet diag{3, 3, {-1, -2, 0}, {}};
    CHECK(code_of([&] { run_rounds(init_protocol(g, t, diag), 2.0); }) == ErrorCode::Unreachable);
}

TEST_CASE("agents read only local data") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_int_distribution<int> size(2, 9);
        const int n = size(rng);
        auto g = build_graph(n, n, testing::random_rooted_dag(n, 0.3, rng));
        PoleSpec poles;
        for (int k = 0; k < n - 1; ++k) poles.lambdas.push_back(-std::abs(testing::random_nonzero(rng)));
        Formation f;
        for (int k = 0; k < n; ++k) f.f.push_back(testing::random_nonzero(rng));
        auto run = run_rounds(init_protocol(g, OffsetTable::from_formation(g, f), assign_diagonal(g, poles)), f.f.back());
        REQUIRE_FALSE(run.audit().empty());
        for (const auto& read : run.audit()) {
            using Kind = LocalKnowledge::Read::Kind;
            if (read.kind == Kind::OwnDiagonal) {
                CHECK(read.subject == read.reader);
            } else {
                CHECK(g.has_edge(read.subject, read.reader));
            }
        }
        // every follower consulted its own diagonal exactly once
        for (Agent i : g.followers()) {
            auto own = std::count_if(run.audit().begin(), run.audit().end(), [&](const auto& r) {
                return r.reader == i && r.kind == LocalKnowledge::Read::Kind::OwnDiagonal;
            });
            CHECK(own == 1);
        }
    }
}

TEST_CASE("property: distributed gains equal centralized on random trees") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> size(2, 10);
        const int n = size(rng);
        auto g = build_graph(n, n, testing::random_tree(n, rng));
        PoleSpec poles;
        for (int k = 0; k < n - 1; ++k) poles.lambdas.push_back(-std::abs(testing::random_nonzero(rng)));
        Formation f;
        for (int k = 0; k < n; ++k) f.f.push_back(testing::random_nonzero(rng));
        auto diag = assign_diagonal(g, poles);
        auto run = run_rounds(init_protocol(g, OffsetTable::from_formation(g, f), diag), f.f.back());
        REQUIRE(run.complete());
        // offsets are differences, so targets agree to rounding, not bitwise
        for (Agent i = 1; i <= n; ++i) CHECK(run.formation().target(i) == doctest::Approx(f.target(i)).epsilon(1e-12));
        CHECK(run.gains().betas == solve_betas(g, diag, run.formation(), BetaPolicy::tree_unique()).betas);
        CHECK(run.resolution_rounds() == leader_eccentricity(g));

        // translate-then-run equals run-then-retarget
        const double c = testing::random_nonzero(rng);
        Formation moved = f;
        for (auto& v : moved.f) v += c;
        auto direct = run_rounds(init_protocol(g, OffsetTable::from_formation(g, f), diag), f.f.back() + c);
        auto via = retarget(run, f.f.back() + c);
        CHECK(direct.gains().betas == via.gains().betas);
    }
}
