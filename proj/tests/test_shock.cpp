#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "fsn/errors.hpp"
#include "fsn/shock.hpp"
#include "oracles.hpp"

using namespace fsn;
using oracle::from_pairs;

namespace {

std::vector<double> means(const RobustnessCurve& c) {
    std::vector<double> out;
    for (const auto& pt : c.points) out.push_back(pt.s_mean);
    return out;
}

ShockSpec ranked(Metric metric, double q, double p_step) {
    ShockSpec spec;
    spec.metric = metric;
    spec.q = q;
    spec.p_step = p_step;
    spec.replications = 1;
    return spec;
}

std::string curve_text(const RobustnessCurve& c) {
    std::ostringstream out;
    c.write_csv(out, "#");
    return out.str();
}

// Largest weak component after deleting every edge touching `removed`,
// computed by repeated flood fill on a dense matrix.
std::size_t lcc_without(const SupplyNetwork& net, const std::vector<bool>& removed) {
    const std::size_t n = net.node_count();
    auto a = oracle::adjacency(net);
    std::vector<int> comp(n, -1);
    std::size_t best = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (comp[s] >= 0) continue;
        std::vector<std::size_t> stack{s};
        comp[s] = static_cast<int>(s);
        std::size_t size = 0;
        while (!stack.empty()) {
            auto u = stack.back();
            stack.pop_back();
            ++size;
            for (std::size_t v = 0; v < n; ++v) {
                const bool linked = (a[u][v] || a[v][u]) && !removed[u] && !removed[v];
                if (linked && comp[v] < 0) {
                    comp[v] = static_cast<int>(s);
                    stack.push_back(v);
                }
            }
        }
        best = std::max(best, size);
    }
    return best;
}

}  // namespace

TEST_CASE("complete digraph under ranked full severance") {
    auto k4 = oracle::complete_digraph(4);
    auto curve = robustness_curve(k4, ranked(Metric::ID, 1.0, 0.25));
    CHECK(means(curve) == std::vector<double>{0.75, 0.5, 0.25, 0.25});
    CHECK(curve.index_rp == 0.4375);
    CHECK(curve.points.back().p == 1.0);

    auto surface = robustness_surface(k4, ranked(Metric::ID, 1.0, 0.25), 1);
    CHECK(surface.volume_rpq == 0.4375);
}

TEST_CASE("trivial shocks") {
    auto edgeless = from_pairs(5, {});
    auto curve = robustness_curve(edgeless, ranked(Metric::PR, 1.0, 0.2));
    for (double s : means(curve)) CHECK(s == 0.2);
    CHECK(curve.index_rp == 0.2);
    auto surface = robustness_surface(edgeless, [] {
        auto s = ranked(Metric::ID, 1.0, 0.5);
        s.replications = 3;
        return s;
    }(), 4);
    for (const auto& row : surface.rows)
        for (const auto& pt : row.points) CHECK(pt.s_mean == 0.2);
    CHECK(surface.volume_rpq == 0.2);

    Rng rng(1);
    auto net = oracle::random_digraph(rng, 12, 0.3);
    auto identity = robustness_curve(net, ranked(Metric::BC, 0.0, 0.1));
    for (double s : means(identity)) CHECK(s == 1.0);
    CHECK(identity.index_rp == 1.0);
    for (std::uint64_t seed : {0u, 9u}) {
        auto r = random_shock_curve(net, 0.0, 0.1, 5, seed);
        for (double s : means(r)) CHECK(s == 1.0);
    }

    std::vector<NodeId> all(net.node_count());
    std::iota(all.begin(), all.end(), NodeId{0});
    CHECK(apply_shock(net, all, 1.0, rng).edge_count() == 0);
    CHECK(apply_shock(net, all, 0.0, rng).edges().size() == net.edge_count());
}

TEST_CASE("partial severance counts") {
    CHECK(edges_to_sever(0.5, 4) == 2);
    CHECK(edges_to_sever(0.3, 10) == 3);
    CHECK(edges_to_sever(0.01, 3) == 1);
    CHECK(edges_to_sever(1.0, 7) == 7);
    CHECK(edges_to_sever(0.0, 7) == 0);
    CHECK(edges_to_sever(0.7, 0) == 0);

    // Node 0 has two out-edges and two in-edges.
    auto net = from_pairs(5, {{0, 1}, {0, 2}, {3, 0}, {4, 0}, {1, 2}});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        std::vector<NodeId> target{0};
        auto hit = apply_shock(net, target, 0.5, rng);
        CHECK(hit.edge_count() == 3);
        CHECK(hit.find_edge(1, 2).has_value());
        CHECK(hit.node_count() == 5);
    }
}

TEST_CASE("grid and tranche sizes") {
    auto grid = p_grid(0.02);
    CHECK(grid.size() == 50);
    CHECK(grid.back() == 1.0);
    CHECK(p_grid(0.3).size() == 4);
    CHECK(p_grid(0.3).back() == 1.0);
    auto counts = targets_per_step(200, 0.02);
    CHECK(counts.front() == 4);
    CHECK(counts.back() == 200);
    CHECK(std::is_sorted(counts.begin(), counts.end()));
}

TEST_CASE("target ranking") {
    auto star = from_pairs(5, {{1, 0}, {2, 0}, {3, 0}, {4, 0}});
    CHECK(rank_targets(star, Metric::ID).front() == 0);
    auto flat = from_pairs(4, {});
    CHECK(rank_targets(flat, Metric::ID) == std::vector<NodeId>{0, 1, 2, 3});

    auto six = from_pairs(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 4}, {5, 0}, {2, 5}});
    auto bc = oracle::betweenness(six);
    auto order = rank_targets(six, Metric::BC);
    for (std::size_t i = 1; i < order.size(); ++i) {
        const double a = bc[order[i - 1]], b = bc[order[i]];
        CHECK((a > b + 1e-12 || (std::abs(a - b) <= 1e-12 && order[i - 1] < order[i])));
    }
}

TEST_CASE("spec validation") {
    ShockSpec spec;
    spec.q = 0.5;
    spec.replications = 1;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec.q = 1.0;
    CHECK_NOTHROW(spec.validate());
    spec.strategy = TargetStrategy::Random;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec.replications = 2;
    CHECK_NOTHROW(spec.validate());
    spec.q = 1.5;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec.q = 1.0;
    spec.p_step = 0.0;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);
    spec.p_step = 0.1;
    spec.adaptive = true;
    CHECK_THROWS_AS(spec.validate(), InvalidArgument);

    auto s = ranked(Metric::HU, 1.0, 0.1);
    s.seed = 4;
    CHECK(s.provenance().find("metric=HU") != std::string::npos);
    CHECK(s.provenance().find("seed=4") != std::string::npos);
}

TEST_CASE("random shocks on the directed ring match the exact expectation") {
    // Expected S over every k-subset of removed ring nodes, by enumeration.
    constexpr std::size_t n = 10;
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < static_cast<int>(n); ++i) edges.emplace_back(i, (i + 1) % static_cast<int>(n));
    auto ring = from_pairs(n, edges);

    std::vector<double> expected(n + 1, 0.0);
    std::vector<double> subsets(n + 1, 0.0);
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<bool> removed(n);
        for (std::size_t i = 0; i < n; ++i) removed[i] = (mask >> i) & 1u;
        const auto k = static_cast<std::size_t>(std::popcount(mask));
        expected[k] += static_cast<double>(lcc_without(ring, removed)) / n;
        subsets[k] += 1.0;
    }
    for (std::size_t k = 0; k <= n; ++k) expected[k] /= subsets[k];

    const int reps = 1000;
    auto curve = random_shock_curve(ring, 1.0, 0.1, reps, 77, 4);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto k = static_cast<std::size_t>(std::llround(curve.points[i].p * n));
        const double tolerance = 5.0 * curve.points[i].s_std / std::sqrt(static_cast<double>(reps)) + 1e-12;
        INFO("k = " << k);
        CHECK(std::abs(curve.points[i].s_mean - expected[k]) <= tolerance);
    }
}

TEST_CASE("random and ranked shocks agree on a vertex- and edge-transitive network") {
    auto k8 = oracle::complete_digraph(8);
    auto spec = ranked(Metric::ID, 0.5, 0.125);
    spec.replications = 1000;
    spec.seed = 3;
    auto targeted = robustness_curve(k8, spec);
    auto random = random_shock_curve(k8, 0.5, 0.125, 1000, 4);
    for (std::size_t i = 0; i < targeted.points.size(); ++i) {
        const double se = std::hypot(targeted.points[i].s_std, random.points[i].s_std) / std::sqrt(1000.0);
        CHECK(std::abs(targeted.points[i].s_mean - random.points[i].s_mean) <= 5.0 * se + 1e-12);
    }
}

TEST_CASE("curve invariants on random networks") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 20 + rng.below(20);
        auto net = oracle::random_digraph(rng, n, 0.08);
        const double floor = 1.0 / static_cast<double>(n);
        for (Metric m : {Metric::ID, Metric::BC, Metric::PR}) {
            auto curve = robustness_curve(net, ranked(m, 1.0, 0.05));
            for (std::size_t i = 0; i < curve.points.size(); ++i) {
                CHECK(curve.points[i].s_mean >= floor);
                CHECK(curve.points[i].s_mean <= 1.0);
                if (i > 0) CHECK(curve.points[i].s_mean <= curve.points[i - 1].s_mean);
            }
            CHECK(curve.points.back().s_mean == floor);
            CHECK(curve.index_rp >= floor);
            CHECK(curve.index_rp <= 1.0);
        }
    }
}

TEST_CASE("removing a tranche never grows the largest component") {
    Rng rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(9);
        auto net = oracle::random_digraph(rng, n, 0.3);
        auto order = rank_targets(net, Metric::OD);
        std::vector<bool> removed(n, false);
        std::size_t previous = lcc_without(net, removed);
        DamageOverlay overlay(net);
        Rng unused(0);
        for (NodeId v : order) {
            removed[v] = true;
            overlay.sever(v, 1.0, unused);
            const std::size_t now = lcc_without(net, removed);
            CHECK(now <= previous);
            CHECK(overlay.largest_component() == now);
            previous = now;
        }
    }
}

TEST_CASE("surface rows reproduce standalone curves") {
    Rng rng(31);
    auto net = oracle::random_digraph(rng, 30, 0.1);
    ShockSpec spec;
    spec.metric = Metric::PR;
    spec.p_step = 0.1;
    spec.replications = 12;
    spec.seed = 8;
    spec.jobs = 3;
    auto surface = robustness_surface(net, spec, 4);
    REQUIRE(surface.q_values.size() == 4);
    CHECK(surface.q_values.back() == 1.0);
    for (std::size_t row = 0; row < surface.rows.size(); ++row) {
        auto at_q = spec;
        at_q.q = surface.q_values[row];
        CHECK(curve_text(surface.rows[row]) == curve_text(robustness_curve(net, at_q)));
    }
    double total = 0.0;
    std::size_t cells = 0;
    for (std::size_t r = 0; r < surface.rows.size(); ++r)
        for (std::size_t c = 0; c < surface.p_values.size(); ++c, ++cells) total += surface.s(r, c);
    CHECK(surface.volume_rpq == doctest::Approx(total / static_cast<double>(cells)).epsilon(1e-14));
}

TEST_CASE("results do not depend on the worker count") {
    Rng rng(99);
    auto net = oracle::random_digraph(rng, 40, 0.07);
    ShockSpec spec;
    spec.strategy = TargetStrategy::Random;
    spec.q = 0.6;
    spec.p_step = 0.05;
    spec.replications = 16;
    spec.seed = 123;
    spec.jobs = 1;
    auto one = robustness_curve(net, spec);
    spec.jobs = 8;
    auto eight = robustness_curve(net, spec);
    CHECK(curve_text(one) == curve_text(eight));

    spec.strategy = TargetStrategy::Ranked;
    spec.metric = Metric::BC;
    spec.jobs = 1;
    auto s1 = robustness_surface(net, spec, 5);
    spec.jobs = 8;
    auto s8 = robustness_surface(net, spec, 5);
    CHECK(s1.to_json().dump() == s8.to_json().dump());
}

TEST_CASE("explicit and adaptive strategies") {
    auto chain = from_pairs(4, {{0, 1}, {1, 2}, {2, 3}});
    ShockSpec spec = ranked(Metric::ID, 1.0, 0.25);
    spec.strategy = TargetStrategy::Explicit;
    spec.explicit_order = {"AAB"};
    auto curve = robustness_curve(chain, spec);
    CHECK(means(curve).front() == 0.5);
    spec.explicit_order = {"ZZZ"};
    CHECK_THROWS_AS(robustness_curve(chain, spec), InvalidArgument);

    Rng rng(5);
    auto net = oracle::random_digraph(rng, 25, 0.1);
    auto adaptive = ranked(Metric::BC, 1.0, 0.04);
    adaptive.adaptive = true;
    auto a = robustness_curve(net, adaptive);
    CHECK(a.points.back().s_mean == doctest::Approx(1.0 / 25.0));
    CHECK(adaptive.label() == "BC-adaptive");
}

TEST_CASE("yearly evolution") {
    Rng rng(17);
    auto sparse = oracle::random_digraph(rng, 15, 0.1);
    NetworkBuilder dense_builder(2021);
    for (NodeId v = 0; v < sparse.node_count(); ++v) dense_builder.add_node(sparse.code(v));
    for (const auto& e : sparse.edges()) dense_builder.add_flow(sparse.code(e.source), sparse.code(e.target), e.weight);
    for (int extra = 0; extra < 20; ++extra) {
        auto s = rng.below(15), t = rng.below(15);
        dense_builder.add_flow(oracle::code(s), oracle::code(t), 1.0);
    }
    auto dense = dense_builder.build();

    // Same explicit order in both years isolates the effect of extra edges.
    ShockSpec spec = ranked(Metric::ID, 1.0, 1.0 / 15.0);
    spec.strategy = TargetStrategy::Explicit;
    for (auto v : rank_targets(sparse, Metric::ID)) spec.explicit_order.push_back(sparse.code(v));

    EvolutionPlan plan;
    plan.strategies = {spec};
    plan.q_values = {1.0};
    std::map<int, SupplyNetwork> years{{2020, sparse}, {2021, dense}, {2022, sparse}};
    auto rows = yearly_evolution(years, plan);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].value == rows[2].value);
    CHECK(rows[1].value >= rows[0].value);
    CHECK(rows[0].measure == "Rp");

    plan.surface_q_steps = 2;
    plan.strategies[0].replications = 4;
    auto with_surface = yearly_evolution(years, plan);
    CHECK(with_surface.size() == 6);
    CHECK(yearly_evolution({}, plan).empty());

    std::ostringstream out;
    write_evolution_csv(out, rows);
    CHECK(out.str().rfind("year,strategy,measure,q,R\n", 0) == 0);
}
