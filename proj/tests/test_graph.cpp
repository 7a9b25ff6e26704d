#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "fsn/errors.hpp"
#include "fsn/graph.hpp"
#include "oracles.hpp"

using namespace fsn;

namespace {

TradeFlow flow(std::string from, std::string to, double kcal, int year = 2022) {
    TradeFlow f;
    f.exporter = std::move(from);
    f.importer = std::move(to);
    f.year = year;
    f.kilocalories = kcal;
    f.quantity = kcal;
    return f;
}

// Component sizes via transitive closure of the undirected projection.
std::vector<std::size_t> closure_components(const SupplyNetwork& net) {
    const std::size_t n = net.node_count();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
    for (const auto& e : net.edges()) reach[e.source][e.target] = reach[e.target][e.source] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    std::vector<bool> done(n, false);
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        std::size_t s = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (reach[i][j]) {
                done[j] = true;
                ++s;
            }
        sizes.push_back(s);
    }
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    return sizes;
}

}  // namespace

TEST_CASE("parallel flows are summed per ordered pair") {
    std::vector<TradeFlow> flows{flow("A", "B", 5), flow("A", "B", 3)};
    auto net = build_network(flows, 2022);
    REQUIRE(net.edge_count() == 1);
    CHECK(net.weight(*net.find("A"), *net.find("B")) == 8.0);
}

TEST_CASE("direction is preserved") {
    std::vector<TradeFlow> flows{flow("A", "B", 5), flow("B", "A", 5)};
    auto net = build_network(flows, 2022);
    CHECK(net.edge_count() == 2);
    CHECK(net.find_edge(0, 1).has_value());
    CHECK(net.find_edge(1, 0).has_value());
}

TEST_CASE("empty flow list gives an empty network") {
    auto net = build_network({}, 2022);
    CHECK(net.empty());
    CHECK(density(net) == 0.0);
    CHECK(components(net).sizes.empty());
}

TEST_CASE("zero, negative and self flows are dropped; codes are uppercased") {
    std::vector<TradeFlow> flows{flow("usa", "chn", 0), flow("USA", "CHN", -1), flow("usa", "USA", 4),
                                 flow(" usa ", "bra", 2)};
    auto net = build_network(flows, 2022);
    CHECK(net.node_count() == 2);
    CHECK(net.edge_count() == 1);
    CHECK(net.code(0) == "BRA");
    CHECK(net.weight(*net.find("usa"), *net.find("BRA")) == 2.0);
}

TEST_CASE("flows from other years are ignored") {
    std::vector<TradeFlow> flows{flow("A", "B", 5, 2021)};
    CHECK(build_network(flows, 2022).empty());
}

TEST_CASE("density") {
    // 3 nodes, 2 edges: 2 / (3 * 2)
    CHECK(density(oracle::from_pairs(3, {{0, 1}, {1, 2}})) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
    CHECK(density(oracle::complete_digraph(4)) == 1.0);
    CHECK(density(oracle::from_pairs(5, {})) == 0.0);
    CHECK(density(oracle::from_pairs(1, {})) == 0.0);
}

TEST_CASE("largest connected fraction") {
    CHECK(largest_connected_fraction(oracle::from_pairs(6, {{0, 1}, {1, 2}, {3, 2}, {3, 4}, {5, 4}}), 6) == 1.0);
    // Components {0,1,2} and {3}: 3/4.
    CHECK(largest_connected_fraction(oracle::from_pairs(4, {{0, 1}, {2, 1}}), 4) == 0.75);
    CHECK(largest_connected_fraction(oracle::from_pairs(5, {}), 5) == 0.2);
    CHECK_THROWS_AS(largest_connected_fraction(oracle::from_pairs(2, {}), 0), InvalidArgument);
}

TEST_CASE("weak connectivity ignores direction") {
    // 0 -> 1 <- 2 is one weak component even though 0 and 2 cannot reach each other.
    auto report = components(oracle::from_pairs(3, {{0, 1}, {2, 1}}));
    CHECK(report.sizes == std::vector<std::size_t>{3});
    CHECK(report.lcc_fraction == 1.0);
}

TEST_CASE("component sizes match a transitive-closure oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.below(10);
        auto net = oracle::random_digraph(rng, n, 0.05 + 0.3 * rng.unit());
        auto report = components(net);
        CHECK(report.sizes == closure_components(net));
        const std::size_t total = std::accumulate(report.sizes.begin(), report.sizes.end(), std::size_t{0});
        CHECK(total == n);
        CHECK(report.lcc_fraction >= 1.0 / static_cast<double>(n));
        CHECK(report.lcc_fraction <= 1.0);
    }
}

TEST_CASE("lcc fraction never grows when edges are deleted") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto net = oracle::random_digraph(rng, 10, 0.25);
        std::vector<std::uint8_t> alive(net.edge_count(), 1);
        double previous = largest_connected_fraction(net, 10);
        std::vector<std::size_t> order(net.edge_count());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(order));
        for (auto e : order) {
            alive[e] = 0;
            const double now = static_cast<double>(largest_component_size(net, alive)) / 10.0;
            CHECK(now <= previous);
            CHECK(now == largest_connected_fraction(net.with_edges(alive), 10));
            previous = now;
        }
        CHECK(previous == doctest::Approx(0.1));
    }
}

TEST_CASE("density is invariant under relabeling") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto net = oracle::random_digraph(rng, 7, 0.4);
        std::vector<std::size_t> perm(7);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(perm));
        NetworkBuilder b(2022);
        for (const auto& e : net.edges()) {
            b.add_flow(oracle::code(perm[e.source]), oracle::code(perm[e.target]), e.weight);
        }
        for (std::size_t v = 0; v < 7; ++v) b.add_node(oracle::code(perm[v]));
        CHECK(density(b.build()) == density(net));
    }
}

TEST_CASE("adjacency indices are consistent") {
    Rng rng(8);
    auto net = oracle::random_digraph(rng, 8, 0.4);
    std::size_t out_total = 0, in_total = 0;
    for (NodeId v = 0; v < net.node_count(); ++v) {
        for (EdgeId e : net.out_edges(v)) CHECK(net.edge(e).source == v);
        for (EdgeId e : net.in_edges(v)) CHECK(net.edge(e).target == v);
        out_total += net.out_degree(v);
        in_total += net.in_degree(v);
    }
    CHECK(out_total == net.edge_count());
    CHECK(in_total == net.edge_count());
    for (const auto& e : net.edges()) {
        CHECK(e.source != e.target);
        CHECK(e.weight > 0.0);
    }
}
