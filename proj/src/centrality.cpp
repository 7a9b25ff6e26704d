#include "fsn/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsn/errors.hpp"
#include "fsn/parallel.hpp"

namespace fsn {

RankingTable degree_centrality(const SupplyNetwork& net, Direction direction) {
    const std::size_t n = net.node_count();
    if (n < 2) throw DegenerateNetwork("degree centrality needs at least two nodes");
    std::vector<double> scores(n);
    const double denom = static_cast<double>(n - 1);
    for (NodeId v = 0; v < n; ++v) {
        const auto k = direction == Direction::In ? net.in_degree(v) : net.out_degree(v);
        scores[v] = static_cast<double>(k) / denom;
    }
    return make_ranking(direction == Direction::In ? Metric::ID : Metric::OD, net,
                        std::move(scores));
}

RankingTable clustering_coefficient(const SupplyNetwork& net) {
    const std::size_t n = net.node_count();
    std::vector<double> scores(n, 0.0);
    std::vector<NodeId> stamp(n, std::numeric_limits<NodeId>::max());
    std::vector<NodeId> neighbours;
    for (NodeId i = 0; i < n; ++i) {
        neighbours.clear();
        for (EdgeId e : net.out_edges(i)) {
            const NodeId j = net.edge(e).target;
            if (stamp[j] != i) {
                stamp[j] = i;
                neighbours.push_back(j);
            }
        }
        for (EdgeId e : net.in_edges(i)) {
            const NodeId j = net.edge(e).source;
            if (stamp[j] != i) {
                stamp[j] = i;
                neighbours.push_back(j);
            }
        }
        const std::size_t k = neighbours.size();
        if (k < 2) continue;
        std::size_t links = 0;
        for (NodeId j : neighbours) {
            for (EdgeId e : net.out_edges(j)) {
                const NodeId t = net.edge(e).target;
                if (t != i && stamp[t] == i) ++links;
            }
        }
        scores[i] = static_cast<double>(links) / static_cast<double>(k * (k - 1));
    }
    return make_ranking(Metric::CC, net, std::move(scores));
}

RankingTable betweenness(const SupplyNetwork& net, unsigned jobs) {
    const std::size_t n = net.node_count();
    // Row s holds hop distances and geodesic counts from s.
    std::vector<int> dist(n * n, -1);
    std::vector<double> sigma(n * n, 0.0);
    parallel_for(n, jobs, [&](std::size_t s) {
        int* d = dist.data() + s * n;
        double* c = sigma.data() + s * n;
        std::vector<NodeId> queue{static_cast<NodeId>(s)};
        d[s] = 0;
        c[s] = 1.0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeId v = queue[head];
            for (EdgeId e : net.out_edges(v)) {
                const NodeId w = net.edge(e).target;
                if (d[w] < 0) {
                    d[w] = d[v] + 1;
                    queue.push_back(w);
                }
                if (d[w] == d[v] + 1) c[w] += c[v];
            }
        }
    });

    // Pair dependencies sigma_sv sigma_vt / sigma_st, summed over (s, t) in
    // lexicographic order for every v.
    std::vector<double> scores(n, 0.0);
    parallel_for(n, jobs, [&](std::size_t v) {
        double acc = 0.0;
        const int* from_v = dist.data() + v * n;
        const double* paths_v = sigma.data() + v * n;
        for (std::size_t s = 0; s < n; ++s) {
            const int sv = dist[s * n + v];
            if (s == v || sv < 0) continue;
            const int* from_s = dist.data() + s * n;
            const double* paths_s = sigma.data() + s * n;
            for (std::size_t t = 0; t < n; ++t) {
                if (t == s || t == v || from_v[t] < 0 || from_s[t] != sv + from_v[t]) continue;
                acc += paths_s[v] * paths_v[t] / paths_s[t];
            }
        }
        scores[v] = acc;
    });
    return make_ranking(Metric::BC, net, std::move(scores));
}

std::vector<double> normalized_betweenness(const RankingTable& raw) {
    const std::size_t n = raw.size();
    std::vector<double> out(n, 0.0);
    if (n < 3) return out;
    const double denom = static_cast<double>(n - 1) * static_cast<double>(n - 2);
    for (std::size_t v = 0; v < n; ++v) out[v] = raw.scores[v] / denom;
    return out;
}

RankingTable closeness(const SupplyNetwork& net, Direction direction) {
    const std::size_t n = net.node_count();
    std::vector<double> scores(n, 0.0);
    std::vector<long> dist(n);
    std::vector<NodeId> queue;
    queue.reserve(n);
    for (NodeId i = 0; i < n; ++i) {
        std::fill(dist.begin(), dist.end(), -1);
        queue.assign(1, i);
        dist[i] = 0;
        std::size_t reached = 0;
        double total = 0.0;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const NodeId v = queue[head];
            const auto incident = direction == Direction::In ? net.in_edges(v) : net.out_edges(v);
            for (EdgeId e : incident) {
                const NodeId w =
                    direction == Direction::In ? net.edge(e).source : net.edge(e).target;
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    ++reached;
                    total += static_cast<double>(dist[w]);
                    queue.push_back(w);
                }
            }
        }
        if (reached == 0) continue;
        const double d = static_cast<double>(reached);
        scores[i] = (d / static_cast<double>(n - 1)) * (d / total);
    }
    return make_ranking(direction == Direction::In ? Metric::IC : Metric::OC, net,
                        std::move(scores));
}

RankingTable pagerank(const SupplyNetwork& net, const PageRankOptions& options) {
    if (!(options.damping > 0.0 && options.damping < 1.0)) {
        throw InvalidArgument("PageRank damping must lie in (0, 1)");
    }
    if (!(options.tolerance > 0.0)) throw InvalidArgument("PageRank tolerance must be positive");
    const std::size_t n = net.node_count();
    if (n == 0) return make_ranking(Metric::PR, net, {});

    const double inv_n = 1.0 / static_cast<double>(n);
    auto edge_weight = [&](const Edge& e) { return options.weighted ? e.weight : 1.0; };
    std::vector<double> out_total(n, 0.0);
    for (const auto& e : net.edges()) out_total[e.source] += edge_weight(e);

    std::vector<double> rank(n, inv_n), next(n);
    int iteration = 0;
    for (;;) {
        double dangling = 0.0;
        for (NodeId v = 0; v < n; ++v) {
            if (out_total[v] == 0.0) dangling += rank[v];
        }
        const double base = (1.0 - options.damping) * inv_n + options.damping * dangling * inv_n;
        double change = 0.0;
        for (NodeId v = 0; v < n; ++v) {
            double inflow = 0.0;
            for (EdgeId id : net.in_edges(v)) {
                const Edge& e = net.edge(id);
                inflow += rank[e.source] * edge_weight(e) / out_total[e.source];
            }
            next[v] = base + options.damping * inflow;
            change = std::max(change, std::abs(next[v] - rank[v]));
        }
        std::swap(rank, next);
        ++iteration;
        if (change < options.tolerance) break;
        if (iteration >= options.max_iterations) {
            throw IterationLimit("PageRank did not converge within " +
                                     std::to_string(options.max_iterations) + " iterations",
                                 rank, iteration);
        }
    }
    double sum = 0.0;
    for (double r : rank) sum += r;
    for (double& r : rank) r /= sum;
    return make_ranking(Metric::PR, net, std::move(rank));
}

namespace {

bool normalize_l2(std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return false;
    for (double& x : v) x /= norm;
    return true;
}

}  // namespace

HitsResult hits(const SupplyNetwork& net, const HitsOptions& options) {
    const std::size_t n = net.node_count();
    if (net.edge_count() == 0) throw DegenerateNetwork("HITS is undefined on an edgeless network");
    auto edge_weight = [&](const Edge& e) { return options.weighted ? e.weight : 1.0; };

    std::vector<double> hub(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> authority(n, 0.0), next_hub(n), next_auth(n);
    int iteration = 0;
    for (;;) {
        std::fill(next_auth.begin(), next_auth.end(), 0.0);
        for (const auto& e : net.edges()) next_auth[e.target] += edge_weight(e) * hub[e.source];
        if (!normalize_l2(next_auth)) throw DegenerateNetwork("HITS authority iterate vanished");
        std::fill(next_hub.begin(), next_hub.end(), 0.0);
        for (const auto& e : net.edges()) next_hub[e.source] += edge_weight(e) * next_auth[e.target];
        if (!normalize_l2(next_hub)) throw DegenerateNetwork("HITS hub iterate vanished");

        double change = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            change = std::max({change, std::abs(next_auth[v] - authority[v]),
                               std::abs(next_hub[v] - hub[v])});
        }
        std::swap(authority, next_auth);
        std::swap(hub, next_hub);
        ++iteration;
        if (change < options.tolerance) break;
        if (iteration >= options.max_iterations) {
            std::vector<double> last = authority;
            last.insert(last.end(), hub.begin(), hub.end());
            throw IterationLimit("HITS did not converge within " +
                                     std::to_string(options.max_iterations) + " iterations",
                                 std::move(last), iteration);
        }
    }
    HitsResult result{make_ranking(Metric::AU, net, std::move(authority)),
                      make_ranking(Metric::HU, net, std::move(hub)), iteration};
    return result;
}

RankingTable mutual_information(const SupplyNetwork& net) {
    const std::size_t n = net.node_count();
    std::vector<double> s_out(n, 0.0), s_in(n, 0.0);
    for (const auto& e : net.edges()) {
        s_out[e.source] += e.weight;
        s_in[e.target] += e.weight;
    }
    std::vector<double> scores(n, 0.0);
    for (const auto& e : net.edges()) {
        const double info = std::log(s_out[e.source] / e.weight) - std::log(s_in[e.target] / e.weight);
        scores[e.source] += info;
        scores[e.target] -= info;
    }
    return make_ranking(Metric::MI, net, std::move(scores));
}

}  // namespace fsn
