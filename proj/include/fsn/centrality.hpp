#pragma once

#include <vector>

#include "fsn/graph.hpp"
#include "fsn/ranking.hpp"

namespace fsn {

enum class Direction { In, Out };

/// k_in / (N - 1) or k_out / (N - 1). Throws DegenerateNetwork when N < 2.
RankingTable degree_centrality(const SupplyNetwork& net, Direction direction);

/// Directed edges among the union of in- and out-neighbours, over k (k - 1).
/// Nodes with fewer than two neighbours score 0.
RankingTable clustering_coefficient(const SupplyNetwork& net);

/// Raw betweenness on directed hop-count geodesics: the sum over ordered
/// pairs (s, t) of the share of s -> t geodesics through the node. Geodesic
/// counts come from one BFS per source; each node's pair terms are added in a
/// fixed (s, t) order, so the result does not depend on `jobs`. Uses O(N^2)
/// memory.
RankingTable betweenness(const SupplyNetwork& net, unsigned jobs = 1);

/// Betweenness divided by (N - 1)(N - 2); zeros when N < 3.
std::vector<double> normalized_betweenness(const RankingTable& raw);

/// Inbound (In) or outbound (Out) closeness:
///   (D / (N - 1)) * (D / sum of hop distances),
/// with D the number of nodes that reach (are reached by) the node. D = 0
/// scores 0.
RankingTable closeness(const SupplyNetwork& net, Direction direction);

struct PageRankOptions {
    double damping = 0.85;
    double tolerance = 1e-10;
    int max_iterations = 10000;
    bool weighted = true;
};

/// Power iteration. Out-links are followed with probability proportional to
/// weight (or uniformly when unweighted); dangling nodes spread their mass
/// over all nodes. Converged when the largest per-node change drops below the
/// tolerance. Throws IterationLimit carrying the last iterate.
RankingTable pagerank(const SupplyNetwork& net, const PageRankOptions& options = {});

struct HitsOptions {
    double tolerance = 1e-12;
    int max_iterations = 100000;
    bool weighted = false;
};

struct HitsResult {
    RankingTable authority;
    RankingTable hub;
    int iterations = 0;
};

/// Kleinberg's mutual recursion, starting from uniform hub scores:
/// authority = normalize(A^T hub), hub = normalize(A authority), L2 norms.
/// Throws DegenerateNetwork for an edgeless network and IterationLimit (with
/// the authority iterate followed by the hub iterate) on non-convergence.
HitsResult hits(const SupplyNetwork& net, const HitsOptions& options = {});

/// Directed weighted mutual information: for each edge i -> j
///   I_ij = ln(s_out_i / w_ij) - ln(s_in_j / w_ij),
/// and MI_i = sum of I over out-edges minus sum of I over in-edges.
RankingTable mutual_information(const SupplyNetwork& net);

}  // namespace fsn
