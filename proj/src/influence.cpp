#include "fsn/influence.hpp"

namespace fsn {

RankingTable compute_ranking(const SupplyNetwork& net, Metric metric, const MetricOptions& options) {
    switch (metric) {
        case Metric::ID: return degree_centrality(net, Direction::In);
        case Metric::OD: return degree_centrality(net, Direction::Out);
        case Metric::CC: return clustering_coefficient(net);
        case Metric::BC: return betweenness(net, options.jobs);
        case Metric::IC: return closeness(net, Direction::In);
        case Metric::OC: return closeness(net, Direction::Out);
        case Metric::PR: return pagerank(net, options.pagerank);
        case Metric::HU: return hits(net, options.hits).hub;
        case Metric::AU: return hits(net, options.hits).authority;
        case Metric::IM:
            return within_module_degree(net, label_propagation(net, options.label_propagation));
        case Metric::OM:
            return outside_module_degree(net, label_propagation(net, options.label_propagation),
                                         options.outside_mode);
        case Metric::MI: return mutual_information(net);
    }
    return mutual_information(net);
}

std::vector<RankingTable> compute_all_rankings(const SupplyNetwork& net,
                                               const MetricOptions& options) {
    const auto spectral = hits(net, options.hits);
    const auto partition = label_propagation(net, options.label_propagation);
    std::vector<RankingTable> out;
    out.reserve(kAllMetrics.size());
    for (Metric m : kAllMetrics) {
        switch (m) {
            case Metric::HU: out.push_back(spectral.hub); break;
            case Metric::AU: out.push_back(spectral.authority); break;
            case Metric::IM: out.push_back(within_module_degree(net, partition)); break;
            case Metric::OM:
                out.push_back(outside_module_degree(net, partition, options.outside_mode));
                break;
            default: out.push_back(compute_ranking(net, m, options)); break;
        }
    }
    return out;
}

}  // namespace fsn
