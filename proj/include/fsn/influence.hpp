#pragma once

#include <vector>

#include "fsn/centrality.hpp"
#include "fsn/community.hpp"
#include "fsn/ranking.hpp"

namespace fsn {

/// Settings for every metric, in one place so the CLI config and the shock
/// module share them.
struct MetricOptions {
    PageRankOptions pagerank;
    HitsOptions hits;
    LabelPropagationOptions label_propagation;
    OutsideDegreeMode outside_mode = OutsideDegreeMode::OwnModule;
    unsigned jobs = 1;
};

RankingTable compute_ranking(const SupplyNetwork& net, Metric metric,
                             const MetricOptions& options = {});

/// All twelve tables in `kAllMetrics` order. HITS and the partition are
/// computed once.
std::vector<RankingTable> compute_all_rankings(const SupplyNetwork& net,
                                               const MetricOptions& options = {});

}  // namespace fsn
