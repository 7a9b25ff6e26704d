#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fsn/graph.hpp"
#include "fsn/ranking.hpp"

namespace fsn {

struct LabelPropagationOptions {
    std::uint64_t seed = 0;
    int max_sweeps = 1000;
    /// Count neighbour labels by projected edge weight (w_uv + w_vu) rather
    /// than by neighbour count.
    bool weighted = true;
};

/// Module id per node (NodeId order), dense from 0 in order of first
/// appearance by node code.
struct ModulePartition {
    std::vector<int> assignment;
    std::uint64_t seed = 0;
    int iterations = 0;
    bool converged = false;

    int module_count() const;
    /// `node,module`
    void write_csv(std::ostream& out, const SupplyNetwork& net) const;
};

/// Asynchronous label propagation on the undirected projection. Each sweep
/// visits nodes in a freshly shuffled order; a node keeps its label while it
/// is among the heaviest neighbour labels, otherwise it takes one of them at
/// random. Stops after a sweep without changes or at `max_sweeps`.
ModulePartition label_propagation(const SupplyNetwork& net,
                                  const LabelPropagationOptions& options = {});

/// IM: z-score of each node's edge count (in + out) to its own module,
/// standardized within the module (population sigma). sigma = 0 gives 0.
RankingTable within_module_degree(const SupplyNetwork& net, const ModulePartition& partition);

enum class OutsideDegreeMode {
    /// Standardize outside-module edge counts over the node's own module.
    OwnModule,
    /// Centre on the mean outside-module edge count of nodes outside the
    /// module and scale by the sigma of within-module counts in the module.
    Literal,
};

/// OM: z-score of each node's edge count (in + out) to other modules.
RankingTable outside_module_degree(const SupplyNetwork& net, const ModulePartition& partition,
                                   OutsideDegreeMode mode = OutsideDegreeMode::OwnModule);

}  // namespace fsn
