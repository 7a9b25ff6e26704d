#include "fsn/community.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "fsn/csv.hpp"
#include "fsn/errors.hpp"
#include "fsn/random.hpp"

namespace fsn {

int ModulePartition::module_count() const {
    if (assignment.empty()) return 0;
    return *std::max_element(assignment.begin(), assignment.end()) + 1;
}

void ModulePartition::write_csv(std::ostream& out, const SupplyNetwork& net) const {
    out << "node,module\n";
    for (NodeId v = 0; v < assignment.size(); ++v) {
        out << csv_field(net.code(v)) << ',' << assignment[v] << '\n';
    }
}

namespace {

struct Neighbour {
    NodeId node;
    double weight;
};

std::vector<std::vector<Neighbour>> undirected_projection(const SupplyNetwork& net, bool weighted) {
    std::vector<std::map<NodeId, double>> acc(net.node_count());
    for (const auto& e : net.edges()) {
        const double w = weighted ? e.weight : 1.0;
        acc[e.source][e.target] += w;
        acc[e.target][e.source] += w;
    }
    std::vector<std::vector<Neighbour>> out(net.node_count());
    for (std::size_t v = 0; v < acc.size(); ++v) {
        out[v].reserve(acc[v].size());
        for (const auto& [u, w] : acc[v]) out[v].push_back({u, weighted ? w : 1.0});
    }
    return out;
}

}  // namespace

ModulePartition label_propagation(const SupplyNetwork& net, const LabelPropagationOptions& options) {
    const std::size_t n = net.node_count();
    ModulePartition result;
    result.seed = options.seed;
    if (n == 0) {
        result.converged = true;
        return result;
    }
    const auto adjacency = undirected_projection(net, options.weighted);

    std::vector<int> label(n);
    std::iota(label.begin(), label.end(), 0);
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    std::vector<double> tally(n, 0.0);
    std::vector<int> seen, best;
    Rng rng(derive_seed(options.seed, 0));

    for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
        rng.shuffle(std::span<NodeId>(order));
        bool changed = false;
        for (NodeId v : order) {
            if (adjacency[v].empty()) continue;
            seen.clear();
            for (const auto& nb : adjacency[v]) {
                const int l = label[nb.node];
                if (tally[l] == 0.0) seen.push_back(l);
                tally[l] += nb.weight;
            }
            double top = 0.0;
            for (int l : seen) top = std::max(top, tally[l]);
            best.clear();
            for (int l : seen) {
                if (tally[l] == top) best.push_back(l);
            }
            for (int l : seen) tally[l] = 0.0;

            if (std::find(best.begin(), best.end(), label[v]) != best.end()) continue;
            label[v] = best.size() == 1 ? best.front() : best[rng.below(best.size())];
            changed = true;
        }
        result.iterations = sweep + 1;
        if (!changed) {
            result.converged = true;
            break;
        }
    }

    std::vector<int> dense(n, -1);
    int next_id = 0;
    result.assignment.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        int& id = dense[static_cast<std::size_t>(label[v])];
        if (id < 0) id = next_id++;
        result.assignment[v] = id;
    }
    return result;
}

namespace {

struct ModuleDegrees {
    std::vector<double> inside;
    std::vector<double> outside;
};

ModuleDegrees module_degrees(const SupplyNetwork& net, const ModulePartition& partition) {
    if (partition.assignment.size() != net.node_count()) {
        throw InvalidArgument("partition does not match the network");
    }
    ModuleDegrees d{std::vector<double>(net.node_count(), 0.0),
                    std::vector<double>(net.node_count(), 0.0)};
    const auto& m = partition.assignment;
    for (const auto& e : net.edges()) {
        auto& bucket = m[e.source] == m[e.target] ? d.inside : d.outside;
        bucket[e.source] += 1.0;
        bucket[e.target] += 1.0;
    }
    return d;
}

struct Moments {
    double mean = 0.0;
    double sigma = 0.0;
};

// Population moments of `values` per module.
std::vector<Moments> module_moments(const std::vector<double>& values,
                                    const std::vector<int>& assignment, int modules) {
    std::vector<Moments> out(static_cast<std::size_t>(modules));
    std::vector<double> count(static_cast<std::size_t>(modules), 0.0);
    for (std::size_t v = 0; v < values.size(); ++v) {
        out[assignment[v]].mean += values[v];
        count[assignment[v]] += 1.0;
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k].mean /= count[k];
    for (std::size_t v = 0; v < values.size(); ++v) {
        const double d = values[v] - out[assignment[v]].mean;
        out[assignment[v]].sigma += d * d;
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k].sigma = std::sqrt(out[k].sigma / count[k]);
    return out;
}

bool vanishing(double sigma) { return sigma < 1e-12; }

}  // namespace

RankingTable within_module_degree(const SupplyNetwork& net, const ModulePartition& partition) {
    const auto degrees = module_degrees(net, partition);
    const auto& m = partition.assignment;
    const auto moments = module_moments(degrees.inside, m, partition.module_count());
    std::vector<double> scores(net.node_count(), 0.0);
    for (std::size_t v = 0; v < scores.size(); ++v) {
        const auto& mo = moments[m[v]];
        if (!vanishing(mo.sigma)) scores[v] = (degrees.inside[v] - mo.mean) / mo.sigma;
    }
    return make_ranking(Metric::IM, net, std::move(scores));
}

RankingTable outside_module_degree(const SupplyNetwork& net, const ModulePartition& partition,
                                   OutsideDegreeMode mode) {
    const auto degrees = module_degrees(net, partition);
    const auto& m = partition.assignment;
    const int modules = partition.module_count();
    std::vector<double> scores(net.node_count(), 0.0);

    if (mode == OutsideDegreeMode::OwnModule) {
        const auto moments = module_moments(degrees.outside, m, modules);
        for (std::size_t v = 0; v < scores.size(); ++v) {
            const auto& mo = moments[m[v]];
            if (!vanishing(mo.sigma)) scores[v] = (degrees.outside[v] - mo.mean) / mo.sigma;
        }
    } else {
        const auto inside = module_moments(degrees.inside, m, modules);
        std::vector<double> module_sum(static_cast<std::size_t>(modules), 0.0);
        std::vector<double> module_count(static_cast<std::size_t>(modules), 0.0);
        double total = 0.0;
        for (std::size_t v = 0; v < scores.size(); ++v) {
            module_sum[m[v]] += degrees.outside[v];
            module_count[m[v]] += 1.0;
            total += degrees.outside[v];
        }
        const auto n = static_cast<double>(scores.size());
        for (std::size_t v = 0; v < scores.size(); ++v) {
            const double others = n - module_count[m[v]];
            const double mean_outside = others > 0.0 ? (total - module_sum[m[v]]) / others : 0.0;
            const double sigma = inside[m[v]].sigma;
            if (!vanishing(sigma)) scores[v] = (degrees.outside[v] - mean_outside) / sigma;
        }
    }
    return make_ranking(Metric::OM, net, std::move(scores));
}

}  // namespace fsn
