#include "fsn/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "fsn/csv.hpp"
#include "fsn/errors.hpp"

namespace fsn {

std::string_view metric_name(Metric metric) noexcept {
    switch (metric) {
        case Metric::ID: return "ID";
        case Metric::OD: return "OD";
        case Metric::CC: return "CC";
        case Metric::BC: return "BC";
        case Metric::IC: return "IC";
        case Metric::OC: return "OC";
        case Metric::PR: return "PR";
        case Metric::HU: return "HU";
        case Metric::AU: return "AU";
        case Metric::IM: return "IM";
        case Metric::OM: return "OM";
        case Metric::MI: return "MI";
    }
    return "?";
}

std::optional<Metric> parse_metric(std::string_view name) {
    const std::string key = to_upper(trim(name));
    for (Metric m : kAllMetrics) {
        if (metric_name(m) == key) return m;
    }
    return std::nullopt;
}

std::string metric_list() {
    std::string out;
    for (Metric m : kAllMetrics) {
        if (!out.empty()) out += ", ";
        out += metric_name(m);
    }
    return out;
}

std::vector<NodeId> rank_order(std::span<const double> scores) {
    double scale = 0.0;
    for (double s : scores) {
        if (std::isfinite(s)) scale = std::max(scale, std::abs(s));
    }
    // Quantize so that round-off noise between structurally equal nodes cannot
    // override the code-order tie break.
    std::vector<long long> key(scores.size(), 0);
    if (scale > 0.0) {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            key[i] = std::isfinite(scores[i]) ? std::llround(scores[i] / scale * 1e12) : 0;
        }
    }
    std::vector<NodeId> order(scores.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return key[a] > key[b]; });
    return order;
}

RankingTable make_ranking(Metric metric, const SupplyNetwork& net, std::vector<double> scores) {
    if (scores.size() != net.node_count()) throw InvalidArgument("score vector size mismatch");
    RankingTable table;
    table.metric = metric;
    table.nodes.assign(net.codes().begin(), net.codes().end());
    table.ranks.assign(scores.size(), 0);
    const auto order = rank_order(scores);
    for (std::size_t r = 0; r < order.size(); ++r) table.ranks[order[r]] = static_cast<int>(r + 1);
    table.scores = std::move(scores);
    return table;
}

std::vector<NodeId> RankingTable::order() const {
    std::vector<NodeId> out(ranks.size());
    for (std::size_t v = 0; v < ranks.size(); ++v) out[ranks[v] - 1] = static_cast<NodeId>(v);
    return out;
}

double RankingTable::score_of(std::string_view code) const {
    auto it = std::find(nodes.begin(), nodes.end(), to_upper(code));
    if (it == nodes.end()) throw InvalidArgument("unknown node " + std::string(code));
    return scores[static_cast<std::size_t>(it - nodes.begin())];
}

int RankingTable::rank_of(std::string_view code) const {
    auto it = std::find(nodes.begin(), nodes.end(), to_upper(code));
    if (it == nodes.end()) throw InvalidArgument("unknown node " + std::string(code));
    return ranks[static_cast<std::size_t>(it - nodes.begin())];
}

void RankingTable::write_csv(std::ostream& out) const {
    out << "node,score,rank\n";
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        out << csv_field(nodes[v]) << ',' << format_number(scores[v]) << ',' << ranks[v] << '\n';
    }
}

nlohmann::json RankingTable::to_json() const {
    nlohmann::json j;
    j["metric"] = std::string(metric_name(metric));
    j["nodes"] = nlohmann::json::array();
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        j["nodes"].push_back({{"node", nodes[v]}, {"score", scores[v]}, {"rank", ranks[v]}});
    }
    return j;
}

}  // namespace fsn
