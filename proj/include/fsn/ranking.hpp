#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsn/graph.hpp"
#include "json.hpp"

namespace fsn {

/// Influence metrics. IM and OM come from the module partition; the rest are
/// structural centralities.
enum class Metric { ID, OD, CC, BC, IC, OC, PR, HU, AU, IM, OM, MI };

inline constexpr std::array<Metric, 12> kAllMetrics = {
    Metric::ID, Metric::OD, Metric::CC, Metric::BC, Metric::IC, Metric::OC,
    Metric::PR, Metric::HU, Metric::AU, Metric::IM, Metric::OM, Metric::MI};

std::string_view metric_name(Metric metric) noexcept;
/// Case-insensitive: "id", "PR", ...
std::optional<Metric> parse_metric(std::string_view name);
std::string metric_list();

/// Per-node score and rank for one metric, indexed by NodeId. Rank 1 is the
/// most influential. Ties (scores equal to 12 significant digits relative to
/// the largest magnitude) are broken by ascending code.
struct RankingTable {
    Metric metric = Metric::ID;
    std::vector<std::string> nodes;
    std::vector<double> scores;
    std::vector<int> ranks;

    std::size_t size() const noexcept { return nodes.size(); }
    /// Node ids ordered by rank (rank 1 first).
    std::vector<NodeId> order() const;
    double score_of(std::string_view code) const;
    int rank_of(std::string_view code) const;

    /// `node,score,rank` in node order.
    void write_csv(std::ostream& out) const;
    nlohmann::json to_json() const;
};

RankingTable make_ranking(Metric metric, const SupplyNetwork& net, std::vector<double> scores);

/// Descending score with the tie rule above. Exposed for shock targeting.
std::vector<NodeId> rank_order(std::span<const double> scores);

}  // namespace fsn
