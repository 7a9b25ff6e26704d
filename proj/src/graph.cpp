#include "fsn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fsn/csv.hpp"
#include "fsn/errors.hpp"

namespace fsn {

std::optional<NodeId> SupplyNetwork::find(std::string_view code) const {
    const std::string key = to_upper(trim(code));
    auto it = std::lower_bound(codes_.begin(), codes_.end(), key);
    if (it == codes_.end() || *it != key) return std::nullopt;
    return static_cast<NodeId>(it - codes_.begin());
}

std::span<const EdgeId> SupplyNetwork::out_edges(NodeId node) const {
    return {out_index_.data() + out_offsets_[node], out_offsets_[node + 1] - out_offsets_[node]};
}

std::span<const EdgeId> SupplyNetwork::in_edges(NodeId node) const {
    return {in_index_.data() + in_offsets_[node], in_offsets_[node + 1] - in_offsets_[node]};
}

double SupplyNetwork::out_strength(NodeId node) const {
    double s = 0.0;
    for (EdgeId e : out_edges(node)) s += edges_[e].weight;
    return s;
}

double SupplyNetwork::in_strength(NodeId node) const {
    double s = 0.0;
    for (EdgeId e : in_edges(node)) s += edges_[e].weight;
    return s;
}

std::optional<EdgeId> SupplyNetwork::find_edge(NodeId source, NodeId target) const {
    auto out = out_edges(source);
    auto it = std::lower_bound(out.begin(), out.end(), target,
                               [&](EdgeId e, NodeId t) { return edges_[e].target < t; });
    if (it == out.end() || edges_[*it].target != target) return std::nullopt;
    return *it;
}

double SupplyNetwork::weight(NodeId source, NodeId target) const {
    auto e = find_edge(source, target);
    return e ? edges_[*e].weight : 0.0;
}

SupplyNetwork SupplyNetwork::with_edges(std::span<const std::uint8_t> keep) const {
    if (keep.size() != edges_.size()) throw InvalidArgument("edge mask size mismatch");
    SupplyNetwork out;
    out.year_ = year_;
    out.codes_ = codes_;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (keep[e]) out.edges_.push_back(edges_[e]);
    }
    out.index();
    return out;
}

SupplyNetwork SupplyNetwork::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw InvalidArgument("scale factor must be > 0");
    SupplyNetwork out = *this;
    for (auto& e : out.edges_) e.weight *= factor;
    return out;
}

void SupplyNetwork::index() {
    const std::size_t n = codes_.size();
    out_offsets_.assign(n + 1, 0);
    in_offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
        ++out_offsets_[e.source + 1];
        ++in_offsets_[e.target + 1];
    }
    std::partial_sum(out_offsets_.begin(), out_offsets_.end(), out_offsets_.begin());
    std::partial_sum(in_offsets_.begin(), in_offsets_.end(), in_offsets_.begin());
    out_index_.resize(edges_.size());
    in_index_.resize(edges_.size());
    std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
    std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
    // Edges are sorted by (source, target), so each bucket fills in ascending id order.
    for (std::size_t id = 0; id < edges_.size(); ++id) {
        out_index_[out_fill[edges_[id].source]++] = static_cast<EdgeId>(id);
        in_index_[in_fill[edges_[id].target]++] = static_cast<EdgeId>(id);
    }
}

NetworkBuilder& NetworkBuilder::add_node(std::string_view code) {
    std::string key = to_upper(trim(code));
    if (!key.empty()) nodes_.try_emplace(std::move(key), 0);
    return *this;
}

NetworkBuilder& NetworkBuilder::add_flow(std::string_view source, std::string_view target,
                                         double weight) {
    if (!(weight > 0.0) || !std::isfinite(weight)) return *this;
    std::string s = to_upper(trim(source));
    std::string t = to_upper(trim(target));
    if (s.empty() || t.empty() || s == t) return *this;
    flows_[{std::move(s), std::move(t)}] += weight;
    return *this;
}

SupplyNetwork NetworkBuilder::build() const {
    SupplyNetwork net;
    net.year_ = year_;

    std::vector<std::string> codes;
    codes.reserve(nodes_.size() + flows_.size());
    for (const auto& [code, unused] : nodes_) codes.push_back(code);
    for (const auto& [pair, w] : flows_) {
        codes.push_back(pair.first);
        codes.push_back(pair.second);
    }
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    net.codes_ = std::move(codes);

    auto id_of = [&](const std::string& code) {
        return static_cast<NodeId>(
            std::lower_bound(net.codes_.begin(), net.codes_.end(), code) - net.codes_.begin());
    };
    net.edges_.reserve(flows_.size());
    // std::map iteration is already (source, target) lexicographic == id order.
    for (const auto& [pair, w] : flows_) {
        net.edges_.push_back({id_of(pair.first), id_of(pair.second), w});
    }
    net.index();
    return net;
}

SupplyNetwork build_network(std::span<const TradeFlow> flows, int year) {
    NetworkBuilder builder(year);
    for (const auto& f : flows) {
        if (f.year == year) builder.add_flow(f.exporter, f.importer, f.kilocalories);
    }
    return builder.build();
}

double density(const SupplyNetwork& net) {
    const auto n = static_cast<double>(net.node_count());
    if (net.node_count() < 2) return 0.0;
    return static_cast<double>(net.edge_count()) / (n * (n - 1.0));
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

std::size_t DisjointSets::unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return size_[a];
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return size_[a];
}

ComponentReport components(const SupplyNetwork& net) {
    ComponentReport report;
    const std::size_t n = net.node_count();
    if (n == 0) return report;
    DisjointSets sets(n);
    for (const auto& e : net.edges()) sets.unite(e.source, e.target);
    for (std::size_t v = 0; v < n; ++v) {
        if (sets.find(v) == v) report.sizes.push_back(sets.size_of(v));
    }
    std::sort(report.sizes.begin(), report.sizes.end(), std::greater<>());
    report.lcc_fraction = static_cast<double>(report.sizes.front()) / static_cast<double>(n);
    return report;
}

std::size_t largest_component_size(const SupplyNetwork& net, std::span<const std::uint8_t> alive) {
    const std::size_t n = net.node_count();
    if (n == 0) return 0;
    if (alive.size() != net.edge_count()) throw InvalidArgument("edge mask size mismatch");
    DisjointSets sets(n);
    std::size_t largest = 1;
    const auto edges = net.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (alive[e]) largest = std::max(largest, sets.unite(edges[e].source, edges[e].target));
    }
    return largest;
}

double largest_connected_fraction(const SupplyNetwork& net, std::size_t original_n) {
    if (original_n == 0) throw InvalidArgument("original node count must be at least 1");
    if (original_n < net.node_count()) {
        throw InvalidArgument("original node count is smaller than the network's node count");
    }
    if (net.empty()) return 0.0;
    const auto report = components(net);
    return static_cast<double>(report.sizes.front()) / static_cast<double>(original_n);
}

}  // namespace fsn
