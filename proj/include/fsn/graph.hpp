#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsn/trade_flow.hpp"

namespace fsn {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct Edge {
    NodeId source;
    NodeId target;
    double weight;
};

/// Directed weighted graph of economies for one year. Nodes are uppercase ISO3
/// codes kept in ascending order, so NodeId order is code order. Edges are
/// sorted by (source, target); there are no self-loops, no parallel edges and
/// every weight is strictly positive. Immutable once built.
class SupplyNetwork {
public:
    SupplyNetwork() = default;

    int year() const noexcept { return year_; }
    std::size_t node_count() const noexcept { return codes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return codes_.empty(); }

    std::span<const std::string> codes() const noexcept { return codes_; }
    const std::string& code(NodeId node) const { return codes_.at(node); }
    std::optional<NodeId> find(std::string_view code) const;

    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(EdgeId id) const { return edges_[id]; }

    /// Edge ids leaving / entering `node`, in ascending edge-id order.
    std::span<const EdgeId> out_edges(NodeId node) const;
    std::span<const EdgeId> in_edges(NodeId node) const;

    std::size_t out_degree(NodeId node) const { return out_edges(node).size(); }
    std::size_t in_degree(NodeId node) const { return in_edges(node).size(); }
    double out_strength(NodeId node) const;
    double in_strength(NodeId node) const;

    std::optional<EdgeId> find_edge(NodeId source, NodeId target) const;
    /// Weight of source -> target, 0 when absent.
    double weight(NodeId source, NodeId target) const;

    /// Copy keeping every node but only the edges whose `keep` flag is set.
    SupplyNetwork with_edges(std::span<const std::uint8_t> keep) const;

    /// Copy with every weight multiplied by `factor` (> 0).
    SupplyNetwork scaled(double factor) const;

private:
    friend class NetworkBuilder;

    int year_ = 0;
    std::vector<std::string> codes_;
    std::vector<Edge> edges_;
    std::vector<std::size_t> out_offsets_;
    std::vector<EdgeId> out_index_;
    std::vector<std::size_t> in_offsets_;
    std::vector<EdgeId> in_index_;

    void index();
};

/// Accumulates flows into a SupplyNetwork. Codes are trimmed and uppercased;
/// parallel flows are summed; self-loops and non-positive (or non-finite)
/// amounts are dropped.
class NetworkBuilder {
public:
    explicit NetworkBuilder(int year = 0) : year_(year) {}

    /// Registers a node that may have no edges.
    NetworkBuilder& add_node(std::string_view code);
    NetworkBuilder& add_flow(std::string_view source, std::string_view target, double weight);

    SupplyNetwork build() const;

private:
    int year_;
    std::map<std::string, std::size_t, std::less<>> nodes_;
    std::map<std::pair<std::string, std::string>, double> flows_;
};

/// Builds the network of all flows dated `year`, summing flows per ordered pair.
SupplyNetwork build_network(std::span<const TradeFlow> flows, int year);

/// N_E / (N (N - 1)); 0 when N < 2.
double density(const SupplyNetwork& net);

struct ComponentReport {
    std::vector<std::size_t> sizes;  // descending
    double lcc_fraction = 0.0;       // largest size / node count; 0 for an empty network
};

/// Weakly connected components (edge direction ignored).
ComponentReport components(const SupplyNetwork& net);

/// Size of the largest weakly connected component using only edges whose
/// `alive` flag is set. Every node counts, isolated or not.
std::size_t largest_component_size(const SupplyNetwork& net, std::span<const std::uint8_t> alive);

/// Largest weakly connected component size divided by `original_n`.
/// Throws InvalidArgument when original_n is 0 or smaller than the node count.
double largest_connected_fraction(const SupplyNetwork& net, std::size_t original_n);

/// Union-find with path halving and union by size.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n);
    std::size_t find(std::size_t x);
    /// Returns the size of the merged set.
    std::size_t unite(std::size_t a, std::size_t b);
    std::size_t size_of(std::size_t x) { return size_[find(x)]; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

}  // namespace fsn
