#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fsn/graph.hpp"
#include "fsn/influence.hpp"
#include "fsn/random.hpp"
#include "json.hpp"

namespace fsn {

enum class TargetStrategy {
    Ranked,    // descending influence under `metric`, computed on the intact network
    Random,    // seeded uniform shuffle per replication
    Explicit,  // caller-supplied order
};

/// One shock experiment: who is hit (strategy), how hard (q), and the p sweep.
struct ShockSpec {
    TargetStrategy strategy = TargetStrategy::Ranked;
    Metric metric = Metric::ID;
    std::vector<std::string> explicit_order;  // node codes, for Explicit
    double q = 1.0;
    double p_step = 0.02;
    int replications = 100;
    std::uint64_t seed = 0;
    /// Re-rank the damaged network after every tranche (Ranked only).
    bool adaptive = false;
    MetricOptions metric_options;
    unsigned jobs = 1;

    /// No randomness is involved: q is 0 or 1 and targets are not shuffled.
    bool deterministic() const noexcept;
    /// Throws InvalidArgument for q outside [0, 1], p_step outside (0, 1],
    /// replications < 1, or a single replication of a stochastic run.
    void validate() const;
    /// "ID", "random", "explicit", or "ID-adaptive".
    std::string label() const;
    /// `# metric=... q=... p_step=... seed=... replications=...`
    std::string provenance() const;
};

/// Node ids by descending `metric` score, ties by ascending code. A metric
/// that is undefined on the network (DegenerateNetwork) gives code order.
std::vector<NodeId> rank_targets(const SupplyNetwork& net, Metric metric,
                                 const MetricOptions& options = {});

/// Edge-removal overlay on an immutable network. Nodes are never deleted.
class DamageOverlay {
public:
    explicit DamageOverlay(const SupplyNetwork& net);

    /// Removes ceil(q * k) of the node's k surviving incident edges (in and
    /// out), sampled without replacement. q = 1 draws nothing from `rng`.
    void sever(NodeId node, double q, Rng& rng);

    std::size_t largest_component() const;
    std::size_t surviving_edges() const noexcept { return surviving_; }
    std::span<const std::uint8_t> alive() const noexcept { return alive_; }
    SupplyNetwork materialize() const { return net_->with_edges(alive_); }

private:
    const SupplyNetwork* net_;
    std::vector<std::uint8_t> alive_;
    std::size_t surviving_;
    std::vector<EdgeId> scratch_;
};

/// Number of edges severed at a node with `incident` surviving edges.
std::size_t edges_to_sever(double q, std::size_t incident);

/// Applies one shock of severity q to `targets` in order and returns the
/// damaged copy.
SupplyNetwork apply_shock(const SupplyNetwork& net, std::span<const NodeId> targets, double q,
                          Rng& rng);

/// p values {p_step, 2 p_step, ..., 1}, the last clamped to 1.
std::vector<double> p_grid(double p_step);
/// Cumulative number of targeted nodes at each p of the grid: round(p N).
std::vector<std::size_t> targets_per_step(std::size_t node_count, double p_step);

struct CurvePoint {
    double p = 0.0;
    double s_mean = 0.0;
    double s_std = 0.0;  // population sigma over replications
};

struct RobustnessCurve {
    double q = 0.0;
    std::vector<CurvePoint> points;
    double index_rp = 0.0;  // mean of s_mean over the grid
    int replications = 0;

    /// Comment header then `q,p,S_mean,S_std`.
    void write_csv(std::ostream& out, const std::string& provenance) const;
    nlohmann::json to_json() const;
};

/// Cumulative sweep: step k adds the next tranche of targets to the damage of
/// step k-1. Stochastic runs are replicated with seeds derived from
/// (spec.seed, replication) and averaged; deterministic runs are computed once.
RobustnessCurve robustness_curve(const SupplyNetwork& net, const ShockSpec& spec);

RobustnessCurve random_shock_curve(const SupplyNetwork& net, double q, double p_step,
                                   int replications, std::uint64_t seed, unsigned jobs = 1);

struct RobustnessSurface {
    std::vector<double> p_values;
    std::vector<double> q_values;
    std::vector<RobustnessCurve> rows;  // one per q
    double volume_rpq = 0.0;

    double s(std::size_t q_index, std::size_t p_index) const {
        return rows[q_index].points[p_index].s_mean;
    }
    /// Comment header then `q,p,S_mean`.
    void write_csv(std::ostream& out, const std::string& provenance) const;
    nlohmann::json to_json() const;
};

/// q grid {1/M, 2/M, ..., 1}; each row is exactly robustness_curve at that q.
RobustnessSurface robustness_surface(const SupplyNetwork& net, const ShockSpec& spec, int q_steps);

struct EvolutionPlan {
    std::vector<ShockSpec> strategies;  // q taken from `q_values`
    std::vector<double> q_values;       // R_p per q
    int surface_q_steps = 0;            // > 0 adds R_pq rows
};

struct EvolutionRow {
    int year = 0;
    std::string strategy;
    std::string measure;  // "Rp" or "Rpq"
    double q = 0.0;       // NaN for Rpq
    double value = 0.0;
};

std::vector<EvolutionRow> yearly_evolution(const std::map<int, SupplyNetwork>& networks,
                                           const EvolutionPlan& plan);
/// `year,strategy,measure,q,R`
void write_evolution_csv(std::ostream& out, std::span<const EvolutionRow> rows);

}  // namespace fsn
