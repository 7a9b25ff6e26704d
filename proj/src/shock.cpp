#include "fsn/shock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fsn/csv.hpp"
#include "fsn/errors.hpp"
#include "fsn/parallel.hpp"

namespace fsn {

bool ShockSpec::deterministic() const noexcept {
    return strategy != TargetStrategy::Random && (q == 0.0 || q == 1.0);
}

void ShockSpec::validate() const {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in [0, 1]");
    if (!(p_step > 0.0 && p_step <= 1.0)) throw InvalidArgument("p_step must lie in (0, 1]");
    if (replications < 1) throw InvalidArgument("replications must be positive");
    if (replications == 1 && !deterministic()) {
        throw InvalidArgument(
            "a single replication is only allowed for deterministic shocks (ranked, q in {0, 1})");
    }
    if (adaptive && strategy != TargetStrategy::Ranked) {
        throw InvalidArgument("adaptive re-ranking requires the ranked strategy");
    }
}

std::string ShockSpec::label() const {
    switch (strategy) {
        case TargetStrategy::Random: return "random";
        case TargetStrategy::Explicit: return "explicit";
        case TargetStrategy::Ranked: break;
    }
    std::string out(metric_name(metric));
    if (adaptive) out += "-adaptive";
    return out;
}

std::string ShockSpec::provenance() const {
    std::ostringstream os;
    os << "# metric=" << label() << " q=" << format_number(q) << " p_step=" << format_number(p_step)
       << " seed=" << seed << " replications=" << replications;
    return os.str();
}

std::vector<NodeId> rank_targets(const SupplyNetwork& net, Metric metric,
                                 const MetricOptions& options) {
    try {
        return compute_ranking(net, metric, options).order();
    } catch (const DegenerateNetwork&) {
        // Metric undefined (edgeless, or a single node): every score ties.
        std::vector<NodeId> order(net.node_count());
        std::iota(order.begin(), order.end(), NodeId{0});
        return order;
    }
}

DamageOverlay::DamageOverlay(const SupplyNetwork& net)
    : net_(&net), alive_(net.edge_count(), 1), surviving_(net.edge_count()) {}

std::size_t edges_to_sever(double q, std::size_t incident) {
    if (incident == 0 || q <= 0.0) return 0;
    if (q >= 1.0) return incident;
    const double exact = q * static_cast<double>(incident);
    // Shave representation error so that e.g. 0.3 * 10 severs 3, not 4.
    const auto k = static_cast<std::size_t>(std::ceil(exact * (1.0 - 1e-12)));
    return std::clamp<std::size_t>(k, 1, incident);
}

void DamageOverlay::sever(NodeId node, double q, Rng& rng) {
    scratch_.clear();
    for (EdgeId e : net_->out_edges(node)) {
        if (alive_[e]) scratch_.push_back(e);
    }
    for (EdgeId e : net_->in_edges(node)) {
        if (alive_[e]) scratch_.push_back(e);
    }
    const std::size_t k = edges_to_sever(q, scratch_.size());
    if (k == 0) return;
    if (k < scratch_.size()) {
        std::sort(scratch_.begin(), scratch_.end());
        // Partial Fisher-Yates: the first k slots become the sample.
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(scratch_.size() - i));
            std::swap(scratch_[i], scratch_[j]);
        }
    }
    for (std::size_t i = 0; i < k; ++i) alive_[scratch_[i]] = 0;
    surviving_ -= k;
}

std::size_t DamageOverlay::largest_component() const {
    return largest_component_size(*net_, alive_);
}

SupplyNetwork apply_shock(const SupplyNetwork& net, std::span<const NodeId> targets, double q,
                          Rng& rng) {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in [0, 1]");
    DamageOverlay overlay(net);
    for (NodeId v : targets) {
        if (v >= net.node_count()) throw InvalidArgument("target node out of range");
        overlay.sever(v, q, rng);
    }
    return overlay.materialize();
}

std::vector<double> p_grid(double p_step) {
    if (!(p_step > 0.0 && p_step <= 1.0)) throw InvalidArgument("p_step must lie in (0, 1]");
    const auto steps = static_cast<std::size_t>(std::ceil(1.0 / p_step - 1e-9));
    // Steps with at most nine decimals are built as integer / 1e9 so the grid
    // prints as 0.3 rather than 0.30000000000000004.
    const double nanos = std::round(p_step * 1e9);
    const bool decimal = std::abs(nanos / 1e9 - p_step) <= 1e-15;
    std::vector<double> grid(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const double kk = static_cast<double>(k + 1);
        grid[k] = std::min(1.0, decimal ? kk * nanos / 1e9 : kk * p_step);
    }
    grid.back() = 1.0;
    return grid;
}

std::vector<std::size_t> targets_per_step(std::size_t node_count, double p_step) {
    const auto grid = p_grid(p_step);
    std::vector<std::size_t> counts(grid.size());
    std::size_t previous = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        auto c = static_cast<std::size_t>(std::llround(grid[k] * static_cast<double>(node_count)));
        c = std::clamp(c, previous, node_count);
        counts[k] = previous = c;
    }
    counts.back() = node_count;
    return counts;
}

namespace {

std::vector<NodeId> explicit_targets(const SupplyNetwork& net, const std::vector<std::string>& codes) {
    std::vector<NodeId> order;
    std::vector<std::uint8_t> used(net.node_count(), 0);
    for (const auto& c : codes) {
        auto id = net.find(c);
        if (!id) throw InvalidArgument("explicit target '" + c + "' is not in the network");
        if (used[*id]) throw InvalidArgument("explicit target '" + c + "' listed twice");
        used[*id] = 1;
        order.push_back(*id);
    }
    for (NodeId v = 0; v < net.node_count(); ++v) {
        if (!used[v]) order.push_back(v);
    }
    return order;
}

// Next `count` untargeted nodes by influence on the damaged network.
void extend_adaptive(const ShockSpec& spec, const DamageOverlay& overlay,
                     std::vector<std::uint8_t>& hit, std::vector<NodeId>& order, std::size_t count) {
    const auto ranked = rank_targets(overlay.materialize(), spec.metric, spec.metric_options);
    for (NodeId v : ranked) {
        if (order.size() >= count) break;
        if (!hit[v]) {
            hit[v] = 1;
            order.push_back(v);
        }
    }
}

std::vector<std::size_t> run_sweep(const SupplyNetwork& net, const ShockSpec& spec, double q,
                              std::span<const NodeId> fixed_order,
                              std::span<const std::size_t> steps, std::size_t replication) {
    const std::size_t n = net.node_count();
    Rng rng(derive_seed(spec.seed, replication));
    std::vector<NodeId> order;
    std::vector<std::uint8_t> hit;
    if (spec.strategy == TargetStrategy::Random) {
        order.resize(n);
        std::iota(order.begin(), order.end(), NodeId{0});
        rng.shuffle(std::span<NodeId>(order));
    } else if (spec.adaptive) {
        hit.assign(n, 0);
    } else {
        order.assign(fixed_order.begin(), fixed_order.end());
    }

    DamageOverlay overlay(net);
    std::vector<std::size_t> lcc(steps.size());
    std::size_t done = 0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (spec.adaptive && steps[k] > done) extend_adaptive(spec, overlay, hit, order, steps[k]);
        for (; done < steps[k]; ++done) overlay.sever(order[done], q, rng);
        lcc[k] = overlay.largest_component();
    }
    return lcc;
}

// Means are integer LCC sums divided once, so equal runs average exactly.
RobustnessCurve summarize(double q, std::span<const double> grid, std::size_t node_count,
                          const std::vector<std::vector<std::size_t>>& runs, int replications,
                          std::uint64_t& lcc_total) {
    RobustnessCurve curve;
    curve.q = q;
    curve.replications = replications;
    curve.points.resize(grid.size());
    const std::uint64_t count = runs.size();
    const double scale = static_cast<double>(count) * static_cast<double>(node_count);
    lcc_total = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        std::uint64_t sum = 0, squares = 0;
        for (const auto& r : runs) {
            sum += r[k];
            squares += static_cast<std::uint64_t>(r[k]) * r[k];
        }
        const double spread = static_cast<double>(count * squares - sum * sum);
        curve.points[k] = {grid[k], static_cast<double>(sum) / scale, std::sqrt(spread) / scale};
        lcc_total += sum;
    }
    curve.index_rp = static_cast<double>(lcc_total) / (scale * static_cast<double>(grid.size()));
    return curve;
}

struct SweepPlan {
    std::vector<double> grid;
    std::vector<std::size_t> steps;
    std::vector<NodeId> fixed_order;
};

SweepPlan plan_sweep(const SupplyNetwork& net, const ShockSpec& spec) {
    if (net.empty()) throw InvalidArgument("cannot shock an empty network");
    SweepPlan plan{p_grid(spec.p_step), targets_per_step(net.node_count(), spec.p_step), {}};
    if (spec.strategy == TargetStrategy::Ranked && !spec.adaptive) {
        plan.fixed_order = rank_targets(net, spec.metric, spec.metric_options);
    } else if (spec.strategy == TargetStrategy::Explicit) {
        plan.fixed_order = explicit_targets(net, spec.explicit_order);
    }
    return plan;
}

std::size_t runs_needed(const ShockSpec& spec, double q) {
    ShockSpec at_q = spec;
    at_q.q = q;
    return at_q.deterministic() ? 1 : static_cast<std::size_t>(spec.replications);
}

}  // namespace

RobustnessCurve robustness_curve(const SupplyNetwork& net, const ShockSpec& spec) {
    spec.validate();
    const auto plan = plan_sweep(net, spec);
    const std::size_t runs = runs_needed(spec, spec.q);
    std::vector<std::vector<std::size_t>> results(runs);
    parallel_for(runs, spec.jobs, [&](std::size_t r) {
        results[r] = run_sweep(net, spec, spec.q, plan.fixed_order, plan.steps, r);
    });
    std::uint64_t total = 0;
    return summarize(spec.q, plan.grid, net.node_count(), results, spec.replications, total);
}

RobustnessCurve random_shock_curve(const SupplyNetwork& net, double q, double p_step,
                                   int replications, std::uint64_t seed, unsigned jobs) {
    ShockSpec spec;
    spec.strategy = TargetStrategy::Random;
    spec.q = q;
    spec.p_step = p_step;
    spec.replications = replications;
    spec.seed = seed;
    spec.jobs = jobs;
    return robustness_curve(net, spec);
}

RobustnessSurface robustness_surface(const SupplyNetwork& net, const ShockSpec& spec, int q_steps) {
    if (q_steps < 1) throw InvalidArgument("q_steps must be at least 1");
    std::vector<double> q_values(static_cast<std::size_t>(q_steps));
    for (int m = 1; m <= q_steps; ++m) {
        q_values[static_cast<std::size_t>(m - 1)] = static_cast<double>(m) / q_steps;
    }
    for (double q : q_values) {
        ShockSpec at_q = spec;
        at_q.q = q;
        at_q.validate();
    }
    const auto plan = plan_sweep(net, spec);

    // Flatten (q, replication) so one pool serves the whole grid.
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    std::vector<std::vector<std::vector<std::size_t>>> results(q_values.size());
    for (std::size_t qi = 0; qi < q_values.size(); ++qi) {
        const std::size_t runs = runs_needed(spec, q_values[qi]);
        results[qi].resize(runs);
        for (std::size_t r = 0; r < runs; ++r) tasks.emplace_back(qi, r);
    }
    parallel_for(tasks.size(), spec.jobs, [&](std::size_t t) {
        const auto [qi, r] = tasks[t];
        results[qi][r] = run_sweep(net, spec, q_values[qi], plan.fixed_order, plan.steps, r);
    });

    RobustnessSurface surface;
    surface.p_values = plan.grid;
    surface.q_values = q_values;
    // Volume over a common run count so the grid mean is one exact division.
    std::uint64_t common = 1;
    for (const auto& r : results) common = std::lcm(common, static_cast<std::uint64_t>(r.size()));
    std::uint64_t weighted = 0;
    for (std::size_t qi = 0; qi < q_values.size(); ++qi) {
        std::uint64_t total = 0;
        surface.rows.push_back(summarize(q_values[qi], plan.grid, net.node_count(), results[qi],
                                         spec.replications, total));
        weighted += total * (common / results[qi].size());
    }
    surface.volume_rpq = static_cast<double>(weighted) /
                         (static_cast<double>(common) * static_cast<double>(net.node_count()) *
                          static_cast<double>(plan.grid.size()) * static_cast<double>(q_values.size()));
    return surface;
}

void RobustnessCurve::write_csv(std::ostream& out, const std::string& provenance) const {
    if (!provenance.empty()) out << provenance << '\n';
    out << "q,p,S_mean,S_std\n";
    for (const auto& pt : points) {
        out << format_number(q) << ',' << format_number(pt.p) << ',' << format_number(pt.s_mean)
            << ',' << format_number(pt.s_std) << '\n';
    }
}

nlohmann::json RobustnessCurve::to_json() const {
    nlohmann::json j;
    j["q"] = q;
    j["replications"] = replications;
    j["R_p"] = index_rp;
    j["points"] = nlohmann::json::array();
    for (const auto& pt : points) {
        j["points"].push_back({{"p", pt.p}, {"S_mean", pt.s_mean}, {"S_std", pt.s_std}});
    }
    return j;
}

void RobustnessSurface::write_csv(std::ostream& out, const std::string& provenance) const {
    if (!provenance.empty()) out << provenance << '\n';
    out << "q,p,S_mean\n";
    for (std::size_t qi = 0; qi < rows.size(); ++qi) {
        for (const auto& pt : rows[qi].points) {
            out << format_number(q_values[qi]) << ',' << format_number(pt.p) << ','
                << format_number(pt.s_mean) << '\n';
        }
    }
}

nlohmann::json RobustnessSurface::to_json() const {
    nlohmann::json j;
    j["grid"] = {{"p", p_values}, {"q", q_values}};
    j["S"] = nlohmann::json::array();
    j["R_p"] = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json values = nlohmann::json::array();
        for (const auto& pt : row.points) values.push_back(pt.s_mean);
        j["S"].push_back(std::move(values));
        j["R_p"].push_back(row.index_rp);
    }
    j["volume"] = volume_rpq;
    return j;
}

std::vector<EvolutionRow> yearly_evolution(const std::map<int, SupplyNetwork>& networks,
                                           const EvolutionPlan& plan) {
    std::vector<EvolutionRow> rows;
    for (const auto& [year, net] : networks) {
        for (const auto& base : plan.strategies) {
            for (double q : plan.q_values) {
                ShockSpec spec = base;
                spec.q = q;
                rows.push_back({year, spec.label(), "Rp", q, robustness_curve(net, spec).index_rp});
            }
            if (plan.surface_q_steps > 0) {
                const auto surface = robustness_surface(net, base, plan.surface_q_steps);
                rows.push_back({year, base.label(), "Rpq", std::numeric_limits<double>::quiet_NaN(),
                                surface.volume_rpq});
            }
        }
    }
    return rows;
}

void write_evolution_csv(std::ostream& out, std::span<const EvolutionRow> rows) {
    out << "year,strategy,measure,q,R\n";
    for (const auto& r : rows) {
        out << r.year << ',' << r.strategy << ',' << r.measure << ','
            << (std::isnan(r.q) ? std::string() : format_number(r.q)) << ','
            << format_number(r.value) << '\n';
    }
}

}  // namespace fsn
