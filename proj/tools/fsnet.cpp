// fsnet: command-line pipeline over the fsnet library.
//
//   ingest -> build -> rank -> shock -> evolve -> determinants
//
// Exit codes: 0 success, 2 usage or input error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "fsn/csv.hpp"
#include "fsn/determinants.hpp"
#include "fsn/errors.hpp"
#include "fsn/forest.hpp"
#include "fsn/influence.hpp"
#include "fsn/ingest.hpp"
#include "fsn/regression.hpp"
#include "fsn/shock.hpp"
#include "fsn/stats.hpp"
#include "fsn/version.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Globals {
    fs::path out = ".";
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    std::uint64_t seed = 0;
};

/// Shared state handed to each command: output directory and manifest.
class Run {
public:
    Run(const Globals& g, std::string command, std::vector<std::string> argv, std::string config)
        : globals(g), manifest(std::move(command), std::move(argv)) {
        manifest.set_config(std::move(config));
        manifest.set_seed(g.seed);
        fs::create_directories(globals.out);
    }

    void input(const fs::path& path) {
        if (!fs::is_regular_file(path)) throw fsn::InvalidArgument("no such file: " + path.string());
        manifest.add_input(path);
    }

    template <class Writer>
    void output(const std::string& name, Writer&& write) {
        const fs::path path = globals.out / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw fsn::InvalidArgument("cannot write " + path.string());
        write(out);
        if (!out) throw fsn::InvalidArgument("write failed: " + path.string());
        manifest.add_output(path);
    }

    void finish() const { manifest.write(globals.out); }

    const Globals& globals;
    fsn::cli::RunManifest manifest;
};

std::string number_tag(double value) { return fsn::format_number(value); }

// Year from a file name such as network_2019.csv or flows_2019.csv.
std::optional<int> year_from_name(const fs::path& path) {
    static const std::regex pattern(R"((?:network|flows)_(\d{4}))");
    std::smatch m;
    const std::string name = path.filename().string();
    if (std::regex_search(name, m, pattern)) return std::stoi(m[1].str());
    return std::nullopt;
}

std::vector<fsn::TradeFlow> load_flows(Run& run, const std::vector<fs::path>& files) {
    std::vector<fsn::TradeFlow> flows;
    for (const auto& f : files) {
        run.input(f);
        std::ifstream in(f);
        auto part = fsn::read_flows_csv(in, f.string());
        flows.insert(flows.end(), part.begin(), part.end());
    }
    return flows;
}

fsn::SupplyNetwork load_network(Run& run, const fs::path& path, std::optional<int> year = std::nullopt) {
    run.input(path);
    return fsn::load_network_csv(path, year.value_or(year_from_name(path).value_or(0)));
}

fsn::Crop crop_or_throw(const std::string& name) {
    auto crop = fsn::parse_crop(fsn::to_lower(name));
    if (!crop) throw fsn::InvalidArgument("unknown staple '" + name + "' (wheat, rice, maize, soybeans)");
    return *crop;
}

fsn::Metric metric_or_throw(const std::string& name) {
    auto m = fsn::parse_metric(name);
    if (!m) throw fsn::InvalidArgument("unknown metric '" + name + "'; valid metrics: " + fsn::metric_list());
    return *m;
}

const CLI::Validator kMetricName(
    [](std::string& value) -> std::string {
        if (fsn::parse_metric(value)) return {};
        return "unknown metric '" + value + "'; valid metrics: " + fsn::metric_list();
    },
    "METRIC");

const CLI::Validator kStapleName(
    [](std::string& value) -> std::string {
        if (fsn::parse_crop(fsn::to_lower(value))) return {};
        return "unknown staple '" + value + "'; valid staples: wheat, rice, maize, soybeans";
    },
    "STAPLE");

// Options shared by every command that computes influence metrics.
struct MetricFlags {
    double damping = 0.85;
    double pr_tolerance = 1e-10;
    int pr_max_iter = 10000;
    int hits_max_iter = 100000;
    std::string om_mode = "own";

    void attach(CLI::App* cmd) {
        cmd->add_option("--damping", damping, "PageRank damping factor")->capture_default_str();
        cmd->add_option("--pr-tol", pr_tolerance, "PageRank convergence tolerance")->capture_default_str();
        cmd->add_option("--pr-max-iter", pr_max_iter, "PageRank iteration limit")->capture_default_str();
        cmd->add_option("--hits-max-iter", hits_max_iter, "HITS iteration limit")->capture_default_str();
        cmd->add_option("--om-mode", om_mode, "OM standardization: own or literal")
            ->check(CLI::IsMember({"own", "literal"}))
            ->capture_default_str();
    }

    fsn::MetricOptions options(const Globals& g) const {
        fsn::MetricOptions o;
        o.pagerank.damping = damping;
        o.pagerank.tolerance = pr_tolerance;
        o.pagerank.max_iterations = pr_max_iter;
        o.hits.max_iterations = hits_max_iter;
        o.label_propagation.seed = g.seed;
        o.outside_mode = om_mode == "literal" ? fsn::OutsideDegreeMode::Literal : fsn::OutsideDegreeMode::OwnModule;
        o.jobs = g.jobs;
        return o;
    }
};

// ---------------------------------------------------------------- ingest

struct IngestFlags {
    fs::path input;
    fs::path calories;
    fs::path schema;
};

void cmd_ingest(Run& run, const IngestFlags& f) {
    run.input(f.input);
    fsn::CalorieTable calories = fsn::CalorieTable::defaults();
    if (!f.calories.empty()) {
        run.input(f.calories);
        calories = fsn::load_calorie_table(f.calories);
    }
    fsn::TradeSchema schema;
    if (!f.schema.empty()) {
        run.input(f.schema);
        schema = fsn::load_schema(f.schema);
    }

    std::ifstream in(f.input, std::ios::binary);
    fsn::ParsedTrade parsed;
    try {
        parsed = fsn::parse_trade_records(in, schema, calories);
    } catch (const fsn::ParseError& e) {
        throw fsn::ParseError(f.input.string() + ": " + e.what(), e.row(), e.column());
    }

    for (int year : fsn::flow_years(parsed.flows)) {
        std::vector<fsn::TradeFlow> slice;
        std::copy_if(parsed.flows.begin(), parsed.flows.end(), std::back_inserter(slice),
                     [year](const fsn::TradeFlow& t) { return t.year == year; });
        run.output("flows_" + std::to_string(year) + ".csv",
                   [&](std::ostream& out) { fsn::write_flows_csv(out, slice); });
    }
    const json summary = parsed.summary.to_json();
    run.output("rejections.json", [&](std::ostream& out) { out << summary.dump(2) << '\n'; });
    std::cout << summary.dump() << '\n';
}

// ---------------------------------------------------------------- build

struct BuildFlags {
    std::vector<fs::path> flows;
    std::vector<int> years;
    bool staples = false;
};

void cmd_build(Run& run, const BuildFlags& f) {
    const auto flows = load_flows(run, f.flows);
    auto years = f.years.empty() ? fsn::flow_years(flows) : f.years;
    for (int year : years) {
        const auto net = fsn::aggregate_staples(flows, year);
        const std::string stem = "network_" + std::to_string(year);
        run.output(stem + ".csv", [&](std::ostream& out) { fsn::write_network_csv(out, net); });
        const auto lcc = fsn::components(net);
        std::cout << year << ": " << net.node_count() << " nodes, " << net.edge_count()
                  << " edges, density " << fsn::format_number(fsn::density(net)) << ", LCC fraction "
                  << fsn::format_number(lcc.lcc_fraction) << '\n';
        if (!f.staples) continue;
        for (fsn::Crop crop : fsn::kStaples) {
            const auto layer = fsn::single_staple_network(flows, crop, year);
            run.output(stem + "_" + std::string(fsn::crop_name(crop)) + ".csv",
                       [&](std::ostream& out) { fsn::write_network_csv(out, layer); });
        }
    }
}

// ---------------------------------------------------------------- rank

struct RankFlags {
    fs::path network;
    std::vector<std::string> metrics;
    bool all_metrics = false;
    bool correlations = false;
    std::size_t top_k = 10;
    MetricFlags metric;
};

void cmd_rank(Run& run, const RankFlags& f) {
    const auto net = load_network(run, f.network);
    const auto options = f.metric.options(run.globals);

    std::vector<fsn::RankingTable> tables;
    if (f.all_metrics || f.correlations) {
        tables = fsn::compute_all_rankings(net, options);
    } else {
        std::vector<std::string> names = f.metrics.empty() ? std::vector<std::string>{"ID"} : f.metrics;
        for (const auto& name : names) tables.push_back(fsn::compute_ranking(net, metric_or_throw(name), options));
    }

    for (const auto& t : tables) {
        run.output("rank_" + std::string(fsn::metric_name(t.metric)) + ".csv",
                   [&](std::ostream& out) { t.write_csv(out); });
    }

    const bool modules = std::any_of(tables.begin(), tables.end(), [](const fsn::RankingTable& t) {
        return t.metric == fsn::Metric::IM || t.metric == fsn::Metric::OM;
    });
    if (modules) {
        const auto partition = fsn::label_propagation(net, options.label_propagation);
        run.output("modules.csv", [&](std::ostream& out) { partition.write_csv(out, net); });
    }

    // Table-1 layout: one column of codes per metric, one row per rank.
    const std::size_t k = std::min(f.top_k, net.node_count());
    run.output("top_k.csv", [&](std::ostream& out) {
        out << "rank";
        for (const auto& t : tables) out << ',' << fsn::metric_name(t.metric);
        out << '\n';
        std::vector<std::vector<fsn::NodeId>> orders;
        for (const auto& t : tables) orders.push_back(t.order());
        for (std::size_t r = 0; r < k; ++r) {
            out << r + 1;
            for (const auto& order : orders) out << ',' << net.code(order[r]);
            out << '\n';
        }
    });

    if (f.correlations) {
        const std::size_t m = tables.size();
        std::vector<std::vector<fsn::Correlation>> c(m, std::vector<fsn::Correlation>(m));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) c[i][j] = fsn::spearman(tables[i].scores, tables[j].scores);
        auto matrix = [&](auto field) {
            return [&, field](std::ostream& out) {
                out << "metric";
                for (const auto& t : tables) out << ',' << fsn::metric_name(t.metric);
                out << '\n';
                for (std::size_t i = 0; i < m; ++i) {
                    out << fsn::metric_name(tables[i].metric);
                    for (std::size_t j = 0; j < m; ++j) out << ',' << fsn::format_number(field(c[i][j]));
                    out << '\n';
                }
            };
        };
        run.output("correlations.csv", matrix([](const fsn::Correlation& x) { return x.rho; }));
        run.output("correlation_pvalues.csv", matrix([](const fsn::Correlation& x) { return x.p_value; }));
    }

    for (const auto& t : tables) {
        std::cout << fsn::metric_name(t.metric) << ':';
        const auto order = t.order();
        for (std::size_t r = 0; r < std::min<std::size_t>(k, 5); ++r) std::cout << ' ' << net.code(order[r]);
        std::cout << '\n';
    }
}

// ---------------------------------------------------------------- shock / evolve

struct ShockInput {
    fs::path network;
    std::vector<fs::path> flows;
    int year = 0;
    std::string staple;

    void attach(CLI::App* cmd) {
        cmd->add_option("--network", network, "Edge list (src,dst,kcal)")->check(CLI::ExistingFile);
        cmd->add_option("--flows", flows, "Normalized flow tables")->check(CLI::ExistingFile);
        cmd->add_option("--year", year, "Year to build from --flows");
        cmd->add_option("--staple", staple, "Restrict --flows to one staple")->check(kStapleName);
    }

    fsn::SupplyNetwork load(Run& run) const {
        if (!network.empty() == !flows.empty())
            throw fsn::InvalidArgument("give exactly one of --network or --flows");
        if (!network.empty()) {
            if (!staple.empty()) throw fsn::InvalidArgument("--staple needs --flows");
            return load_network(run, network);
        }
        const auto all = load_flows(run, flows);
        int y = year;
        if (y == 0) {
            const auto years = fsn::flow_years(all);
            if (years.size() != 1) throw fsn::InvalidArgument("--flows spans several years; pass --year");
            y = years.front();
        }
        return staple.empty() ? fsn::aggregate_staples(all, y)
                              : fsn::single_staple_network(all, crop_or_throw(staple), y);
    }
};

struct ShockFlags {
    ShockInput input;
    std::string metric = "ID";
    double q = 1.0;
    double p_step = 0.02;
    int replications = 100;
    bool random = false;
    bool adaptive = false;
    std::vector<std::string> targets;
    bool surface = false;
    int q_steps = 10;
    MetricFlags metric_flags;
};

fsn::ShockSpec make_spec(const ShockFlags& f, const Globals& g) {
    fsn::ShockSpec spec;
    spec.metric = metric_or_throw(f.metric);
    if (f.random) spec.strategy = fsn::TargetStrategy::Random;
    if (!f.targets.empty()) {
        if (f.random) throw fsn::InvalidArgument("--targets and --random are exclusive");
        spec.strategy = fsn::TargetStrategy::Explicit;
        spec.explicit_order = f.targets;
    }
    spec.q = f.q;
    spec.p_step = f.p_step;
    spec.replications = f.replications;
    spec.seed = g.seed;
    spec.adaptive = f.adaptive;
    spec.metric_options = f.metric_flags.options(g);
    spec.jobs = g.jobs;
    return spec;
}

void cmd_shock(Run& run, const ShockFlags& f) {
    const auto net = f.input.load(run);
    auto spec = make_spec(f, run.globals);
    const std::string prefix = f.input.staple.empty() ? "" : fsn::to_lower(f.input.staple) + "_";
    const std::string label = prefix + spec.label();

    if (f.surface) {
        const auto surface = fsn::robustness_surface(net, spec, f.q_steps);
        const std::string provenance = spec.provenance() + " q_steps=" + std::to_string(f.q_steps);
        run.output("surface_" + label + ".csv", [&](std::ostream& out) { surface.write_csv(out, provenance); });
        run.output("surface_" + label + ".json",
                   [&](std::ostream& out) { out << surface.to_json().dump(2) << '\n'; });
        std::cout << label << " R_pq = " << fsn::format_number(surface.volume_rpq) << '\n';
        return;
    }

    const auto curve = fsn::robustness_curve(net, spec);
    const std::string stem = "curve_" + label + "_q" + number_tag(spec.q);
    run.output(stem + ".csv", [&](std::ostream& out) { curve.write_csv(out, spec.provenance()); });
    run.output(stem + ".json", [&](std::ostream& out) { out << curve.to_json().dump(2) << '\n'; });
    std::cout << label << " q=" << number_tag(spec.q) << " R_p = " << fsn::format_number(curve.index_rp) << '\n';
}

struct EvolveFlags {
    std::vector<fs::path> networks;
    std::vector<fs::path> flows;
    std::string staple;
    std::vector<std::string> metrics{"ID"};
    bool random = false;
    std::vector<double> q_values{1.0};
    int q_steps = 0;
    double p_step = 0.02;
    int replications = 100;
    MetricFlags metric_flags;
};

void cmd_evolve(Run& run, const EvolveFlags& f) {
    std::map<int, fsn::SupplyNetwork> years;
    if (!f.networks.empty() == !f.flows.empty())
        throw fsn::InvalidArgument("give exactly one of --networks or --flows");
    for (const auto& path : f.networks) {
        const auto year = year_from_name(path);
        if (!year) throw fsn::InvalidArgument("cannot tell the year of " + path.string() + " (expected network_<year>.csv)");
        if (years.count(*year)) throw fsn::InvalidArgument("two networks for year " + std::to_string(*year));
        years.emplace(*year, load_network(run, path, *year));
    }
    if (!f.flows.empty()) {
        const auto all = load_flows(run, f.flows);
        for (int y : fsn::flow_years(all)) {
            years.emplace(y, f.staple.empty() ? fsn::aggregate_staples(all, y)
                                              : fsn::single_staple_network(all, crop_or_throw(f.staple), y));
        }
    }

    fsn::EvolutionPlan plan;
    plan.q_values = f.q_values;
    plan.surface_q_steps = f.q_steps;
    auto base = [&] {
        fsn::ShockSpec s;
        s.p_step = f.p_step;
        s.replications = f.replications;
        s.seed = run.globals.seed;
        s.metric_options = f.metric_flags.options(run.globals);
        s.jobs = run.globals.jobs;
        return s;
    };
    for (const auto& name : f.metrics) {
        auto s = base();
        s.metric = metric_or_throw(name);
        plan.strategies.push_back(s);
    }
    if (f.random) {
        auto s = base();
        s.strategy = fsn::TargetStrategy::Random;
        plan.strategies.push_back(s);
    }
    for (double q : plan.q_values) {
        for (auto s : plan.strategies) {
            s.q = q;
            s.validate();
        }
    }

    const auto rows = fsn::yearly_evolution(years, plan);
    run.output("evolution.csv", [&](std::ostream& out) { fsn::write_evolution_csv(out, rows); });
    std::cout << rows.size() << " rows over " << years.size() << " years\n";
}

// ---------------------------------------------------------------- determinants

struct DeterminantsFlags {
    fs::path table;
    std::string target = "R";
    std::vector<std::string> features;
    std::vector<std::string> models{"corr", "ols", "stepwise", "ridge", "rf"};
    double lambda = 1.0;
    std::vector<double> lambda_grid;
    double p_enter = 0.05;
    double p_remove = 0.10;
    int trees = 500;
    int max_depth = 0;
    int min_leaf = 2;
    bool standardize_target = false;
    bool raw = false;
};

json correlation_json(const std::string& feature, const fsn::Correlation& s, const fsn::Correlation& p) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"feature", feature},
            {"spearman_rho", num(s.rho)},
            {"spearman_p", num(s.p_value)},
            {"spearman_exact", s.exact},
            {"pearson_r", num(p.rho)},
            {"pearson_p", num(p.p_value)},
            {"n", s.n}};
}

void cmd_determinants(Run& run, const DeterminantsFlags& f) {
    run.input(f.table);
    const auto raw = fsn::load_determinants_csv(f.table);
    if (!raw.has(f.target)) throw fsn::InvalidArgument("target column '" + f.target + "' not in " + f.table.string());

    std::vector<std::string> features = f.features;
    if (features.empty()) {
        for (const auto& n : raw.names())
            if (n != f.target) features.push_back(n);
    }
    if (features.empty()) throw fsn::InvalidArgument("no feature columns");

    // Work table: target plus features, features standardized unless --raw.
    fsn::DeterminantsTable table(raw.years(), {}, {});
    table.add_column(f.target, raw.column(f.target));
    for (const auto& name : features) table.add_column(name, raw.column(name));
    if (!f.raw) {
        fsn::DeterminantsTable scaled(raw.years(), {}, {});
        for (const auto& name : table.names()) {
            const auto& col = table.column(name);
            if (name == f.target && !f.standardize_target) {
                scaled.add_column(name, col);
                continue;
            }
            std::vector<double> present;
            for (double v : col)
                if (!std::isnan(v)) present.push_back(v);
            const auto z = fsn::standardize(present, name);
            std::vector<double> out(col.size(), std::numeric_limits<double>::quiet_NaN());
            for (std::size_t i = 0, k = 0; i < col.size(); ++i)
                if (!std::isnan(col[i])) out[i] = z[k++];
            scaled.add_column(name, std::move(out));
        }
        table = std::move(scaled);
    }

    std::set<std::string> wanted(f.models.begin(), f.models.end());
    for (const auto& m : wanted) {
        if (m != "corr" && m != "ols" && m != "stepwise" && m != "ridge" && m != "rf")
            throw fsn::InvalidArgument("unknown model '" + m + "' (corr, ols, stepwise, ridge, rf)");
    }

    std::map<std::string, fsn::Correlation> spearman_by, pearson_by;
    std::optional<fsn::RegressionReport> ols_r, step_r, ridge_r, rf_r;

    if (wanted.count("corr")) {
        json out = json::array();
        for (const auto& name : features) {
            const auto data = fsn::complete_cases(table, f.target, {name});
            std::vector<double> x(data.x.col(0).begin(), data.x.col(0).end());
            std::vector<double> y(data.y.begin(), data.y.end());
            spearman_by[name] = fsn::spearman(x, y);
            pearson_by[name] = fsn::pearson(x, y);
            out.push_back(correlation_json(name, spearman_by[name], pearson_by[name]));
        }
        run.output("model_corr.json", [&](std::ostream& os) { os << out.dump(2) << '\n'; });
    }
    if (wanted.count("ols")) ols_r = fsn::ols(table, f.target, features);
    if (wanted.count("stepwise")) {
        fsn::StepwiseOptions opts;
        opts.p_enter = f.p_enter;
        opts.p_remove = f.p_remove;
        step_r = fsn::stepwise(table, f.target, features, opts);
    }
    if (wanted.count("ridge")) {
        double lambda = f.lambda;
        if (!f.lambda_grid.empty()) {
            const auto data = fsn::complete_cases(table, f.target, features);
            const auto cv = fsn::ridge_loocv(data, f.lambda_grid);
            lambda = cv.best_lambda;
            run.output("ridge_cv.csv", [&](std::ostream& os) {
                os << "lambda,loo_mse\n";
                for (const auto& p : cv.path)
                    os << fsn::format_number(p.lambda) << ',' << fsn::format_number(p.loo_mse) << '\n';
            });
        }
        ridge_r = fsn::ridge(table, f.target, features, lambda);
    }
    if (wanted.count("rf")) {
        fsn::ForestOptions opts;
        opts.trees = f.trees;
        opts.max_depth = f.max_depth;
        opts.min_leaf = f.min_leaf;
        opts.seed = run.globals.seed;
        opts.jobs = run.globals.jobs;
        rf_r = fsn::random_forest_importance(table, f.target, features, opts);
    }

    for (const auto* r : {&ols_r, &step_r, &ridge_r, &rf_r}) {
        if (!*r) continue;
        const auto& report = **r;
        run.output("model_" + std::string(fsn::model_name(report.model)) + ".json",
                   [&](std::ostream& os) { os << report.to_json().dump(2) << '\n'; });
    }

    // Table-4 layout: one row per feature, one column group per model.
    run.output("determinants.csv", [&](std::ostream& os) {
        std::vector<std::string> header{"feature"};
        if (wanted.count("corr")) header.insert(header.end(), {"spearman_rho", "spearman_p", "pearson_r", "pearson_p"});
        if (ols_r) header.insert(header.end(), {"ols_coef", "ols_se", "ols_p"});
        if (step_r) header.insert(header.end(), {"stepwise_coef", "stepwise_se", "stepwise_p"});
        if (ridge_r) header.push_back("ridge_coef");
        if (rf_r) header.push_back("rf_importance");
        for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
        os << '\n';

        auto cell = [](double v) { return std::isnan(v) ? std::string() : fsn::format_number(v); };
        auto coef_cells = [&](const std::optional<fsn::RegressionReport>& r, const std::string& name, bool inference) {
            std::string s;
            const auto* c = r->coefficient(name);
            s += ',' + (c ? cell(c->estimate) : std::string());
            if (inference) {
                s += ',' + (c ? cell(c->std_error) : std::string());
                s += ',' + (c ? cell(c->p_value) : std::string());
            }
            return s;
        };
        auto write_row = [&](const std::string& name, bool intercept) {
            os << fsn::csv_field(name);
            if (wanted.count("corr")) {
                if (intercept) {
                    os << ",,,,";
                } else {
                    const auto& s = spearman_by[name];
                    const auto& p = pearson_by[name];
                    os << ',' << cell(s.rho) << ',' << cell(s.p_value) << ',' << cell(p.rho) << ',' << cell(p.p_value);
                }
            }
            for (const auto* r : {&ols_r, &step_r}) {
                if (!*r) continue;
                if (intercept) {
                    const auto& c = (*r)->intercept;
                    os << ',' << cell(c.estimate) << ',' << cell(c.std_error) << ',' << cell(c.p_value);
                } else {
                    os << coef_cells(*r, name, true);
                }
            }
            if (ridge_r) os << (intercept ? ',' + cell(ridge_r->intercept.estimate) : coef_cells(ridge_r, name, false));
            if (rf_r) {
                const auto imp = intercept ? std::nullopt : rf_r->importance(name);
                os << ',' << (imp ? cell(*imp) : std::string());
            }
            os << '\n';
        };
        if (ols_r || step_r || ridge_r) write_row("(intercept)", true);
        for (const auto& name : features) write_row(name, false);
    });

    if (ols_r) std::cout << "ols R^2 = " << fsn::format_number(ols_r->r_squared) << '\n';
    if (step_r) {
        std::cout << "stepwise selected:";
        for (const auto& s : step_r->selected) std::cout << ' ' << s;
        std::cout << '\n';
    }
    if (rf_r) std::cout << "rf OOB R^2 = " << fsn::format_number(rf_r->r_squared) << '\n';
}

// INI text of the global options and the active subcommand's options, in
// the same shape --config reads.
std::string config_snapshot(const CLI::App& app, const CLI::App& sub) {
    std::ostringstream out;
    auto dump = [&](const CLI::App& a) {
        for (const CLI::Option* opt : a.get_options()) {
            if (opt->get_lnames().empty()) continue;
            const std::string& name = opt->get_lnames().front();
            if (name == "help" || name == "version" || name == "config") continue;
            std::string value = opt->get_default_str();
            if (opt->count() > 0) {
                const auto& results = opt->results();
                value.clear();
                for (std::size_t i = 0; i < results.size(); ++i) value += (i ? "," : "") + results[i];
                if (results.size() > 1) value = "[" + value + "]";
            }
            if (value.empty() && opt->get_expected_min() == 0) value = "false";
            if (value.empty()) continue;
            out << name << " = " << value << '\n';
        }
    };
    dump(app);
    out << '[' << sub.get_name() << "]\n";
    dump(sub);
    return out.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Food-supply network analysis: ingest, build, rank, shock, evolve, determinants", "fsnet"};
    app.set_version_flag("--version", std::string(fsn::kVersion));
    app.set_config("--config", "", "INI file; [section] per subcommand")->check(CLI::ExistingFile);
    app.require_subcommand(1);
    app.fallthrough();

    Globals globals;
    app.add_option("--out", globals.out, "Output directory")->capture_default_str();
    app.add_option("--jobs", globals.jobs, "Worker threads")->check(CLI::Range(1u, 256u))->capture_default_str();
    app.add_option("--seed", globals.seed, "Base random seed")->capture_default_str();

    std::function<void(Run&)> action;

    IngestFlags ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Normalize a raw bilateral trade table");
    c_ingest->add_option("--input", ingest.input, "Raw trade CSV")->required()->check(CLI::ExistingFile);
    c_ingest->add_option("--calories", ingest.calories, "crop = kcal per tonne overrides")->check(CLI::ExistingFile);
    c_ingest->add_option("--schema", ingest.schema, "Column mapping")->check(CLI::ExistingFile);
    c_ingest->callback([&] { action = [&](Run& r) { cmd_ingest(r, ingest); }; });

    BuildFlags build;
    auto* c_build = app.add_subcommand("build", "Write yearly calorie-weighted networks");
    c_build->add_option("--flows", build.flows, "Normalized flow tables")->required()->check(CLI::ExistingFile);
    c_build->add_option("--year", build.years, "Years to build (default: all)");
    c_build->add_flag("--staples", build.staples, "Also write one network per staple");
    c_build->callback([&] { action = [&](Run& r) { cmd_build(r, build); }; });

    RankFlags rank;
    auto* c_rank = app.add_subcommand("rank", "Rank economies by influence metrics");
    c_rank->add_option("--network", rank.network, "Edge list (src,dst,kcal)")->required()->check(CLI::ExistingFile);
    c_rank->add_option("--metric", rank.metrics, "Metrics to compute")->check(kMetricName);
    c_rank->add_flag("--all-metrics", rank.all_metrics, "Compute all twelve metrics");
    c_rank->add_flag("--correlations", rank.correlations, "Spearman matrix across all metrics");
    c_rank->add_option("--top-k", rank.top_k, "Rows in top_k.csv")->capture_default_str();
    rank.metric.attach(c_rank);
    c_rank->callback([&] { action = [&](Run& r) { cmd_rank(r, rank); }; });

    ShockFlags shock;
    auto* c_shock = app.add_subcommand("shock", "Robustness curve or surface under node shocks");
    shock.input.attach(c_shock);
    c_shock->add_option("--metric", shock.metric, "Targeting metric")->check(kMetricName)->capture_default_str();
    c_shock->add_option("--q", shock.q, "Share of links severed per target")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    c_shock->add_option("--p-step", shock.p_step, "Share of economies per step")
        ->check(CLI::Range(1e-9, 1.0))->capture_default_str();
    c_shock->add_option("--reps", shock.replications, "Replications for stochastic runs")
        ->check(CLI::PositiveNumber)->capture_default_str();
    c_shock->add_flag("--random", shock.random, "Random target order");
    c_shock->add_flag("--adaptive", shock.adaptive, "Re-rank after every step");
    c_shock->add_option("--targets", shock.targets, "Explicit target order (codes)");
    c_shock->add_flag("--surface", shock.surface, "Compute the (p, q) surface");
    c_shock->add_option("--q-steps", shock.q_steps, "q grid size for --surface")->check(CLI::PositiveNumber)->capture_default_str();
    shock.metric_flags.attach(c_shock);
    c_shock->callback([&] { action = [&](Run& r) { cmd_shock(r, shock); }; });

    EvolveFlags evolve;
    auto* c_evolve = app.add_subcommand("evolve", "Yearly robustness indices");
    c_evolve->add_option("--networks", evolve.networks, "network_<year>.csv files")->check(CLI::ExistingFile);
    c_evolve->add_option("--flows", evolve.flows, "Normalized flow tables")->check(CLI::ExistingFile);
    c_evolve->add_option("--staple", evolve.staple, "Restrict --flows to one staple")->check(kStapleName);
    c_evolve->add_option("--metric", evolve.metrics, "Targeting metrics")->check(kMetricName)->capture_default_str();
    c_evolve->add_flag("--random", evolve.random, "Add the random strategy");
    c_evolve->add_option("--q", evolve.q_values, "Severities for R_p")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    c_evolve->add_option("--q-steps", evolve.q_steps, "Add R_pq with this q grid (0 = off)")->capture_default_str();
    c_evolve->add_option("--p-step", evolve.p_step, "Share of economies per step")
        ->check(CLI::Range(1e-9, 1.0))->capture_default_str();
    c_evolve->add_option("--reps", evolve.replications, "Replications for stochastic runs")
        ->check(CLI::PositiveNumber)->capture_default_str();
    evolve.metric_flags.attach(c_evolve);
    c_evolve->callback([&] { action = [&](Run& r) { cmd_evolve(r, evolve); }; });

    DeterminantsFlags det;
    auto* c_det = app.add_subcommand("determinants", "Correlations and regressions on yearly drivers");
    c_det->add_option("--table", det.table, "CSV with a year column")->required()->check(CLI::ExistingFile);
    c_det->add_option("--target", det.target, "Target column")->capture_default_str();
    c_det->add_option("--features", det.features, "Feature columns (default: all others)");
    c_det->add_option("--models", det.models, "Any of corr, ols, stepwise, ridge, rf")->delimiter(',')->capture_default_str();
    c_det->add_option("--lambda", det.lambda, "Ridge penalty")->check(CLI::NonNegativeNumber)->capture_default_str();
    c_det->add_option("--lambda-cv", det.lambda_grid, "Pick lambda from this grid by leave-one-out CV")
        ->check(CLI::NonNegativeNumber)->delimiter(',');
    c_det->add_option("--p-enter", det.p_enter, "Stepwise entry threshold")->capture_default_str();
    c_det->add_option("--p-remove", det.p_remove, "Stepwise removal threshold")->capture_default_str();
    c_det->add_option("--trees", det.trees, "Random forest size")->check(CLI::PositiveNumber)->capture_default_str();
    c_det->add_option("--max-depth", det.max_depth, "Tree depth limit (0 = none)")->capture_default_str();
    c_det->add_option("--min-leaf", det.min_leaf, "Minimum rows per leaf")->check(CLI::PositiveNumber)->capture_default_str();
    c_det->add_flag("--standardize-target", det.standardize_target, "Standardize the target too");
    c_det->add_flag("--raw", det.raw, "Skip feature standardization");
    c_det->callback([&] { action = [&](Run& r) { cmd_determinants(r, det); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    std::vector<std::string> args(argv, argv + argc);
    const CLI::App& sub = *app.get_subcommands().front();
    const std::string command = sub.get_name();
    try {
        Run run(globals, command, args, config_snapshot(app, sub));
        action(run);
        run.finish();
    } catch (const fsn::IterationLimit& e) {
        std::cerr << "fsnet " << command << ": " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fsn::SingularDesign& e) {
        std::cerr << "fsnet " << command << ": " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fsn::DegenerateNetwork& e) {
        std::cerr << "fsnet " << command << ": " << e.what() << '\n';
        return kExitNumerical;
    } catch (const fsn::ParseError& e) {
        std::cerr << "fsnet " << command << ": " << e.what();
        if (e.row() > 0) std::cerr << " (row " << e.row() << ')';
        if (!e.column().empty()) std::cerr << " (column " << e.column() << ')';
        std::cerr << '\n';
        return kExitUsage;
    } catch (const fsn::Error& e) {
        std::cerr << "fsnet " << command << ": " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "fsnet " << command << ": " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitOk;
}
