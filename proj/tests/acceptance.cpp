// Acceptance checks. One line per criterion: PASS, FAIL or SKIP.
//
// Criterion 8 needs a bilateral trade extract for 2022:
//   FSNET_FAO_EXTRACT=/path/to/trade.csv [FSNET_FAO_SCHEMA=/path/to/schema.ini]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>

#include "fsn/centrality.hpp"
#include "fsn/determinants.hpp"
#include "fsn/forest.hpp"
#include "fsn/influence.hpp"
#include "fsn/ingest.hpp"
#include "fsn/regression.hpp"
#include "fsn/shock.hpp"
#include "fsn/stats.hpp"
#include "oracles.hpp"

using namespace fsn;

namespace {

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
    Outcome outcome = Outcome::Pass;
    std::string detail;
};

// Collects the first few failure messages of a criterion.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (ok) return;
        ++failures_;
        if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
    }
    Verdict verdict(const std::string& summary) const {
        if (failures_ == 0) return {Outcome::Pass, summary};
        return {Outcome::Fail, std::to_string(failures_) + " failure(s): " + messages_};
    }

private:
    int failures_ = 0;
    std::string messages_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

double gaussian(Rng& rng) {
    const double u1 = 1.0 - rng.unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * rng.unit());
}

std::vector<double> noise(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = gaussian(rng);
    return v;
}

DeterminantsTable make_table(std::vector<std::string> names, std::vector<std::vector<double>> columns) {
    std::vector<int> years(columns.front().size());
    std::iota(years.begin(), years.end(), 1986);
    return DeterminantsTable(std::move(years), std::move(names), std::move(columns));
}

// Graphs shared by the oracle criteria and the MI conservation check.
std::vector<SupplyNetwork>& generated() {
    static std::vector<SupplyNetwork> nets;
    return nets;
}

Verdict centrality_oracles() {
    const auto t0 = std::chrono::steady_clock::now();
    Check check;
    Rng rng(1001);
    double worst_close = 0.0, worst_cc = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.below(7);
        auto net = oracle::random_digraph(rng, n, 0.1 + 0.6 * rng.unit());
        const auto bc = betweenness(net).scores;
        const auto want = oracle::betweenness(net);
        check.expect(bc == want, "BC differs on graph " + std::to_string(trial));
        worst_close = std::max({worst_close, max_abs_diff(closeness(net, Direction::In).scores, oracle::closeness(net, true)),
                                max_abs_diff(closeness(net, Direction::Out).scores, oracle::closeness(net, false))});
        worst_cc = std::max(worst_cc, max_abs_diff(clustering_coefficient(net).scores, oracle::clustering(net)));
        generated().push_back(std::move(net));
    }
    check.expect(worst_close <= 1e-12, "IC/OC error " + fmt(worst_close));
    check.expect(worst_cc <= 1e-12, "CC error " + fmt(worst_cc));
    const double elapsed = seconds_since(t0);
    check.expect(elapsed < 10.0, "runtime " + fmt(elapsed) + " s");
    return check.verdict("200 digraphs; BC bit-identical; max IC/OC err " + fmt(worst_close) + ", CC err " +
                         fmt(worst_cc) + "; " + fmt(elapsed) + " s");
}

Verdict spectral_oracles() {
    Check check;
    Rng rng(2002);
    double worst_pr = 0.0, worst_sum = 0.0, worst_hits = 0.0;
    int graphs = 0;
    while (graphs < 100) {
        const std::size_t n = 2 + rng.below(5);
        auto net = oracle::random_digraph(rng, n, 0.2 + 0.6 * rng.unit());
        if (net.edge_count() == 0) continue;
        ++graphs;
        const auto pr = pagerank(net).scores;
        worst_pr = std::max(worst_pr, max_abs_diff(pr, oracle::pagerank(net)));
        worst_sum = std::max(worst_sum, std::abs(std::accumulate(pr.begin(), pr.end(), 0.0) - 1.0));
        const auto h = hits(net);
        const auto want = oracle::hits(net);
        worst_hits = std::max({worst_hits, max_abs_diff(h.authority.scores, want.authority),
                               max_abs_diff(h.hub.scores, want.hub)});
        generated().push_back(std::move(net));
    }
    check.expect(worst_pr <= 1e-8, "PR error " + fmt(worst_pr));
    check.expect(worst_sum <= 1e-10, "PR sum error " + fmt(worst_sum));
    check.expect(worst_hits <= 1e-6, "HITS error " + fmt(worst_hits));
    return check.verdict("100 digraphs; PR err " + fmt(worst_pr) + ", PR sum err " + fmt(worst_sum) +
                         ", HITS err " + fmt(worst_hits));
}

Verdict mi_conservation() {
    Check check;
    Rng rng(3003);
    for (int i = 0; i < 200; ++i) generated().push_back(oracle::random_digraph(rng, 2 + rng.below(60), 0.15));
    double worst = 0.0;
    for (const auto& net : generated()) {
        const auto mi = mutual_information(net).scores;
        worst = std::max(worst, std::abs(std::accumulate(mi.begin(), mi.end(), 0.0)));
    }
    check.expect(worst <= 1e-9, "sum MI " + fmt(worst));

    NetworkBuilder b;
    b.add_flow("SRC", "AAA", 3.0).add_flow("SRC", "BBB", 3.0);
    const auto fork = b.build();
    const double source = mutual_information(fork).score_of("SRC");
    const double err = std::abs(source - 2.0 * std::log(2.0));
    check.expect(err <= 1e-12, "hand case error " + fmt(err));
    return check.verdict(std::to_string(generated().size()) + " networks; max |sum MI| " + fmt(worst) +
                         "; MI_source - 2 ln 2 = " + fmt(err));
}

Verdict shock_analytics() {
    Check check;
    ShockSpec spec;
    spec.metric = Metric::ID;
    spec.q = 1.0;
    spec.p_step = 0.25;
    spec.replications = 1;
    const auto k4 = oracle::complete_digraph(4);
    const auto curve = robustness_curve(k4, spec);
    std::vector<double> s;
    for (const auto& pt : curve.points) s.push_back(pt.s_mean);
    check.expect(s == std::vector<double>{0.75, 0.5, 0.25, 0.25}, "K4 curve");
    check.expect(curve.index_rp == 0.4375, "K4 R_p " + fmt(curve.index_rp));

    for (std::size_t n : {1u, 3u, 7u, 50u}) {
        const auto edgeless = oracle::from_pairs(n, {});
        const double floor = 1.0 / static_cast<double>(n);
        ShockSpec e;
        e.p_step = 0.1;
        e.replications = 7;
        e.seed = 5;
        const double rp = robustness_curve(edgeless, e).index_rp;
        const double rpq = robustness_surface(edgeless, e, 4).volume_rpq;
        check.expect(rp == floor, "edgeless R_p at N=" + std::to_string(n));
        check.expect(rpq == floor, "edgeless R_pq at N=" + std::to_string(n));
    }
    return check.verdict("K4 S = {0.75, 0.5, 0.25, 0.25}, R_p = " + fmt(curve.index_rp) +
                         "; edgeless R_p = R_pq = 1/N for N in {1, 3, 7, 50}");
}

std::string serialize(const RobustnessCurve& c) {
    std::ostringstream out;
    c.write_csv(out, "");
    return out.str();
}

Verdict shock_invariants() {
    Check check;
    Rng rng(5005);
    constexpr std::size_t n = 50;
    const double floor = 1.0 / static_cast<double>(n);
    for (int trial = 0; trial < 50; ++trial) {
        const auto net = oracle::random_digraph(rng, n, 0.02 + 0.08 * rng.unit());
        const auto tag = " (network " + std::to_string(trial) + ")";

        ShockSpec spec;
        spec.metric = kAllMetrics[static_cast<std::size_t>(trial) % kAllMetrics.size()];
        spec.q = 1.0;
        spec.replications = 10;
        spec.seed = static_cast<std::uint64_t>(trial);
        spec.jobs = 1;
        const auto curve = robustness_curve(net, spec);
        for (std::size_t k = 0; k < curve.points.size(); ++k) {
            const double v = curve.points[k].s_mean;
            check.expect(v >= floor && v <= 1.0, "S out of range" + tag);
            if (k > 0) check.expect(v <= curve.points[k - 1].s_mean, "S increased" + tag);
        }

        spec.jobs = 8;
        check.expect(serialize(curve) == serialize(robustness_curve(net, spec)), "ranked curve jobs 1 vs 8" + tag);

        spec.jobs = 1;
        const auto surface1 = robustness_surface(net, spec, 5);
        check.expect(serialize(surface1.rows.back()) == serialize(curve), "q=1 row differs from curve" + tag);
        for (const auto& row : surface1.rows)
            for (const auto& pt : row.points) check.expect(pt.s_mean >= floor && pt.s_mean <= 1.0, "surface S out of range" + tag);
        spec.jobs = 8;
        check.expect(surface1.to_json().dump() == robustness_surface(net, spec, 5).to_json().dump(),
                     "surface jobs 1 vs 8" + tag);

        ShockSpec random = spec;
        random.strategy = TargetStrategy::Random;
        random.q = 0.5;
        random.jobs = 1;
        const auto r1 = robustness_curve(net, random);
        random.jobs = 8;
        check.expect(serialize(r1) == serialize(robustness_curve(net, random)), "random curve jobs 1 vs 8" + tag);
    }
    return check.verdict("50 networks (N = 50): S non-increasing, S in [1/N, 1], q=1 row == curve, jobs 1 == jobs 8");
}

Verdict staple_layers() {
    const auto t0 = std::chrono::steady_clock::now();
    Check check;
    const std::string path = std::string(FSNET_DATA_DIR) + "/fixtures/staples_2022.csv";
    std::ifstream in(path);
    if (!in) return {Outcome::Fail, "missing fixture " + path};
    const auto parsed = parse_trade_records(in, TradeSchema{}, CalorieTable::defaults());
    const auto aggregate = aggregate_staples(parsed.flows, 2022);

    double margin = 1.0;
    for (Metric m : kAllMetrics) {
        ShockSpec spec;
        spec.metric = m;
        spec.q = 1.0;
        spec.replications = 1;
        const double agg = robustness_curve(aggregate, spec).index_rp;
        for (Crop crop : kStaples) {
            const auto layer = single_staple_network(parsed.flows, crop, 2022);
            check.expect(layer.node_count() == aggregate.node_count(),
                         std::string(crop_name(crop)) + " layer misses economies");
            bool subset = true;
            for (const auto& e : layer.edges())
                subset = subset && aggregate.find_edge(aggregate.find(layer.code(e.source)).value(),
                                                       aggregate.find(layer.code(e.target)).value()).has_value();
            check.expect(subset && layer.edge_count() < aggregate.edge_count(),
                         std::string(crop_name(crop)) + " layer is not a strict sub-network");
            const double rp = robustness_curve(layer, spec).index_rp;
            check.expect(rp <= agg, std::string(crop_name(crop)) + " R_p " + fmt(rp) + " > aggregate " + fmt(agg) +
                                        " under " + std::string(metric_name(m)));
            margin = std::min(margin, agg - rp);
        }
    }
    const double elapsed = seconds_since(t0);
    check.expect(elapsed < 30.0, "runtime " + fmt(elapsed) + " s");
    return check.verdict("4 staples x 12 metrics, q = 1: layer R_p <= aggregate R_p (min margin " + fmt(margin) +
                         "); " + fmt(elapsed) + " s");
}

Verdict statistics_oracles() {
    Check check;
    Rng rng(7007);

    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 8 + rng.below(30);
        const std::size_t d = 1 + rng.below(4);
        std::vector<std::string> names;
        std::vector<std::vector<double>> cols;
        oracle::Matrix rows(n, std::vector<double>(d));
        for (std::size_t j = 0; j < d; ++j) {
            names.push_back("x" + std::to_string(j));
            cols.push_back(noise(rng, n));
            for (std::size_t i = 0; i < n; ++i) rows[i][j] = cols.back()[i];
        }
        std::vector<double> y = noise(rng, n);
        for (std::size_t i = 0; i < n; ++i) y[i] += 1.5 * rows[i][0];
        auto feature_names = names;
        names.push_back("y");
        cols.push_back(y);
        const auto table = make_table(names, cols);
        for (double lambda : {0.0, 0.5, 3.0}) {
            const auto want = oracle::normal_equations(rows, y, lambda);
            const auto got = lambda == 0.0 ? ols(table, "y", feature_names) : ridge(table, "y", feature_names, lambda);
            worst = std::max(worst, std::abs(got.intercept.estimate - want[0]));
            for (std::size_t j = 0; j < d; ++j)
                worst = std::max(worst, std::abs(got.coefficient(feature_names[j])->estimate - want[j + 1]));
        }

        double previous = INFINITY;
        for (double lambda : {0.0, 0.1, 1.0, 10.0, 1e9}) {
            double norm = 0.0;
            for (const auto& c : ridge(table, "y", feature_names, lambda).coefficients) norm += c.estimate * c.estimate;
            check.expect(norm <= previous, "ridge norm grew at lambda " + fmt(lambda));
            previous = norm;
        }
    }
    check.expect(worst <= 1e-10, "OLS/ridge error " + fmt(worst));

    const std::vector<double> x{1, 2, 3, 4}, y{2, 1, 4, 3};
    const double rho = spearman(x, y).rho;
    check.expect(rho == 0.6, "Spearman hand case " + fmt(rho));

    // Planted predictor plus three features with zero sample correlation to
    // the target and the predictor.
    int exact_selection = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng r(derive_seed(77, seed));
        const std::size_t n = 37;
        auto strong = noise(r, n);
        std::vector<double> target(n);
        for (std::size_t i = 0; i < n; ++i) target[i] = 2.0 * strong[i] + 0.5 * gaussian(r);
        std::vector<std::vector<double>> cols{strong};
        for (int k = 0; k < 3; ++k) {
            auto z = noise(r, n);
            Eigen::MatrixXd basis(n, 3);
            for (std::size_t i = 0; i < n; ++i) basis.row(static_cast<Eigen::Index>(i)) << 1.0, strong[i], target[i];
            Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(n));
            v -= basis * basis.colPivHouseholderQr().solve(v);
            cols.emplace_back(v.data(), v.data() + n);
        }
        cols.push_back(target);
        const auto table = make_table({"planted", "n1", "n2", "n3", "y"}, cols);
        const auto report = stepwise(table, "y", {"planted", "n1", "n2", "n3"});
        if (report.selected == std::vector<std::string>{"planted"}) ++exact_selection;
    }
    check.expect(exact_selection == 20, "stepwise exact on " + std::to_string(exact_selection) + "/20 seeds");

    double lowest = 1.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng r(derive_seed(99, seed));
        const std::size_t n = 300;
        auto x1 = noise(r, n), x2 = noise(r, n), x3 = noise(r, n), x4 = noise(r, n);
        std::vector<double> target(n);
        for (std::size_t i = 0; i < n; ++i) target[i] = 3.0 * std::sin(x1[i]) + x1[i] * x1[i];
        const auto table = make_table({"x1", "x2", "x3", "x4", "y"}, {x1, x2, x3, x4, target});
        ForestOptions opts;
        opts.seed = seed;
        opts.jobs = 4;
        const auto report = random_forest_importance(table, "y", {"x1", "x2", "x3", "x4"}, opts);
        lowest = std::min(lowest, *report.importance("x1"));
    }
    check.expect(lowest > 0.8, "RF importance " + fmt(lowest));

    return check.verdict("OLS/ridge err " + fmt(worst) + "; ridge norm monotone; Spearman = " + fmt(rho) +
                         "; stepwise exact 20/20; min RF importance " + fmt(lowest));
}

Verdict paper_table3() {
    const char* extract = std::getenv("FSNET_FAO_EXTRACT");
    if (!extract || !*extract) return {Outcome::Skip, "set FSNET_FAO_EXTRACT to a bilateral trade CSV to run"};
    Check check;
    TradeSchema schema;
    if (const char* s = std::getenv("FSNET_FAO_SCHEMA"); s && *s) schema = load_schema(s);
    std::ifstream in(extract);
    if (!in) return {Outcome::Fail, std::string("cannot read ") + extract};
    const auto parsed = parse_trade_records(in, schema, CalorieTable::defaults());
    const auto net = aggregate_staples(parsed.flows, 2022);
    if (net.node_count() < 10) return {Outcome::Fail, "fewer than 10 economies trade in 2022"};

    const auto tables = compute_all_rankings(net);
    auto rho = [&](Metric a, Metric b) {
        return spearman(tables[static_cast<std::size_t>(a)].scores, tables[static_cast<std::size_t>(b)].scores).rho;
    };
    for (Metric m : kAllMetrics) {
        if (m == Metric::CC) continue;
        const double r = rho(Metric::CC, m);
        check.expect(r < 0.0, "CC-" + std::string(metric_name(m)) + " rho " + fmt(r));
    }
    const double id_ic = rho(Metric::ID, Metric::IC), od_oc = rho(Metric::OD, Metric::OC);
    check.expect(id_ic > 0.8, "ID-IC rho " + fmt(id_ic));
    check.expect(od_oc > 0.8, "OD-OC rho " + fmt(od_oc));
    return check.verdict(std::to_string(net.node_count()) + " economies; CC negative with all; ID-IC " + fmt(id_ic) +
                         ", OD-OC " + fmt(od_oc));
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"centrality oracle suite", centrality_oracles},
        {"spectral oracle suite", spectral_oracles},
        {"mutual-information conservation", mi_conservation},
        {"shock analytics", shock_analytics},
        {"shock invariants", shock_invariants},
        {"staple layers less robust than the aggregate", staple_layers},
        {"statistics oracle suite", statistics_oracles},
        {"metric correlation pattern on 2022 trade data", paper_table3},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {Outcome::Fail, std::string("exception: ") + e.what()};
        }
        const char* label = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Skip ? "SKIP" : "FAIL";
        if (v.outcome == Outcome::Fail) ++failed;
        std::cout << label << " criterion " << i + 1 << " (" << criteria[i].first << "): " << v.detail << '\n';
    }
    return failed == 0 ? 0 : 1;
}
