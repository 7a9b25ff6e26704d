#include "fsn/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fsn/errors.hpp"
#include "fsn/parallel.hpp"
#include "fsn/random.hpp"

namespace fsn {

namespace {

using Eigen::Index;

struct TreeBuilder {
    const Eigen::MatrixXd& x;
    const Eigen::VectorXd& y;
    const ForestOptions& options;
    int mtry;
    Rng rng;
    RegressionForest::Tree nodes;
    std::vector<double> importance;
    std::vector<int> features;
    std::vector<std::size_t> sorted;

    static double sse(double sum, double sum_sq, double count) {
        return std::max(0.0, sum_sq - sum * sum / count);
    }

    int grow(std::vector<std::size_t>& samples, std::size_t begin, std::size_t end, int depth) {
        const auto count = static_cast<double>(end - begin);
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const double v = y(static_cast<Index>(samples[i]));
            sum += v;
            sum_sq += v * v;
        }
        const int id = static_cast<int>(nodes.size());
        nodes.push_back({-1, 0.0, sum / count, -1, -1});

        const auto min_leaf = static_cast<std::size_t>(std::max(1, options.min_leaf));
        const double parent = sse(sum, sum_sq, count);
        if ((options.max_depth > 0 && depth >= options.max_depth) || end - begin < 2 * min_leaf ||
            parent <= 0.0) {
            return id;
        }

        // Random feature subset, visited in sampled order; first best wins ties.
        for (int i = 0; i < mtry; ++i) {
            const auto j = static_cast<std::size_t>(i) +
                           static_cast<std::size_t>(rng.below(features.size() - static_cast<std::size_t>(i)));
            std::swap(features[static_cast<std::size_t>(i)], features[j]);
        }

        int best_feature = -1;
        double best_gain = 0.0;
        double best_threshold = 0.0;
        for (int f = 0; f < mtry; ++f) {
            const Index col = features[static_cast<std::size_t>(f)];
            sorted.assign(samples.begin() + static_cast<std::ptrdiff_t>(begin),
                          samples.begin() + static_cast<std::ptrdiff_t>(end));
            std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
                return x(static_cast<Index>(a), col) < x(static_cast<Index>(b), col);
            });
            double left_sum = 0.0, left_sq = 0.0;
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                const double v = y(static_cast<Index>(sorted[i]));
                left_sum += v;
                left_sq += v * v;
                const std::size_t left_n = i + 1;
                const std::size_t right_n = sorted.size() - left_n;
                const double here = x(static_cast<Index>(sorted[i]), col);
                const double next = x(static_cast<Index>(sorted[i + 1]), col);
                if (left_n < min_leaf || right_n < min_leaf || !(here < next)) continue;
                const double gain = parent - sse(left_sum, left_sq, static_cast<double>(left_n)) -
                                    sse(sum - left_sum, sum_sq - left_sq, static_cast<double>(right_n));
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(col);
                    best_threshold = here + (next - here) / 2.0;
                }
            }
        }
        if (best_feature < 0) return id;

        auto mid_it = std::partition(
            samples.begin() + static_cast<std::ptrdiff_t>(begin),
            samples.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t s) {
                return x(static_cast<Index>(s), best_feature) <= best_threshold;
            });
        const auto mid = static_cast<std::size_t>(mid_it - samples.begin());
        importance[static_cast<std::size_t>(best_feature)] += best_gain;
        nodes[static_cast<std::size_t>(id)].feature = best_feature;
        nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
        const int left = grow(samples, begin, mid, depth + 1);
        const int right = grow(samples, mid, end, depth + 1);
        nodes[static_cast<std::size_t>(id)].left = left;
        nodes[static_cast<std::size_t>(id)].right = right;
        return id;
    }
};

double predict_tree(const RegressionForest::Tree& tree, const Eigen::VectorXd& row) {
    int id = 0;
    while (tree[static_cast<std::size_t>(id)].feature >= 0) {
        const auto& node = tree[static_cast<std::size_t>(id)];
        id = row(node.feature) <= node.threshold ? node.left : node.right;
    }
    return tree[static_cast<std::size_t>(id)].value;
}

}  // namespace

RegressionForest RegressionForest::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       const ForestOptions& options) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto d = static_cast<std::size_t>(x.cols());
    if (n < 5) throw InsufficientData("random forest needs at least 5 rows");
    if (d == 0) throw InvalidArgument("random forest needs at least one feature");
    if (options.trees < 1) throw InvalidArgument("random forest needs at least one tree");
    if (static_cast<std::size_t>(y.size()) != n) throw InvalidArgument("target length mismatch");
    int mtry = options.features_per_split > 0 ? options.features_per_split
                                              : static_cast<int>((d + 2) / 3);
    mtry = std::clamp(mtry, 1, static_cast<int>(d));

    const auto trees = static_cast<std::size_t>(options.trees);
    std::vector<Tree> grown(trees);
    std::vector<std::vector<double>> importance(trees);
    std::vector<std::vector<std::uint8_t>> in_bag(trees);
    parallel_for(trees, options.jobs, [&](std::size_t t) {
        TreeBuilder builder{x, y, options, mtry, Rng(derive_seed(options.seed, t)), {}, {}, {}, {}};
        builder.importance.assign(d, 0.0);
        builder.features.resize(d);
        std::iota(builder.features.begin(), builder.features.end(), 0);
        std::vector<std::size_t> samples(n);
        in_bag[t].assign(n, 0);
        for (auto& s : samples) {
            s = static_cast<std::size_t>(builder.rng.below(n));
            in_bag[t][s] = 1;
        }
        builder.grow(samples, 0, n, 0);
        grown[t] = std::move(builder.nodes);
        importance[t] = std::move(builder.importance);
    });

    RegressionForest forest;
    forest.trees_ = std::move(grown);
    forest.importances_.assign(d, 0.0);
    for (const auto& imp : importance) {
        for (std::size_t f = 0; f < d; ++f) forest.importances_[f] += imp[f];
    }
    const double total =
        std::accumulate(forest.importances_.begin(), forest.importances_.end(), 0.0);
    for (auto& v : forest.importances_) {
        v = total > 0.0 ? v / total : 1.0 / static_cast<double>(d);
    }

    double rss = 0.0, tss = 0.0, oob_mean = 0.0;
    std::vector<double> oob_prediction(n, 0.0);
    std::vector<std::size_t> oob_count(n, 0);
    for (std::size_t t = 0; t < trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            if (in_bag[t][i]) continue;
            oob_prediction[i] += predict_tree(forest.trees_[t], x.row(static_cast<Index>(i)).transpose());
            ++oob_count[i];
        }
    }
    std::size_t scored = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (oob_count[i] > 0) {
            oob_mean += y(static_cast<Index>(i));
            ++scored;
        }
    }
    if (scored == 0) {
        forest.oob_r_squared_ = std::numeric_limits<double>::quiet_NaN();
        return forest;
    }
    oob_mean /= static_cast<double>(scored);
    for (std::size_t i = 0; i < n; ++i) {
        if (oob_count[i] == 0) continue;
        const double yi = y(static_cast<Index>(i));
        const double e = yi - oob_prediction[i] / static_cast<double>(oob_count[i]);
        rss += e * e;
        tss += (yi - oob_mean) * (yi - oob_mean);
    }
    forest.oob_r_squared_ = tss > 0.0 ? 1.0 - rss / tss : std::numeric_limits<double>::quiet_NaN();
    return forest;
}

double RegressionForest::predict(const Eigen::VectorXd& row) const {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += predict_tree(tree, row);
    return sum / static_cast<double>(trees_.size());
}

RegressionReport random_forest_importance(const DeterminantsTable& table, const std::string& target,
                                          const std::vector<std::string>& features,
                                          const ForestOptions& options) {
    const Dataset data = complete_cases(table, target, features);
    const auto forest = RegressionForest::fit(data.x, data.y, options);
    RegressionReport report;
    report.model = ModelKind::RandomForest;
    report.target = target;
    report.features = data.features;
    report.std_error_kind = "none";
    for (std::size_t f = 0; f < data.features.size(); ++f) {
        report.importances.emplace_back(data.features[f], forest.importances()[f]);
    }
    report.r_squared = forest.oob_r_squared();
    report.observations = static_cast<std::size_t>(data.y.size());
    report.dropped_rows = data.dropped_rows;
    return report;
}

}  // namespace fsn
