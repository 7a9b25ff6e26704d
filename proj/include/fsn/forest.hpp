#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fsn/determinants.hpp"

namespace fsn {

struct ForestOptions {
    int trees = 500;
    int max_depth = 0;           // 0 = unbounded
    int min_leaf = 2;
    int features_per_split = 0;  // 0 = ceil(d / 3)
    std::uint64_t seed = 0;
    unsigned jobs = 1;
};

/// Bagged CART regression trees with random feature subsets per split.
class RegressionForest {
public:
    /// Throws InsufficientData for fewer than 5 rows.
    static RegressionForest fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                const ForestOptions& options);

    double predict(const Eigen::VectorXd& row) const;

    /// Mean decrease in impurity per feature, normalized to sum to 1.
    const std::vector<double>& importances() const noexcept { return importances_; }
    /// Out-of-bag R^2 (NaN when no sample was ever out of bag).
    double oob_r_squared() const noexcept { return oob_r_squared_; }

    struct Node {
        int feature = -1;  // -1 for leaves
        double threshold = 0.0;
        double value = 0.0;
        int left = -1;
        int right = -1;
    };
    using Tree = std::vector<Node>;

private:
    std::vector<Tree> trees_;
    std::vector<double> importances_;
    double oob_r_squared_ = 0.0;
};

RegressionReport random_forest_importance(const DeterminantsTable& table, const std::string& target,
                                          const std::vector<std::string>& features,
                                          const ForestOptions& options = {});

}  // namespace fsn
