#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fsn/determinants.hpp"

namespace fsn {

/// Least squares with intercept, classical standard errors and two-sided t
/// p-values (df = n - k - 1). Requires n > k + 1; a rank-deficient design
/// throws SingularDesign naming the dependent columns.
RegressionReport ols(const DeterminantsTable& table, const std::string& target,
                     const std::vector<std::string>& features);
RegressionReport ols(const Dataset& data, const std::string& target);

struct StepwiseOptions {
    double p_enter = 0.05;
    double p_remove = 0.10;
    int max_steps = 200;
};

/// Bidirectional selection: add the most significant candidate with
/// p < p_enter, then drop the least significant retained variable with
/// p > p_remove, until neither move applies. Reports OLS on the final subset
/// plus the add/drop trace. p_enter > p_remove throws InvalidArgument.
RegressionReport stepwise(const DeterminantsTable& table, const std::string& target,
                          const std::vector<std::string>& features,
                          const StepwiseOptions& options = {});

/// Closed-form ridge on centred data: the intercept is not penalized.
/// Features are used as given (standardize beforehand).
RegressionReport ridge(const DeterminantsTable& table, const std::string& target,
                       const std::vector<std::string>& features, double lambda);
RegressionReport ridge(const Dataset& data, const std::string& target, double lambda);

struct RidgeCvPoint {
    double lambda = 0.0;
    double loo_mse = 0.0;
};

/// Leave-one-out mean squared error for each lambda via the hat-matrix
/// shortcut, and the lambda with the smallest error (first on ties).
struct RidgeCvResult {
    std::vector<RidgeCvPoint> path;
    double best_lambda = 0.0;
};

RidgeCvResult ridge_loocv(const Dataset& data, std::span<const double> lambdas);

}  // namespace fsn
