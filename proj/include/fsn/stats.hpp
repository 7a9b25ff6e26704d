#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fsn {

struct Correlation {
    double rho = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
    bool exact = false;  // p-value from full permutation enumeration
};

/// Ranks 1..n with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation with a two-sided t-test p-value (df = n - 2).
Correlation pearson(std::span<const double> x, std::span<const double> y);

/// Spearman's rho (Pearson on average ranks). The two-sided p-value is exact
/// by permutation for n <= 10 and from t = rho sqrt((n-2)/(1-rho^2)) above.
/// Throws InvalidArgument on length mismatch or n < 3.
Correlation spearman(std::span<const double> x, std::span<const double> y);

/// Two-sided Student-t tail probability P(|T| >= |t|).
double two_sided_t_p_value(double t, double degrees_of_freedom);

/// Returns (x - mean) / sample sigma. Throws DegenerateFeature (naming
/// `name`) when fewer than two distinct values are present.
std::vector<double> standardize(std::span<const double> values, const std::string& name);

double mean(std::span<const double> values);
/// Sample (n - 1) standard deviation.
double sample_sd(std::span<const double> values);

}  // namespace fsn
