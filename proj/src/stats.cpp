#include "fsn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "fsn/errors.hpp"

namespace fsn {

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::vector<double> standardize(std::span<const double> values, const std::string& name) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.size() < 2 || sorted.front() == sorted.back()) {
        throw DegenerateFeature("column '" + name + "' needs at least two distinct values", name);
    }
    const double m = mean(values);
    const double sd = sample_sd(values);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - m) / sd;
    return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double two_sided_t_p_value(double t, double degrees_of_freedom) {
    if (std::isnan(t) || !(degrees_of_freedom > 0.0)) return std::nan("");
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist(degrees_of_freedom);
    return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InvalidArgument("correlation series differ in length");
    if (x.size() < 3) throw InvalidArgument("correlation needs at least three observations");
}

double correlation_coefficient(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nan("");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double t_approx_p(double rho, std::size_t n) {
    if (std::isnan(rho)) return std::nan("");
    if (std::abs(rho) >= 1.0) return 0.0;
    const double df = static_cast<double>(n) - 2.0;
    return two_sided_t_p_value(rho * std::sqrt(df / (1.0 - rho * rho)), df);
}

}  // namespace

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    Correlation c;
    c.n = x.size();
    c.rho = correlation_coefficient(x, y);
    c.p_value = t_approx_p(c.rho, c.n);
    return c;
}

namespace {

bool integral(std::span<const double> ranks) {
    return std::all_of(ranks.begin(), ranks.end(), [](double r) { return r == std::floor(r); });
}

// Without ties, 1 - 6 sum d^2 / (n (n^2 - 1)) from integer sums; Pearson on
// the ranks otherwise.
double rank_correlation(std::span<const double> rx, std::span<const double> ry, bool untied) {
    if (!untied) return correlation_coefficient(rx, ry);
    double d2 = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
    const double n = static_cast<double>(rx.size());
    return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

}  // namespace

Correlation spearman(std::span<const double> x, std::span<const double> y) {
    check_pair(x, y);
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const bool untied = integral(rx) && integral(ry);
    Correlation c;
    c.n = x.size();
    c.rho = rank_correlation(rx, ry, untied);
    if (std::isnan(c.rho)) {
        c.p_value = std::nan("");
        return c;
    }
    if (c.n <= 10) {
        std::vector<std::size_t> perm(c.n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::vector<double> permuted(c.n);
        const double observed = std::abs(c.rho) - 1e-12;
        std::size_t extreme = 0, total = 0;
        do {
            for (std::size_t i = 0; i < c.n; ++i) permuted[i] = ry[perm[i]];
            if (std::abs(rank_correlation(rx, permuted, untied)) >= observed) ++extreme;
            ++total;
        } while (std::next_permutation(perm.begin(), perm.end()));
        c.p_value = static_cast<double>(extreme) / static_cast<double>(total);
        c.exact = true;
    } else {
        c.p_value = t_approx_p(c.rho, c.n);
    }
    return c;
}

}  // namespace fsn
