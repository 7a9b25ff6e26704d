#include "fsn/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsn/errors.hpp"
#include "fsn/stats.hpp"

namespace fsn {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double r_squared(const VectorXd& y, const VectorXd& residuals) {
    const double rss = residuals.squaredNorm();
    const double tss = (y.array() - y.mean()).matrix().squaredNorm();
    if (tss == 0.0) return rss == 0.0 ? 1.0 : 0.0;
    return 1.0 - rss / tss;
}

struct OlsFit {
    VectorXd beta;  // intercept first
    VectorXd std_error;
    VectorXd p_value;
    double r2 = 0.0;
};

OlsFit fit_ols(const MatrixXd& x, const VectorXd& y, const std::vector<std::string>& names) {
    const Index n = x.rows();
    const Index k = x.cols();
    if (n <= k + 1) {
        throw InsufficientData("OLS needs more rows (" + std::to_string(n) +
                               ") than features + 1 (" + std::to_string(k + 1) + ")");
    }
    MatrixXd design(n, k + 1);
    design.col(0).setOnes();
    design.rightCols(k) = x;

    Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < k + 1) {
        std::vector<std::string> dependent;
        const auto& perm = qr.colsPermutation().indices();
        for (Index i = qr.rank(); i < k + 1; ++i) {
            const Index col = perm(i);
            dependent.push_back(col == 0 ? "(intercept)" : names[static_cast<std::size_t>(col - 1)]);
        }
        std::string list;
        for (const auto& d : dependent) list += (list.empty() ? "" : ", ") + d;
        throw SingularDesign("design matrix is rank deficient; dependent columns: " + list,
                             std::move(dependent));
    }

    OlsFit fit;
    fit.beta = qr.solve(y);
    const VectorXd residuals = y - design * fit.beta;
    const double df = static_cast<double>(n - k - 1);
    const double sigma2 = residuals.squaredNorm() / df;

    // (X^T X)^{-1} = P R^{-1} R^{-T} P^T
    const MatrixXd r = qr.matrixR().topLeftCorner(k + 1, k + 1).triangularView<Eigen::Upper>();
    const MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(k + 1, k + 1));
    const MatrixXd cov_perm = r_inv * r_inv.transpose();
    const auto& p = qr.colsPermutation();
    const MatrixXd cov = p * cov_perm * p.transpose();

    fit.std_error.resize(k + 1);
    fit.p_value.resize(k + 1);
    for (Index i = 0; i < k + 1; ++i) {
        const double se = std::sqrt(std::max(0.0, sigma2 * cov(i, i)));
        fit.std_error(i) = se;
        if (se == 0.0) {
            fit.p_value(i) = fit.beta(i) == 0.0 ? 1.0 : 0.0;
        } else {
            fit.p_value(i) = two_sided_t_p_value(fit.beta(i) / se, df);
        }
    }
    fit.r2 = r_squared(y, residuals);
    return fit;
}

RegressionReport report_from(const OlsFit& fit, ModelKind kind, const std::string& target,
                             const std::vector<std::string>& names, const Dataset& data) {
    RegressionReport report;
    report.model = kind;
    report.target = target;
    report.features = names;
    report.intercept = {"(intercept)", fit.beta(0), fit.std_error(0), fit.p_value(0)};
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto j = static_cast<Index>(i + 1);
        report.coefficients.push_back({names[i], fit.beta(j), fit.std_error(j), fit.p_value(j)});
    }
    report.r_squared = fit.r2;
    report.observations = static_cast<std::size_t>(data.y.size());
    report.dropped_rows = data.dropped_rows;
    return report;
}

MatrixXd select_columns(const MatrixXd& x, const std::vector<Index>& cols) {
    MatrixXd out(x.rows(), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Index>(i)) = x.col(cols[i]);
    return out;
}

std::vector<std::string> names_of(const std::vector<std::string>& all, const std::vector<Index>& cols) {
    std::vector<std::string> out;
    for (Index c : cols) out.push_back(all[static_cast<std::size_t>(c)]);
    return out;
}

}  // namespace

RegressionReport ols(const Dataset& data, const std::string& target) {
    const auto fit = fit_ols(data.x, data.y, data.features);
    return report_from(fit, ModelKind::Ols, target, data.features, data);
}

RegressionReport ols(const DeterminantsTable& table, const std::string& target,
                     const std::vector<std::string>& features) {
    return ols(complete_cases(table, target, features), target);
}

RegressionReport stepwise(const DeterminantsTable& table, const std::string& target,
                          const std::vector<std::string>& features, const StepwiseOptions& options) {
    if (!(options.p_enter > 0.0 && options.p_enter < 1.0) ||
        !(options.p_remove > 0.0 && options.p_remove < 1.0)) {
        throw InvalidArgument("stepwise thresholds must lie in (0, 1)");
    }
    if (options.p_enter > options.p_remove) {
        throw InvalidArgument("p_enter must not exceed p_remove (selection could oscillate)");
    }
    const Dataset data = complete_cases(table, target, features);
    const Index k = data.x.cols();
    const Index n = data.x.rows();

    std::vector<Index> selected;
    std::vector<StepwiseStep> trace;
    for (int step = 0; step < options.max_steps; ++step) {
        bool changed = false;

        // Forward: most significant admissible candidate.
        Index best = -1;
        double best_p = options.p_enter;
        for (Index c = 0; c < k; ++c) {
            if (std::find(selected.begin(), selected.end(), c) != selected.end()) continue;
            if (n <= static_cast<Index>(selected.size()) + 2) break;
            auto trial = selected;
            trial.push_back(c);
            try {
                const auto fit = fit_ols(select_columns(data.x, trial), data.y,
                                         names_of(data.features, trial));
                const double p = fit.p_value(static_cast<Index>(trial.size()));
                if (p < best_p) {
                    best_p = p;
                    best = c;
                }
            } catch (const SingularDesign&) {
            }
        }
        if (best >= 0) {
            selected.push_back(best);
            trace.push_back({"add", data.features[static_cast<std::size_t>(best)], best_p});
            changed = true;
        }

        // Backward: least significant retained variable.
        if (!selected.empty()) {
            const auto fit = fit_ols(select_columns(data.x, selected), data.y,
                                     names_of(data.features, selected));
            Index worst = -1;
            double worst_p = options.p_remove;
            for (std::size_t i = 0; i < selected.size(); ++i) {
                const double p = fit.p_value(static_cast<Index>(i + 1));
                if (p > worst_p) {
                    worst_p = p;
                    worst = static_cast<Index>(i);
                }
            }
            if (worst >= 0) {
                trace.push_back(
                    {"drop", data.features[static_cast<std::size_t>(selected[worst])], worst_p});
                selected.erase(selected.begin() + worst);
                changed = true;
            }
        }
        if (!changed) break;
    }

    const auto names = names_of(data.features, selected);
    const auto fit = fit_ols(select_columns(data.x, selected), data.y, names);
    auto report = report_from(fit, ModelKind::Stepwise, target, data.features, data);
    report.coefficients.clear();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto j = static_cast<Index>(i + 1);
        report.coefficients.push_back({names[i], fit.beta(j), fit.std_error(j), fit.p_value(j)});
    }
    report.selected = names;
    report.trace = std::move(trace);
    return report;
}

namespace {

struct Centred {
    MatrixXd x;
    VectorXd y;
    VectorXd x_mean;
    double y_mean = 0.0;
};

Centred centre(const Dataset& data) {
    Centred c;
    c.x_mean = data.x.colwise().mean().transpose();
    c.y_mean = data.y.mean();
    c.x = data.x.rowwise() - c.x_mean.transpose();
    c.y = data.y.array() - c.y_mean;
    return c;
}

VectorXd ridge_slopes(const Centred& c, double lambda) {
    const Index k = c.x.cols();
    if (lambda == 0.0) return c.x.colPivHouseholderQr().solve(c.y);
    const MatrixXd gram = c.x.transpose() * c.x + lambda * MatrixXd::Identity(k, k);
    return gram.ldlt().solve(c.x.transpose() * c.y);
}

}  // namespace

RegressionReport ridge(const Dataset& data, const std::string& target, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw InvalidArgument("ridge lambda must be finite and >= 0");
    }
    if (data.x.rows() < 2) throw InsufficientData("ridge needs at least two rows");
    const Centred c = centre(data);
    const VectorXd beta = ridge_slopes(c, lambda);

    RegressionReport report;
    report.model = ModelKind::Ridge;
    report.target = target;
    report.features = data.features;
    report.lambda = lambda;
    report.std_error_kind = "none";
    report.intercept = {"(intercept)", c.y_mean - c.x_mean.dot(beta), kNaN, kNaN};
    for (std::size_t i = 0; i < data.features.size(); ++i) {
        report.coefficients.push_back({data.features[i], beta(static_cast<Index>(i)), kNaN, kNaN});
    }
    report.r_squared = r_squared(data.y, c.y - c.x * beta);
    report.observations = static_cast<std::size_t>(data.y.size());
    report.dropped_rows = data.dropped_rows;
    return report;
}

RegressionReport ridge(const DeterminantsTable& table, const std::string& target,
                       const std::vector<std::string>& features, double lambda) {
    return ridge(complete_cases(table, target, features), target, lambda);
}

RidgeCvResult ridge_loocv(const Dataset& data, std::span<const double> lambdas) {
    if (lambdas.empty()) throw InvalidArgument("ridge cross-validation needs at least one lambda");
    const Index n = data.x.rows();
    if (n < 3) throw InsufficientData("ridge cross-validation needs at least three rows");
    const Centred c = centre(data);
    const Index k = c.x.cols();
    RidgeCvResult result;
    double best = std::numeric_limits<double>::infinity();
    for (double lambda : lambdas) {
        if (!(lambda >= 0.0)) throw InvalidArgument("ridge lambda must be >= 0");
        const MatrixXd gram = c.x.transpose() * c.x + lambda * MatrixXd::Identity(k, k);
        const MatrixXd solve = gram.completeOrthogonalDecomposition().pseudoInverse();
        const VectorXd beta = solve * c.x.transpose() * c.y;
        const VectorXd residuals = c.y - c.x * beta;
        double mse = 0.0;
        for (Index i = 0; i < n; ++i) {
            // Hat diagonal including the unpenalized intercept.
            const double h = c.x.row(i) * solve * c.x.row(i).transpose() + 1.0 / static_cast<double>(n);
            const double e = residuals(i) / (1.0 - h);
            mse += e * e;
        }
        mse /= static_cast<double>(n);
        result.path.push_back({lambda, mse});
        if (mse < best) {
            best = mse;
            result.best_lambda = lambda;
        }
    }
    return result;
}

}  // namespace fsn
