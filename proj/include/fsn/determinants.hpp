#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace fsn {

/// Yearly panel: a `year` key plus named numeric columns. NaN marks a
/// missing value.
class DeterminantsTable {
public:
    DeterminantsTable() = default;
    DeterminantsTable(std::vector<int> years, std::vector<std::string> names,
                      std::vector<std::vector<double>> columns);

    std::size_t rows() const noexcept { return years_.size(); }
    const std::vector<int>& years() const noexcept { return years_; }
    const std::vector<std::string>& names() const noexcept { return names_; }
    bool has(std::string_view name) const;
    /// Throws InvalidArgument for an unknown column.
    const std::vector<double>& column(std::string_view name) const;

    void add_column(std::string name, std::vector<double> values);

    /// Every column rescaled to mean 0 and sample sigma 1 (missing values are
    /// ignored and kept). Throws DegenerateFeature for a constant column.
    DeterminantsTable standardized() const;

private:
    std::vector<int> years_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

/// Reads a CSV with a `year` column; empty cells and NA/NaN are missing.
DeterminantsTable read_determinants_csv(std::istream& in, const std::string& source_name);
DeterminantsTable load_determinants_csv(const std::filesystem::path& path);

/// Complete-case design for one fit.
struct Dataset {
    std::vector<std::string> features;
    std::vector<int> years;
    Eigen::MatrixXd x;  // rows x features
    Eigen::VectorXd y;
    std::size_t dropped_rows = 0;
};

/// Rows with any missing value among target and features are dropped and
/// counted. Throws InvalidArgument for unknown columns.
Dataset complete_cases(const DeterminantsTable& table, const std::string& target,
                       const std::vector<std::string>& features);

enum class ModelKind { Ols, Stepwise, Ridge, RandomForest };
std::string_view model_name(ModelKind kind) noexcept;

struct Coefficient {
    std::string feature;
    double estimate = 0.0;
    double std_error = 0.0;  // NaN when not estimated (ridge)
    double p_value = 0.0;    // NaN when not estimated (ridge)
};

struct StepwiseStep {
    std::string action;  // "add" or "drop"
    std::string feature;
    double p_value = 0.0;
};

struct RegressionReport {
    ModelKind model = ModelKind::Ols;
    std::string target;
    std::vector<std::string> features;
    Coefficient intercept{"(intercept)"};
    std::vector<Coefficient> coefficients;  // slopes, in selection/feature order
    std::vector<std::string> selected;      // stepwise
    std::vector<StepwiseStep> trace;        // stepwise
    double lambda = 0.0;                    // ridge
    std::vector<std::pair<std::string, double>> importances;  // random forest
    double r_squared = 0.0;  // OOB R^2 for the random forest
    std::size_t observations = 0;
    std::size_t dropped_rows = 0;
    std::string std_error_kind = "classical";

    const Coefficient* coefficient(std::string_view feature) const;
    std::optional<double> importance(std::string_view feature) const;
    nlohmann::json to_json() const;
};

}  // namespace fsn
