#include "fsn/determinants.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>

#include "fsn/csv.hpp"
#include "fsn/errors.hpp"
#include "fsn/stats.hpp"

namespace fsn {

DeterminantsTable::DeterminantsTable(std::vector<int> years, std::vector<std::string> names,
                                     std::vector<std::vector<double>> columns)
    : years_(std::move(years)), names_(std::move(names)), columns_(std::move(columns)) {
    if (names_.size() != columns_.size()) throw InvalidArgument("column name count mismatch");
    for (const auto& c : columns_) {
        if (c.size() != years_.size()) throw InvalidArgument("column length mismatch");
    }
}

bool DeterminantsTable::has(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& DeterminantsTable::column(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw InvalidArgument("unknown column '" + std::string(name) + "'");
    return columns_[static_cast<std::size_t>(it - names_.begin())];
}

void DeterminantsTable::add_column(std::string name, std::vector<double> values) {
    if (values.size() != years_.size()) throw InvalidArgument("column length mismatch");
    if (has(name)) throw InvalidArgument("duplicate column '" + name + "'");
    names_.push_back(std::move(name));
    columns_.push_back(std::move(values));
}

DeterminantsTable DeterminantsTable::standardized() const {
    DeterminantsTable out;
    out.years_ = years_;
    out.names_ = names_;
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        std::vector<double> present;
        for (double v : columns_[c]) {
            if (!std::isnan(v)) present.push_back(v);
        }
        const auto z = standardize(present, names_[c]);
        std::vector<double> col(columns_[c].size(), std::nan(""));
        std::size_t k = 0;
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (!std::isnan(columns_[c][r])) col[r] = z[k++];
        }
        out.columns_.push_back(std::move(col));
    }
    return out;
}

DeterminantsTable read_determinants_csv(std::istream& in, const std::string& source_name) {
    CsvReader reader(in);
    std::vector<std::string> header;
    if (!reader.next(header)) throw ParseError(source_name + ": empty table", 1);
    std::optional<std::size_t> year_col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        header[i] = std::string(trim(header[i]));
        if (to_lower(header[i]) == "year") year_col = i;
    }
    if (!year_col) throw ParseError(source_name + ": missing 'year' column", 1, "year");

    std::vector<int> years;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i != *year_col) names.push_back(header[i]);
    }
    std::vector<std::vector<double>> columns(names.size());
    std::vector<std::string> row;
    while (reader.next(row)) {
        const auto fail = [&](const std::string& col) {
            return ParseError(source_name + ":" + std::to_string(reader.line()) + ": bad value in '" +
                                  col + "'",
                              reader.line(), col);
        };
        auto y = *year_col < row.size() ? parse_integer(row[*year_col]) : std::nullopt;
        if (!y) throw fail("year");
        years.push_back(static_cast<int>(*y));
        std::size_t c = 0;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i == *year_col) continue;
            const std::string_view cell = i < row.size() ? trim(row[i]) : std::string_view{};
            const std::string lowered = to_lower(cell);
            if (cell.empty() || lowered == "na" || lowered == "nan") {
                columns[c].push_back(std::nan(""));
            } else {
                auto v = parse_number(cell);
                if (!v) throw fail(header[i]);
                columns[c].push_back(*v);
            }
            ++c;
        }
    }
    return DeterminantsTable(std::move(years), std::move(names), std::move(columns));
}

DeterminantsTable load_determinants_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open table " + path.string());
    return read_determinants_csv(in, path.string());
}

Dataset complete_cases(const DeterminantsTable& table, const std::string& target,
                       const std::vector<std::string>& features) {
    const auto& y = table.column(target);
    std::vector<const std::vector<double>*> cols;
    for (const auto& f : features) {
        if (f == target) throw InvalidArgument("feature '" + f + "' is the target");
        cols.push_back(&table.column(f));
    }
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < table.rows(); ++r) {
        bool ok = !std::isnan(y[r]);
        for (const auto* c : cols) ok = ok && !std::isnan((*c)[r]);
        if (ok) keep.push_back(r);
    }
    Dataset d;
    d.features = features;
    d.dropped_rows = table.rows() - keep.size();
    d.x.resize(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(cols.size()));
    d.y.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const auto r = keep[i];
        d.years.push_back(table.years()[r]);
        d.y(static_cast<Eigen::Index>(i)) = y[r];
        for (std::size_t c = 0; c < cols.size(); ++c) {
            d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = (*cols[c])[r];
        }
    }
    return d;
}

std::string_view model_name(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::Ols: return "ols";
        case ModelKind::Stepwise: return "stepwise";
        case ModelKind::Ridge: return "ridge";
        case ModelKind::RandomForest: return "rf";
    }
    return "?";
}

const Coefficient* RegressionReport::coefficient(std::string_view feature) const {
    for (const auto& c : coefficients) {
        if (c.feature == feature) return &c;
    }
    return nullptr;
}

std::optional<double> RegressionReport::importance(std::string_view feature) const {
    for (const auto& [name, value] : importances) {
        if (name == feature) return value;
    }
    return std::nullopt;
}

namespace {

nlohmann::json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

nlohmann::json coefficient_json(const Coefficient& c) {
    return {{"feature", c.feature},
            {"estimate", number_or_null(c.estimate)},
            {"std_error", number_or_null(c.std_error)},
            {"p_value", number_or_null(c.p_value)}};
}

}  // namespace

nlohmann::json RegressionReport::to_json() const {
    nlohmann::json j;
    j["model"] = std::string(model_name(model));
    j["target"] = target;
    j["features"] = features;
    j["observations"] = observations;
    j["dropped_rows"] = dropped_rows;
    j["r_squared"] = number_or_null(r_squared);
    if (model != ModelKind::RandomForest) {
        j["intercept"] = coefficient_json(intercept);
        j["coefficients"] = nlohmann::json::array();
        for (const auto& c : coefficients) j["coefficients"].push_back(coefficient_json(c));
        j["std_error_kind"] = std_error_kind;
    }
    if (model == ModelKind::Stepwise) {
        j["selected"] = selected;
        j["trace"] = nlohmann::json::array();
        for (const auto& s : trace) {
            j["trace"].push_back(
                {{"action", s.action}, {"feature", s.feature}, {"p_value", number_or_null(s.p_value)}});
        }
    }
    if (model == ModelKind::Ridge) j["lambda"] = lambda;
    if (model == ModelKind::RandomForest) {
        j["importances"] = nlohmann::json::object();
        for (const auto& [name, value] : importances) j["importances"][name] = value;
    }
    return j;
}

}  // namespace fsn
