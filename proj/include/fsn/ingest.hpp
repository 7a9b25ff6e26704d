#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fsn/graph.hpp"
#include "fsn/trade_flow.hpp"
#include "json.hpp"

namespace fsn {

/// Kilocalories per tonne for each staple.
class CalorieTable {
public:
    /// wheat 3.34e6, rice (milled) 3.60e6, maize 3.65e6, soybeans 4.16e6.
    static CalorieTable defaults();

    double coefficient(Crop crop) const { return kcal_[static_cast<std::size_t>(crop)]; }
    /// Throws InvalidArgument unless `kcal_per_tonne` is finite and positive.
    void set(Crop crop, double kcal_per_tonne);

private:
    std::array<double, 4> kcal_{};
};

/// Reads `crop=kcal_per_tonne` lines over the defaults. Unknown crops and
/// non-positive values are ParseErrors.
CalorieTable read_calorie_table(std::istream& in, const std::string& source_name);
CalorieTable load_calorie_table(const std::filesystem::path& path);

/// Logical-to-physical column mapping for raw bilateral trade tables.
struct TradeSchema {
    char delimiter = ',';
    std::string reporter = "reporter";
    std::string partner = "partner";
    std::string item = "item";
    std::string year = "year";
    std::string unit = "unit";
    std::string value = "value";
    /// Optional flow-direction column. When set, only rows whose value is one
    /// of `export_elements` are kept; import-reported mirrors are rejected.
    std::string element;
    std::vector<std::string> export_elements = {"Export Quantity", "Export"};
    std::vector<std::string> tonne_units = {"tonnes", "t", "tonne", "tons"};
    std::map<Crop, std::vector<std::string>> item_labels = {
        {Crop::Wheat, {"Wheat"}},
        {Crop::Rice, {"Rice", "Rice, milled"}},
        {Crop::Maize, {"Maize", "Maize (corn)"}},
        {Crop::Soybeans, {"Soybeans", "Soya beans"}},
    };

    std::optional<Crop> classify_item(std::string_view label) const;
};

/// Keys: reporter, partner, item, year, unit, value, element, delimiter
/// (`comma`, `tab`, `semicolon` or a single character), export_elements and
/// units (`;`-separated), items.<crop> (`;`-separated labels).
TradeSchema read_schema(std::istream& in, const std::string& source_name);
TradeSchema load_schema(const std::filesystem::path& path);

struct RejectionSummary {
    std::size_t rows_read = 0;
    std::size_t rows_accepted = 0;
    std::map<std::string, std::size_t> rejections;

    std::size_t rejected() const noexcept { return rows_read - rows_accepted; }
    nlohmann::json to_json() const;
};

struct ParsedTrade {
    std::vector<TradeFlow> flows;
    RejectionSummary summary;
};

/// Parses a raw trade table. Rows with a non-tonne unit, value <= 0, missing
/// fields, unparseable numbers, identical partners, mirror elements or items
/// outside the four staples are dropped and counted by reason. A missing
/// header or required column is a ParseError.
ParsedTrade parse_trade_records(std::istream& in, const TradeSchema& schema,
                                const CalorieTable& calories);

/// Edge weight per ordered pair = kilocalories summed over all staples in `year`.
SupplyNetwork aggregate_staples(std::span<const TradeFlow> flows, int year);
SupplyNetwork single_staple_network(std::span<const TradeFlow> flows, Crop crop, int year);

/// Years present in `flows`, ascending.
std::vector<int> flow_years(std::span<const TradeFlow> flows);

/// Normalized flow table: exporter,importer,crop,year,tonnes,kcal
void write_flows_csv(std::ostream& out, std::span<const TradeFlow> flows);
std::vector<TradeFlow> read_flows_csv(std::istream& in, const std::string& source_name);

/// Edge list: src,dst,kcal
void write_network_csv(std::ostream& out, const SupplyNetwork& net);
SupplyNetwork read_network_csv(std::istream& in, int year, const std::string& source_name);
SupplyNetwork load_network_csv(const std::filesystem::path& path, int year = 0);

}  // namespace fsn
