#include "fsn/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "fsn/csv.hpp"
#include "fsn/errors.hpp"

namespace fsn {

std::string_view crop_name(Crop crop) noexcept {
    switch (crop) {
        case Crop::Wheat: return "wheat";
        case Crop::Rice: return "rice";
        case Crop::Maize: return "maize";
        case Crop::Soybeans: return "soybeans";
    }
    return "unknown";
}

std::optional<Crop> parse_crop(std::string_view name) {
    const std::string key = to_lower(trim(name));
    for (Crop c : kStaples) {
        if (crop_name(c) == key) return c;
    }
    return std::nullopt;
}

CalorieTable CalorieTable::defaults() {
    CalorieTable t;
    t.kcal_ = {3.34e6, 3.60e6, 3.65e6, 4.16e6};
    return t;
}

void CalorieTable::set(Crop crop, double kcal_per_tonne) {
    if (!(kcal_per_tonne > 0.0) || !std::isfinite(kcal_per_tonne)) {
        throw InvalidArgument("calorie coefficient for " + std::string(crop_name(crop)) +
                              " must be positive");
    }
    kcal_[static_cast<std::size_t>(crop)] = kcal_per_tonne;
}

CalorieTable read_calorie_table(std::istream& in, const std::string& source_name) {
    CalorieTable table = CalorieTable::defaults();
    for (const auto& [key, value] : read_key_values(in, source_name)) {
        auto crop = parse_crop(key);
        if (!crop) throw ParseError(source_name + ": unknown crop '" + key + "'", 0, key);
        auto kcal = parse_number(value);
        if (!kcal || !(*kcal > 0.0)) {
            throw ParseError(source_name + ": coefficient for '" + key + "' must be positive", 0,
                             key);
        }
        table.set(*crop, *kcal);
    }
    return table;
}

CalorieTable load_calorie_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open calorie table " + path.string());
    return read_calorie_table(in, path.string());
}

namespace {

bool iequals(std::string_view a, std::string_view b) {
    return to_lower(trim(a)) == to_lower(trim(b));
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto semi = text.find(';', start);
        if (semi == std::string_view::npos) semi = text.size();
        auto piece = trim(text.substr(start, semi - start));
        if (!piece.empty()) out.emplace_back(piece);
        start = semi + 1;
    }
    return out;
}

}  // namespace

std::optional<Crop> TradeSchema::classify_item(std::string_view label) const {
    for (const auto& [crop, labels] : item_labels) {
        for (const auto& l : labels) {
            if (iequals(l, label)) return crop;
        }
    }
    return std::nullopt;
}

TradeSchema read_schema(std::istream& in, const std::string& source_name) {
    TradeSchema schema;
    for (const auto& [key, value] : read_key_values(in, source_name)) {
        if (key == "reporter") schema.reporter = value;
        else if (key == "partner") schema.partner = value;
        else if (key == "item") schema.item = value;
        else if (key == "year") schema.year = value;
        else if (key == "unit") schema.unit = value;
        else if (key == "value") schema.value = value;
        else if (key == "element") schema.element = value;
        else if (key == "export_elements") schema.export_elements = split_list(value);
        else if (key == "units") schema.tonne_units = split_list(value);
        else if (key == "delimiter") {
            const std::string d = to_lower(value);
            if (d == "comma" || d == ",") schema.delimiter = ',';
            else if (d == "tab" || d == "\\t") schema.delimiter = '\t';
            else if (d == "semicolon") schema.delimiter = ';';
            else if (value.size() == 1) schema.delimiter = value[0];
            else throw ParseError(source_name + ": unsupported delimiter '" + value + "'", 0, key);
        } else if (key.rfind("items.", 0) == 0) {
            auto crop = parse_crop(key.substr(6));
            if (!crop) throw ParseError(source_name + ": unknown crop in '" + key + "'", 0, key);
            schema.item_labels[*crop] = split_list(value);
        } else {
            throw ParseError(source_name + ": unknown schema key '" + key + "'", 0, key);
        }
    }
    return schema;
}

TradeSchema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open schema " + path.string());
    return read_schema(in, path.string());
}

nlohmann::json RejectionSummary::to_json() const {
    nlohmann::json j;
    j["rows_read"] = rows_read;
    j["rows_accepted"] = rows_accepted;
    j["rejections"] = nlohmann::json::object();
    for (const auto& [reason, count] : rejections) j["rejections"][reason] = count;
    return j;
}

ParsedTrade parse_trade_records(std::istream& in, const TradeSchema& schema,
                                const CalorieTable& calories) {
    if (!in) throw ParseError("input stream is not readable");
    CsvReader reader(in, schema.delimiter);
    std::vector<std::string> header;
    if (!reader.next(header)) throw ParseError("input is empty (no header row)", 1);

    auto locate = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (iequals(header[i], name)) return i;
        }
        if (required) {
            throw ParseError("missing required column '" + name + "' in header", reader.line(),
                             name);
        }
        return std::nullopt;
    };
    const std::size_t reporter = *locate(schema.reporter, true);
    const std::size_t partner = *locate(schema.partner, true);
    const std::size_t item = *locate(schema.item, true);
    const std::size_t year = *locate(schema.year, true);
    const std::size_t unit = *locate(schema.unit, true);
    const std::size_t value = *locate(schema.value, true);
    std::optional<std::size_t> element;
    if (!schema.element.empty()) element = *locate(schema.element, true);

    ParsedTrade out;
    auto& summary = out.summary;
    auto reject = [&](const char* reason) { ++summary.rejections[reason]; };

    std::vector<std::string> row;
    while (reader.next(row)) {
        ++summary.rows_read;
        auto field = [&](std::size_t i) -> std::string_view {
            return i < row.size() ? trim(row[i]) : std::string_view{};
        };
        if (field(reporter).empty() || field(partner).empty() || field(item).empty() ||
            field(year).empty() || field(unit).empty() || field(value).empty() ||
            (element && field(*element).empty())) {
            reject("missing_field");
            continue;
        }
        if (element) {
            const auto el = field(*element);
            const bool is_export =
                std::any_of(schema.export_elements.begin(), schema.export_elements.end(),
                            [&](const std::string& e) { return iequals(e, el); });
            if (!is_export) {
                reject("mirror_record");
                continue;
            }
        }
        const auto crop = schema.classify_item(field(item));
        if (!crop) {
            reject("non_staple_item");
            continue;
        }
        const auto u = field(unit);
        if (std::none_of(schema.tonne_units.begin(), schema.tonne_units.end(),
                         [&](const std::string& t) { return iequals(t, u); })) {
            reject("non_tonne_unit");
            continue;
        }
        const auto y = parse_integer(field(year));
        const auto v = parse_number(field(value));
        if (!y || !v || !std::isfinite(*v)) {
            reject("malformed_number");
            continue;
        }
        if (*v <= 0.0) {
            reject("non_positive_value");
            continue;
        }
        std::string exporter = to_upper(field(reporter));
        std::string importer = to_upper(field(partner));
        if (exporter == importer) {
            reject("self_flow");
            continue;
        }
        TradeFlow flow;
        flow.exporter = std::move(exporter);
        flow.importer = std::move(importer);
        flow.crop = *crop;
        flow.year = static_cast<int>(*y);
        flow.quantity = *v;
        flow.kilocalories = *v * calories.coefficient(*crop);
        out.flows.push_back(std::move(flow));
        ++summary.rows_accepted;
    }
    return out;
}

SupplyNetwork aggregate_staples(std::span<const TradeFlow> flows, int year) {
    return build_network(flows, year);
}

SupplyNetwork single_staple_network(std::span<const TradeFlow> flows, Crop crop, int year) {
    NetworkBuilder builder(year);
    for (const auto& f : flows) {
        if (f.year == year && f.crop == crop) builder.add_flow(f.exporter, f.importer, f.kilocalories);
    }
    return builder.build();
}

std::vector<int> flow_years(std::span<const TradeFlow> flows) {
    std::set<int> years;
    for (const auto& f : flows) years.insert(f.year);
    return {years.begin(), years.end()};
}

void write_flows_csv(std::ostream& out, std::span<const TradeFlow> flows) {
    out << "exporter,importer,crop,year,tonnes,kcal\n";
    for (const auto& f : flows) {
        out << csv_field(f.exporter) << ',' << csv_field(f.importer) << ',' << crop_name(f.crop)
            << ',' << f.year << ',' << format_number(f.quantity) << ','
            << format_number(f.kilocalories) << '\n';
    }
}

std::vector<TradeFlow> read_flows_csv(std::istream& in, const std::string& source_name) {
    CsvReader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row)) throw ParseError(source_name + ": empty flow table", 1);
    const std::vector<std::string> expected = {"exporter", "importer", "crop",
                                               "year",     "tonnes",   "kcal"};
    if (row.size() < expected.size() ||
        !std::equal(expected.begin(), expected.end(), row.begin(),
                    [](const std::string& a, const std::string& b) { return iequals(a, b); })) {
        throw ParseError(source_name + ": expected header " +
                             "exporter,importer,crop,year,tonnes,kcal",
                         1);
    }
    std::vector<TradeFlow> flows;
    while (reader.next(row)) {
        const auto fail = [&](const std::string& col) {
            return ParseError(source_name + ":" + std::to_string(reader.line()) + ": bad '" + col +
                                  "'",
                              reader.line(), col);
        };
        if (row.size() < 6) throw fail("row");
        TradeFlow f;
        f.exporter = to_upper(trim(row[0]));
        f.importer = to_upper(trim(row[1]));
        auto crop = parse_crop(row[2]);
        if (!crop) throw fail("crop");
        f.crop = *crop;
        auto y = parse_integer(row[3]);
        if (!y) throw fail("year");
        f.year = static_cast<int>(*y);
        auto q = parse_number(row[4]);
        auto k = parse_number(row[5]);
        if (!q) throw fail("tonnes");
        if (!k) throw fail("kcal");
        f.quantity = *q;
        f.kilocalories = *k;
        flows.push_back(std::move(f));
    }
    return flows;
}

void write_network_csv(std::ostream& out, const SupplyNetwork& net) {
    out << "src,dst,kcal\n";
    std::vector<bool> touched(net.node_count(), false);
    for (const auto& e : net.edges()) {
        touched[e.source] = touched[e.target] = true;
        out << csv_field(net.code(e.source)) << ',' << csv_field(net.code(e.target)) << ','
            << format_number(e.weight) << '\n';
    }
    // Isolated nodes are written as rows with empty dst and kcal.
    for (NodeId v = 0; v < net.node_count(); ++v) {
        if (!touched[v]) out << csv_field(net.code(v)) << ",,\n";
    }
}

SupplyNetwork read_network_csv(std::istream& in, int year, const std::string& source_name) {
    CsvReader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row)) throw ParseError(source_name + ": empty network file", 1);
    if (row.size() < 3 || !iequals(row[0], "src") || !iequals(row[1], "dst") ||
        !iequals(row[2], "kcal")) {
        throw ParseError(source_name + ": expected header src,dst,kcal", 1);
    }
    NetworkBuilder builder(year);
    while (reader.next(row)) {
        if (row.size() < 3) {
            throw ParseError(source_name + ":" + std::to_string(reader.line()) + ": short row",
                             reader.line());
        }
        if (trim(row[0]).empty()) {
            throw ParseError(source_name + ":" + std::to_string(reader.line()) + ": empty src",
                             reader.line(), "src");
        }
        if (trim(row[1]).empty() && trim(row[2]).empty()) {
            builder.add_node(row[0]);
            continue;
        }
        auto w = parse_number(row[2]);
        if (!w || !std::isfinite(*w) || *w < 0.0) {
            throw ParseError(source_name + ":" + std::to_string(reader.line()) + ": bad kcal",
                             reader.line(), "kcal");
        }
        builder.add_node(row[0]);
        builder.add_node(row[1]);
        builder.add_flow(row[0], row[1], *w);
    }
    return builder.build();
}

SupplyNetwork load_network_csv(const std::filesystem::path& path, int year) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file " + path.string());
    return read_network_csv(in, year, path.string());
}

}  // namespace fsn
