#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "fsn/errors.hpp"
#include "fsn/ingest.hpp"
#include "fsn/random.hpp"

using namespace fsn;

namespace {

ParsedTrade parse(const std::string& text, const TradeSchema& schema = {}) {
    std::istringstream in(text);
    return parse_trade_records(in, schema, CalorieTable::defaults());
}

TradeFlow flow(std::string from, std::string to, Crop crop, double kcal, int year = 2022) {
    TradeFlow f;
    f.exporter = std::move(from);
    f.importer = std::move(to);
    f.crop = crop;
    f.year = year;
    f.quantity = kcal;
    f.kilocalories = kcal;
    return f;
}

}  // namespace

TEST_CASE("tonnes are converted with the crop coefficient") {
    auto parsed = parse("reporter,partner,item,year,unit,value\nUSA,CHN,Soybeans,2022,tonnes,1000\n");
    REQUIRE(parsed.flows.size() == 1);
    const auto& f = parsed.flows.front();
    CHECK(f.exporter == "USA");
    CHECK(f.importer == "CHN");
    CHECK(f.crop == Crop::Soybeans);
    CHECK(f.kilocalories == 4.16e9);
    CHECK(parsed.summary.rows_accepted == 1);
}

TEST_CASE("rejected rows are counted by reason") {
    auto parsed = parse(
        "reporter,partner,item,year,unit,value\n"
        "USA,CHN,Wheat,2022,tonnes,0\n"
        "USA,CHN,Coffee,2022,tonnes,10\n"
        "USA,CHN,Wheat,2022,1000 US$,10\n"
        "USA,,Wheat,2022,tonnes,10\n"
        "USA,USA,Wheat,2022,tonnes,10\n"
        "USA,CHN,Wheat,20x2,tonnes,10\n"
        "USA,CHN,Wheat,2022,tonnes,-5\n"
        "usa,chn,wheat,2022,TONNES,10\n");
    CHECK(parsed.summary.rows_read == 8);
    CHECK(parsed.summary.rows_accepted == 1);
    CHECK(parsed.summary.rejections.at("non_positive_value") == 2);
    CHECK(parsed.summary.rejections.at("non_staple_item") == 1);
    CHECK(parsed.summary.rejections.at("non_tonne_unit") == 1);
    CHECK(parsed.summary.rejections.at("missing_field") == 1);
    CHECK(parsed.summary.rejections.at("self_flow") == 1);
    CHECK(parsed.summary.rejections.at("malformed_number") == 1);
    auto j = parsed.summary.to_json();
    CHECK(j["rows_read"] == 8);
    CHECK(j["rows_accepted"] == 1);
    CHECK(j["rejections"]["self_flow"] == 1);
}

TEST_CASE("quoted rice label and tab delimiter") {
    TradeSchema schema;
    schema.delimiter = '\t';
    auto parsed = parse("reporter\tpartner\titem\tyear\tunit\tvalue\nTHA\tCHN\tRice, milled\t2022\tt\t2\n",
                        schema);
    REQUIRE(parsed.flows.size() == 1);
    CHECK(parsed.flows[0].crop == Crop::Rice);
    CHECK(parsed.flows[0].kilocalories == 7.2e6);

    auto quoted = parse("reporter,partner,item,year,unit,value\nTHA,CHN,\"Rice, milled\",2022,tonnes,1\n");
    REQUIRE(quoted.flows.size() == 1);
    CHECK(quoted.flows[0].crop == Crop::Rice);
}

TEST_CASE("mirror records are ignored when an element column is mapped") {
    std::istringstream cfg("element = Element\nreporter = Reporter Countries\n");
    auto schema = read_schema(cfg, "schema");
    auto parsed = parse(
        "Reporter Countries,partner,item,year,unit,value,Element\n"
        "USA,CHN,Maize,2022,tonnes,1,Export Quantity\n"
        "CHN,USA,Maize,2022,tonnes,1,Import Quantity\n",
        schema);
    CHECK(parsed.flows.size() == 1);
    CHECK(parsed.summary.rejections.at("mirror_record") == 1);
}

TEST_CASE("missing required column is a parse error naming it") {
    try {
        parse("reporter,partner,item,year,value\nUSA,CHN,Wheat,2022,1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.column() == "unit");
        CHECK(e.row() == 1);
    }
    CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("calorie table overrides and validation") {
    std::istringstream in("# per tonne\nwheat = 3.0e6\nRice=3.5e6\n");
    auto t = read_calorie_table(in, "cal");
    CHECK(t.coefficient(Crop::Wheat) == 3.0e6);
    CHECK(t.coefficient(Crop::Rice) == 3.5e6);
    CHECK(t.coefficient(Crop::Maize) == 3.65e6);
    std::istringstream bad("coffee = 1\n");
    CHECK_THROWS_AS(read_calorie_table(bad, "cal"), ParseError);
    std::istringstream zero("maize = 0\n");
    CHECK_THROWS_AS(read_calorie_table(zero, "cal"), ParseError);
}

TEST_CASE("cross-crop aggregation") {
    std::vector<TradeFlow> flows{flow("A", "B", Crop::Wheat, 2), flow("A", "B", Crop::Rice, 3)};
    auto net = aggregate_staples(flows, 2022);
    REQUIRE(net.edge_count() == 1);
    CHECK(net.edges()[0].weight == 5.0);

    std::vector<TradeFlow> opposite{flow("A", "B", Crop::Wheat, 2), flow("B", "A", Crop::Rice, 3)};
    auto both = aggregate_staples(opposite, 2022);
    CHECK(both.weight(0, 1) == 2.0);
    CHECK(both.weight(1, 0) == 3.0);

    std::vector<TradeFlow> old{flow("A", "B", Crop::Wheat, 2, 2021)};
    CHECK(aggregate_staples(old, 2022).empty());
}

TEST_CASE("single staple network filters one crop") {
    std::vector<TradeFlow> flows{flow("A", "B", Crop::Wheat, 2), flow("A", "C", Crop::Rice, 3),
                                 flow("C", "B", Crop::Rice, 1)};
    auto rice = single_staple_network(flows, Crop::Rice, 2022);
    CHECK(rice.edge_count() == 2);
    CHECK(rice.weight(*rice.find("A"), *rice.find("C")) == 3.0);
    CHECK_FALSE(rice.find_edge(*rice.find("A"), *rice.find("B")));
    CHECK(single_staple_network(flows, Crop::Soybeans, 2022).empty());
}

TEST_CASE("aggregation properties on random flows") {
    Rng rng(21);
    const std::vector<std::string> codes{"ARG", "BRA", "CHN", "EGY", "IND", "USA"};
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<TradeFlow> flows;
        for (int i = 0; i < 60; ++i) {
            const auto a = rng.below(codes.size());
            auto b = rng.below(codes.size());
            if (a == b) b = (b + 1) % codes.size();
            flows.push_back(flow(codes[a], codes[b], kStaples[rng.below(4)], 1.0 + rng.below(100)));
        }
        auto aggregate = aggregate_staples(flows, 2022);

        // Conservation: integer-valued kcal keeps the sums exact.
        double edge_total = 0.0, flow_total = 0.0;
        for (const auto& e : aggregate.edges()) edge_total += e.weight;
        for (const auto& f : flows) flow_total += f.kilocalories;
        CHECK(edge_total == flow_total);

        // Order independence.
        auto shuffled = flows;
        rng.shuffle(std::span<TradeFlow>(shuffled));
        auto again = aggregate_staples(shuffled, 2022);
        REQUIRE(again.edge_count() == aggregate.edge_count());
        for (std::size_t e = 0; e < again.edge_count(); ++e) {
            CHECK(again.edges()[e].source == aggregate.edges()[e].source);
            CHECK(again.edges()[e].target == aggregate.edges()[e].target);
            CHECK(again.edges()[e].weight == aggregate.edges()[e].weight);
        }

        // Per-crop layers partition the aggregate edge-wise.
        for (const auto& e : aggregate.edges()) {
            double sum = 0.0;
            for (Crop c : kStaples) {
                auto layer = single_staple_network(flows, c, 2022);
                auto s = layer.find(aggregate.code(e.source));
                auto t = layer.find(aggregate.code(e.target));
                if (s && t) sum += layer.weight(*s, *t);
            }
            CHECK(sum == e.weight);
        }
    }
}

TEST_CASE("flow and network tables round-trip") {
    std::vector<TradeFlow> flows{flow("A", "B", Crop::Maize, 0.1 + 0.2), flow("B", "C", Crop::Rice, 1e20)};
    std::stringstream buf;
    write_flows_csv(buf, flows);
    auto back = read_flows_csv(buf, "flows");
    REQUIRE(back.size() == 2);
    CHECK(back[0].kilocalories == flows[0].kilocalories);
    CHECK(back[1].crop == Crop::Rice);

    NetworkBuilder b(2022);
    b.add_flow("A", "B", 0.1 + 0.2).add_node("ZZZ");
    auto net = b.build();
    std::stringstream nb;
    write_network_csv(nb, net);
    auto read = read_network_csv(nb, 2022, "net");
    CHECK(read.node_count() == 3);
    CHECK(read.edge_count() == 1);
    CHECK(read.edges()[0].weight == 0.1 + 0.2);
}
