#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace fsn {

enum class Crop { Wheat, Rice, Maize, Soybeans };

inline constexpr std::array<Crop, 4> kStaples = {Crop::Wheat, Crop::Rice, Crop::Maize,
                                                 Crop::Soybeans};

std::string_view crop_name(Crop crop) noexcept;
/// Case-insensitive lookup of the canonical lowercase crop name.
std::optional<Crop> parse_crop(std::string_view name);

/// One bilateral flow, export-reported. `kilocalories` is `quantity` (tonnes)
/// times the crop's calorie coefficient.
struct TradeFlow {
    std::string exporter;
    std::string importer;
    Crop crop = Crop::Wheat;
    int year = 0;
    double quantity = 0.0;
    double kilocalories = 0.0;
};

}  // namespace fsn
