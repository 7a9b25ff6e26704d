#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace fsn::cli {

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Record of one command run, written as `manifest.json` in the output
/// directory (replacing any earlier one).
class RunManifest {
public:
    RunManifest(std::string command, std::vector<std::string> argv);

    void set_config(std::string snapshot) { config_ = std::move(snapshot); }
    void set_seed(std::uint64_t seed) { seed_ = seed; }
    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);

    nlohmann::json to_json() const;
    void write(const std::filesystem::path& out_dir) const;

private:
    std::string command_;
    std::vector<std::string> argv_;
    std::string config_;
    std::uint64_t seed_ = 0;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace fsn::cli
