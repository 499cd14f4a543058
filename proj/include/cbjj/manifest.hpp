#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "cbjj/config.hpp"

namespace cbjj {

std::string code_version();
std::string sha256_hex(std::string_view bytes);

/// Everything needed to re-run an output directory bit-identically.
struct RunManifest {
    std::string command;     // CLI subcommand or experiment id
    std::string junction;    // JJ1..JJ3, "all" or "custom"
    ConfigDocument config;
    nlohmann::json settings = nlohmann::json::object();  // command-specific knobs
    nlohmann::json results = nlohmann::json::object();   // headline numbers
    std::vector<std::string> notes;
    double wall_clock_s = 0.0;
    std::map<std::string, std::string> checksums;  // file name -> sha256
};

nlohmann::json to_json(const RunManifest& manifest);

/// Writes each named file into `dir`, records its checksum, then writes
/// manifest.json. Keys are emitted in sorted order.
void write_run(const std::filesystem::path& dir, const std::map<std::string, std::string>& files,
               RunManifest manifest);

}  // namespace cbjj
