#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace mokit {

using Json = nlohmann::ordered_json;

/// Finite doubles as numbers, +-inf as the strings "inf"/"-inf", NaN as null.
Json num(double v);

struct Assertion {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Output of one scenario run. Holds no timing data so that identical
/// (scenario, seed, version) produce identical bytes.
struct Report {
    std::string task;
    std::uint64_t seed = 0;
    Json scenario = Json::object();
    Json results = Json::object();
    Json witnesses = Json::array();
    std::vector<Assertion> assertions;
    // Row table emitted by the CSV format when present (first row is the header).
    std::vector<std::vector<Json>> table;

    void check(std::string name, bool ok, std::string detail = {});
    bool passed() const;
};

enum class Format { Json, Csv };

Json to_json(const Report& r);
std::string render(const Report& r, Format f);

/// Writes DIR/<task>.<ext>; throws std::runtime_error when the file cannot be written.
std::filesystem::path emit(const Report& r, Format f, const std::filesystem::path& dir);

}  // namespace mokit
