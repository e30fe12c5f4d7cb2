#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mokit/report.hpp"

namespace mokit {

/// Right-hand side of `key = value` with its 1-based position in the file.
struct ConfigValue {
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;
};

/// Line-oriented scenario file: `[section]` headers, `key = value` entries,
/// `#` comments (outside double quotes). See docs/grammar.md.
class Config {
public:
    /// Throws ParseError (with line and column) on malformed lines, unknown
    /// sections or keys, duplicate keys, and on a file without any entry.
    static Config parse(std::string_view text);

    const ConfigValue* find(std::string_view section, std::string_view key) const;

    using Section = std::pair<std::string, std::vector<std::pair<std::string, ConfigValue>>>;
    const std::vector<Section>& sections() const noexcept { return sections_; }

private:
    std::vector<Section> sections_;
};

inline constexpr std::string_view kTasks[] = {"conj",    "norm",      "modular",         "mnorm",
                                              "compare", "split",     "factorize",       "repro-example51",
                                              "repro-nakano"};

bool is_task(std::string_view name);

struct Scenario {
    std::string task;
    std::uint64_t seed = 0;
    Config config;
    std::filesystem::path base_dir;   // resolves relative file references
};

/// Parses scenario text. The seed is taken from `seed_override`, else from
/// [run] seed, else 0. A [run] task that disagrees with `task` is an error.
Scenario parse_scenario(std::string_view text, std::string task, std::optional<std::uint64_t> seed_override,
                        std::filesystem::path base_dir = {});

Scenario load_scenario(const std::filesystem::path& file, std::string task,
                       std::optional<std::uint64_t> seed_override);

/// Runs the scenario's task. Parse problems in values surface as ParseError;
/// library preconditions propagate unchanged.
Report run(const Scenario& sc);

}  // namespace mokit
