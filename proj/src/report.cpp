#include "mokit/report.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mokit/rng.hpp"
#include "mokit/version.hpp"

namespace mokit {

Json num(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

void Report::check(std::string name, bool ok, std::string detail) {
    assertions.push_back({std::move(name), ok, std::move(detail)});
}

bool Report::passed() const {
    for (const auto& a : assertions) {
        if (!a.passed) return false;
    }
    return true;
}

Json to_json(const Report& r) {
    Json j;
    j["tool"] = "mokit";
    j["version"] = kVersion;
    j["task"] = r.task;
    j["seed"] = r.seed;
    j["prng"] = std::string(Rng::kAlgorithm);
    j["scenario"] = r.scenario;
    j["results"] = r.results;
    if (!r.table.empty()) {
        Json rows = Json::array();
        const auto& head = r.table.front();
        for (std::size_t k = 1; k < r.table.size(); ++k) {
            Json row;
            for (std::size_t c = 0; c < head.size(); ++c) row[head[c].get<std::string>()] = r.table[k][c];
            rows.push_back(std::move(row));
        }
        j["table"] = std::move(rows);
    }
    j["witnesses"] = r.witnesses;
    Json as = Json::array();
    for (const auto& a : r.assertions) as.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
    j["assertions"] = std::move(as);
    j["passed"] = r.passed();
    return j;
}

namespace {

std::string cell(const Json& v) {
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }
    if (v.is_null()) return "";
    return v.dump();
}

void flatten(const Json& v, const std::string& path, std::string& out) {
    if (v.is_object()) {
        for (auto it = v.begin(); it != v.end(); ++it) flatten(*it, path.empty() ? it.key() : path + "." + it.key(), out);
    } else if (v.is_array()) {
        for (std::size_t k = 0; k < v.size(); ++k) flatten(v[k], path + "." + std::to_string(k), out);
    } else {
        out += cell(path) + "," + cell(v) + "\n";
    }
}

}  // namespace

std::string render(const Report& r, Format f) {
    if (f == Format::Json) return to_json(r).dump(2) + "\n";
    std::string out;
    if (!r.table.empty()) {
        for (const auto& row : r.table) {
            for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + cell(row[c]);
            out += "\n";
        }
        return out;
    }
    out = "key,value\n";
    flatten(to_json(r), "", out);
    return out;
}

std::filesystem::path emit(const Report& r, Format f, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = dir / (r.task + (f == Format::Json ? ".json" : ".csv"));
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write report to " + path.string());
    os << render(r, f);
    if (!os) throw std::runtime_error("cannot write report to " + path.string());
    return path;
}

}  // namespace mokit
