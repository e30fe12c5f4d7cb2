#include "mokit/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mokit/conjugate.hpp"
#include "mokit/errors.hpp"
#include "mokit/expr.hpp"
#include "mokit/factorization.hpp"
#include "mokit/kernels.hpp"
#include "mokit/spaces.hpp"

namespace mokit {

namespace {

const std::map<std::string, std::set<std::string>, std::less<>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>, std::less<>> keys{
        {"space", {"cells", "atoms"}},
        {"functions", {"phi", "phi1", "phi0"}},
        {"input", {"x", "y", "z"}},
        {"grid", {"u", "points"}},
        {"run",
         {"task", "seed", "truncation", "maximizer", "route", "samples", "budget", "D", "k_limit", "root_tol",
          "convexity_tol", "coarse_grid", "refine_rounds", "rel_tol", "endpoint_margin", "overflow_cap",
          "equality_tol"}},
    };
    return keys;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Length of `line` before a '#' that is not inside double quotes.
std::size_t code_length(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return i;
    }
    return line.size();
}

bool is_name(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

Config Config::parse(std::string_view text) {
    Config cfg;
    std::size_t line_no = 0;
    std::size_t entries = 0;
    Section* current = nullptr;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        const std::string_view code = raw.substr(0, code_length(raw));
        const std::string_view body = trim(code);
        if (body.empty()) continue;
        const std::size_t lead = static_cast<std::size_t>(body.data() - code.data());

        if (body.front() == '[') {
            if (body.back() != ']') throw ParseError("section header must end with ']'", line_no, lead + body.size());
            const std::string_view name = trim(body.substr(1, body.size() - 2));
            const std::size_t col = lead + 1 + static_cast<std::size_t>(name.data() - body.data());
            if (!allowed_keys().count(name)) {
                throw ParseError("unknown section '" + std::string(name) + "'", line_no, col);
            }
            for (const auto& s : cfg.sections_) {
                if (s.first == name) throw ParseError("duplicate section '" + std::string(name) + "'", line_no, col);
            }
            cfg.sections_.push_back({std::string(name), {}});
            current = &cfg.sections_.back();
            continue;
        }

        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, lead + 1);
        const std::string_view key = trim(body.substr(0, eq));
        if (!is_name(key)) throw ParseError("malformed key", line_no, lead + 1);
        if (!current) throw ParseError("entry before any [section]", line_no, lead + 1);
        const auto& allowed = allowed_keys().find(current->first)->second;
        if (!allowed.count(std::string(key))) {
            throw ParseError("unknown key '" + std::string(key) + "' in [" + current->first + "]", line_no, lead + 1);
        }
        for (const auto& kv : current->second) {
            if (kv.first == key) throw ParseError("duplicate key '" + std::string(key) + "'", line_no, lead + 1);
        }
        const std::string_view after = body.substr(eq + 1);
        const std::string_view value = trim(after);
        const std::size_t vcol = lead + eq + 2 + static_cast<std::size_t>(value.data() - after.data());
        if (value.empty()) throw ParseError("missing value for '" + std::string(key) + "'", line_no, lead + eq + 1);
        current->second.push_back({std::string(key), ConfigValue{std::string(value), line_no, vcol}});
        ++entries;
    }
    if (entries == 0) throw ParseError("empty scenario: no entries", 1, 1);
    return cfg;
}

const ConfigValue* Config::find(std::string_view section, std::string_view key) const {
    for (const auto& s : sections_) {
        if (s.first != section) continue;
        for (const auto& kv : s.second) {
            if (kv.first == key) return &kv.second;
        }
    }
    return nullptr;
}

bool is_task(std::string_view name) {
    return std::find(std::begin(kTasks), std::end(kTasks), name) != std::end(kTasks);
}

// ----------------------------------------------------------------------------
// value grammar

namespace {

using detail::TokKind;
using detail::Token;

class Reader {
public:
    explicit Reader(const ConfigValue& v)
        : v_(v), toks_(detail::tokenize(v.text, v.line, v.column - 1)) {}

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, v_.line, peek().column); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t col) const { throw ParseError(msg, v_.line, col); }

    const Token& peek() const { return toks_[k_]; }
    bool at_end() const { return peek().kind == TokKind::End; }
    bool is_punct(char c) const { return peek().kind == TokKind::Punct && peek().text[0] == c; }
    bool accept(char c) {
        if (!is_punct(c)) return false;
        ++k_;
        return true;
    }
    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }
    std::string ident() {
        if (peek().kind != TokKind::Ident) fail("expected a name");
        return toks_[k_++].text;
    }
    std::string string() {
        if (peek().kind != TokKind::String) fail("expected a quoted string");
        return toks_[k_++].text;
    }
    double number() {
        const bool neg = accept('-');
        if (peek().kind == TokKind::Ident && peek().text == "inf") {
            ++k_;
            return neg ? -kInf : kInf;
        }
        if (peek().kind != TokKind::Number) fail("expected a number");
        const double v = toks_[k_++].number;
        return neg ? -v : v;
    }
    std::size_t count() {
        const std::size_t col = peek().column;
        const double v = number();
        if (!(v >= 0.0) || v != std::floor(v) || v > 1e12) fail_at("expected a nonnegative integer", col);
        return static_cast<std::size_t>(v);
    }
    void finish() {
        if (!at_end()) fail("unexpected trailing input");
    }
    std::vector<double> number_list() {
        std::vector<double> out;
        expect('[');
        if (accept(']')) return out;
        do {
            out.push_back(number());
        } while (accept(','));
        expect(']');
        return out;
    }
    std::vector<std::pair<double, double>> pair_list() {
        std::vector<std::pair<double, double>> out;
        expect('[');
        if (accept(']')) return out;
        do {
            expect('(');
            const double a = number();
            expect(',');
            const double b = number();
            expect(')');
            out.emplace_back(a, b);
        } while (accept(','));
        expect(']');
        return out;
    }
    // Raw text between the parentheses of `name(...)`, with its column.
    std::pair<std::string, std::size_t> call_body() const {
        const std::size_t open = v_.text.find('(');
        if (open == std::string::npos || v_.text.back() != ')') fail("expected name(...)");
        return {v_.text.substr(open + 1, v_.text.size() - open - 2), v_.column + open + 1};
    }

private:
    const ConfigValue& v_;
    std::vector<Token> toks_;
    std::size_t k_ = 0;
};

const ConfigValue& require(const Scenario& sc, std::string_view section, std::string_view key) {
    const ConfigValue* v = sc.config.find(section, key);
    if (!v) throw ParseError("missing '" + std::string(key) + "' in [" + std::string(section) + "] for task " + sc.task);
    return *v;
}

SpacePtr read_space(const Scenario& sc, const char* default_cells = nullptr) {
    const ConfigValue* cv = sc.config.find("space", "cells");
    const ConfigValue* av = sc.config.find("space", "atoms");
    ConfigValue fallback;
    if (!cv && !av) {
        if (!default_cells) throw ParseError("missing [space] cells or atoms for task " + sc.task);
        fallback.text = default_cells;
        cv = &fallback;
    }
    std::vector<Cell> cells;
    std::vector<Atom> atoms;
    try {
        if (cv) {
            Reader r(*cv);
            if (r.peek().kind == TokKind::Ident) {
                const std::size_t col = r.peek().column;
                if (r.ident() != "uniform") r.fail_at("expected uniform(lo, hi, n) or a list of (t, mass)", col);
                r.expect('(');
                const double lo = r.number();
                r.expect(',');
                const double hi = r.number();
                r.expect(',');
                const std::size_t n = r.count();
                r.expect(')');
                r.finish();
                const MeasureSpace u = MeasureSpace::uniform(lo, hi, n);
                cells.assign(u.cells().begin(), u.cells().end());
            } else {
                for (auto [t, m] : r.pair_list()) cells.push_back({t, m});
                r.finish();
            }
        }
        if (av) {
            Reader r(*av);
            for (auto [p, m] : r.pair_list()) atoms.push_back({p, m});
            r.finish();
        }
        return make_space(MeasureSpace(std::move(cells), std::move(atoms)));
    } catch (const DomainError& e) {
        const ConfigValue& at = cv ? *cv : *av;
        throw ParseError(e.what(), at.line, at.column);
    }
}

YoungTolerances read_tolerances(const Scenario& sc);

MOFunction read_function(const Scenario& sc, std::string_view key, const char* fallback = nullptr) {
    const ConfigValue* v = sc.config.find("functions", key);
    FamilyParseOptions opts;
    opts.base_dir = sc.base_dir;
    MOFunction f = [&] {
        if (!v) {
            if (!fallback) require(sc, "functions", key);
            return parse_family(fallback, opts);
        }
        opts.line = v->line;
        opts.column_offset = v->column - 1;
        return parse_family(v->text, opts);
    }();
    return f.with_tolerances(read_tolerances(sc));
}

double read_number(const Scenario& sc, std::string_view key, double fallback) {
    const ConfigValue* v = sc.config.find("run", key);
    if (!v) return fallback;
    Reader r(*v);
    const double x = r.number();
    r.finish();
    return x;
}

std::size_t read_count(const Scenario& sc, std::string_view key, std::size_t fallback) {
    const ConfigValue* v = sc.config.find("run", key);
    if (!v) return fallback;
    Reader r(*v);
    const std::size_t x = r.count();
    r.finish();
    return x;
}

bool read_bool(const Scenario& sc, std::string_view key, bool fallback) {
    const ConfigValue* v = sc.config.find("run", key);
    if (!v) return fallback;
    Reader r(*v);
    const std::size_t col = r.peek().column;
    const std::string s = r.ident();
    r.finish();
    if (s == "true") return true;
    if (s == "false") return false;
    r.fail_at("expected true or false", col);
}

YoungTolerances read_tolerances(const Scenario& sc) {
    YoungTolerances t;
    t.root = read_number(sc, "root_tol", t.root);
    t.convexity = read_number(sc, "convexity_tol", t.convexity);
    if (!(t.root > 0.0) || !(t.convexity > 0.0)) throw ParseError("tolerances must be positive");
    return t;
}

SupSolverConfig read_solver(const Scenario& sc) {
    SupSolverConfig s;
    s.coarse_grid = read_count(sc, "coarse_grid", s.coarse_grid);
    s.refine_rounds = read_count(sc, "refine_rounds", s.refine_rounds);
    s.rel_tol = read_number(sc, "rel_tol", s.rel_tol);
    s.endpoint_margin = read_number(sc, "endpoint_margin", s.endpoint_margin);
    s.overflow_cap = read_number(sc, "overflow_cap", s.overflow_cap);
    s.equality_tol = read_number(sc, "equality_tol", s.equality_tol);
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw ParseError(e.what());
    }
    return s;
}

Route read_route(const Scenario& sc) {
    const ConfigValue* v = sc.config.find("run", "route");
    if (!v) return Route::Automatic;
    Reader r(*v);
    const std::size_t col = r.peek().column;
    const std::string s = r.ident();
    r.finish();
    if (s == "auto") return Route::Automatic;
    if (s == "generic") return Route::Generic;
    r.fail_at("route must be auto or generic", col);
}

std::vector<double> read_numbers_file(const std::filesystem::path& path, const ConfigValue& at) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open '" + path.string() + "'", at.line, at.column);
    std::vector<double> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) {
        ++n;
        line = line.substr(0, line.find('#'));
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end != tok.c_str() + tok.size()) {
                throw ParseError(path.filename().string() + ":" + std::to_string(n) + ": malformed number '" + tok + "'",
                                 at.line, at.column);
            }
            out.push_back(v);
        }
    }
    return out;
}

SimpleFunction read_input(const Scenario& sc, std::string_view key, const SpacePtr& space) {
    const ConfigValue& v = require(sc, "input", key);
    Reader r(v);
    std::vector<double> vals;
    if (r.is_punct('[')) {
        vals = r.number_list();
        r.finish();
    } else {
        const std::size_t col = r.peek().column;
        const std::string kind = r.ident();
        if (kind == "constant") {
            r.expect('(');
            const double c = r.number();
            r.expect(')');
            r.finish();
            vals.assign(space->size(), c);
        } else if (kind == "expr") {
            const auto [body, bcol] = r.call_body();
            const Expr e = Expr::parse(body, v.line, bcol - 1);
            if (e.uses_u()) r.fail_at("expr(...) may use t only", bcol);
            for (std::size_t i = 0; i < space->size(); ++i) vals.push_back(e.eval(space->point(i), 0.0));
        } else if (kind == "file") {
            r.expect('(');
            std::filesystem::path p = r.string();
            r.expect(')');
            r.finish();
            if (p.is_relative()) p = sc.base_dir / p;
            vals = read_numbers_file(p, v);
        } else {
            r.fail_at("expected [..], constant(c), expr(e) or file(\"path\")", col);
        }
    }
    if (vals.size() != space->size()) {
        throw ParseError("'" + std::string(key) + "' has " + std::to_string(vals.size()) + " values for a space of " +
                             std::to_string(space->size()) + " points",
                         v.line, v.column);
    }
    try {
        const bool neg = std::any_of(vals.begin(), vals.end(), [](double x) { return x < 0.0; });
        return SimpleFunction(space, std::move(vals), neg);
    } catch (const DomainError& e) {
        throw ParseError(e.what(), v.line, v.column);
    }
}

std::vector<double> read_u_grid(const Scenario& sc, std::vector<double> fallback) {
    const ConfigValue* v = sc.config.find("grid", "u");
    if (!v) return fallback;
    Reader r(*v);
    std::vector<double> out;
    do {
        if (r.is_punct('[')) {
            const auto l = r.number_list();
            out.insert(out.end(), l.begin(), l.end());
            continue;
        }
        const std::size_t col = r.peek().column;
        const std::string kind = r.ident();
        if (kind != "logspace" && kind != "linspace") r.fail_at("expected [..], logspace(..) or linspace(..)", col);
        r.expect('(');
        const double lo = r.number();
        r.expect(',');
        const double hi = r.number();
        r.expect(',');
        const std::size_t n = r.count();
        r.expect(')');
        if (n < 2) r.fail_at("a generated grid needs at least 2 points", col);
        if (kind == "logspace" && !(lo > 0.0 && hi > lo)) r.fail_at("logspace needs 0 < lo < hi", col);
        for (std::size_t k = 0; k < n; ++k) {
            const double f = static_cast<double>(k) / static_cast<double>(n - 1);
            out.push_back(kind == "logspace" ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)))
                                             : lo + f * (hi - lo));
        }
    } while (r.accept('+'));
    r.finish();
    for (double u : out) {
        if (!(u >= 0.0) || !std::isfinite(u)) throw ParseError("grid values must be finite and >= 0", v->line, v->column);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PointSet read_points(const Scenario& sc, const MeasureSpace& space) {
    const ConfigValue* v = sc.config.find("grid", "points");
    if (!v) return all_points(space);
    Reader r(*v);
    if (r.peek().kind == TokKind::Ident) {
        const std::size_t col = r.peek().column;
        if (r.ident() != "all") r.fail_at("expected all or a list of point indices", col);
        r.finish();
        return all_points(space);
    }
    PointSet pts;
    for (double x : r.number_list()) {
        if (!(x >= 0.0) || x != std::floor(x) || x >= static_cast<double>(space.size())) {
            throw ParseError("point index out of range", v->line, v->column);
        }
        pts.push_back(static_cast<std::size_t>(x));
    }
    r.finish();
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// ----------------------------------------------------------------------------
// report helpers

Json vec(std::span<const double> v) {
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

Json ext(ExtReal v) { return num(v.value()); }

Json space_json(const MeasureSpace& s) {
    Json cells = Json::array(), atoms = Json::array();
    for (const Cell& c : s.cells()) cells.push_back(Json::array({num(c.t), num(c.mass)}));
    for (const Atom& a : s.atoms()) atoms.push_back(Json::array({num(a.point), num(a.mass)}));
    return {{"cells", cells}, {"atoms", atoms}};
}

Json config_json(const Config& c) {
    Json j = Json::object();
    for (const auto& [name, entries] : c.sections()) {
        Json s = Json::object();
        for (const auto& [k, v] : entries) s[k] = v.text;
        j[name] = s;
    }
    return j;
}

Json comparison_point_json(const ComparisonPoint& p) {
    return {{"point", p.point}, {"t", num(p.t)}, {"u", num(p.u)}, {"R", ext(p.R)}, {"L", ext(p.L)},
            {"ratio", num(p.ratio)}};
}

Json comparison_json(const ComparisonReport& c) {
    auto verdict = [](bool ok) { return ok ? "holds on grid" : "fails"; };
    return {{"best_C_lower", num(c.best_C_lower)},
            {"best_C_upper", num(c.best_C_upper)},
            {"prec", verdict(c.prec_holds)},
            {"succ", verdict(c.succ_holds)},
            {"approx", verdict(c.approx_holds())},
            {"evaluated", c.evaluated},
            {"skipped_zero_over_zero", c.skipped_zero},
            {"skipped_inf_over_inf", c.skipped_infinite},
            {"u_grid_size", c.u_grid.size()}};
}

// Re-evaluates a witness and compares the ratio bit for bit.
bool replays(const YoungField& phi, const YoungField& phi0, const YoungField& phi1, const ComparisonPoint& w) {
    const ComparisonPoint again = comparison_at(phi, phi0, phi1, w.point, w.u);
    return again.ratio == w.ratio || (std::isinf(again.ratio) && std::isinf(w.ratio));
}

void add_comparison_witnesses(Report& rep, const ComparisonReport& c) {
    if (c.prec_witness) {
        Json w = comparison_point_json(*c.prec_witness);
        w["relation"] = "prec";
        w["role"] = c.prec_holds ? "extreme" : "violation";
        rep.witnesses.push_back(std::move(w));
    }
    if (c.succ_witness) {
        Json w = comparison_point_json(*c.succ_witness);
        w["relation"] = "succ";
        w["role"] = c.succ_holds ? "extreme" : "violation";
        rep.witnesses.push_back(std::move(w));
    }
}

bool within_one_ulp(double got, double want) {
    return got == want || got == std::nextafter(want, kInf) || got == std::nextafter(want, -kInf);
}

Json verify_json(const VerifyReport& v) {
    Json j = {{"subset_pass", v.subset_pass},
              {"superset_pass", v.superset_pass},
              {"worst_subset_ratio", num(v.worst_subset_ratio)},
              {"worst_K", num(v.worst_K)},
              {"subset_samples", v.subset_samples},
              {"superset_samples", v.superset_samples},
              {"split_fallbacks", v.split_fallbacks},
              {"inclusion_constant", num(v.c)},
              {"k_bound_from_split", v.k_bound ? num(*v.k_bound) : Json(nullptr)},
              {"comparison", comparison_json(v.comparison)}};
    return j;
}

void add_verify_witnesses(Report& rep, const VerifyReport& v) {
    if (v.subset_witness) {
        rep.witnesses.push_back({{"direction", "subset"},
                                 {"sample", v.subset_witness->index},
                                 {"ratio", num(v.subset_witness->ratio)},
                                 {"x", vec(v.subset_witness->a)},
                                 {"y", vec(v.subset_witness->b)}});
    }
    if (v.superset_witness) {
        rep.witnesses.push_back({{"direction", "superset"},
                                 {"sample", v.superset_witness->index},
                                 {"K", num(v.superset_witness->ratio)},
                                 {"z_unscaled", vec(v.superset_witness->a)}});
    }
}

std::string fmt(double v) { return num(v).dump(); }

// ----------------------------------------------------------------------------
// tasks

constexpr const char* kCounterexampleCells = "uniform(0, 0.5, 64)";
constexpr const char* kNakanoCells = "uniform(0, 1, 64)";

struct Common {
    SpacePtr space;
    Report rep;
};

Common start(const Scenario& sc, const char* default_cells = nullptr) {
    Common c{read_space(sc, default_cells), Report{}};
    c.rep.task = sc.task;
    c.rep.seed = sc.seed;
    c.rep.scenario["config"] = config_json(sc.config);
    c.rep.scenario["space"] = space_json(*c.space);
    return c;
}

std::unique_ptr<YoungField> read_phi0(const Scenario& sc, const MOFunction& phi, const MOFunction& phi1,
                                      const SpacePtr& space) {
    const ConfigValue* v = sc.config.find("functions", "phi0");
    if (!v || v->text == "conjugate") {
        return std::make_unique<ConjugateField>(ConjugateSpec(phi, phi1, space, std::nullopt, read_solver(sc)));
    }
    return std::make_unique<BoundFunction>(read_function(sc, "phi0"), space);
}

Report task_conj(const Scenario& sc) {
    auto [space, rep] = start(sc);
    const MOFunction phi = read_function(sc, "phi");
    const MOFunction phi1 = read_function(sc, "phi1");
    std::optional<double> a;
    if (sc.config.find("run", "truncation")) a = read_number(sc, "truncation", 0.0);
    const bool want_max = read_bool(sc, "maximizer", false);
    if (want_max && !a) throw ParseError("maximizer = true needs [run] truncation");
    const Route route = read_route(sc);
    const ConjugateSpec spec(phi, phi1, space, a, read_solver(sc));
    const ConjugateField field(spec, route);
    const auto u = read_u_grid(sc, [] {
        std::vector<double> g;
        for (int k = 0; k <= 40; ++k) g.push_back(std::pow(10.0, -3.0 + 0.15 * k));
        return g;
    }());
    const PointSet pts = read_points(sc, *space);
    rep.scenario["functions"] = {{"phi", phi.describe()}, {"phi1", phi1.describe()}};
    rep.scenario["u_grid"] = vec(u);

    const auto vals = kernels::tabulate(field, pts, u, kernels::Exec::Parallel);
    std::vector<Json> maxcol(vals.size());
    if (want_max) {
        kernels::for_each_index(vals.size(), [&](std::size_t k) {
            try {
                maxcol[k] = num(maximizer(spec, pts[k / u.size()], u[k % u.size()]));
            } catch (const PreconditionError&) {
                maxcol[k] = nullptr;
            } catch (const DomainError&) {
                maxcol[k] = nullptr;
            }
        });
    }
    std::vector<Json> head{"point", "t", "u", "ominus"};
    if (want_max) head.push_back("maximizer");
    rep.table.push_back(head);
    bool monotone = true, zero_ok = true;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const std::size_t i = pts[k / u.size()];
        std::vector<Json> row{i, num(space->point(i)), num(u[k % u.size()]), ext(vals[k])};
        if (want_max) row.push_back(maxcol[k]);
        rep.table.push_back(std::move(row));
        if (k % u.size() > 0 && vals[k] < vals[k - 1]) monotone = false;
        if (u[k % u.size()] == 0.0 && !vals[k].is_zero()) zero_ok = false;
    }
    std::size_t n_inf = 0;
    for (const ExtReal& v : vals) n_inf += v.is_infinite() ? 1 : 0;
    rep.results = {{"spec", spec.describe()},
                   {"truncation", a ? num(*a) : Json(nullptr)},
                   {"route", route == Route::Automatic ? "auto" : "generic"},
                   {"rows", vals.size()},
                   {"infinite_values", n_inf}};
    rep.check("nondecreasing_in_u", monotone);
    rep.check("zero_at_zero", zero_ok);
    return rep;
}

Report task_norm(const Scenario& sc) {
    auto [space, rep] = start(sc);
    const MOFunction phi = read_function(sc, "phi");
    const SimpleFunction x = read_input(sc, "x", space);
    rep.scenario["functions"] = {{"phi", phi.describe()}};
    rep.scenario["x"] = vec(x.values());
    const NormResult n = luxemburg_norm(phi, x, phi.tolerances().root);
    const ExtReal I = modular(phi, x);
    rep.results = {{"value", num(n.value)},   {"bracket", Json::array({num(n.lo), num(n.hi)})},
                   {"iterations", n.iterations}, {"infinite", n.infinite},
                   {"modular", ext(I)}};
    if (!n.infinite && n.value > 0.0) {
        const ExtReal at = modular(phi, x.abs().scaled(1.0 / n.hi));
        rep.results["modular_at_norm"] = ext(at);
        rep.check("modular_at_norm_le_1", at <= ExtReal(1.0), "I(x/norm) = " + at.to_string());
        if (n.value <= 1.0) {
            rep.check("unit_ball_modular_le_norm", I.value() <= n.value + phi.tolerances().root,
                      "I(x) = " + I.to_string() + ", norm = " + fmt(n.value));
        }
    }
    return rep;
}

Report task_modular(const Scenario& sc) {
    auto [space, rep] = start(sc);
    const MOFunction phi = read_function(sc, "phi");
    const SimpleFunction x = read_input(sc, "x", space);
    rep.scenario["functions"] = {{"phi", phi.describe()}};
    rep.scenario["x"] = vec(x.values());
    const ExtReal I = modular(phi, x);
    rep.results = {{"value", ext(I)}};
    rep.check("finite_or_explained", true, I.is_infinite() ? "modular is infinite" : "");
    return rep;
}

Report task_mnorm(const Scenario& sc) {
    auto [space, rep] = start(sc);
    const MOFunction phi = read_function(sc, "phi");
    const MOFunction phi1 = read_function(sc, "phi1");
    const SimpleFunction y = read_input(sc, "y", space);
    MultiplierOptions opts;
    opts.seed = sc.seed;
    opts.budget = read_count(sc, "budget", opts.budget);
    rep.scenario["functions"] = {{"phi", phi.describe()}, {"phi1", phi1.describe()}};
    rep.scenario["y"] = vec(y.values());
    const MultiplierEstimate e = multiplier_norm(phi1, phi, y, opts);
    rep.results = {{"lower", num(e.lower)},
                   {"upper", num(e.upper)},
                   {"conj_norm", num(e.conj_norm)},
                   {"upper_certified", e.upper_certified},
                   {"candidates", e.candidates},
                   {"witness_kind", e.witness.kind}};
    rep.witnesses.push_back({{"kind", e.witness.kind}, {"ratio", num(e.witness.ratio)}, {"x", vec(e.witness.x)}});
    const bool ordered = e.lower <= e.upper * (1.0 + 1e-9);
    rep.check("lower_le_upper", ordered || !e.upper_certified,
              e.upper_certified ? "" : "upper bound not certified on atoms");
    return rep;
}

Report task_compare(const Scenario& sc) {
    auto [space, rep] = start(sc);
    const MOFunction phi = read_function(sc, "phi");
    const MOFunction phi1 = read_function(sc, "phi1");
    const auto phi0 = read_phi0(sc, phi, phi1, space);
    const BoundFunction f(phi, space), f1(phi1, space);
    const auto u = read_u_grid(sc, default_u_grid());
    rep.scenario["functions"] = {{"phi", phi.describe()}, {"phi1", phi1.describe()}, {"phi0", phi0->describe()}};
    rep.scenario["u_grid"] = vec(u);
    const ComparisonReport c = compare_inverses(f, *phi0, f1, u);
    rep.results = comparison_json(c);
    add_comparison_witnesses(rep, c);
    if (c.prec_witness) rep.check("prec_witness_replays", replays(f, *phi0, f1, *c.prec_witness));
    if (c.succ_witness) rep.check("succ_witness_replays", replays(f, *phi0, f1, *c.succ_witness));
    return rep;
}

Report task_split(const Scenario& sc) {
    auto [space, rep] = start(sc);
    const MOFunction phi = read_function(sc, "phi");
    const MOFunction phi1 = read_function(sc, "phi1");
    const auto phi0 = read_phi0(sc, phi, phi1, space);
    const BoundFunction f(phi, space), f1(phi1, space);
    const SimpleFunction z = read_input(sc, "z", space);
    const double D = read_number(sc, "D", 0.0);
    rep.scenario["functions"] = {{"phi", phi.describe()}, {"phi1", phi1.describe()}, {"phi0", phi0->describe()}};
    rep.scenario["z"] = vec(z.values());
    const FactorPair fp = factor_split(f, *phi0, f1, z, D);
    rep.results = {{"D_given", num(fp.D_given)},     {"D_attained", num(fp.D_attained)},
                   {"D_used", num(fp.D_used)},       {"prescale", num(fp.prescale)},
                   {"inclusion_constant", num(fp.c)}, {"modular_z", num(fp.modular_z)},
                   {"modular_0", num(fp.modular_0)}, {"modular_1", num(fp.modular_1)},
                   {"norm_0", num(fp.norm_0)},       {"norm_1", num(fp.norm_1)},
                   {"z0", vec(fp.z0.values())},      {"z1", vec(fp.z1.values())}};
    std::size_t bad = 0;
    for (std::size_t i = 0; i < z.size(); ++i) bad += within_one_ulp(fp.z0[i] * fp.z1[i], z[i]) ? 0 : 1;
    rep.check("product_identity_1ulp", bad == 0, std::to_string(bad) + " point(s) off by more than 1 ulp");
    rep.check("factor_modular_bounds", fp.modular_ok,
              "I0 = " + fmt(fp.modular_0) + ", I1 = " + fmt(fp.modular_1) + ", I(z) = " + fmt(fp.modular_z));
    return rep;
}

Report task_factorize(const Scenario& sc) {
    auto [space, rep] = start(sc);
    const MOFunction phi = read_function(sc, "phi");
    const MOFunction phi1 = read_function(sc, "phi1");
    VerifyOptions opts;
    opts.seed = sc.seed;
    opts.samples = read_count(sc, "samples", opts.samples);
    opts.k_limit = read_number(sc, "k_limit", opts.k_limit);
    rep.scenario["functions"] = {{"phi", phi.describe()}, {"phi1", phi1.describe()}};
    const VerifyReport v = factorization_verify(phi1, phi, space, opts);
    rep.results = verify_json(v);
    add_verify_witnesses(rep, v);
    rep.check("subset_direction", v.subset_pass, "worst ratio " + fmt(v.worst_subset_ratio));
    rep.check("superset_direction", v.superset_pass,
              "worst K " + fmt(v.worst_K) + " (limit " + fmt(opts.k_limit) + ")");
    return rep;
}

Report task_repro_example51(const Scenario& sc) {
    auto [space, rep] = start(sc, kCounterexampleCells);
    const MOFunction phi = read_function(sc, "phi", "hinge(shift = t)");
    const MOFunction phi1 = read_function(sc, "phi1", "linear(weight = 1)");
    const ConjugateSpec spec(phi, phi1, space, std::nullopt, read_solver(sc));
    const ConjugateField conj(spec);
    const BoundFunction f(phi, space), f1(phi1, space);
    auto u = read_u_grid(sc, [] {
        std::vector<double> g{0.0, 1.0};
        for (int k = 0; k <= 60; ++k) g.push_back(std::pow(10.0, -3.0 + 0.1 * k));
        for (int k = 1; k < 40; ++k) g.push_back(0.05 * k);
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        return g;
    }());
    rep.scenario["functions"] = {{"phi", phi.describe()}, {"phi1", phi1.describe()}};
    rep.scenario["u_grid"] = vec(u);

    // (a) indicator form of the conjugate
    const PointSet pts = all_points(*space);
    const auto vals = kernels::tabulate(conj, pts, u, kernels::Exec::Parallel);
    std::size_t wrong = 0;
    std::optional<Json> first_wrong;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const double uu = u[k % u.size()];
        const bool ok = uu <= 1.0 ? vals[k].is_zero() : vals[k].is_infinite();
        if (!ok) {
            ++wrong;
            if (!first_wrong) first_wrong = Json{{"point", pts[k / u.size()]}, {"u", num(uu)}, {"value", ext(vals[k])}};
        }
    }
    rep.results["conjugate_grid_points"] = vals.size();
    rep.results["conjugate_mismatches"] = wrong;
    if (first_wrong) rep.witnesses.push_back({{"kind", "conjugate_mismatch"}, {"at", *first_wrong}});
    rep.check("conjugate_is_0_then_inf", wrong == 0, std::to_string(wrong) + " mismatching grid values");

    // (b) inverse comparisons
    const ComparisonReport c = compare_inverses(f, conj, f1, default_u_grid());
    rep.results["comparison"] = comparison_json(c);
    add_comparison_witnesses(rep, c);
    const bool succ_witness = !c.succ_holds && c.succ_witness && c.succ_witness->t > 0.0 &&
                              c.succ_witness->u <= 1e-3 && replays(f, conj, f1, *c.succ_witness);
    rep.check("succ_fails_with_replayable_witness", succ_witness,
              c.succ_witness ? "witness t = " + fmt(c.succ_witness->t) + ", u = " + fmt(c.succ_witness->u) : "none");
    rep.check("prec_holds_with_C_ge_1", c.prec_holds && c.best_C_lower >= 1.0 - 1e-9,
              "best C = " + fmt(c.best_C_lower));

    // (c) factorization in both directions
    VerifyOptions opts;
    opts.seed = sc.seed;
    opts.samples = read_count(sc, "samples", opts.samples);
    opts.k_limit = read_number(sc, "k_limit", opts.k_limit);
    const VerifyReport v = factorization_verify(phi1, phi, space, opts);
    rep.results["factorization"] = verify_json(v);
    add_verify_witnesses(rep, v);
    rep.check("factorization_subset", v.subset_pass, "worst ratio " + fmt(v.worst_subset_ratio));
    rep.check("factorization_superset", v.superset_pass, "worst K " + fmt(v.worst_K));
    return rep;
}

Report task_repro_nakano(const Scenario& sc) {
    auto [space, rep] = start(sc, kNakanoCells);
    const MOFunction phi = read_function(sc, "phi", "nakano(p = 1 + t/2, normalized = 1)");
    const MOFunction phi1 = read_function(sc, "phi1", "nakano(p = 2 + t, normalized = 1)");
    const ConjugateSpec spec(phi, phi1, space, std::nullopt, read_solver(sc));
    const auto u = read_u_grid(sc, [] {
        std::vector<double> g;
        for (int k = 0; k <= 40; ++k) g.push_back(std::pow(10.0, -3.0 + 0.15 * k));
        return g;
    }());
    rep.scenario["functions"] = {{"phi", phi.describe()}, {"phi1", phi1.describe()}};
    rep.scenario["u_grid"] = vec(u);

    const std::size_t n = space->size();
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = space->point(i);
        const auto mq = phi.monomial_at(t);
        const auto mp = phi1.monomial_at(t);
        if (!mq || !mp || std::abs(mq->coeff * mq->exponent - 1.0) > 1e-12 || std::abs(mp->coeff * mp->exponent - 1.0) > 1e-12) {
            throw ParseError("repro-nakano needs normalized nakano functions for phi and phi1");
        }
        if (mq->exponent > mp->exponent) throw ParseError("repro-nakano needs q(t) <= p(t)");
        r[i] = 1.0 / (1.0 / mq->exponent - 1.0 / mp->exponent);
    }

    const std::size_t nu = u.size();
    Json routes = Json::object();
    for (const Route route : {Route::Automatic, Route::Generic}) {
        std::vector<double> err(n * nu, 0.0);
        kernels::for_each_index(err.size(), [&](std::size_t k) {
            const std::size_t i = k / nu;
            const double uu = u[k % nu];
            const ExtReal got = ominus(spec, i, uu, route);
            const double want = std::isinf(r[i]) ? 0.0 : std::pow(uu, r[i]) / r[i];
            if (got.is_infinite()) {
                err[k] = kInf;
            } else {
                err[k] = want == 0.0 ? got.value() : std::abs(got.value() - want) / want;
            }
        });
        const auto worst = std::max_element(err.begin(), err.end());
        const std::size_t wk = static_cast<std::size_t>(worst - err.begin());
        const char* name = route == Route::Automatic ? "auto" : "generic";
        routes[name] = {{"max_rel_error", num(*worst)},
                        {"worst_point", wk / nu},
                        {"worst_t", num(space->point(wk / nu))},
                        {"worst_u", num(u[wk % nu])}};
        rep.check(std::string("closed_form_rel_error_le_1e-6_") + name, *worst <= 1e-6,
                  "max relative error " + fmt(*worst));
    }
    rep.results["routes"] = std::move(routes);
    rep.results["grid_points"] = n * nu;
    return rep;
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string task, std::optional<std::uint64_t> seed_override,
                        std::filesystem::path base_dir) {
    if (!is_task(task)) throw ParseError("unknown task '" + task + "'");
    Scenario sc;
    sc.task = std::move(task);
    sc.config = Config::parse(text);
    sc.base_dir = std::move(base_dir);
    if (const ConfigValue* v = sc.config.find("run", "task")) {
        if (v->text != sc.task) {
            throw ParseError("scenario declares task '" + v->text + "' but '" + sc.task + "' was requested", v->line,
                             v->column);
        }
    }
    if (seed_override) {
        sc.seed = *seed_override;
    } else if (const ConfigValue* v = sc.config.find("run", "seed")) {
        Reader r(*v);
        const double s = r.number();
        r.finish();
        if (!(s >= 0.0) || s != std::floor(s) || s >= 0x1.0p64) throw ParseError("seed must be an integer in [0, 2^64)", v->line, v->column);
        sc.seed = static_cast<std::uint64_t>(s);
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& file, std::string task,
                       std::optional<std::uint64_t> seed_override) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw ParseError("cannot read scenario file '" + file.string() + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_scenario(ss.str(), std::move(task), seed_override, file.parent_path());
}

Report run(const Scenario& sc) {
    if (sc.task == "conj") return task_conj(sc);
    if (sc.task == "norm") return task_norm(sc);
    if (sc.task == "modular") return task_modular(sc);
    if (sc.task == "mnorm") return task_mnorm(sc);
    if (sc.task == "compare") return task_compare(sc);
    if (sc.task == "split") return task_split(sc);
    if (sc.task == "factorize") return task_factorize(sc);
    if (sc.task == "repro-example51") return task_repro_example51(sc);
    if (sc.task == "repro-nakano") return task_repro_nakano(sc);
    throw ParseError("unknown task '" + sc.task + "'");
}

}  // namespace mokit
