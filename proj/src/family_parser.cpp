#include <algorithm>
#include <map>
#include <set>

#include "mokit/errors.hpp"
#include "mokit/young.hpp"

namespace mokit {

namespace {

struct Arg {
    std::string key;
    std::string value;
    std::size_t value_col;  // 0-based offset of value within the full text
    std::size_t key_col;
};

std::string trim(std::string_view s, std::size_t& lead) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        lead = s.size();
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    lead = b;
    return std::string(s.substr(b, e - b + 1));
}

class FamilyText {
public:
    FamilyText(std::string_view text, const FamilyParseOptions& opts) : text_(text), opts_(opts) {}

    [[noreturn]] void fail(const std::string& msg, std::size_t offset) const {
        throw ParseError(msg, opts_.line, opts_.column_offset + offset + 1);
    }

    void split() {
        std::size_t lead = 0;
        const std::string body = trim(text_, lead);
        if (body.empty()) fail("empty function expression", 0);
        const auto open = body.find('(');
        if (open == std::string::npos) fail("expected '<family>(...)'", lead);
        std::size_t nlead = 0;
        name_ = trim(std::string_view(body).substr(0, open), nlead);
        name_col_ = lead + nlead;
        if (body.back() != ')') fail("expected ')' at end of function expression", lead + body.size() - 1);
        const std::size_t inner_begin = lead + open + 1;
        const std::string_view inner = text_.substr(inner_begin, lead + body.size() - 1 - inner_begin);

        int depth = 0;
        bool quoted = false;
        std::size_t start = 0;
        auto flush = [&](std::size_t end) {
            const std::string_view piece = inner.substr(start, end - start);
            std::size_t plead = 0;
            const std::string p = trim(piece, plead);
            if (p.empty()) {
                if (end == inner.size() && args_.empty() && start == 0) return;  // "name()"
                fail("empty argument", inner_begin + start);
            }
            const auto eq = piece.find('=');
            if (eq == std::string_view::npos) fail("expected 'key = value'", inner_begin + start + plead);
            std::size_t klead = 0, vlead = 0;
            std::string key = trim(piece.substr(0, eq), klead);
            std::string value = trim(piece.substr(eq + 1), vlead);
            if (key.empty()) fail("missing argument name", inner_begin + start + plead);
            if (value.empty()) fail("missing value for '" + key + "'", inner_begin + start + eq + 1);
            args_.push_back({std::move(key), std::move(value), inner_begin + start + eq + 1 + vlead, inner_begin + start + klead});
        };
        for (std::size_t i = 0; i < inner.size(); ++i) {
            const char c = inner[i];
            if (c == '"') quoted = !quoted;
            if (quoted) continue;
            if (c == '(') ++depth;
            else if (c == ')') {
                if (--depth < 0) fail("unbalanced ')'", inner_begin + i);
            } else if (c == ',' && depth == 0) {
                flush(i);
                start = i + 1;
            }
        }
        if (depth != 0 || quoted) fail("unbalanced parentheses or quotes", inner_begin);
        flush(inner.size());
    }

    void check_keys(const std::set<std::string>& allowed, const std::set<std::string>& required) {
        std::set<std::string> seen;
        for (const auto& a : args_) {
            if (!allowed.count(a.key)) fail("unknown argument '" + a.key + "' for " + name_, a.key_col);
            if (!seen.insert(a.key).second) fail("duplicate argument '" + a.key + "'", a.key_col);
        }
        for (const auto& r : required) {
            if (!seen.count(r)) fail(name_ + ": missing required argument '" + r + "'", name_col_);
        }
    }

    const Arg* find(const std::string& key) const {
        auto it = std::find_if(args_.begin(), args_.end(), [&](const Arg& a) { return a.key == key; });
        return it == args_.end() ? nullptr : &*it;
    }

    Expr expr(const std::string& key, bool allow_u = false) const {
        const Arg* a = find(key);
        Expr e = Expr::parse(a->value, opts_.line, opts_.column_offset + a->value_col);
        if (!allow_u && e.uses_u()) fail("'" + key + "' may depend on t only", a->value_col);
        return e;
    }

    double constant(const std::string& key) const {
        const Arg* a = find(key);
        Expr e = expr(key);
        if (!e.is_constant()) fail("'" + key + "' must be a constant", a->value_col);
        return e.eval(0.0, 0.0);
    }

    std::optional<Expr> cap() const {
        if (!find("cap")) return std::nullopt;
        return expr("cap");
    }

    std::string string_value(const std::string& key) const {
        const Arg* a = find(key);
        std::string v = a->value;
        if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
        return v;
    }

    const std::string& name() const { return name_; }
    std::size_t name_col() const { return name_col_; }

private:
    std::string_view text_;
    const FamilyParseOptions& opts_;
    std::string name_;
    std::size_t name_col_ = 0;
    std::vector<Arg> args_;
};

}  // namespace

MOFunction parse_family(std::string_view text, const FamilyParseOptions& opts) {
    FamilyText ft(text, opts);
    ft.split();
    const std::string& name = ft.name();
    try {
        if (name == "nakano") {
            ft.check_keys({"p", "normalized", "cap"}, {"p"});
            bool normalized = false;
            if (ft.find("normalized")) {
                const double n = ft.constant("normalized");
                if (n != 0.0 && n != 1.0) ft.fail("normalized must be 0 or 1", ft.find("normalized")->value_col);
                normalized = n == 1.0;
            }
            return MOFunction::nakano(ft.expr("p"), normalized, ft.cap());
        }
        if (name == "power") {
            ft.check_keys({"p", "scale", "cap"}, {"p"});
            const double scale = ft.find("scale") ? ft.constant("scale") : 1.0;
            return MOFunction::power(ft.constant("p"), scale, ft.cap());
        }
        if (name == "hinge") {
            ft.check_keys({"shift", "cap"}, {"shift"});
            return MOFunction::hinge(ft.expr("shift"), ft.cap());
        }
        if (name == "linear") {
            ft.check_keys({"weight", "cap"}, {"weight"});
            return MOFunction::linear(ft.expr("weight"), ft.cap());
        }
        if (name == "indicator") {
            ft.check_keys({"level"}, {"level"});
            return MOFunction::indicator(ft.expr("level"));
        }
        if (name == "table") {
            ft.check_keys({"file", "cap"}, {"file"});
            std::filesystem::path p = ft.string_value("file");
            if (p.is_relative() && !opts.base_dir.empty()) p = opts.base_dir / p;
            return MOFunction::table(load_table_csv(p), ft.cap());
        }
        if (name == "custom") {
            ft.check_keys({"f", "cap"}, {"f"});
            Expr f = ft.expr("f", true);
            if (opts.validation_points.empty()) return MOFunction::custom(std::move(f), ft.cap());
            return MOFunction::custom(std::move(f), ft.cap(), opts.validation_points);
        }
    } catch (const DomainError& e) {
        // surface construction errors at the expression's position
        ft.fail(e.what(), ft.name_col());
    }
    ft.fail("unknown function family '" + name + "'", ft.name_col());
}

}  // namespace mokit
