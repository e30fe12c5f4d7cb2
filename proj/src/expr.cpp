#include "mokit/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "mokit/errors.hpp"

namespace mokit {

namespace detail {

std::vector<Token> tokenize(std::string_view text, std::size_t line, std::size_t column_offset) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        const std::size_t col = i + 1 + column_offset;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < text.size() &&
                                                            std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
            std::size_t j = i;
            while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) ++j;
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
                    j = k;
                    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
                }
            }
            const std::string lexeme(text.substr(i, j - i));
            char* end = nullptr;
            const double v = std::strtod(lexeme.c_str(), &end);
            if (end != lexeme.c_str() + lexeme.size()) {
                throw ParseError("malformed number '" + lexeme + "'", line, col);
            }
            out.push_back({TokKind::Number, lexeme, v, col});
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            out.push_back({TokKind::Ident, std::string(text.substr(i, j - i)), 0.0, col});
            i = j;
            continue;
        }
        if (c == '"') {
            std::size_t j = i + 1;
            while (j < text.size() && text[j] != '"') ++j;
            if (j >= text.size()) throw ParseError("unterminated string", line, col);
            out.push_back({TokKind::String, std::string(text.substr(i + 1, j - i - 1)), 0.0, col});
            i = j + 1;
            continue;
        }
        static constexpr std::string_view kPunct = "()[],=+-*/";
        if (kPunct.find(c) != std::string_view::npos) {
            out.push_back({TokKind::Punct, std::string(1, c), 0.0, col});
            ++i;
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    out.push_back({TokKind::End, "", 0.0, text.size() + 1 + column_offset});
    return out;
}

}  // namespace detail

class ExprParser {
public:
    ExprParser(std::vector<detail::Token> toks, std::size_t line) : toks_(std::move(toks)), line_(line) {}

    Expr run() {
        const int root = expr();
        if (peek().kind != detail::TokKind::End) fail("unexpected '" + peek().text + "'");
        Expr e(std::make_shared<const std::vector<Expr::Node>>(std::move(nodes_)), root);
        e.uses_t_ = uses_t_;
        e.uses_u_ = uses_u_;
        return e;
    }

private:
    const detail::Token& peek() const { return toks_[pos_]; }
    const detail::Token& next() { return toks_[pos_++]; }
    bool accept(const char* punct) {
        if (peek().kind == detail::TokKind::Punct && peek().text == punct) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(const char* punct) {
        if (!accept(punct)) fail(std::string("expected '") + punct + "'");
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, peek().column); }

    int push(Expr::Op op, int lhs = -1, int rhs = -1, double v = 0.0) {
        nodes_.push_back({op, v, lhs, rhs});
        return static_cast<int>(nodes_.size()) - 1;
    }

    int expr() {
        int lhs = term();
        for (;;) {
            if (accept("+")) lhs = push(Expr::Op::Add, lhs, term());
            else if (accept("-")) lhs = push(Expr::Op::Sub, lhs, term());
            else return lhs;
        }
    }

    int term() {
        int lhs = unary();
        for (;;) {
            if (accept("*")) lhs = push(Expr::Op::Mul, lhs, unary());
            else if (accept("/")) lhs = push(Expr::Op::Div, lhs, unary());
            else return lhs;
        }
    }

    int unary() {
        if (accept("-")) return push(Expr::Op::Neg, unary());
        return primary();
    }

    int primary() {
        const detail::Token& tok = peek();
        switch (tok.kind) {
            case detail::TokKind::Number:
                next();
                return push(Expr::Op::Const, -1, -1, tok.number);
            case detail::TokKind::Ident: {
                const std::string name = tok.text;
                next();
                if (name == "t") {
                    uses_t_ = true;
                    return push(Expr::Op::T);
                }
                if (name == "u") {
                    uses_u_ = true;
                    return push(Expr::Op::U);
                }
                Expr::Op op;
                if (name == "pow") op = Expr::Op::Pow;
                else if (name == "min") op = Expr::Op::Min;
                else if (name == "max") op = Expr::Op::Max;
                else {
                    --pos_;
                    fail("unknown identifier '" + name + "'");
                }
                expect("(");
                const int a = expr();
                expect(",");
                const int b = expr();
                expect(")");
                return push(op, a, b);
            }
            case detail::TokKind::Punct:
                if (accept("(")) {
                    const int inner = expr();
                    expect(")");
                    return inner;
                }
                fail("unexpected '" + tok.text + "'");
            default:
                fail(tok.kind == detail::TokKind::End ? "unexpected end of expression" : "unexpected token");
        }
    }

    std::vector<detail::Token> toks_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::vector<Expr::Node> nodes_;
    bool uses_t_ = false;
    bool uses_u_ = false;
};

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const std::vector<Node>> nodes, int root) : nodes_(std::move(nodes)), root_(root) {}

Expr Expr::constant(double v) {
    return Expr(std::make_shared<const std::vector<Node>>(std::vector<Node>{{Op::Const, v, -1, -1}}), 0);
}

Expr Expr::parse(std::string_view text, std::size_t line, std::size_t column_offset) {
    return ExprParser(detail::tokenize(text, line, column_offset), line).run();
}

double Expr::eval(double t, double u) const { return eval_node(root_, t, u); }

double Expr::eval_node(int idx, double t, double u) const {
    const Node& n = (*nodes_)[static_cast<std::size_t>(idx)];
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::T: return t;
        case Op::U: return u;
        case Op::Add: return eval_node(n.lhs, t, u) + eval_node(n.rhs, t, u);
        case Op::Sub: return eval_node(n.lhs, t, u) - eval_node(n.rhs, t, u);
        case Op::Mul: return eval_node(n.lhs, t, u) * eval_node(n.rhs, t, u);
        case Op::Div: return eval_node(n.lhs, t, u) / eval_node(n.rhs, t, u);
        case Op::Neg: return -eval_node(n.lhs, t, u);
        case Op::Pow: return std::pow(eval_node(n.lhs, t, u), eval_node(n.rhs, t, u));
        case Op::Min: return std::min(eval_node(n.lhs, t, u), eval_node(n.rhs, t, u));
        case Op::Max: return std::max(eval_node(n.lhs, t, u), eval_node(n.rhs, t, u));
    }
    return 0.0;
}

namespace {
std::string number_text(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}
}  // namespace

std::string Expr::render(int idx) const {
    const Node& n = (*nodes_)[static_cast<std::size_t>(idx)];
    switch (n.op) {
        case Op::Const: return n.value < 0 ? "(" + number_text(n.value) + ")" : number_text(n.value);
        case Op::T: return "t";
        case Op::U: return "u";
        case Op::Add: return "(" + render(n.lhs) + " + " + render(n.rhs) + ")";
        case Op::Sub: return "(" + render(n.lhs) + " - " + render(n.rhs) + ")";
        case Op::Mul: return "(" + render(n.lhs) + " * " + render(n.rhs) + ")";
        case Op::Div: return "(" + render(n.lhs) + " / " + render(n.rhs) + ")";
        case Op::Neg: return "(-" + render(n.lhs) + ")";
        case Op::Pow: return "pow(" + render(n.lhs) + ", " + render(n.rhs) + ")";
        case Op::Min: return "min(" + render(n.lhs) + ", " + render(n.rhs) + ")";
        case Op::Max: return "max(" + render(n.lhs) + ", " + render(n.rhs) + ")";
    }
    return "";
}

std::string Expr::to_string() const { return render(root_); }

}  // namespace mokit
