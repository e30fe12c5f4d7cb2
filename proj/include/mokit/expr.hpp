#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace mokit {

/// Arithmetic expression over the variables t and u.
///
/// Grammar (whitespace ignored):
///
///     expr    := term (('+' | '-') term)*
///     term    := unary (('*' | '/') unary)*
///     unary   := '-' unary | primary
///     primary := NUMBER | 't' | 'u' | '(' expr ')'
///              | ('pow' | 'min' | 'max') '(' expr ',' expr ')'
///
/// NUMBER follows the usual decimal/scientific form (`2`, `0.5`, `1e-3`).
class Expr {
public:
    enum class Op { Const, T, U, Add, Sub, Mul, Div, Neg, Pow, Min, Max };

    struct Node {
        Op op;
        double value = 0.0;  // Const only
        int lhs = -1;
        int rhs = -1;
    };

    Expr();  // the constant 0

    static Expr constant(double v);

    /// Parses `text`. Errors are reported as ParseError with the column of the
    /// offending token, offset by `column_offset` and tagged with `line`.
    static Expr parse(std::string_view text, std::size_t line = 0, std::size_t column_offset = 0);

    double eval(double t, double u) const;

    bool uses_t() const noexcept { return uses_t_; }
    bool uses_u() const noexcept { return uses_u_; }
    bool is_constant() const noexcept { return !uses_t_ && !uses_u_; }

    /// Canonical, fully parenthesised rendering that parses back to an equivalent expression.
    std::string to_string() const;

private:
    explicit Expr(std::shared_ptr<const std::vector<Node>> nodes, int root);
    double eval_node(int idx, double t, double u) const;
    std::string render(int idx) const;

    std::shared_ptr<const std::vector<Node>> nodes_;
    int root_ = 0;
    bool uses_t_ = false;
    bool uses_u_ = false;

    friend class ExprParser;
};

namespace detail {

enum class TokKind { Number, Ident, String, Punct, End };

struct Token {
    TokKind kind;
    std::string text;
    double number = 0.0;
    std::size_t column = 0;  // 1-based within the lexed text
};

/// Tokenizer shared by the expression, family and scenario grammars.
std::vector<Token> tokenize(std::string_view text, std::size_t line = 0, std::size_t column_offset = 0);

}  // namespace detail

}  // namespace mokit
