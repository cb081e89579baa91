#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>

#include "cridx/defexpr.hpp"
#include "cridx/errors.hpp"

namespace cridx {
namespace {

NodePtr make_node(NodeKind kind, std::vector<NodePtr> args = {}) {
    auto node = std::make_shared<ExprNode>();
    node->kind = kind;
    node->args = std::move(args);
    return node;
}

NodePtr make_constant(cplx value) {
    auto node = std::make_shared<ExprNode>();
    node->kind = NodeKind::Constant;
    node->value = value;
    return node;
}

struct FunctionName {
    std::string_view name;
    NodeKind kind;
};

constexpr FunctionName kFunctions[] = {
    {"conj", NodeKind::Conj}, {"re", NodeKind::Re},   {"im", NodeKind::Im},
    {"abs2", NodeKind::Abs2}, {"exp", NodeKind::Exp}, {"log", NodeKind::Log},
    {"sin", NodeKind::Sin},   {"cos", NodeKind::Cos}, {"sqrt", NodeKind::Sqrt},
};

// Recursive-descent parser.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number | 'i' | 'z'digits | func '(' expr ')' | '(' expr ')'
class Parser {
public:
    Parser(std::string_view text, int n) : text_(text), n_(n) {}

    NodePtr parse() {
        skip_space();
        if (at_end()) throw ParseError("empty expression", pos_);
        NodePtr root = parse_expr();
        skip_space();
        if (!at_end()) throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
        return root;
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_space() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void expect(char c) {
        skip_space();
        if (peek() != c) {
            if (at_end()) throw ParseError(std::string("expected '") + c + "' but input ended", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
        ++pos_;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            skip_space();
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            NodePtr rhs = parse_term();
            lhs = make_node(c == '+' ? NodeKind::Add : NodeKind::Sub, {lhs, rhs});
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            skip_space();
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            NodePtr rhs = parse_unary();
            lhs = make_node(c == '*' ? NodeKind::Mul : NodeKind::Div, {lhs, rhs});
        }
    }

    NodePtr parse_unary() {
        skip_space();
        if (peek() == '-') {
            ++pos_;
            return make_node(NodeKind::Neg, {parse_unary()});
        }
        if (peek() == '+') {
            ++pos_;
            return parse_unary();
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        skip_space();
        if (peek() != '^') return base;
        ++pos_;
        skip_space();
        bool negative = false;
        if (peek() == '-') {
            negative = true;
            ++pos_;
            skip_space();
        }
        std::size_t start = pos_;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("exponent must be an integer literal", start);
        if (peek() == '.' || peek() == 'e' || peek() == 'E') throw ParseError("exponent must be an integer literal", pos_);
        int value = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || value > 64) throw ParseError("exponent out of range", start);
        auto node = std::make_shared<ExprNode>();
        node->kind = NodeKind::Pow;
        node->exponent = negative ? -value : value;
        node->args = {base};
        skip_space();
        if (peek() == '^') throw ParseError("chained '^' is ambiguous; add parentheses", pos_);
        return node;
    }

    NodePtr parse_number() {
        std::size_t start = pos_;
        while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
        if (peek() == 'e' || peek() == 'E') {
            std::size_t save = pos_;
            ++pos_;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (!std::isdigit(static_cast<unsigned char>(peek()))) {
                pos_ = save;
            } else {
                while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            }
        }
        std::string token(text_.substr(start, pos_ - start));
        char* end = nullptr;
        double value = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) throw ParseError("malformed number '" + token + "'", start);
        return make_constant(value);
    }

    NodePtr parse_primary() {
        skip_space();
        if (at_end()) throw ParseError("unexpected end of input", pos_);
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
            std::string_view ident = text_.substr(start, pos_ - start);
            return resolve_identifier(ident, start);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr resolve_identifier(std::string_view ident, std::size_t start) {
        if (ident == "i") return make_constant(cplx(0.0, 1.0));
        if (ident.size() >= 2 && ident[0] == 'z') {
            bool digits = true;
            for (char d : ident.substr(1)) digits = digits && std::isdigit(static_cast<unsigned char>(d));
            if (digits) {
                int j = 0;
                auto [ptr, ec] = std::from_chars(ident.data() + 1, ident.data() + ident.size(), j);
                if (ec != std::errc() || j < 1 || j > n_) {
                    throw ParseError("coordinate '" + std::string(ident) + "' out of range 1.." + std::to_string(n_),
                                     start);
                }
                auto node = std::make_shared<ExprNode>();
                node->kind = NodeKind::Coord;
                node->index = j - 1;
                return node;
            }
        }
        for (const auto& fn : kFunctions) {
            if (fn.name == ident) {
                skip_space();
                if (peek() != '(') throw ParseError("function '" + std::string(ident) + "' needs '('", pos_);
                ++pos_;
                NodePtr arg = parse_expr();
                expect(')');
                return make_node(fn.kind, {arg});
            }
        }
        throw ParseError("unknown identifier '" + std::string(ident) + "'", start);
    }

    std::string_view text_;
    int n_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view text, int n) {
    if (n < 1) throw PreconditionError("dimension must be positive");
    return Expr(Parser(text, n).parse(), n);
}

Expr parse_defining_function(std::string_view text, int n) {
    Expr expr = parse_expression(text, n);
    check_realness(expr);
    return expr;
}

}  // namespace cridx
