#include "cdii/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace cdii {

struct Expr::Node {
    enum Kind { Num, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Exp, Sin, Cos, Log } kind;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw InvalidInput("expression error at position " + std::to_string(pos) + ": " +
                           what + " in \"" + s + "\"");
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    NodePtr make(Expr::Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr,
                 double v = 0.0) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = k;
        n->value = v;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (eat('+'))
                lhs = make(Expr::Node::Add, lhs, parse_term());
            else if (eat('-'))
                lhs = make(Expr::Node::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (eat('*'))
                lhs = make(Expr::Node::Mul, lhs, parse_unary());
            else if (eat('/'))
                lhs = make(Expr::Node::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (eat('-')) return make(Expr::Node::Neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (eat('^')) return make(Expr::Node::Pow, base, parse_unary()); // right-assoc
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of expression");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            NodePtr e = parse_expr();
            if (!eat(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = s.c_str() + pos;
            char* end = nullptr;
            double v = std::strtod(start, &end);
            if (end == start) fail("bad number");
            pos += std::size_t(end - start);
            return make(Expr::Node::Num, nullptr, nullptr, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
            std::string name = s.substr(start, pos - start);
            if (name == "x") return make(Expr::Node::VarX);
            if (name == "y") return make(Expr::Node::VarY);
            if (name == "pi") return make(Expr::Node::Num, nullptr, nullptr, M_PI);
            Expr::Node::Kind k;
            if (name == "exp")
                k = Expr::Node::Exp;
            else if (name == "sin")
                k = Expr::Node::Sin;
            else if (name == "cos")
                k = Expr::Node::Cos;
            else if (name == "log")
                k = Expr::Node::Log;
            else
                fail("unknown identifier '" + name + "'");
            if (!eat('(')) fail("expected '(' after function name");
            NodePtr arg = parse_expr();
            if (!eat(')')) fail("missing ')'");
            return make(k, arg);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

double eval_node(const Expr::Node& n, double x, double y) {
    using K = Expr::Node;
    switch (n.kind) {
    case K::Num: return n.value;
    case K::VarX: return x;
    case K::VarY: return y;
    case K::Add: return eval_node(*n.a, x, y) + eval_node(*n.b, x, y);
    case K::Sub: return eval_node(*n.a, x, y) - eval_node(*n.b, x, y);
    case K::Mul: return eval_node(*n.a, x, y) * eval_node(*n.b, x, y);
    case K::Div: return eval_node(*n.a, x, y) / eval_node(*n.b, x, y);
    case K::Pow: return std::pow(eval_node(*n.a, x, y), eval_node(*n.b, x, y));
    case K::Neg: return -eval_node(*n.a, x, y);
    case K::Exp: return std::exp(eval_node(*n.a, x, y));
    case K::Sin: return std::sin(eval_node(*n.a, x, y));
    case K::Cos: return std::cos(eval_node(*n.a, x, y));
    case K::Log: return std::log(eval_node(*n.a, x, y));
    }
    return 0.0;
}

} // namespace

Expr Expr::parse(const std::string& text) {
    Parser p(text);
    Expr e;
    e.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing input");
    e.src_ = text;
    return e;
}

double Expr::eval(double x, double y) const { return eval_node(*root_, x, y); }

ScalarField Expr::sample(const Grid2D& g) const {
    ScalarField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double v = eval(g.x(i), g.y(j));
            if (!std::isfinite(v))
                throw InvalidInput("expression \"" + src_ + "\" is not finite at (" +
                                   std::to_string(g.x(i)) + ", " + std::to_string(g.y(j)) +
                                   ")");
            f.v[g.idx(i, j)] = v;
        }
    return f;
}

} // namespace cdii
