#include "dirac/expression.hpp"

#include "dirac/types.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace dirac {

struct Expression::Node {
    enum class Kind { number, var_t, var_x, neg, add, sub, mul, div, pow, sin, cos, exp, sqrt } kind;
    double value = 0.0;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(double t, double x) const {
        switch (kind) {
            case Kind::number: return value;
            case Kind::var_t: return t;
            case Kind::var_x: return x;
            case Kind::neg: return -lhs->eval(t, x);
            case Kind::add: return lhs->eval(t, x) + rhs->eval(t, x);
            case Kind::sub: return lhs->eval(t, x) - rhs->eval(t, x);
            case Kind::mul: return lhs->eval(t, x) * rhs->eval(t, x);
            case Kind::div: return lhs->eval(t, x) / rhs->eval(t, x);
            case Kind::pow: return std::pow(lhs->eval(t, x), rhs->eval(t, x));
            case Kind::sin: return std::sin(lhs->eval(t, x));
            case Kind::cos: return std::cos(lhs->eval(t, x));
            case Kind::exp: return std::exp(lhs->eval(t, x));
            case Kind::sqrt: return std::sqrt(lhs->eval(t, x));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr, double v = 0.0) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    n->value = v;
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

    bool uses_t = false;

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression \"" + s_ + "\": " + what + " at column " + std::to_string(pos_ + 1));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make(Kind::add, lhs, term());
            else if (accept('-'))
                lhs = make(Kind::sub, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = make(Kind::mul, lhs, unary());
            else if (accept('/'))
                lhs = make(Kind::div, lhs, unary());
            else
                return lhs;
        }
    }

    // -a^b parses as -(a^b).
    NodePtr unary() {
        if (accept('-')) return make(Kind::neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make(Kind::pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - begin);
            return make(Kind::number, nullptr, nullptr, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "t") {
                uses_t = true;
                return make(Kind::var_t);
            }
            if (name == "x") return make(Kind::var_x);
            if (name == "pi") return make(Kind::number, nullptr, nullptr, std::numbers::pi);
            Kind k;
            if (name == "sin")
                k = Kind::sin;
            else if (name == "cos")
                k = Kind::cos;
            else if (name == "exp")
                k = Kind::exp;
            else if (name == "sqrt")
                k = Kind::sqrt;
            else {
                pos_ = start;
                fail("unknown identifier '" + name + "'");
            }
            if (!accept('(')) fail("expected '(' after " + name);
            NodePtr arg = expr();
            if (!accept(')')) fail("expected ')'");
            return make(k, arg);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
    Parser p(text);
    Expression e;
    e.root_ = p.parse();
    e.text_ = text;
    e.uses_t_ = p.uses_t;
    return e;
}

double Expression::operator()(double t, double x) const { return root_->eval(t, x); }

}  // namespace dirac
