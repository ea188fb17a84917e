#pragma once

#include <memory>
#include <string>

namespace dirac {

/// Compiled real-valued expression in the variables t and x.
///
/// Grammar: sums and products with + - * /, right-associative ^, unary minus,
/// parentheses, numeric literals, the constant pi and the functions
/// sin, cos, exp, sqrt. Parse errors throw ConfigError with the offending column.
class Expression {
public:
    struct Node;

    static Expression parse(const std::string& text);

    double operator()(double t, double x) const;
    /// True when the variable t does not occur.
    bool time_independent() const { return !uses_t_; }
    const std::string& text() const { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
    bool uses_t_ = false;
};

}  // namespace dirac
