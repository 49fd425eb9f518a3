#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pmrd {

/// A compiled arithmetic expression over a fixed list of variable names.
///
/// Grammar: numbers, the named variables, the constant `pi`, binary
/// + - * / ^ (right-associative power), unary minus, parentheses, and the
/// functions sin, cos, exp, abs and step (step(t) = 1 for t >= 0, else 0).
/// Parse errors raise ConfigError without a line number.
class Expression {
public:
    Expression(const std::string& text, std::vector<std::string> variables);

    /// `values` are matched positionally against the variable list.
    double operator()(std::span<const double> values) const;

    const std::string& text() const noexcept { return text_; }
    std::size_t arity() const noexcept { return variables_.size(); }

    struct Node;

private:
    std::string text_;
    std::vector<std::string> variables_;
    std::shared_ptr<const Node> root_;
};

}  // namespace pmrd
