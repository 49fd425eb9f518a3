#include "pmrd/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "pmrd/errors.hpp"

namespace pmrd {

struct Expression::Node {
    enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
    enum class Fn { Sin, Cos, Exp, Abs, Step };

    Kind kind = Kind::Number;
    double value = 0.0;
    std::size_t slot = 0;
    Fn fn = Fn::Sin;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;

    double eval(std::span<const double> v) const {
        switch (kind) {
            case Kind::Number: return value;
            case Kind::Variable: return v[slot];
            case Kind::Negate: return -lhs->eval(v);
            case Kind::Add: return lhs->eval(v) + rhs->eval(v);
            case Kind::Sub: return lhs->eval(v) - rhs->eval(v);
            case Kind::Mul: return lhs->eval(v) * rhs->eval(v);
            case Kind::Div: return lhs->eval(v) / rhs->eval(v);
            case Kind::Pow: return std::pow(lhs->eval(v), rhs->eval(v));
            case Kind::Call: {
                const double a = lhs->eval(v);
                switch (fn) {
                    case Fn::Sin: return std::sin(a);
                    case Fn::Cos: return std::cos(a);
                    case Fn::Exp: return std::exp(a);
                    case Fn::Abs: return std::abs(a);
                    case Fn::Step: return a >= 0.0 ? 1.0 : 0.0;
                }
            }
        }
        return 0.0;
    }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

// Recursive descent:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | '+' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | name | name '(' expr ')' | '(' expr ')'
class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& vars) : s_(text), vars_(vars) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_space();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("expression \"" + s_ + "\": " + what + " at offset " + std::to_string(pos_), 0);
    }

    void skip_space() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
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
                lhs = make(Node::Kind::Add, lhs, term());
            else if (accept('-'))
                lhs = make(Node::Kind::Sub, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = make(Node::Kind::Mul, lhs, unary());
            else if (accept('/'))
                lhs = make(Node::Kind::Div, lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Kind::Negate, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (accept('^')) return make(Node::Kind::Pow, base, unary());
        return base;
    }

    NodePtr atom() {
        skip_space();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<Node>();
        n->value = v;
        return n;
    }

    NodePtr name() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string id = s_.substr(start, pos_ - start);

        if (accept('(')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Call;
            if (id == "sin") n->fn = Node::Fn::Sin;
            else if (id == "cos") n->fn = Node::Fn::Cos;
            else if (id == "exp") n->fn = Node::Fn::Exp;
            else if (id == "abs") n->fn = Node::Fn::Abs;
            else if (id == "step") n->fn = Node::Fn::Step;
            else fail("unknown function '" + id + "'");
            n->lhs = expr();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        if (id == "pi") {
            auto n = std::make_shared<Node>();
            n->value = std::numbers::pi;
            return n;
        }
        for (std::size_t k = 0; k < vars_.size(); ++k)
            if (vars_[k] == id) {
                auto n = std::make_shared<Node>();
                n->kind = Node::Kind::Variable;
                n->slot = k;
                return n;
            }
        fail("unknown variable '" + id + "'");
    }

    const std::string& s_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(const std::string& text, std::vector<std::string> variables)
    : text_(text), variables_(std::move(variables)) {
    root_ = Parser(text_, variables_).parse();
}

double Expression::operator()(std::span<const double> values) const {
    if (values.size() != variables_.size())
        throw DomainError("expression expects " + std::to_string(variables_.size()) + " values");
    return root_->eval(values);
}

}  // namespace pmrd
