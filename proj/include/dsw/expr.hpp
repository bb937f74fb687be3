#pragma once

// Small arithmetic expression evaluator for custom initial data.
// Grammar: + - * / ^ (right-assoc), unary minus, parentheses, function calls.
// Functions: exp, sech, tanh, cosh, sin, cos, sqrt, abs, log.
// Names not bound as functions resolve through the variable map (x, y, R,
// A0, nu, epsilon, pi, e).

#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

namespace dsw {

class Expr {
public:
    using Vars = std::map<std::string, double>;

    static Expr parse(const std::string& text) {
        Parser p{text, 0};
        Expr e;
        e.root_ = p.parse_expr();
        p.skip_ws();
        if (p.pos != text.size()) throw std::invalid_argument("expr: trailing input at '" + text.substr(p.pos) + "'");
        return e;
    }

    double eval(const Vars& vars) const { return root_->eval(vars); }

private:
    struct Node {
        virtual ~Node() = default;
        virtual double eval(const Vars&) const = 0;
    };
    using NodePtr = std::shared_ptr<Node>;

    struct Num : Node {
        double v;
        explicit Num(double x) : v(x) {}
        double eval(const Vars&) const override { return v; }
    };
    struct Var : Node {
        std::string name;
        explicit Var(std::string n) : name(std::move(n)) {}
        double eval(const Vars& vars) const override {
            auto it = vars.find(name);
            if (it == vars.end()) throw std::invalid_argument("expr: unknown name '" + name + "'");
            return it->second;
        }
    };
    struct Bin : Node {
        char op;
        NodePtr a, b;
        Bin(char o, NodePtr x, NodePtr y) : op(o), a(std::move(x)), b(std::move(y)) {}
        double eval(const Vars& vars) const override {
            const double x = a->eval(vars), y = b->eval(vars);
            switch (op) {
                case '+': return x + y;
                case '-': return x - y;
                case '*': return x * y;
                case '/': return x / y;
                case '^': return std::pow(x, y);
            }
            return 0.0;
        }
    };
    struct Neg : Node {
        NodePtr a;
        explicit Neg(NodePtr x) : a(std::move(x)) {}
        double eval(const Vars& vars) const override { return -a->eval(vars); }
    };
    struct Call : Node {
        std::function<double(double)> fn;
        NodePtr a;
        Call(std::function<double(double)> f, NodePtr x) : fn(std::move(f)), a(std::move(x)) {}
        double eval(const Vars& vars) const override { return fn(a->eval(vars)); }
    };

    struct Parser {
        const std::string& s;
        std::size_t pos;

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

        NodePtr parse_expr() {
            NodePtr a = parse_term();
            for (;;) {
                if (eat('+'))
                    a = std::make_shared<Bin>('+', a, parse_term());
                else if (eat('-'))
                    a = std::make_shared<Bin>('-', a, parse_term());
                else
                    return a;
            }
        }
        NodePtr parse_term() {
            NodePtr a = parse_unary();
            for (;;) {
                if (eat('*'))
                    a = std::make_shared<Bin>('*', a, parse_unary());
                else if (eat('/'))
                    a = std::make_shared<Bin>('/', a, parse_unary());
                else
                    return a;
            }
        }
        NodePtr parse_unary() {
            if (eat('-')) return std::make_shared<Neg>(parse_unary());
            if (eat('+')) return parse_unary();
            return parse_power();
        }
        NodePtr parse_power() {
            NodePtr a = parse_atom();
            if (eat('^')) return std::make_shared<Bin>('^', a, parse_unary());
            return a;
        }
        NodePtr parse_atom() {
            skip_ws();
            if (pos >= s.size()) throw std::invalid_argument("expr: unexpected end of input");
            const char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::size_t used = 0;
                const double v = std::stod(s.substr(pos), &used);
                pos += used;
                return std::make_shared<Num>(v);
            }
            if (c == '(') {
                ++pos;
                NodePtr e = parse_expr();
                if (!eat(')')) throw std::invalid_argument("expr: missing ')'");
                return e;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t end = pos;
                while (end < s.size() &&
                       (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
                    ++end;
                std::string name = s.substr(pos, end - pos);
                pos = end;
                skip_ws();
                if (pos < s.size() && s[pos] == '(') {
                    ++pos;
                    NodePtr arg = parse_expr();
                    if (!eat(')')) throw std::invalid_argument("expr: missing ')' after call");
                    return std::make_shared<Call>(function_named(name), arg);
                }
                return std::make_shared<Var>(std::move(name));
            }
            throw std::invalid_argument(std::string("expr: unexpected character '") + c + "'");
        }

        static std::function<double(double)> function_named(const std::string& name) {
            if (name == "exp") return [](double x) { return std::exp(x); };
            if (name == "sech") return [](double x) { return 1.0 / std::cosh(x); };
            if (name == "tanh") return [](double x) { return std::tanh(x); };
            if (name == "cosh") return [](double x) { return std::cosh(x); };
            if (name == "sin") return [](double x) { return std::sin(x); };
            if (name == "cos") return [](double x) { return std::cos(x); };
            if (name == "sqrt") return [](double x) { return std::sqrt(x); };
            if (name == "abs") return [](double x) { return std::abs(x); };
            if (name == "log") return [](double x) { return std::log(x); };
            throw std::invalid_argument("expr: unknown function '" + name + "'");
        }
    };

    NodePtr root_;
};

}  // namespace dsw
