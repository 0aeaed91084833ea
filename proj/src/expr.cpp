#include "termshape/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace termshape::expr {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool nearly_integer(double e) { return std::floor(e) == e && std::fabs(e) < 1e15; }

}  // namespace

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    Expression run() {
        skip_ws();
        const std::int32_t root = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("unexpected trailing input", pos_);
        (void)root;
        return std::move(out_);
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    Expression out_;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
    bool consume(char c) {
        skip_ws();
        if (peek() == c) { ++pos_; return true; }
        return false;
    }

    std::int32_t push(Expression::Node n) {
        out_.nodes_.push_back(n);
        return static_cast<std::int32_t>(out_.nodes_.size() - 1);
    }
    std::int32_t push_binary(BinaryOp op, std::int32_t l, std::int32_t r) {
        Expression::Node n;
        n.kind = Expression::Node::Kind::Binary;
        n.binary = {op, l, r};
        return push(n);
    }
    std::int32_t push_unary(UnaryOp op, std::int32_t a) {
        Expression::Node n;
        n.kind = Expression::Node::Kind::Unary;
        n.unary = {op, a};
        return push(n);
    }

    std::int32_t parse_sum() {
        std::int32_t lhs = parse_prod();
        for (;;) {
            skip_ws();
            if (consume('+')) lhs = push_binary(BinaryOp::Add, lhs, parse_prod());
            else if (consume('-')) lhs = push_binary(BinaryOp::Sub, lhs, parse_prod());
            else return lhs;
        }
    }

    std::int32_t parse_prod() {
        std::int32_t lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (consume('*')) lhs = push_binary(BinaryOp::Mul, lhs, parse_unary());
            else if (consume('/')) lhs = push_binary(BinaryOp::Div, lhs, parse_unary());
            else return lhs;
        }
    }

    std::int32_t parse_unary() {
        skip_ws();
        if (consume('-')) return push_unary(UnaryOp::Neg, parse_unary());
        return parse_power();
    }

    std::int32_t parse_power() {
        const std::int32_t base = parse_atom();
        skip_ws();
        if (consume('^')) return push_binary(BinaryOp::Pow, base, parse_unary());
        return base;
    }

    std::int32_t parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            const std::int32_t inner = parse_sum();
            if (!consume(')')) throw ParseError("expected ')'", pos_);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (is_ident_start(c)) return parse_ident();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    std::int32_t parse_number() {
        double value = 0.0;
        const char* begin = src_.data() + pos_;
        const char* end = src_.data() + src_.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{}) throw ParseError("malformed number", pos_);
        pos_ = static_cast<std::size_t>(ptr - src_.data());
        Expression::Node n;
        n.kind = Expression::Node::Kind::Constant;
        n.value = value;
        return push(n);
    }

    std::int32_t parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
        const std::string name(src_.substr(start, pos_ - start));
        skip_ws();

        if (peek() == '(') {
            ++pos_;
            if (name == "exp" || name == "ln" || name == "sqrt" || name == "abs") {
                const std::int32_t arg = parse_sum();
                if (consume(',')) throw ParseError(name + " takes 1 argument", pos_ - 1);
                if (!consume(')')) throw ParseError("expected ')'", pos_);
                const UnaryOp op = name == "exp"    ? UnaryOp::Exp
                                   : name == "ln"   ? UnaryOp::Ln
                                   : name == "sqrt" ? UnaryOp::Sqrt
                                                    : UnaryOp::Abs;
                return push_unary(op, arg);
            }
            if (name == "min" || name == "max") {
                const std::int32_t a = parse_sum();
                if (!consume(',')) throw ParseError(name + " takes 2 arguments", pos_);
                const std::int32_t b = parse_sum();
                if (consume(',')) throw ParseError(name + " takes 2 arguments", pos_ - 1);
                if (!consume(')')) throw ParseError("expected ')'", pos_);
                return push_binary(name == "min" ? BinaryOp::Min : BinaryOp::Max, a, b);
            }
            throw ParseError("unknown function '" + name + "'", start);
        }

        Expression::Node n;
        if (name == "x") { n.kind = Expression::Node::Kind::VarX; return push(n); }
        if (name == "t") { n.kind = Expression::Node::Kind::VarT; return push(n); }
        // any other identifier is a parameter
        n.kind = Expression::Node::Kind::Param;
        std::int32_t idx = -1;
        for (std::size_t i = 0; i < out_.params_.size(); ++i)
            if (out_.params_[i] == name) idx = static_cast<std::int32_t>(i);
        if (idx < 0) {
            out_.params_.push_back(name);
            idx = static_cast<std::int32_t>(out_.params_.size() - 1);
        }
        n.param = idx;
        return push(n);
    }
};

Expression Expression::parse(std::string_view source) { return Parser(source).run(); }

double Expression::eval_node(std::int32_t idx, double x, double t, const double* bound) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.kind) {
        case Node::Kind::Constant: return n.value;
        case Node::Kind::VarX: return x;
        case Node::Kind::VarT: return t;
        case Node::Kind::Param: return bound[n.param];
        case Node::Kind::Unary: {
            const double a = eval_node(n.unary.arg, x, t, bound);
            switch (n.unary.op) {
                case UnaryOp::Neg: return -a;
                case UnaryOp::Exp: return std::exp(a);
                case UnaryOp::Ln:
                    if (!(a > 0.0)) throw EvalError("ln of non-positive value");
                    return std::log(a);
                case UnaryOp::Sqrt:
                    if (a < 0.0) throw EvalError("sqrt of negative value");
                    return std::sqrt(a);
                case UnaryOp::Abs: return std::fabs(a);
            }
            break;
        }
        case Node::Kind::Binary: {
            const double a = eval_node(n.binary.lhs, x, t, bound);
            const double b = eval_node(n.binary.rhs, x, t, bound);
            switch (n.binary.op) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div:
                    if (b == 0.0) throw EvalError("division by zero");
                    return a / b;
                case BinaryOp::Pow: {
                    if (a < 0.0 && !nearly_integer(b))
                        throw EvalError("fractional power of negative base");
                    const double r = std::pow(a, b);
                    if (!std::isfinite(r)) throw EvalError("non-finite power");
                    return r;
                }
                case BinaryOp::Min: return std::fmin(a, b);
                case BinaryOp::Max: return std::fmax(a, b);
            }
            break;
        }
    }
    throw EvalError("corrupt expression node");
}

std::vector<double> Expression::bind(const ParamMap& params) const {
    std::vector<double> bound(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const auto it = params.find(params_[i]);
        if (it == params.end()) throw EvalError("unbound parameter '" + params_[i] + "'");
        bound[i] = it->second;
    }
    return bound;
}

double Expression::eval_bound(double x, double t, const std::vector<double>& bound) const {
    return eval_node(static_cast<std::int32_t>(nodes_.size() - 1), x, t, bound.data());
}

bool Expression::uses_time() const {
    for (const Node& n : nodes_)
        if (n.kind == Node::Kind::VarT) return true;
    return false;
}

double Expression::eval(double x, double t, const ParamMap& params) const {
    const std::vector<double> bound = bind(params);
    return eval_bound(x, t, bound);
}

double Expression::derivative_fd(double x, double t, const ParamMap& params, int order,
                                 double step) const {
    if (order != 1 && order != 2) throw ConfigError("derivative_fd: order must be 1 or 2");
    if (step <= 0.0) step = 1e-5 * std::max(1.0, std::fabs(x));
    const std::vector<double> bound = bind(params);
    const double up = eval_bound(x + step, t, bound);
    const double dn = eval_bound(x - step, t, bound);
    if (order == 1) return (up - dn) / (2.0 * step);
    const double mid = eval_bound(x, t, bound);
    return (up - 2.0 * mid + dn) / (step * step);
}

void Expression::print_node(std::int32_t idx, std::string& out) const {
    const Node& n = nodes_[static_cast<std::size_t>(idx)];
    switch (n.kind) {
        case Node::Kind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", n.value);
            out += buf;
            return;
        }
        case Node::Kind::VarX: out += 'x'; return;
        case Node::Kind::VarT: out += 't'; return;
        case Node::Kind::Param: out += params_[static_cast<std::size_t>(n.param)]; return;
        case Node::Kind::Unary: {
            static const char* names[] = {"-", "exp", "ln", "sqrt", "abs"};
            const char* nm = names[static_cast<int>(n.unary.op)];
            if (n.unary.op == UnaryOp::Neg) {
                out += "(-";
                print_node(n.unary.arg, out);
                out += ')';
            } else {
                out += nm;
                out += '(';
                print_node(n.unary.arg, out);
                out += ')';
            }
            return;
        }
        case Node::Kind::Binary: {
            const auto op = n.binary.op;
            if (op == BinaryOp::Min || op == BinaryOp::Max) {
                out += (op == BinaryOp::Min) ? "min(" : "max(";
                print_node(n.binary.lhs, out);
                out += ',';
                print_node(n.binary.rhs, out);
                out += ')';
                return;
            }
            static const char glyph[] = {'+', '-', '*', '/', '^'};
            out += '(';
            print_node(n.binary.lhs, out);
            out += glyph[static_cast<int>(op)];
            print_node(n.binary.rhs, out);
            out += ')';
            return;
        }
    }
}

std::string Expression::print() const {
    std::string out;
    print_node(static_cast<std::int32_t>(nodes_.size() - 1), out);
    return out;
}

}  // namespace termshape::expr
