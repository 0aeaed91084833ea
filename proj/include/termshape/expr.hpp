#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "termshape/errors.hpp"

namespace termshape::expr {

// Raised on bad source text; carries the byte offset of the offending token.
class ParseError : public ConfigError {
public:
    ParseError(const std::string& what, std::size_t offset)
        : ConfigError(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Evaluation failure: unbound parameter or a domain error (ln/sqrt of a
// negative number, division by zero, fractional power of a negative base).
class EvalError : public NumericError {
public:
    explicit EvalError(const std::string& what) : NumericError(what) {}
};

using ParamMap = std::map<std::string, double>;

enum class UnaryOp : std::uint8_t { Neg, Exp, Ln, Sqrt, Abs };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow, Min, Max };

/// Arithmetic expression in the variables x and t plus named parameters.
/// Immutable after parse; evaluation is pure and thread-safe.
///
/// Grammar (standard precedence, ^ right-associative and binding tighter
/// than unary minus):
///   sum    := prod (('+'|'-') prod)*
///   prod   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?
///   atom   := number | 'x' | 't' | ident | ident '(' args ')' | '(' sum ')'
/// Identifiers outside {x, t, exp, ln, sqrt, abs, min, max} become parameters.
class Expression {
public:
    static Expression parse(std::string_view source);

    double eval(double x, double t, const ParamMap& params = {}) const;

    /// Central finite-difference estimate of the first or second x-derivative.
    /// Default step: 1e-5 * max(1, |x|).
    double derivative_fd(double x, double t, const ParamMap& params, int order,
                         double step = 0.0) const;

    const std::vector<std::string>& parameters() const { return params_; }

    bool uses_time() const;

    /// Fully parenthesized source; parse(print()) evaluates identically.
    std::string print() const;

    /// Snapshot parameter values for repeated fast evaluation.
    std::vector<double> bind(const ParamMap& params) const;
    double eval_bound(double x, double t, const std::vector<double>& bound) const;

private:
    struct Node {
        enum class Kind : std::uint8_t { Constant, VarX, VarT, Param, Unary, Binary } kind;
        union {
            double value;
            struct { UnaryOp op; std::int32_t arg; } unary;
            struct { BinaryOp op; std::int32_t lhs, rhs; } binary;
            std::int32_t param;
        };
    };

    std::vector<Node> nodes_;  // children precede parents; back() is the root
    std::vector<std::string> params_;

    friend class Parser;
    void print_node(std::int32_t idx, std::string& out) const;
    double eval_node(std::int32_t idx, double x, double t, const double* bound) const;
};

}  // namespace termshape::expr
