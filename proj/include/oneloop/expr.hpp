#pragma once

// Scalar expression trees in one variable: parsing, printing, evaluation,
// structural differentiation and composition.
//
// Grammar (precedence low -> high):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | var | name '(' expr ')' | '(' expr ')'
// The exponent of '^' must fold to an integer constant.

#include "oneloop/errors.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace oneloop {

enum class Op : unsigned char {
    Const, Var, Add, Sub, Mul, Div, Neg, Pow,
    Exp, Log, Sin, Cos, Sinh, Cosh, Sqrt, Tanh
};

namespace detail {
struct Node;
}

/// Immutable handle to a shared expression node. Copies are cheap and share
/// structure; subtrees may be shared between expressions (DAG).
class Expr {
public:
    /// The constant 0.
    Expr();

    static Expr constant(double v);
    static Expr variable();
    /// Raw node construction, no folding. Used by the parser.
    static Expr binary(Op op, Expr a, Expr b);
    static Expr unary(Op op, Expr a);
    static Expr power(Expr base, int exponent);

    Op op() const noexcept;
    double value() const noexcept;
    int exponent() const noexcept;
    const Expr& lhs() const noexcept;
    const Expr& rhs() const noexcept;

    bool is_constant() const noexcept { return op() == Op::Const; }
    bool is_constant(double v) const noexcept { return op() == Op::Const && value() == v; }

    const detail::Node* id() const noexcept { return node_.get(); }

private:
    friend struct detail::Node;
    struct NullTag {};
    /// Empty handle, only used for the unused children of leaf nodes.
    explicit Expr(NullTag) noexcept {}
    explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
    Op op = Op::Const;
    double value = 0.0;
    int exponent = 0;
    Expr a{Expr::NullTag{}};
    Expr b{Expr::NullTag{}};
};

inline const std::shared_ptr<const Node>& zero_node() {
    static const std::shared_ptr<const Node> z = std::make_shared<Node>();
    return z;
}

struct FunctionName {
    std::string_view name;
    Op op;
};

inline constexpr std::array<FunctionName, 8> kFunctions{{
    {"exp", Op::Exp},   {"log", Op::Log},   {"sin", Op::Sin},   {"cos", Op::Cos},
    {"sinh", Op::Sinh}, {"cosh", Op::Cosh}, {"sqrt", Op::Sqrt}, {"tanh", Op::Tanh},
}};

inline bool is_function(Op op) { return op >= Op::Exp; }

inline std::string_view function_name(Op op) {
    for (const auto& f : kFunctions)
        if (f.op == op) return f.name;
    return "?";
}
}  // namespace detail

inline Expr::Expr() : node_(detail::zero_node()) {}

inline Expr Expr::constant(double v) {
    auto n = std::make_shared<detail::Node>();
    n->op = Op::Const;
    n->value = v;
    return Expr(std::move(n));
}

inline Expr Expr::variable() {
    static const Expr v = [] {
        auto n = std::make_shared<detail::Node>();
        n->op = Op::Var;
        return Expr(std::move(n));
    }();
    return v;
}

inline Expr Expr::binary(Op op, Expr a, Expr b) {
    auto n = std::make_shared<detail::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return Expr(std::move(n));
}

inline Expr Expr::unary(Op op, Expr a) {
    auto n = std::make_shared<detail::Node>();
    n->op = op;
    n->a = std::move(a);
    return Expr(std::move(n));
}

inline Expr Expr::power(Expr base, int exponent) {
    auto n = std::make_shared<detail::Node>();
    n->op = Op::Pow;
    n->a = std::move(base);
    n->exponent = exponent;
    return Expr(std::move(n));
}

inline Op Expr::op() const noexcept { return node_->op; }
inline double Expr::value() const noexcept { return node_->value; }
inline int Expr::exponent() const noexcept { return node_->exponent; }
inline const Expr& Expr::lhs() const noexcept { return node_->a; }
inline const Expr& Expr::rhs() const noexcept { return node_->b; }

// ---------------------------------------------------------------------------
// Scalar kernels shared by the recursive evaluator and the tape.

namespace detail {

inline double int_pow(double base, int n) {
    if (n < 0) {
        if (base == 0.0) throw DomainError("zero raised to a negative power");
        return 1.0 / int_pow(base, -n);
    }
    double result = 1.0;
    double b = base;
    unsigned e = static_cast<unsigned>(n);
    while (e) {
        if (e & 1u) result *= b;
        b *= b;
        e >>= 1u;
    }
    return result;
}

inline double apply_binary(Op op, double a, double b) {
    switch (op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div:
            if (b == 0.0) throw DomainError("division by zero");
            return a / b;
        default: break;
    }
    throw InternalError("not a binary operator");
}

inline double apply_unary(Op op, double a) {
    switch (op) {
        case Op::Neg: return -a;
        case Op::Exp: return std::exp(a);
        case Op::Log:
            if (!(a > 0.0)) throw DomainError("log of non-positive argument");
            return std::log(a);
        case Op::Sin: return std::sin(a);
        case Op::Cos: return std::cos(a);
        case Op::Sinh: return std::sinh(a);
        case Op::Cosh: return std::cosh(a);
        case Op::Sqrt:
            if (a < 0.0) throw DomainError("sqrt of negative argument");
            return std::sqrt(a);
        case Op::Tanh: return std::tanh(a);
        default: break;
    }
    throw InternalError("not a unary operator");
}

}  // namespace detail

/// Direct recursive evaluation. Throws DomainError on division by zero,
/// log of a non-positive number, or sqrt of a negative number.
inline double evaluate(const Expr& e, double x) {
    switch (e.op()) {
        case Op::Const: return e.value();
        case Op::Var: return x;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
            return detail::apply_binary(e.op(), evaluate(e.lhs(), x), evaluate(e.rhs(), x));
        case Op::Pow: return detail::int_pow(evaluate(e.lhs(), x), e.exponent());
        default: return detail::apply_unary(e.op(), evaluate(e.lhs(), x));
    }
}

inline bool depends_on_variable(const Expr& e) {
    switch (e.op()) {
        case Op::Const: return false;
        case Op::Var: return true;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: return depends_on_variable(e.lhs()) || depends_on_variable(e.rhs());
        default: return depends_on_variable(e.lhs());
    }
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.id() == b.id()) return true;
    if (a.op() != b.op()) return false;
    switch (a.op()) {
        case Op::Const: return a.value() == b.value();
        case Op::Var: return true;
        case Op::Pow: return a.exponent() == b.exponent() && structurally_equal(a.lhs(), b.lhs());
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
            return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
        default: return structurally_equal(a.lhs(), b.lhs());
    }
}

// ---------------------------------------------------------------------------
// Folding builders. Used by differentiation and by code that assembles
// expressions programmatically; the parser uses the raw constructors.

inline Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
    return Expr::binary(Op::Add, a, b);
}

inline Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.value());
    if (a.op() == Op::Neg) return a.lhs();
    return Expr::unary(Op::Neg, a);
}

inline Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
    return Expr::binary(Op::Sub, a, b);
}

inline Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(-1.0)) return -b;
    if (b.is_constant(-1.0)) return -a;
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
    return Expr::binary(Op::Mul, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
    if (a.is_constant() && b.is_constant() && b.value() != 0.0)
        return Expr::constant(a.value() / b.value());
    return Expr::binary(Op::Div, a, b);
}

inline Expr operator+(const Expr& a, double b) { return a + Expr::constant(b); }
inline Expr operator+(double a, const Expr& b) { return Expr::constant(a) + b; }
inline Expr operator-(const Expr& a, double b) { return a - Expr::constant(b); }
inline Expr operator-(double a, const Expr& b) { return Expr::constant(a) - b; }
inline Expr operator*(double a, const Expr& b) { return Expr::constant(a) * b; }
inline Expr operator*(const Expr& a, double b) { return a * Expr::constant(b); }
inline Expr operator/(const Expr& a, double b) { return a / Expr::constant(b); }
inline Expr operator/(double a, const Expr& b) { return Expr::constant(a) / b; }

inline Expr ipow(const Expr& base, int n) {
    if (n == 0) return Expr::constant(1.0);
    if (n == 1) return base;
    if (base.is_constant() && !(base.value() == 0.0 && n < 0))
        return Expr::constant(detail::int_pow(base.value(), n));
    return Expr::power(base, n);
}

/// Function application with constant folding where the result is defined.
inline Expr apply(Op fn, const Expr& arg) {
    if (arg.is_constant()) {
        const double v = arg.value();
        const bool defined = !(fn == Op::Log && !(v > 0.0)) && !(fn == Op::Sqrt && v < 0.0);
        if (defined) return Expr::constant(detail::apply_unary(fn, v));
    }
    return Expr::unary(fn, arg);
}

inline Expr exp(const Expr& a) { return apply(Op::Exp, a); }
inline Expr log(const Expr& a) { return apply(Op::Log, a); }
inline Expr sin(const Expr& a) { return apply(Op::Sin, a); }
inline Expr cos(const Expr& a) { return apply(Op::Cos, a); }
inline Expr sinh(const Expr& a) { return apply(Op::Sinh, a); }
inline Expr cosh(const Expr& a) { return apply(Op::Cosh, a); }
inline Expr sqrt(const Expr& a) { return apply(Op::Sqrt, a); }
inline Expr tanh(const Expr& a) { return apply(Op::Tanh, a); }

// ---------------------------------------------------------------------------
// Differentiation and composition.

namespace detail {

class Differentiator {
public:
    Expr operator()(const Expr& e) {
        if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
        Expr d = rule(e);
        memo_.emplace(e.id(), d);
        return d;
    }

private:
    Expr rule(const Expr& e) {
        const Expr& u = e.lhs();
        switch (e.op()) {
            case Op::Const: return Expr::constant(0.0);
            case Op::Var: return Expr::constant(1.0);
            case Op::Add: return (*this)(u) + (*this)(e.rhs());
            case Op::Sub: return (*this)(u) - (*this)(e.rhs());
            case Op::Neg: return -(*this)(u);
            case Op::Mul: {
                const Expr& v = e.rhs();
                return (*this)(u) * v + u * (*this)(v);
            }
            case Op::Div: {
                const Expr& v = e.rhs();
                return ((*this)(u) * v - u * (*this)(v)) / ipow(v, 2);
            }
            case Op::Pow: {
                const int n = e.exponent();
                return (static_cast<double>(n) * ipow(u, n - 1)) * (*this)(u);
            }
            case Op::Exp: return e * (*this)(u);
            case Op::Log: return (*this)(u) / u;
            case Op::Sin: return cos(u) * (*this)(u);
            case Op::Cos: return -(sin(u) * (*this)(u));
            case Op::Sinh: return cosh(u) * (*this)(u);
            case Op::Cosh: return sinh(u) * (*this)(u);
            case Op::Sqrt: return (*this)(u) / (2.0 * e);
            case Op::Tanh: return (1.0 - ipow(e, 2)) * (*this)(u);
        }
        throw InternalError("unhandled operator in differentiation");
    }

    std::unordered_map<const Node*, Expr> memo_;
};

class Substituter {
public:
    explicit Substituter(Expr inner) : inner_(std::move(inner)) {}

    Expr operator()(const Expr& e) {
        if (auto it = memo_.find(e.id()); it != memo_.end()) return it->second;
        Expr r = rule(e);
        memo_.emplace(e.id(), r);
        return r;
    }

private:
    Expr rule(const Expr& e) {
        switch (e.op()) {
            case Op::Const: return e;
            case Op::Var: return inner_;
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div: return Expr::binary(e.op(), (*this)(e.lhs()), (*this)(e.rhs()));
            case Op::Pow: return Expr::power((*this)(e.lhs()), e.exponent());
            default: return Expr::unary(e.op(), (*this)(e.lhs()));
        }
    }

    Expr inner_;
    std::unordered_map<const Node*, Expr> memo_;
};

}  // namespace detail

inline constexpr int kMaxDerivativeOrder = 4;

/// Exact structural derivative of the given order (0..4).
inline Expr differentiate(const Expr& f, int order) {
    if (order < 0 || order > kMaxDerivativeOrder)
        throw InvalidArgument("derivative order must be in [0, 4], got " + std::to_string(order));
    Expr r = f;
    for (int k = 0; k < order; ++k) r = detail::Differentiator{}(r);
    return r;
}

/// f(inner(x)): every occurrence of the variable in `f` replaced by `inner`.
inline Expr substitute(const Expr& f, const Expr& inner) { return detail::Substituter{inner}(f); }

// ---------------------------------------------------------------------------
// Printing.

namespace detail {

inline int precedence(const Expr& e) {
    switch (e.op()) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        default: return 5;
    }
}

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void print(const Expr& e, std::string_view var, std::string& out) {
    auto child = [&](const Expr& c, bool parens) {
        if (parens) out += '(';
        print(c, var, out);
        if (parens) out += ')';
    };
    switch (e.op()) {
        case Op::Const:
            if (std::signbit(e.value()))
                out += "(-" + format_number(-e.value()) + ")";
            else
                out += format_number(e.value());
            return;
        case Op::Var: out += var; return;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div: {
            const int p = precedence(e);
            child(e.lhs(), precedence(e.lhs()) < p);
            switch (e.op()) {
                case Op::Add: out += " + "; break;
                case Op::Sub: out += " - "; break;
                case Op::Mul: out += "*"; break;
                default: out += "/"; break;
            }
            child(e.rhs(), precedence(e.rhs()) <= p);
            return;
        }
        case Op::Neg:
            out += '-';
            child(e.lhs(), precedence(e.lhs()) < 3);
            return;
        case Op::Pow:
            child(e.lhs(), precedence(e.lhs()) <= 4);
            out += '^';
            if (e.exponent() < 0)
                out += "(" + std::to_string(e.exponent()) + ")";
            else
                out += std::to_string(e.exponent());
            return;
        default:
            out += function_name(e.op());
            out += '(';
            print(e.lhs(), var, out);
            out += ')';
            return;
    }
}

}  // namespace detail

/// Infix text that parses back to a structurally identical tree.
inline std::string to_string(const Expr& e, std::string_view var = "x") {
    std::string out;
    detail::print(e, var, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing.

namespace detail {

class Parser {
public:
    Parser(std::string_view src, std::string_view var) : src_(src), var_(var) {}

    Expr parse() {
        Expr e = expression();
        skip_space();
        if (pos_ < src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_ + 1); }
    [[noreturn]] void fail_at(const std::string& msg, std::size_t pos) const {
        throw ParseError(msg, pos + 1);
    }

    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expression() {
        Expr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = Expr::binary(Op::Add, lhs, term());
            else if (accept('-'))
                lhs = Expr::binary(Op::Sub, lhs, term());
            else
                return lhs;
        }
    }

    Expr term() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = Expr::binary(Op::Mul, lhs, unary());
            else if (accept('/'))
                lhs = Expr::binary(Op::Div, lhs, unary());
            else
                return lhs;
        }
    }

    Expr unary() {
        if (accept('-')) return Expr::unary(Op::Neg, unary());
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (!accept('^')) return base;
        skip_space();
        const std::size_t at = pos_;
        Expr ex = unary();
        if (depends_on_variable(ex)) fail_at("exponent must be an integer constant", at);
        double v = 0.0;
        try {
            v = evaluate(ex, 0.0);
        } catch (const DomainError&) {
            fail_at("exponent must be an integer constant", at);
        }
        if (!(std::abs(v) <= 1024.0) || v != std::trunc(v))
            fail_at("exponent must be an integer constant", at);
        return Expr::power(base, static_cast<int>(v));
    }

    Expr primary() {
        skip_space();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    Expr number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
                ++n;
            }
            return n;
        };
        std::size_t n = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) fail_at("malformed number", start);
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) pos_ = save;
        }
        const std::string text(src_.substr(start, pos_ - start));
        const double v = std::strtod(text.c_str(), nullptr);
        if (!std::isfinite(v)) fail_at("numeric literal out of range", start);
        return Expr::constant(v);
    }

    Expr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == var_) {
            skip_space();
            if (pos_ < src_.size() && src_[pos_] == '(')
                fail("variable '" + std::string(name) + "' cannot be called");
            return Expr::variable();
        }
        for (const auto& f : kFunctions) {
            if (f.name != name) continue;
            if (!accept('('))
                fail("function '" + std::string(name) + "' requires one argument in parentheses");
            skip_space();
            if (pos_ < src_.size() && src_[pos_] == ')')
                fail("arity mismatch: '" + std::string(name) + "' takes 1 argument, got 0");
            Expr arg = expression();
            skip_space();
            if (pos_ < src_.size() && src_[pos_] == ',')
                fail("arity mismatch: '" + std::string(name) + "' takes 1 argument");
            if (!accept(')')) fail("expected ')'");
            return Expr::unary(f.op, arg);
        }
        fail_at("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view src_;
    std::string_view var_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `source` in the expression grammar with `var` as the only identifier.
inline Expr parse_expression(std::string_view source, std::string_view var = "x") {
    return detail::Parser(source, var).parse();
}

// ---------------------------------------------------------------------------
// Flattened evaluation.

/// Linearized form of an expression DAG; shared subtrees are evaluated once.
class Tape {
public:
    Tape() : Tape(Expr()) {}

    explicit Tape(const Expr& e) {
        std::unordered_map<const detail::Node*, int> slot;
        root_ = emit(e, slot);
    }

    double operator()(double x) const {
        std::vector<double> r(code_.size());
        for (std::size_t i = 0; i < code_.size(); ++i) {
            const Instr& in = code_[i];
            switch (in.op) {
                case Op::Const: r[i] = in.value; break;
                case Op::Var: r[i] = x; break;
                case Op::Add:
                case Op::Sub:
                case Op::Mul:
                case Op::Div: r[i] = detail::apply_binary(in.op, r[in.a], r[in.b]); break;
                case Op::Pow: r[i] = detail::int_pow(r[in.a], in.exponent); break;
                default: r[i] = detail::apply_unary(in.op, r[in.a]); break;
            }
        }
        return r[root_];
    }

    std::size_t size() const noexcept { return code_.size(); }

private:
    struct Instr {
        Op op;
        int a = -1;
        int b = -1;
        int exponent = 0;
        double value = 0.0;
    };

    int emit(const Expr& e, std::unordered_map<const detail::Node*, int>& slot) {
        if (auto it = slot.find(e.id()); it != slot.end()) return it->second;
        Instr in{e.op()};
        switch (e.op()) {
            case Op::Const: in.value = e.value(); break;
            case Op::Var: break;
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div:
                in.a = emit(e.lhs(), slot);
                in.b = emit(e.rhs(), slot);
                break;
            case Op::Pow:
                in.a = emit(e.lhs(), slot);
                in.exponent = e.exponent();
                break;
            default: in.a = emit(e.lhs(), slot); break;
        }
        code_.push_back(in);
        const int idx = static_cast<int>(code_.size()) - 1;
        slot.emplace(e.id(), idx);
        return idx;
    }

    std::vector<Instr> code_;
    int root_ = 0;
};

}  // namespace oneloop
