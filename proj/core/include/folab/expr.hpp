#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "folab/error.hpp"
#include "folab/jet.hpp"

namespace folab {

/// Built-in function set. The grammar is closed: these names plus `pi` are
/// reserved identifiers and no user-defined functions exist.
enum class Fn : std::uint8_t { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh, Atan };

const char* fn_name(Fn f);

struct ExprNode {
    enum class Kind : std::uint8_t { Number, Symbol, Pi, Neg, Add, Sub, Mul, Div, Pow, Call };

    Kind kind{};
    double number = 0.0;          // Number; for Pow: cached integral exponent
    std::uint32_t sym = 0;        // Symbol: index into Expression::symbols()
    Fn fn{};                      // Call
    std::uint32_t a = 0, b = 0;   // child node indices (children precede parents)
    std::uint32_t offset = 0;     // byte offset in the source text
    bool pow_is_int = false;      // Pow with a constant integral exponent

    friend bool operator==(const ExprNode&, const ExprNode&);
};

/// Immutable scalar expression over named coordinate symbols.
///
/// Expressions are parsed once and then evaluated as pure functions, over
/// plain doubles or over derivative-carrying numbers (Dual, Jet2); the same
/// AST walk yields values, gradients and Hessians exact to roundoff.
/// Domain violations (division by zero, log/sqrt out of domain) are hard
/// errors carrying the offending node's byte offset — never silent NaNs.
/// Note one asymmetry: sqrt(0) evaluates to 0 over plain doubles but is a
/// domain error over jets, where the derivative would be infinite.
class Expression {
public:
    Expression() = default;

    const std::vector<ExprNode>& nodes() const { return nodes_; }
    const std::vector<std::string>& symbols() const { return symbols_; }
    bool empty() const { return nodes_.empty(); }

    /// Canonical text form; reparsing it reproduces this AST exactly.
    std::string str() const;

    /// Map each symbol to its position in `coords`; throws ScenarioError on
    /// a symbol that is not a coordinate of the chart being bound against.
    std::vector<int> bind(std::span<const std::string> coords) const;

    /// Evaluate over any scalar type with pre-seeded coordinate values.
    /// sym_map translates symbol indices to positions in coord_values.
    template <class T>
    T eval(std::span<const T> coord_values, std::span<const int> sym_map) const;

    /// Spec-level conveniences working from a name -> value map.
    double evaluate(const std::map<std::string, double>& env) const;
    /// Value, gradient and Hessian; seed order is the sorted key order of env.
    Jet2 evaluate_jet2(const std::map<std::string, double>& env) const;

    // --- programmatic construction (used by generated test fields) ---
    static Expression number(double v);
    static Expression symbol(const std::string& name);
    static Expression pi();
    static Expression unary(ExprNode::Kind kind, const Expression& a);
    static Expression binary(ExprNode::Kind kind, const Expression& a, const Expression& b);
    static Expression call(Fn f, const Expression& a);

    friend bool operator==(const Expression& x, const Expression& y) {
        return x.nodes_ == y.nodes_ && x.symbols_ == y.symbols_;
    }

    friend struct ExprInternal;  // parser backdoor, see expr.cpp

private:
    std::uint32_t add_symbol(const std::string& name);
    void annotate_pow();

    std::vector<ExprNode> nodes_;     // root is nodes_.back()
    std::vector<std::string> symbols_;
};

/// Parse per the grammar
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := ("-") factor | power
///   power  := atom ("^" factor)?
///   atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
/// so ^ binds tighter than unary minus, which binds tighter than * and /,
/// and ^ associates to the right.
Expression parse_expression(std::string_view source);

/// Evaluate an expression containing no symbols (e.g. "2*pi" in a scenario
/// file); throws if a symbol occurs.
double evaluate_constant(const Expression& e);

// --- implementation of the templated evaluator ---

namespace detail {

template <class T>
struct ScalarTraits;
template <>
struct ScalarTraits<double> {
    static double make(double v, int) { return v; }
    static int dims(double) { return 0; }
};
template <>
struct ScalarTraits<long double> {
    static long double make(double v, int) { return v; }
    static int dims(long double) { return 0; }
};
template <class R>
struct ScalarTraits<DualT<R>> {
    static DualT<R> make(double v, int n) { return DualT<R>::constant(static_cast<R>(v), n); }
    static int dims(const DualT<R>& x) { return x.dims(); }
};
template <class R>
struct ScalarTraits<Jet2T<R>> {
    static Jet2T<R> make(double v, int n) { return Jet2T<R>::constant(static_cast<R>(v), n); }
    static int dims(const Jet2T<R>& x) { return x.dims(); }
};

template <class T>
T apply_fn(Fn f, const T& x, std::uint32_t offset) {
    constexpr bool is_jet = !std::is_floating_point_v<T>;
    switch (f) {
        case Fn::Sin: return sin(x);
        case Fn::Cos: return cos(x);
        case Fn::Tan: return tan(x);
        case Fn::Exp: return exp(x);
        case Fn::Log:
            if (value(x) <= 0.0) throw EvalError(offset, "log of non-positive value");
            return log(x);
        case Fn::Sqrt:
            if (value(x) < 0.0) throw EvalError(offset, "sqrt of negative value");
            if (is_jet && value(x) == 0.0)
                throw EvalError(offset, "sqrt at zero has no finite derivative");
            return sqrt(x);
        case Fn::Sinh: return sinh(x);
        case Fn::Cosh: return cosh(x);
        case Fn::Tanh: return tanh(x);
        case Fn::Atan: return atan(x);
    }
    throw EvalError(offset, "unknown function");
}

} // namespace detail

template <class T>
T Expression::eval(std::span<const T> coord_values, std::span<const int> sym_map) const {
    using Traits = detail::ScalarTraits<T>;
    const int seed_dims = coord_values.empty() ? 0 : Traits::dims(coord_values[0]);
    std::vector<T> vals(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const ExprNode& n = nodes_[i];
        switch (n.kind) {
            case ExprNode::Kind::Number:
                vals[i] = Traits::make(n.number, seed_dims);
                break;
            case ExprNode::Kind::Pi:
                vals[i] = Traits::make(3.14159265358979323846, seed_dims);
                break;
            case ExprNode::Kind::Symbol:
                vals[i] = coord_values[sym_map[n.sym]];
                break;
            case ExprNode::Kind::Neg: vals[i] = -vals[n.a]; break;
            case ExprNode::Kind::Add: vals[i] = vals[n.a] + vals[n.b]; break;
            case ExprNode::Kind::Sub: vals[i] = vals[n.a] - vals[n.b]; break;
            case ExprNode::Kind::Mul: vals[i] = vals[n.a] * vals[n.b]; break;
            case ExprNode::Kind::Div:
                if (value(vals[n.b]) == 0.0) throw EvalError(n.offset, "division by zero");
                vals[i] = vals[n.a] / vals[n.b];
                break;
            case ExprNode::Kind::Pow:
                if (n.pow_is_int) {
                    const long long e = static_cast<long long>(n.number);
                    if (e < 0 && value(vals[n.a]) == 0.0)
                        throw EvalError(n.offset, "zero raised to a negative power");
                    vals[i] = powi(vals[n.a], e);
                } else {
                    if (value(vals[n.a]) <= 0.0)
                        throw EvalError(n.offset,
                                        "power with non-positive base and non-integer exponent");
                    vals[i] = pow(vals[n.a], vals[n.b]);
                }
                break;
            case ExprNode::Kind::Call:
                vals[i] = detail::apply_fn(nodes_[i].fn, vals[n.a], n.offset);
                break;
        }
    }
    return vals.back();
}

} // namespace folab
