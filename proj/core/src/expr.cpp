#include "folab/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>

namespace folab {

/// Mutation access used only by the parser in this translation unit.
struct ExprInternal {
    static std::vector<ExprNode>& nodes(Expression& e) { return e.nodes_; }
    static std::uint32_t add_symbol(Expression& e, const std::string& name) {
        return e.add_symbol(name);
    }
    static void annotate(Expression& e) { e.annotate_pow(); }
};

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

} // namespace

ParseError::ParseError(std::size_t offset, std::string found, std::vector<std::string> expected)
    : Error("syntax error at offset " + std::to_string(offset) + ": found " + found +
            ", expected " + join(expected, " | ")),
      offset_(offset),
      found_(std::move(found)),
      expected_(std::move(expected)) {}

namespace {

constexpr std::array<const char*, 10> kFnNames = {"sin",  "cos",  "tan",  "exp",  "log",
                                                  "sqrt", "sinh", "cosh", "tanh", "atan"};

bool lookup_fn(std::string_view name, Fn& out) {
    for (std::size_t i = 0; i < kFnNames.size(); ++i) {
        if (name == kFnNames[i]) {
            out = static_cast<Fn>(i);
            return true;
        }
    }
    return false;
}

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Kind kind;
    std::size_t offset;
    std::string_view text;
    double number = 0.0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) return {Token::Kind::End, start, "end of input"};
        const char c = src_[pos_];
        switch (c) {
            case '+': ++pos_; return {Token::Kind::Plus, start, "'+'"};
            case '-': ++pos_; return {Token::Kind::Minus, start, "'-'"};
            case '*': ++pos_; return {Token::Kind::Star, start, "'*'"};
            case '/': ++pos_; return {Token::Kind::Slash, start, "'/'"};
            case '^': ++pos_; return {Token::Kind::Caret, start, "'^'"};
            case '(': ++pos_; return {Token::Kind::LParen, start, "'('"};
            case ')': ++pos_; return {Token::Kind::RParen, start, "')'"};
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            return {Token::Kind::Ident, start, src_.substr(start, pos_ - start)};
        }
        throw ParseError(start, "'" + std::string(1, c) + "'", {"NUMBER", "IDENT", "operator"});
    }

private:
    Token lex_number(std::size_t start) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // "1e" followed by non-digit: the 'e' is not an exponent
            }
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        double v = 0.0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size())
            throw ParseError(start, "'" + std::string(text) + "'", {"NUMBER"});
        return {Token::Kind::Number, start, text, v};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { advance(); }

    Expression run() {
        expr();
        if (tok_.kind != Token::Kind::End)
            throw ParseError(tok_.offset, std::string(tok_.text), {"operator", "end of input"});
        ExprInternal::annotate(out_);
        return std::move(out_);
    }

private:
    void advance() { tok_ = lex_.next(); }

    bool accept(Token::Kind k) {
        if (tok_.kind != k) return false;
        advance();
        return true;
    }

    std::uint32_t push(ExprNode n) {
        ExprInternal::nodes(out_).push_back(n);
        return static_cast<std::uint32_t>(ExprInternal::nodes(out_).size() - 1);
    }

    std::uint32_t expr() {
        std::uint32_t lhs = term();
        for (;;) {
            const auto kind = tok_.kind;
            if (kind != Token::Kind::Plus && kind != Token::Kind::Minus) return lhs;
            const std::uint32_t off = static_cast<std::uint32_t>(tok_.offset);
            advance();
            const std::uint32_t rhs = term();
            ExprNode n;
            n.kind = kind == Token::Kind::Plus ? ExprNode::Kind::Add : ExprNode::Kind::Sub;
            n.a = lhs;
            n.b = rhs;
            n.offset = off;
            lhs = push(n);
        }
    }

    std::uint32_t term() {
        std::uint32_t lhs = factor();
        for (;;) {
            const auto kind = tok_.kind;
            if (kind != Token::Kind::Star && kind != Token::Kind::Slash) return lhs;
            const std::uint32_t off = static_cast<std::uint32_t>(tok_.offset);
            advance();
            const std::uint32_t rhs = factor();
            ExprNode n;
            n.kind = kind == Token::Kind::Star ? ExprNode::Kind::Mul : ExprNode::Kind::Div;
            n.a = lhs;
            n.b = rhs;
            n.offset = off;
            lhs = push(n);
        }
    }

    std::uint32_t factor() {
        if (tok_.kind == Token::Kind::Minus) {
            const std::uint32_t off = static_cast<std::uint32_t>(tok_.offset);
            advance();
            const std::uint32_t child = factor();
            ExprNode n;
            n.kind = ExprNode::Kind::Neg;
            n.a = child;
            n.offset = off;
            return push(n);
        }
        return power();
    }

    std::uint32_t power() {
        std::uint32_t base = atom();
        if (tok_.kind == Token::Kind::Caret) {
            const std::uint32_t off = static_cast<std::uint32_t>(tok_.offset);
            advance();
            const std::uint32_t exponent = factor();  // right-associative via factor recursion
            ExprNode n;
            n.kind = ExprNode::Kind::Pow;
            n.a = base;
            n.b = exponent;
            n.offset = off;
            base = push(n);
        }
        return base;
    }

    std::uint32_t atom() {
        const std::uint32_t off = static_cast<std::uint32_t>(tok_.offset);
        if (tok_.kind == Token::Kind::Number) {
            ExprNode n;
            n.kind = ExprNode::Kind::Number;
            n.number = tok_.number;
            n.offset = off;
            advance();
            return push(n);
        }
        if (tok_.kind == Token::Kind::LParen) {
            advance();
            const std::uint32_t inner = expr();
            if (!accept(Token::Kind::RParen))
                throw ParseError(tok_.offset, std::string(tok_.text), {"')'"});
            return inner;
        }
        if (tok_.kind == Token::Kind::Ident) {
            const std::string name(tok_.text);
            advance();
            Fn f;
            if (lookup_fn(name, f)) {
                if (!accept(Token::Kind::LParen))
                    throw ParseError(tok_.offset, std::string(tok_.text),
                                     {"'(' after function name '" + name + "'"});
                const std::uint32_t arg = expr();
                if (!accept(Token::Kind::RParen))
                    throw ParseError(tok_.offset, std::string(tok_.text), {"')'"});
                ExprNode n;
                n.kind = ExprNode::Kind::Call;
                n.fn = f;
                n.a = arg;
                n.offset = off;
                return push(n);
            }
            if (name == "pi") {
                if (tok_.kind == Token::Kind::LParen)
                    throw ParseError(off, "'pi('", {"'pi' is a constant, not a function"});
                ExprNode n;
                n.kind = ExprNode::Kind::Pi;
                n.offset = off;
                return push(n);
            }
            if (tok_.kind == Token::Kind::LParen)
                throw ParseError(off, "'" + name + "('",
                                 {"one of " + std::string("sin cos tan exp log sqrt sinh cosh tanh atan")});
            ExprNode n;
            n.kind = ExprNode::Kind::Symbol;
            n.sym = ExprInternal::add_symbol(out_, name);
            n.offset = off;
            return push(n);
        }
        throw ParseError(tok_.offset, std::string(tok_.text), {"NUMBER", "IDENT", "'('", "'-'"});
    }

    Lexer lex_;
    Token tok_{Token::Kind::End, 0, ""};
    Expression out_;
};

} // namespace

const char* fn_name(Fn f) { return kFnNames[static_cast<std::size_t>(f)]; }

bool operator==(const ExprNode& x, const ExprNode& y) {
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case ExprNode::Kind::Number: return x.number == y.number;
        case ExprNode::Kind::Symbol: return x.sym == y.sym;
        case ExprNode::Kind::Pi: return true;
        case ExprNode::Kind::Neg: return x.a == y.a;
        case ExprNode::Kind::Call: return x.fn == y.fn && x.a == y.a;
        default: return x.a == y.a && x.b == y.b;
    }
}

std::uint32_t Expression::add_symbol(const std::string& name) {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
        if (symbols_[i] == name) return static_cast<std::uint32_t>(i);
    symbols_.push_back(name);
    return static_cast<std::uint32_t>(symbols_.size() - 1);
}

namespace {

/// True when the subtree rooted at `root` contains no Symbol node.
bool subtree_is_constant(const std::vector<ExprNode>& nodes, std::uint32_t root) {
    std::vector<std::uint32_t> stack{root};
    while (!stack.empty()) {
        const ExprNode& n = nodes[stack.back()];
        stack.pop_back();
        switch (n.kind) {
            case ExprNode::Kind::Symbol: return false;
            case ExprNode::Kind::Number:
            case ExprNode::Kind::Pi: break;
            case ExprNode::Kind::Neg:
            case ExprNode::Kind::Call: stack.push_back(n.a); break;
            default:
                stack.push_back(n.a);
                stack.push_back(n.b);
                break;
        }
    }
    return true;
}

/// Evaluate the constant subtree rooted at `root` over doubles.
double eval_subtree(const std::vector<ExprNode>& nodes, std::uint32_t root) {
    std::vector<double> vals(root + 1, 0.0);
    for (std::uint32_t i = 0; i <= root; ++i) {
        const ExprNode& n = nodes[i];
        switch (n.kind) {
            case ExprNode::Kind::Number: vals[i] = n.number; break;
            case ExprNode::Kind::Pi: vals[i] = 3.14159265358979323846; break;
            case ExprNode::Kind::Symbol: vals[i] = 0.0; break;  // unreachable for constant trees
            case ExprNode::Kind::Neg: vals[i] = -vals[n.a]; break;
            case ExprNode::Kind::Add: vals[i] = vals[n.a] + vals[n.b]; break;
            case ExprNode::Kind::Sub: vals[i] = vals[n.a] - vals[n.b]; break;
            case ExprNode::Kind::Mul: vals[i] = vals[n.a] * vals[n.b]; break;
            case ExprNode::Kind::Div: vals[i] = vals[n.a] / vals[n.b]; break;
            case ExprNode::Kind::Pow: vals[i] = std::pow(vals[n.a], vals[n.b]); break;
            case ExprNode::Kind::Call: {
                const double x = vals[n.a];
                switch (n.fn) {
                    case Fn::Sin: vals[i] = std::sin(x); break;
                    case Fn::Cos: vals[i] = std::cos(x); break;
                    case Fn::Tan: vals[i] = std::tan(x); break;
                    case Fn::Exp: vals[i] = std::exp(x); break;
                    case Fn::Log: vals[i] = std::log(x); break;
                    case Fn::Sqrt: vals[i] = std::sqrt(x); break;
                    case Fn::Sinh: vals[i] = std::sinh(x); break;
                    case Fn::Cosh: vals[i] = std::cosh(x); break;
                    case Fn::Tanh: vals[i] = std::tanh(x); break;
                    case Fn::Atan: vals[i] = std::atan(x); break;
                }
                break;
            }
        }
    }
    return vals[root];
}

} // namespace

void Expression::annotate_pow() {
    // A power with a symbol-free integral exponent evaluates through the
    // integer path, which is well-defined for negative bases (e.g. x^2 at
    // x < 0); anything else requires a positive base.
    for (ExprNode& n : nodes_) {
        if (n.kind != ExprNode::Kind::Pow) continue;
        if (!subtree_is_constant(nodes_, n.b)) continue;
        const double e = eval_subtree(nodes_, n.b);
        if (std::isfinite(e) && e == std::floor(e) && std::abs(e) < 1e9) {
            n.pow_is_int = true;
            n.number = e;
        }
    }
}

std::vector<int> Expression::bind(std::span<const std::string> coords) const {
    std::vector<int> map(symbols_.size(), -1);
    for (std::size_t s = 0; s < symbols_.size(); ++s) {
        for (std::size_t c = 0; c < coords.size(); ++c) {
            if (symbols_[s] == coords[c]) {
                map[s] = static_cast<int>(c);
                break;
            }
        }
        if (map[s] < 0)
            throw ScenarioError("symbol '" + symbols_[s] + "' is not a chart coordinate");
    }
    return map;
}

double Expression::evaluate(const std::map<std::string, double>& env) const {
    std::vector<std::string> names;
    std::vector<double> values;
    names.reserve(env.size());
    for (const auto& [k, v] : env) {
        names.push_back(k);
        values.push_back(v);
    }
    std::vector<int> map(symbols_.size(), -1);
    for (std::size_t s = 0; s < symbols_.size(); ++s) {
        for (std::size_t c = 0; c < names.size(); ++c)
            if (symbols_[s] == names[c]) { map[s] = static_cast<int>(c); break; }
        if (map[s] < 0) {
            // locate the node for a useful offset
            for (const ExprNode& n : nodes_)
                if (n.kind == ExprNode::Kind::Symbol && n.sym == s)
                    throw EvalError(n.offset, "unbound symbol '" + symbols_[s] + "'");
            throw Error("unbound symbol '" + symbols_[s] + "'");
        }
    }
    return eval<double>(values, map);
}

Jet2 Expression::evaluate_jet2(const std::map<std::string, double>& env) const {
    const int m = static_cast<int>(env.size());
    std::vector<std::string> names;
    std::vector<Jet2> seeds;
    names.reserve(env.size());
    int idx = 0;
    for (const auto& [k, v] : env) {
        names.push_back(k);
        seeds.push_back(Jet2::variable(v, idx++, m));
    }
    std::vector<int> map(symbols_.size(), -1);
    for (std::size_t s = 0; s < symbols_.size(); ++s) {
        for (std::size_t c = 0; c < names.size(); ++c)
            if (symbols_[s] == names[c]) { map[s] = static_cast<int>(c); break; }
        if (map[s] < 0) {
            for (const ExprNode& n : nodes_)
                if (n.kind == ExprNode::Kind::Symbol && n.sym == s)
                    throw EvalError(n.offset, "unbound symbol '" + symbols_[s] + "'");
            throw Error("unbound symbol '" + symbols_[s] + "'");
        }
    }
    return eval<Jet2>(seeds, map);
}

Expression parse_expression(std::string_view source) { return Parser(source).run(); }

double evaluate_constant(const Expression& e) {
    if (!e.symbols().empty())
        throw ScenarioError("expected a constant expression, found symbol '" + e.symbols()[0] +
                            "'");
    return e.eval<double>({}, {});
}

// --- builders ---

Expression Expression::number(double v) {
    Expression e;
    ExprNode n;
    n.kind = ExprNode::Kind::Number;
    n.number = v;
    e.nodes_.push_back(n);
    return e;
}

Expression Expression::symbol(const std::string& name) {
    Expression e;
    ExprNode n;
    n.kind = ExprNode::Kind::Symbol;
    n.sym = 0;
    e.symbols_.push_back(name);
    e.nodes_.push_back(n);
    return e;
}

Expression Expression::pi() {
    Expression e;
    ExprNode n;
    n.kind = ExprNode::Kind::Pi;
    e.nodes_.push_back(n);
    return e;
}

Expression Expression::unary(ExprNode::Kind kind, const Expression& a) {
    Expression e = a;
    ExprNode n;
    n.kind = kind;
    n.a = static_cast<std::uint32_t>(e.nodes_.size() - 1);
    e.nodes_.push_back(n);
    e.annotate_pow();
    return e;
}

Expression Expression::call(Fn f, const Expression& a) {
    Expression e = a;
    ExprNode n;
    n.kind = ExprNode::Kind::Call;
    n.fn = f;
    n.a = static_cast<std::uint32_t>(e.nodes_.size() - 1);
    e.nodes_.push_back(n);
    return e;
}

Expression Expression::binary(ExprNode::Kind kind, const Expression& a, const Expression& b) {
    Expression e = a;
    const std::uint32_t node_shift = static_cast<std::uint32_t>(e.nodes_.size());
    // remap b's symbols into the merged table
    std::vector<std::uint32_t> sym_map(b.symbols_.size());
    for (std::size_t s = 0; s < b.symbols_.size(); ++s) sym_map[s] = e.add_symbol(b.symbols_[s]);
    for (ExprNode n : b.nodes_) {
        switch (n.kind) {
            case ExprNode::Kind::Symbol: n.sym = sym_map[n.sym]; break;
            case ExprNode::Kind::Neg:
            case ExprNode::Kind::Call: n.a += node_shift; break;
            case ExprNode::Kind::Add:
            case ExprNode::Kind::Sub:
            case ExprNode::Kind::Mul:
            case ExprNode::Kind::Div:
            case ExprNode::Kind::Pow:
                n.a += node_shift;
                n.b += node_shift;
                break;
            default: break;
        }
        e.nodes_.push_back(n);
    }
    ExprNode n;
    n.kind = kind;
    n.a = node_shift - 1;
    n.b = static_cast<std::uint32_t>(e.nodes_.size() - 1);
    e.nodes_.push_back(n);
    e.annotate_pow();
    return e;
}

// --- printer ---

namespace {

int precedence(const ExprNode& n) {
    switch (n.kind) {
        case ExprNode::Kind::Add:
        case ExprNode::Kind::Sub: return 1;
        case ExprNode::Kind::Mul:
        case ExprNode::Kind::Div: return 2;
        case ExprNode::Kind::Neg: return 3;
        case ExprNode::Kind::Pow: return 4;
        default: return 5;
    }
}

std::string format_number(double v) {
    std::array<char, 40> buf;
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

void print_node(const Expression& e, std::uint32_t idx, std::string& out) {
    const ExprNode& n = e.nodes()[idx];
    auto child = [&](std::uint32_t c, bool parens) {
        if (parens) out += '(';
        print_node(e, c, out);
        if (parens) out += ')';
    };
    const int p = precedence(n);
    switch (n.kind) {
        case ExprNode::Kind::Number: out += format_number(n.number); break;
        case ExprNode::Kind::Symbol: out += e.symbols()[n.sym]; break;
        case ExprNode::Kind::Pi: out += "pi"; break;
        case ExprNode::Kind::Neg:
            out += '-';
            child(n.a, precedence(e.nodes()[n.a]) <= 2);
            break;
        case ExprNode::Kind::Add:
        case ExprNode::Kind::Sub:
        case ExprNode::Kind::Mul:
        case ExprNode::Kind::Div:
            child(n.a, precedence(e.nodes()[n.a]) < p);
            out += n.kind == ExprNode::Kind::Add   ? '+'
                   : n.kind == ExprNode::Kind::Sub ? '-'
                   : n.kind == ExprNode::Kind::Mul ? '*'
                                                   : '/';
            child(n.b, precedence(e.nodes()[n.b]) <= p);
            break;
        case ExprNode::Kind::Pow:
            child(n.a, precedence(e.nodes()[n.a]) <= 4);
            out += '^';
            child(n.b, precedence(e.nodes()[n.b]) <= 2);
            break;
        case ExprNode::Kind::Call:
            out += fn_name(n.fn);
            out += '(';
            print_node(e, n.a, out);
            out += ')';
            break;
    }
}

} // namespace

std::string Expression::str() const {
    if (nodes_.empty()) return "0";
    std::string out;
    print_node(*this, static_cast<std::uint32_t>(nodes_.size() - 1), out);
    return out;
}

} // namespace folab
