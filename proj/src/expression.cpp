#include "morrey/expression.hpp"

#include "morrey/errors.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace morrey {

namespace {

// Identifiers treated as variables of other expressions rather than unknown names.
constexpr std::array<const char*, 3> kVariables = {"t", "z", "r"};

struct FuncName {
    const char* name;
    NodeKind kind;
};

constexpr std::array<FuncName, 6> kFunctions = {{{"log", NodeKind::Log},
                                                 {"exp", NodeKind::Exp},
                                                 {"sqrt", NodeKind::Sqrt},
                                                 {"abs", NodeKind::Abs},
                                                 {"sin", NodeKind::Sin},
                                                 {"cos", NodeKind::Cos}}};

NodePtr make(NodeKind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr)
{
    return std::make_shared<const Node>(Node{kind, 0.0, std::move(lhs), std::move(rhs)});
}

NodePtr make_number(double x)
{
    return std::make_shared<const Node>(Node{NodeKind::Number, x, nullptr, nullptr});
}

bool is_unary_function(NodeKind k)
{
    return k == NodeKind::Log || k == NodeKind::Exp || k == NodeKind::Sqrt || k == NodeKind::Abs
           || k == NodeKind::Sin || k == NodeKind::Cos;
}

bool is_binary(NodeKind k)
{
    return k == NodeKind::Add || k == NodeKind::Sub || k == NodeKind::Mul || k == NodeKind::Div
           || k == NodeKind::Pow;
}

class Parser {
public:
    Parser(const std::string& src, const std::string& var) : src_(src), var_(var) {}

    NodePtr run()
    {
        skip_ws();
        if (pos_ == src_.size())
            throw SyntaxError(pos_, "empty expression");
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size())
            throw SyntaxError(pos_, std::string("unexpected '") + src_[pos_] + "'");
        return e;
    }

private:
    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            if (pos_ >= src_.size())
                throw SyntaxError(pos_, std::string("expected '") + c + "' before end of input");
            throw SyntaxError(pos_, std::string("expected '") + c + "'");
        }
    }

    NodePtr expr()
    {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make(NodeKind::Add, lhs, term());
            else if (accept('-'))
                lhs = make(NodeKind::Sub, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term()
    {
        NodePtr lhs = factor();
        for (;;) {
            if (accept('*'))
                lhs = make(NodeKind::Mul, lhs, factor());
            else if (accept('/'))
                lhs = make(NodeKind::Div, lhs, factor());
            else
                return lhs;
        }
    }

    NodePtr factor()
    {
        NodePtr base = unary();
        if (accept('^'))
            return make(NodeKind::Pow, base, factor());
        return base;
    }

    NodePtr unary()
    {
        if (accept('-'))
            return make(NodeKind::Neg, unary());
        return primary();
    }

    NodePtr primary()
    {
        skip_ws();
        if (pos_ >= src_.size())
            throw SyntaxError(pos_, "unexpected end of input");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return identifier();
        if (accept('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
    }

    NodePtr number()
    {
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
        if (n == 0)
            throw SyntaxError(start, "malformed number");
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t epos = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (digits() == 0)
                throw SyntaxError(epos, "malformed exponent");
        }
        double value = 0.0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (res.ec != std::errc() || !std::isfinite(value))
            throw SyntaxError(start, "number out of range");
        return make_number(value);
    }

    NodePtr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < src_.size()
               && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name = src_.substr(start, pos_ - start);
        if (name == var_)
            return make(NodeKind::Var);
        for (const auto& f : kFunctions) {
            if (name == f.name) {
                skip_ws();
                if (pos_ >= src_.size() || src_[pos_] != '(')
                    throw SyntaxError(pos_, "expected '(' after function " + name);
                ++pos_;
                NodePtr arg = expr();
                expect(')');
                return make(f.kind, arg);
            }
        }
        for (const char* v : kVariables)
            if (name == v)
                throw IdentifierError(ErrorKind::WrongVariable, name, start);
        throw IdentifierError(ErrorKind::UnknownIdentifier, name, start);
    }

    const std::string& src_;
    const std::string& var_;
    std::size_t pos_ = 0;
};

std::string format_number(double x)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

void print_node(const Node& n, const std::string& var, std::string& out)
{
    switch (n.kind) {
    case NodeKind::Number:
        out += format_number(n.number);
        return;
    case NodeKind::Var:
        out += var;
        return;
    case NodeKind::Neg:
        out += '-';
        print_node(*n.lhs, var, out);
        return;
    default:
        break;
    }
    if (is_unary_function(n.kind)) {
        for (const auto& f : kFunctions)
            if (f.kind == n.kind)
                out += f.name;
        out += '(';
        print_node(*n.lhs, var, out);
        out += ')';
        return;
    }
    const char* op = n.kind == NodeKind::Add   ? " + "
                     : n.kind == NodeKind::Sub ? " - "
                     : n.kind == NodeKind::Mul ? "*"
                     : n.kind == NodeKind::Div ? "/"
                                               : "^";
    out += '(';
    print_node(*n.lhs, var, out);
    out += op;
    print_node(*n.rhs, var, out);
    out += ')';
}

[[noreturn]] void domain_error(const std::string& what)
{
    throw Error(ErrorKind::Domain, what);
}

std::optional<int> small_integer(const Jet2& j)
{
    if (j.d1 != 0.0 || j.d2 != 0.0)
        return std::nullopt;
    if (std::abs(j.v) > 64.0 || std::floor(j.v) != j.v)
        return std::nullopt;
    return static_cast<int>(j.v);
}

Jet2 eval_node(const Node& n, double x)
{
    switch (n.kind) {
    case NodeKind::Number: return Jet2::constant(n.number);
    case NodeKind::Var: return Jet2::variable(x);
    case NodeKind::Neg: return -eval_node(*n.lhs, x);
    case NodeKind::Add: return eval_node(*n.lhs, x) + eval_node(*n.rhs, x);
    case NodeKind::Sub: return eval_node(*n.lhs, x) - eval_node(*n.rhs, x);
    case NodeKind::Mul: return eval_node(*n.lhs, x) * eval_node(*n.rhs, x);
    case NodeKind::Div: {
        const Jet2 b = eval_node(*n.rhs, x);
        if (b.v == 0.0)
            domain_error("division by zero");
        return eval_node(*n.lhs, x) / b;
    }
    case NodeKind::Pow: {
        const Jet2 a = eval_node(*n.lhs, x);
        const Jet2 b = eval_node(*n.rhs, x);
        if (const auto k = small_integer(b)) {
            if (a.v == 0.0 && *k < 0)
                domain_error("zero raised to a negative power");
            return ipow(a, *k);
        }
        if (!(a.v > 0.0)) {
            if (a.v == 0.0 && b.d1 == 0.0 && b.d2 == 0.0 && b.v < 0.0)
                domain_error("zero raised to a negative power");
            domain_error("non-integer power of a non-positive base");
        }
        if (b.d1 == 0.0 && b.d2 == 0.0)
            return pow(a, b.v);
        return exp(b * log(a));
    }
    case NodeKind::Log: {
        const Jet2 a = eval_node(*n.lhs, x);
        if (!(a.v > 0.0))
            domain_error("log of non-positive argument");
        return log(a);
    }
    case NodeKind::Exp: return exp(eval_node(*n.lhs, x));
    case NodeKind::Sqrt: {
        const Jet2 a = eval_node(*n.lhs, x);
        if (!(a.v > 0.0))
            domain_error("sqrt of non-positive argument");
        return sqrt(a);
    }
    case NodeKind::Abs: {
        const Jet2 a = eval_node(*n.lhs, x);
        if (a.v == 0.0)
            domain_error("abs is not differentiable at 0");
        return abs(a);
    }
    case NodeKind::Sin: return sin(eval_node(*n.lhs, x));
    case NodeKind::Cos: return cos(eval_node(*n.lhs, x));
    }
    domain_error("unknown node");
}

} // namespace

bool structurally_equal(const Node& a, const Node& b)
{
    if (a.kind != b.kind)
        return false;
    if (a.kind == NodeKind::Number)
        return a.number == b.number;
    if (a.kind == NodeKind::Var)
        return true;
    if (!structurally_equal(*a.lhs, *b.lhs))
        return false;
    if (is_binary(a.kind))
        return structurally_equal(*a.rhs, *b.rhs);
    return true;
}

bool operator==(const Expr& a, const Expr& b)
{
    return a.var_ == b.var_ && structurally_equal(*a.root_, *b.root_);
}

Expr parse(const std::string& src, const std::string& var_name)
{
    return Expr(Parser(src, var_name).run(), var_name);
}

std::string print(const Expr& e)
{
    std::string out;
    print_node(e.root(), e.var(), out);
    // The outermost parentheses of a binary root carry no information.
    if (is_binary(e.root().kind))
        out = out.substr(1, out.size() - 2);
    return out;
}

Jet2 eval_jet(const Expr& e, double x)
{
    const Jet2 j = eval_node(e.root(), x);
    if (!std::isfinite(j.v))
        domain_error("expression value is not finite at " + format_number(x));
    return j;
}

double eval(const Expr& e, double x) { return eval_jet(e, x).v; }

ScalarFunction to_scalar_function(const Expr& e)
{
    return ScalarFunction::autodiff([e](double x) { return eval_jet(e, x); }, print(e));
}

ParsedSplitEnergy make_split_energy(const std::string& h_src, const std::string& f_src,
                                    const std::string& name)
{
    const Expr h = parse(h_src, "t");
    const Expr f = parse(f_src, "z");
    SplitEnergy energy(name, to_scalar_function(h), to_scalar_function(f));

    std::optional<std::string> warning;
    for (double t : {1.25, 2.0, 4.0, 10.0, 100.0}) {
        const double reflected = eval(h, t);
        double literal = 0.0;
        try {
            literal = eval(h, 1.0 / t);
        } catch (const Error&) {
            warning = "h formula is undefined at t = " + format_number(1.0 / t)
                      + "; values below 1 use the reflection h(t) = h(1/t)";
            break;
        }
        if (std::abs(literal - reflected) > 1e-8 * (1.0 + std::abs(reflected))) {
            warning = "h formula is not symmetric: h(" + format_number(1.0 / t) + ") = "
                      + format_number(literal) + " but h(" + format_number(t)
                      + ") = " + format_number(reflected)
                      + "; values below 1 use the reflection h(t) = h(1/t)";
            break;
        }
    }
    return {std::move(energy), std::move(warning)};
}

} // namespace morrey
