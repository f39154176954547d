#pragma once

#include "morrey/energy.hpp"
#include "morrey/jet.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace morrey {

enum class NodeKind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Log, Exp, Sqrt, Abs, Sin, Cos };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    NodeKind kind;
    double number = 0.0;  // Number only
    NodePtr lhs;          // unary operand, function argument, or left operand
    NodePtr rhs;          // right operand of binary nodes
};

// Immutable expression tree in a single variable.
class Expr {
public:
    Expr(NodePtr root, std::string var) : root_(std::move(root)), var_(std::move(var)) {}

    const Node& root() const { return *root_; }
    const std::string& var() const { return var_; }

    friend bool operator==(const Expr& a, const Expr& b);

private:
    NodePtr root_;
    std::string var_;
};

bool structurally_equal(const Node& a, const Node& b);

// Grammar:
//   expr    = term { ("+"|"-") term } ;
//   term    = factor { ("*"|"/") factor } ;
//   factor  = unary [ "^" factor ] ;
//   unary   = "-" unary | primary ;
//   primary = NUMBER | VAR | FUNC "(" expr ")" | "(" expr ")" ;
Expr parse(const std::string& src, const std::string& var_name);

// Canonical text; parse(print(e), e.var()) == e.
std::string print(const Expr& e);

Jet2 eval_jet(const Expr& e, double x);
double eval(const Expr& e, double x);

ScalarFunction to_scalar_function(const Expr& e);

struct ParsedSplitEnergy {
    SplitEnergy energy;
    std::optional<std::string> symmetry_warning;
};

// h_src is the t >= 1 branch; the energy uses the reflection h(t) = h(1/t) below 1.
ParsedSplitEnergy make_split_energy(const std::string& h_src, const std::string& f_src,
                                    const std::string& name);

} // namespace morrey
