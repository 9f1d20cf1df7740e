#ifndef PROBERR_AST_HPP
#define PROBERR_AST_HPP

#include "proberr/dists.hpp"
#include "proberr/fpcore.hpp"
#include "proberr/interval.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace proberr {

struct SrcPos {
    int line = 0;
    int col = 0;
};

enum class ExprKind { Const, Var, Neg, Bin };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind = ExprKind::Const;
    ArithOp op = ArithOp::Add;
    std::string name;     // Var
    Rational value;       // Const, exact
    std::string literal;  // Const, as written
    ExprPtr lhs;
    ExprPtr rhs;
    SrcPos pos;

    static ExprPtr constant(Rational v, std::string literal, SrcPos pos = {});
    static ExprPtr variable(std::string name, SrcPos pos = {});
    static ExprPtr negate(ExprPtr a, SrcPos pos = {});
    static ExprPtr binary(ArithOp op, ExprPtr a, ExprPtr b, SrcPos pos = {});
};

// Structural equality; source positions are ignored.
bool same_expr(const ExprPtr& a, const ExprPtr& b);
std::string print_expr(const ExprPtr& e);

struct DistDecl {
    std::string name;
    // uniform, normal, laplace, exponential, rayleigh, beta, piecewise
    std::string kind;
    std::vector<double> params;
    // "kind in [a, b]" without parameters
    bool shorthand = false;
    std::optional<Interval> range;
    std::vector<double> breaks;
    std::vector<std::vector<double>> coeffs;
    // inputs known to be representable get no input rounding
    bool exact = false;
    SrcPos pos;

    // Shorthand defaults: uniform on the range; normal with sigma 1 and
    // laplace with scale 0.01, both centred at the range midpoint.
    DistPtr make() const;
    std::string print() const;
};

struct Assignment {
    std::string name;
    ExprPtr expr;
    SrcPos pos;
};

struct Program {
    std::vector<DistDecl> decls;
    std::vector<Assignment> assigns;

    const DistDecl* find_decl(const std::string& name) const;
    const Assignment* find_assign(const std::string& name) const;
    // the last assignment is the output
    const Assignment& output() const;
    std::string print() const;
};

bool same_program(const Program& a, const Program& b);

// Hash-consed view of a program: assignment names are inlined and
// structurally equal subterms share one node, so x - x has a single x.
struct DagNode {
    ExprKind kind = ExprKind::Const;
    ArithOp op = ArithOp::Add;
    std::string name;
    Rational value;
    std::string literal;
    int a = -1;
    int b = -1;
    SrcPos pos;
};

struct Dag {
    std::vector<DagNode> nodes;  // children precede parents
    int root = -1;
    std::string label(int id) const;
};

Dag build_dag(const Program& prog);

}  // namespace proberr

#endif
