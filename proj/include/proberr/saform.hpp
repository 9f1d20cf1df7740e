#ifndef PROBERR_SAFORM_HPP
#define PROBERR_SAFORM_HPP

#include "proberr/ast.hpp"
#include "proberr/fpcore.hpp"
#include "proberr/symexpr.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace proberr {

// c0 + sum_i coeff_i * eps_i with eps_i in [-1, 1]; coefficients are
// expressions over the input variables.
struct AffineForm {
    SymId c0 = -1;
    std::map<int, SymId> terms;
};

// Infinite-precision value together with the absolute error of its
// finite-precision counterpart.
struct RangeErrorPair {
    SymId range = -1;
    AffineForm err;
};

class SAContext {
public:
    SAContext(ExprPool& pool, FloatFormat fmt, bool exact_constants = false);

    ExprPool& pool() { return pool_; }
    const FloatFormat& format() const { return fmt_; }

    // Input box used only to drop the underflow allowance where values
    // provably stay at or above the smallest normal magnitude.
    void set_domain(std::vector<Interval> box) { domain_ = std::move(box); }

    AffineForm zero_form();
    int fresh_noise(const std::string& origin);
    const std::map<int, std::string>& noise_origins() const { return origins_; }

    AffineForm affine_linear(SymId alpha, const AffineForm& x, SymId beta, const AffineForm& y, SymId zeta);

    RangeErrorPair leaf(const std::string& var, bool exact);
    // the constant as written, rounded per the model
    RangeErrorPair constant(const Rational& v);
    RangeErrorPair neg(const RangeErrorPair& x);
    RangeErrorPair add(const RangeErrorPair& x, const RangeErrorPair& y);
    RangeErrorPair sub(const RangeErrorPair& x, const RangeErrorPair& y);
    RangeErrorPair mul(const RangeErrorPair& x, const RangeErrorPair& y);
    RangeErrorPair div(const RangeErrorPair& x, const RangeErrorPair& y);
    RangeErrorPair apply(ArithOp op, const RangeErrorPair& x, const RangeErrorPair& y);
    // appends u (|range| + |err|) as a fresh term
    RangeErrorPair round(const RangeErrorPair& p, const std::string& origin = "");

    // |c0| + sum |coeff_i|: the largest |err| for given inputs
    SymId magnitude(const AffineForm& f);
    Interval concretize(const AffineForm& f, const std::vector<Interval>& box);
    std::string to_string(const AffineForm& f);

private:
    SymId rounding_coeff(SymId value_mag);
    bool is_zero(const AffineForm& f) const;
    AffineForm scale(SymId k, const AffineForm& f);

    ExprPool& pool_;
    FloatFormat fmt_;
    bool exact_constants_;
    int next_noise_ = 1;
    std::map<int, std::string> origins_;
    std::optional<std::vector<Interval>> domain_;
};

// Error form of the program's output; the DAG keeps shared subterms shared.
struct ErrorFormResult {
    Dag dag;
    std::vector<RangeErrorPair> pairs;  // per DAG node
    RangeErrorPair output;
};
ErrorFormResult build_error_form(SAContext& ctx, const Program& prog);

}  // namespace proberr

#endif
