#ifndef PROBERR_PARSER_HPP
#define PROBERR_PARSER_HPP

#include "proberr/ast.hpp"

#include <stdexcept>
#include <string>

namespace proberr {

class ParseError : public std::runtime_error {
public:
    enum class Category { Syntax, Undeclared, Unsupported, Semantic };

    ParseError(Category cat, SrcPos pos, const std::string& msg);

    Category category() const { return cat_; }
    SrcPos pos() const { return pos_; }
    const std::string& message() const { return msg_; }
    std::string category_name() const;

private:
    Category cat_;
    SrcPos pos_;
    std::string msg_;
};

// Program files:
//   x ~ uniform(0, 1)
//   y ~ normal(0, 1) in [-3, 3]
//   w ~ normal in [20, 20000]
//   p ~ piecewise([0, 0.25, 1], [[2], [0.6666]]) exact
//   z = (x + y) / y
// One statement per line; '#' starts a comment. The last assignment is the
// output and may refer to earlier assignments by name.
Program parse_program(const std::string& text);

// Decimal or a/b literal, exactly.
Rational parse_rational(const std::string& literal);

// Straight-line FPCore with + - * /, let and a :pre of bound constraints.
// Every argument gets the named distribution over its :pre range
// ("uniform", "normal" or "exp", the latter two in shorthand form).
Program import_fpcore(const std::string& text, const std::string& dist = "uniform");

}  // namespace proberr

#endif
