#include "proberr/parser.hpp"

#include <cctype>
#include <map>
#include <set>

namespace proberr {

ParseError::ParseError(Category cat, SrcPos pos, const std::string& msg)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg),
      cat_(cat),
      pos_(pos),
      msg_(msg) {}

std::string ParseError::category_name() const {
    switch (cat_) {
        case Category::Syntax: return "syntax";
        case Category::Undeclared: return "undeclared";
        case Category::Unsupported: return "unsupported";
        case Category::Semantic: return "semantic";
    }
    return "syntax";
}

namespace {

using Cat = ParseError::Category;

const std::set<std::string>& transcendentals() {
    static const std::set<std::string> names{"sin",  "cos",   "tan",  "asin", "acos", "atan", "atan2", "sinh",
                                             "cosh", "tanh",  "exp",  "exp2", "expm1", "log", "log2",  "log10",
                                             "log1p", "pow",  "sqrt", "cbrt", "hypot", "erf", "erfc",  "tgamma",
                                             "lgamma", "fabs", "fma", "fmod", "floor", "ceil", "round", "trunc"};
    return names;
}

[[noreturn]] void unsupported_call(const std::string& name, SrcPos pos) {
    if (transcendentals().count(name))
        throw ParseError(Cat::Unsupported, pos,
                         "transcendentals unsupported: '" + name + "' (only + - * / are analyzable)");
    throw ParseError(Cat::Unsupported, pos, "unsupported function '" + name + "'");
}

BigInt pow10(long n) {
    BigInt r = 1;
    for (long i = 0; i < n; ++i) r *= 10;
    return r;
}

Rational decimal_rational(const std::string& s) {
    std::size_t i = 0;
    BigInt digits = 0;
    long frac = 0;
    bool any = false, dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = digits * 10 + (c - '0');
            if (dot) ++frac;
            any = true;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (!any) throw std::invalid_argument("malformed number '" + s + "'");
    long exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t used = 0;
        exp10 = std::stol(s.substr(i + 1), &used);
        i += 1 + used;
    }
    if (i != s.size()) throw std::invalid_argument("malformed number '" + s + "'");
    long shift = exp10 - frac;
    if (shift >= 0) return Rational(digits * pow10(shift));
    return Rational(digits, pow10(-shift));
}

// ---- program files ----

struct Token {
    enum Kind { Ident, Number, Sym, Newline, End } kind = End;
    std::string text;
    SrcPos pos;
};

std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto pos = [&] { return SrcPos{line, col}; };
    auto adv = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') adv(1);
        } else if (c == '\n' || c == ';') {
            out.push_back({Token::Newline, std::string(1, c), pos()});
            adv(1);
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            SrcPos p = pos();
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            out.push_back({Token::Number, src.substr(i, j - i), p});
            adv(j - i);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            SrcPos p = pos();
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            out.push_back({Token::Ident, src.substr(i, j - i), p});
            adv(j - i);
        } else if (std::string("~=()[],+-*/").find(c) != std::string::npos) {
            out.push_back({Token::Sym, std::string(1, c), pos()});
            adv(1);
        } else {
            throw ParseError(Cat::Syntax, pos(), std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Token::End, "", pos()});
    return out;
}

const std::set<std::string>& dist_kinds() {
    static const std::set<std::string> k{"uniform", "normal",   "laplace", "exp",
                                         "exponential", "rayleigh", "beta",    "piecewise"};
    return k;
}

class ProgramParser {
public:
    explicit ProgramParser(const std::string& text) : toks_(tokenize(text)) {}

    Program run() {
        for (;;) {
            while (peek().kind == Token::Newline) ++i_;
            if (peek().kind == Token::End) break;
            const Token name = expect_ident("statement must start with a name");
            if (prog_.find_decl(name.text) || prog_.find_assign(name.text))
                throw ParseError(Cat::Semantic, name.pos, "'" + name.text + "' is defined twice");
            if (accept("~"))
                declaration(name);
            else if (accept("="))
                assignment(name);
            else
                throw ParseError(Cat::Syntax, peek().pos, "expected '~' or '=' after '" + name.text + "'");
            if (peek().kind != Token::Newline && peek().kind != Token::End)
                throw ParseError(Cat::Syntax, peek().pos, "unexpected '" + peek().text + "' at end of statement");
        }
        if (prog_.assigns.empty()) throw ParseError(Cat::Semantic, peek().pos, "no output assignment");
        return std::move(prog_);
    }

private:
    const Token& peek() const { return toks_[i_]; }
    bool accept(const std::string& sym) {
        if (peek().kind == Token::Sym && peek().text == sym) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(const std::string& sym) {
        if (!accept(sym)) throw ParseError(Cat::Syntax, peek().pos, "expected '" + sym + "'" + found());
    }
    std::string found() const {
        if (peek().kind == Token::End) return " at end of input";
        if (peek().kind == Token::Newline) return " at end of line";
        return " before '" + peek().text + "'";
    }
    static Rational literal_value(const Token& t) {
        try {
            return decimal_rational(t.text);
        } catch (const std::exception&) {
            throw ParseError(Cat::Syntax, t.pos, "malformed number '" + t.text + "'");
        }
    }
    Token expect_ident(const std::string& what) {
        if (peek().kind != Token::Ident) throw ParseError(Cat::Syntax, peek().pos, what + found());
        return toks_[i_++];
    }

    double signed_number() {
        bool neg = accept("-");
        if (peek().kind != Token::Number) throw ParseError(Cat::Syntax, peek().pos, "number expected" + found());
        Token t = toks_[i_++];
        Rational v = literal_value(t);
        if (accept("/")) {
            if (peek().kind != Token::Number) throw ParseError(Cat::Syntax, peek().pos, "denominator expected");
            Rational d = literal_value(toks_[i_++]);
            if (d == 0) throw ParseError(Cat::Semantic, t.pos, "zero denominator");
            v /= d;
        }
        double x = to_double(v);
        return neg ? -x : x;
    }

    std::vector<double> number_list() {
        expect("[");
        std::vector<double> v;
        if (!accept("]")) {
            do v.push_back(signed_number());
            while (accept(","));
            expect("]");
        }
        return v;
    }

    void declaration(const Token& name) {
        DistDecl d;
        d.name = name.text;
        d.pos = name.pos;
        const Token kind = expect_ident("distribution name expected");
        if (!dist_kinds().count(kind.text))
            throw ParseError(Cat::Semantic, kind.pos, "unknown distribution '" + kind.text + "'");
        d.kind = kind.text;
        if (accept("(")) {
            if (d.kind == "piecewise") {
                d.breaks = number_list();
                expect(",");
                expect("[");
                do d.coeffs.push_back(number_list());
                while (accept(","));
                expect("]");
                expect(")");
            } else if (!accept(")")) {
                do d.params.push_back(signed_number());
                while (accept(","));
                expect(")");
            }
        } else {
            if (d.kind == "piecewise") throw ParseError(Cat::Syntax, peek().pos, "piecewise needs its pieces");
            d.shorthand = true;
        }
        if (peek().kind == Token::Ident && peek().text == "in") {
            ++i_;
            expect("[");
            double lo = signed_number();
            expect(",");
            double hi = signed_number();
            expect("]");
            if (!(lo < hi)) throw ParseError(Cat::Semantic, kind.pos, "empty range for '" + d.name + "'");
            d.range = Interval{lo, hi};
        }
        if (peek().kind == Token::Ident && peek().text == "exact") {
            ++i_;
            d.exact = true;
        }
        if (d.shorthand && !d.range)
            throw ParseError(Cat::Semantic, kind.pos, "'" + d.kind + "' without parameters needs 'in [a, b]'");
        try {
            DistPtr dist = d.make();
            Interval s = dist->support();
            if (!std::isfinite(s.lo) || !std::isfinite(s.hi))
                throw ParseError(Cat::Semantic, kind.pos,
                                 "'" + d.name + "' has unbounded support; add 'in [a, b]' to truncate it");
        } catch (const std::invalid_argument& e) {
            throw ParseError(Cat::Semantic, kind.pos, e.what());
        } catch (const std::domain_error& e) {
            throw ParseError(Cat::Semantic, kind.pos, e.what());
        }
        prog_.decls.push_back(std::move(d));
    }

    void assignment(const Token& name) {
        ExprPtr e = expr();
        prog_.assigns.push_back({name.text, e, name.pos});
    }

    ExprPtr expr() {
        ExprPtr a = term();
        for (;;) {
            SrcPos p = peek().pos;
            if (accept("+"))
                a = Expr::binary(ArithOp::Add, a, term(), p);
            else if (accept("-"))
                a = Expr::binary(ArithOp::Sub, a, term(), p);
            else
                return a;
        }
    }
    ExprPtr term() {
        ExprPtr a = unary();
        for (;;) {
            SrcPos p = peek().pos;
            if (accept("*"))
                a = Expr::binary(ArithOp::Mul, a, unary(), p);
            else if (accept("/"))
                a = Expr::binary(ArithOp::Div, a, unary(), p);
            else
                return a;
        }
    }
    ExprPtr unary() {
        SrcPos p = peek().pos;
        if (accept("-")) return Expr::negate(unary(), p);
        if (accept("+")) return unary();
        return primary();
    }
    ExprPtr primary() {
        const Token t = peek();
        if (t.kind == Token::Number) {
            ++i_;
            return Expr::constant(literal_value(t), t.text, t.pos);
        }
        if (t.kind == Token::Ident) {
            ++i_;
            if (peek().kind == Token::Sym && peek().text == "(") unsupported_call(t.text, t.pos);
            if (!prog_.find_decl(t.text) && !prog_.find_assign(t.text))
                throw ParseError(Cat::Undeclared, t.pos, "undeclared variable '" + t.text + "'");
            return Expr::variable(t.text, t.pos);
        }
        if (accept("(")) {
            ExprPtr e = expr();
            expect(")");
            return e;
        }
        throw ParseError(Cat::Syntax, t.pos, "expression expected" + found());
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    Program prog_;
};

// ---- FPCore ----

struct SExpr {
    bool atom = true;
    std::string text;
    std::vector<SExpr> items;
    SrcPos pos;
};

class SReader {
public:
    explicit SReader(const std::string& s) : s_(s) {}

    SExpr read() {
        skip();
        SExpr e = item();
        skip();
        if (i_ < s_.size()) throw ParseError(Cat::Syntax, pos(), "trailing input after the FPCore form");
        return e;
    }

private:
    SrcPos pos() const { return {line_, col_}; }
    void adv() {
        if (s_[i_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++i_;
    }
    void skip() {
        while (i_ < s_.size()) {
            if (s_[i_] == ';') {
                while (i_ < s_.size() && s_[i_] != '\n') adv();
            } else if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
                adv();
            } else {
                break;
            }
        }
    }
    SExpr item() {
        skip();
        if (i_ >= s_.size()) throw ParseError(Cat::Syntax, pos(), "unexpected end of input");
        SExpr e;
        e.pos = pos();
        char c = s_[i_];
        if (c == '(' || c == '[') {
            char close = c == '(' ? ')' : ']';
            adv();
            e.atom = false;
            for (;;) {
                skip();
                if (i_ >= s_.size()) throw ParseError(Cat::Syntax, e.pos, "unbalanced parenthesis");
                if (s_[i_] == close) {
                    adv();
                    break;
                }
                e.items.push_back(item());
            }
            return e;
        }
        if (c == ')' || c == ']') throw ParseError(Cat::Syntax, pos(), "unexpected ')'");
        if (c == '"') {
            adv();
            while (i_ < s_.size() && s_[i_] != '"') {
                e.text += s_[i_];
                adv();
            }
            if (i_ >= s_.size()) throw ParseError(Cat::Syntax, e.pos, "unterminated string");
            adv();
            return e;
        }
        while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) &&
               std::string("()[];").find(s_[i_]) == std::string::npos) {
            e.text += s_[i_];
            adv();
        }
        return e;
    }

    const std::string& s_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

bool is_number(const std::string& t) {
    if (t.empty()) return false;
    std::size_t k = (t[0] == '-' || t[0] == '+') ? 1 : 0;
    return k < t.size() && (std::isdigit(static_cast<unsigned char>(t[k])) || t[k] == '.');
}

class FPCoreImporter {
public:
    FPCoreImporter(const std::string& dist) : dist_(dist) {}

    Program run(const SExpr& top) {
        if (top.atom || top.items.empty() || !top.items[0].atom || top.items[0].text != "FPCore")
            throw ParseError(Cat::Syntax, top.pos, "expected (FPCore ...)");
        std::size_t k = 1;
        if (k < top.items.size() && top.items[k].atom) ++k;  // optional name
        if (k >= top.items.size() || top.items[k].atom)
            throw ParseError(Cat::Syntax, top.pos, "FPCore argument list expected");
        std::vector<std::pair<std::string, SrcPos>> args;
        for (const auto& a : top.items[k].items) {
            const SExpr* v = &a;
            if (!a.atom) {
                if (a.items.empty() || !a.items.back().atom)
                    throw ParseError(Cat::Unsupported, a.pos, "unsupported argument form");
                v = &a.items.back();  // (! :props ... x)
            }
            args.emplace_back(v->text, v->pos);
        }
        ++k;
        const SExpr* body = nullptr;
        while (k < top.items.size()) {
            const SExpr& it = top.items[k];
            if (it.atom && !it.text.empty() && it.text[0] == ':' && k + 1 < top.items.size()) {
                if (it.text == ":pre") bounds(top.items[k + 1]);
                k += 2;
                continue;
            }
            body = &it;
            ++k;
        }
        if (!body) throw ParseError(Cat::Syntax, top.pos, "FPCore body missing");

        Program prog;
        for (const auto& [name, pos] : args) {
            auto lo = lo_.find(name), hi = hi_.find(name);
            if (lo == lo_.end() || hi == hi_.end())
                throw ParseError(Cat::Semantic, pos, "argument '" + name + "' has no bounded :pre range");
            DistDecl d;
            d.name = name;
            d.pos = pos;
            Interval r{lo->second, hi->second};
            if (dist_ == "uniform") {
                d.kind = "uniform";
                d.params = {r.lo, r.hi};
            } else if (dist_ == "normal" || dist_ == "exp") {
                d.kind = dist_;
                d.shorthand = true;
                d.range = r;
            } else {
                throw std::invalid_argument("unknown import distribution '" + dist_ + "'");
            }
            prog.decls.push_back(d);
            env_[name] = Expr::variable(name, pos);
        }
        prog.assigns.push_back({"result", convert(*body, env_), body->pos});
        return prog;
    }

private:
    void bounds(const SExpr& e) {
        if (e.atom) return;
        if (e.items.empty() || !e.items[0].atom) return;
        const std::string& op = e.items[0].text;
        if (op == "and") {
            for (std::size_t i = 1; i < e.items.size(); ++i) bounds(e.items[i]);
            return;
        }
        bool le = op == "<=" || op == "<";
        bool ge = op == ">=" || op == ">";
        if (!le && !ge) return;
        for (std::size_t i = 1; i + 1 < e.items.size(); ++i) {
            const SExpr& l = e.items[i];
            const SExpr& r = e.items[i + 1];
            if (!l.atom || !r.atom) continue;
            bool ln = is_number(l.text), rn = is_number(r.text);
            const SExpr& small = le ? l : r;
            const SExpr& big = le ? r : l;
            if (ln != rn) {
                if (is_number(small.text))
                    lo_[big.text] = to_double(parse_rational(small.text));
                else
                    hi_[small.text] = to_double(parse_rational(big.text));
            }
        }
    }

    ExprPtr convert(const SExpr& e, const std::map<std::string, ExprPtr>& env) {
        if (e.atom) {
            if (is_number(e.text)) {
                std::string t = e.text;
                bool neg = t[0] == '-';
                if (t[0] == '-' || t[0] == '+') t = t.substr(1);
                ExprPtr c;
                try {
                    c = Expr::constant(parse_rational(t), t, e.pos);
                } catch (const std::exception&) {
                    throw ParseError(Cat::Syntax, e.pos, "malformed number '" + e.text + "'");
                }
                return neg ? Expr::negate(c, e.pos) : c;
            }
            auto it = env.find(e.text);
            if (it == env.end()) {
                if (e.text == "PI" || e.text == "E")
                    throw ParseError(Cat::Unsupported, e.pos, "transcendentals unsupported: constant " + e.text);
                throw ParseError(Cat::Undeclared, e.pos, "undeclared variable '" + e.text + "'");
            }
            return it->second;
        }
        if (e.items.empty() || !e.items[0].atom) throw ParseError(Cat::Syntax, e.pos, "malformed expression");
        const std::string& op = e.items[0].text;
        if (op == "let" || op == "let*") {
            if (e.items.size() != 3 || e.items[1].atom) throw ParseError(Cat::Syntax, e.pos, "malformed let");
            std::map<std::string, ExprPtr> inner = env;
            for (const auto& b : e.items[1].items) {
                if (b.atom || b.items.size() != 2 || !b.items[0].atom)
                    throw ParseError(Cat::Syntax, b.pos, "malformed let binding");
                inner[b.items[0].text] = convert(b.items[1], op == "let*" ? inner : env);
            }
            return convert(e.items[2], inner);
        }
        std::vector<ExprPtr> xs;
        for (std::size_t i = 1; i < e.items.size(); ++i) xs.push_back(convert(e.items[i], env));
        auto fold = [&](ArithOp o) {
            if (xs.empty()) throw ParseError(Cat::Syntax, e.pos, "'" + op + "' needs arguments");
            ExprPtr acc = xs[0];
            for (std::size_t i = 1; i < xs.size(); ++i) acc = Expr::binary(o, acc, xs[i], e.pos);
            return acc;
        };
        if (op == "+") return fold(ArithOp::Add);
        if (op == "*") return fold(ArithOp::Mul);
        if (op == "/") {
            if (xs.size() < 2) throw ParseError(Cat::Syntax, e.pos, "'/' needs two arguments");
            return fold(ArithOp::Div);
        }
        if (op == "-") {
            if (xs.size() == 1) return Expr::negate(xs[0], e.pos);
            return fold(ArithOp::Sub);
        }
        if (op == "if" || op == "while" || op == "while*" || op == "for")
            throw ParseError(Cat::Unsupported, e.pos, "control flow unsupported: '" + op + "'");
        unsupported_call(op, e.pos);
    }

    std::string dist_;
    std::map<std::string, double> lo_;
    std::map<std::string, double> hi_;
    std::map<std::string, ExprPtr> env_;
};

}  // namespace

Rational parse_rational(const std::string& literal) {
    std::string s = literal;
    bool neg = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        neg = s[0] == '-';
        s = s.substr(1);
    }
    Rational v;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational d = decimal_rational(s.substr(slash + 1));
        if (d == 0) throw std::invalid_argument("zero denominator in '" + literal + "'");
        v = decimal_rational(s.substr(0, slash)) / d;
    } else {
        v = decimal_rational(s);
    }
    return neg ? Rational(-v) : v;
}

Program parse_program(const std::string& text) { return ProgramParser(text).run(); }

Program import_fpcore(const std::string& text, const std::string& dist) {
    SExpr top = SReader(text).read();
    return FPCoreImporter(dist).run(top);
}

}  // namespace proberr
