#include "proberr/gopt.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace proberr {

namespace {

struct Entry {
    double ub;
    std::size_t seq;
    Box box;
    bool operator<(const Entry& o) const { return ub != o.ub ? ub < o.ub : seq > o.seq; }
};

bool allowed_hit(const Interval& v, const std::vector<Interval>& allowed) {
    for (const auto& a : allowed)
        if (v.intersects(a)) return true;
    return false;
}

bool allowed_inside(const Interval& v, const std::vector<Interval>& allowed) {
    for (const auto& a : allowed)
        if (v.subset_of(a)) return true;
    return false;
}

Box midpoint(const Box& b) {
    Box m(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) m[i] = Interval{b[i].mid()};
    return m;
}

}  // namespace

GoptResult maximize(ExprPool& pool, SymId f, const Box& box, const std::vector<BoxConstraint>& cons,
                    const GoptConfig& cfg) {
    return maximize_boxes(pool, f, {box}, cons, cfg);
}

GoptResult maximize_boxes(ExprPool& pool, SymId f, const std::vector<Box>& boxes,
                          const std::vector<BoxConstraint>& cons, const GoptConfig& cfg) {
    GoptResult res;
    if (boxes.empty()) {
        res.upper = -HUGE_VAL;
        res.infeasible = true;
        return res;
    }
    if (!cfg.optimizer_cmd.empty()) {
        // constraints are dropped: a maximum over the larger set is still an upper bound
        res.upper = -HUGE_VAL;
        for (const auto& b : boxes)
            res.upper = std::max(res.upper, run_external_optimizer(cfg.optimizer_cmd, optimizer_problem(pool, f, b)));
        res.boxes = boxes.size();
        return res;
    }

    std::vector<int> fvars = pool.vars_of(f);
    std::vector<int> split_vars = fvars;
    for (const auto& c : cons) {
        auto cv = pool.vars_of(c.expr);
        split_vars.insert(split_vars.end(), cv.begin(), cv.end());
    }
    std::sort(split_vars.begin(), split_vars.end());
    split_vars.erase(std::unique(split_vars.begin(), split_vars.end()), split_vars.end());
    for (int v : split_vars)
        for (const auto& b : boxes)
            if (static_cast<std::size_t>(v) >= b.size())
                throw std::invalid_argument("box does not cover variable " + pool.var_name(v));

    const bool use_mv = cfg.mean_value && !pool.contains_op(f, SymOp::Sign);
    std::vector<SymId> roots{f};
    if (use_mv)
        for (int v : fvars) roots.push_back(pool.derivative(f, v));
    const std::size_t cons_base = roots.size();
    for (const auto& c : cons) roots.push_back(c.expr);
    CompiledExprs prog(pool, roots);
    // the value program alone, for points
    std::vector<SymId> point_roots{f};
    for (const auto& c : cons) point_roots.push_back(c.expr);
    CompiledExprs point_prog(pool, point_roots);

    std::vector<double> scale(static_cast<std::size_t>(pool.var_count()), 0.0);
    for (const auto& b : boxes)
        for (int v : split_vars) scale[static_cast<std::size_t>(v)] = std::max(scale[static_cast<std::size_t>(v)], b[static_cast<std::size_t>(v)].width());

    std::vector<Interval> scratch, pscratch;
    double lb = -HUGE_VAL;
    std::size_t seq = 0;
    std::priority_queue<Entry> queue;
    double settled = -HUGE_VAL;  // boxes that cannot be split further
    bool any_feasible = false;

    // upper bound of f on b, or nullopt when the constraints refute b
    auto bound = [&](const Box& b) -> std::optional<double> {
        prog.eval_into(b, scratch);
        for (std::size_t k = 0; k < cons.size(); ++k)
            if (!allowed_hit(prog.root_value(scratch, cons_base + k), cons[k].allowed)) return std::nullopt;
        double ub = prog.root_value(scratch, 0).hi;
        Box m = midpoint(b);
        point_prog.eval_into(m, pscratch);
        Interval fm = point_prog.root_value(pscratch, 0);
        bool point_ok = true;
        for (std::size_t k = 0; k < cons.size(); ++k)
            point_ok = point_ok && allowed_inside(point_prog.root_value(pscratch, 1 + k), cons[k].allowed);
        if (point_ok) lb = std::max(lb, fm.lo);
        if (use_mv) {
            Interval mv = fm;
            for (std::size_t i = 0; i < fvars.size(); ++i) {
                auto v = static_cast<std::size_t>(fvars[i]);
                mv = mv + prog.root_value(scratch, 1 + i) * (b[v] - m[v]);
            }
            ub = std::min(ub, mv.hi);
        }
        return ub;
    };

    for (const auto& b : boxes) {
        ++res.boxes;
        auto ub = bound(b);
        if (!ub) continue;
        any_feasible = true;
        queue.push({*ub, seq++, b});
    }

    while (!queue.empty()) {
        const double top = queue.top().ub;
        if (top <= settled) break;
        if (lb > -HUGE_VAL && top - lb <= cfg.tol_rel * std::max(std::fabs(lb), std::fabs(top)) + cfg.tol_abs) {
            res.converged = true;
            break;
        }
        if (res.boxes >= cfg.budget) break;
        Entry e = queue.top();
        queue.pop();
        int best = -1;
        double best_w = 0.0;
        for (int v : split_vars) {
            auto vi = static_cast<std::size_t>(v);
            if (scale[vi] <= 0) continue;
            double w = e.box[vi].width() / scale[vi];
            double mid = e.box[vi].mid();
            if (w > best_w && mid > e.box[vi].lo && mid < e.box[vi].hi) {
                best_w = w;
                best = v;
            }
        }
        if (best < 0) {
            settled = std::max(settled, e.ub);
            continue;
        }
        auto bi = static_cast<std::size_t>(best);
        double mid = e.box[bi].mid();
        Box left = e.box, right = e.box;
        left[bi].hi = mid;
        right[bi].lo = mid;
        for (Box* child : {&left, &right}) {
            ++res.boxes;
            auto ub = bound(*child);
            if (ub) queue.push({std::min(*ub, e.ub), seq++, std::move(*child)});
        }
    }
    double up = settled;
    if (!queue.empty()) up = std::max(up, queue.top().ub);
    res.upper = up;
    res.lower = lb;
    res.infeasible = !any_feasible || up == -HUGE_VAL;
    if (queue.empty() && settled == -HUGE_VAL) res.converged = true;
    return res;
}

std::string optimizer_problem(const ExprPool& pool, SymId f, const Box& box) {
    std::ostringstream os;
    char buf[96];
    for (int v : pool.vars_of(f)) {
        const auto& iv = box.at(static_cast<std::size_t>(v));
        std::snprintf(buf, sizeof buf, " %.17g %.17g\n", iv.lo, iv.hi);
        os << "var " << pool.var_name(v) << buf;
    }
    os << "max " << pool.to_string(f) << "\n";
    return os.str();
}

double run_external_optimizer(const std::string& cmd, const std::string& problem) {
    char path[] = "/tmp/proberr-opt-XXXXXX";
    int fd = mkstemp(path);
    if (fd < 0) throw std::runtime_error("cannot create optimizer input file");
    {
        std::ofstream out(path);
        out << problem;
    }
    close(fd);
    std::string full = cmd + " < " + path;
    FILE* p = popen(full.c_str(), "r");
    if (!p) {
        unlink(path);
        throw std::runtime_error("cannot run optimizer: " + cmd);
    }
    std::string text;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) text.append(buf, n);
    int status = pclose(p);
    unlink(path);
    if (status != 0) throw std::runtime_error("optimizer exited with status " + std::to_string(status));
    std::istringstream is(text);
    std::string tok, last;
    while (is >> tok) last = tok;
    char* end = nullptr;
    double v = std::strtod(last.c_str(), &end);
    if (last.empty() || *end != '\0') throw std::runtime_error("optimizer printed no number");
    return v;
}

namespace {

class ExprReader {
public:
    ExprReader(ExprPool& pool, const std::string& s, std::size_t line) : pool_(pool), s_(s), line_(line) {}

    SymId parse() {
        SymId e = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + s_.substr(i_, 1) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("line " + std::to_string(line_) + ": " + what);
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    double number() {
        skip();
        const char* start = s_.c_str() + i_;
        char* end = nullptr;
        double v = std::strtod(start, &end);
        if (end == start) fail("number expected");
        i_ += static_cast<std::size_t>(end - start);
        return v;
    }
    SymId expr() {
        SymId a = term();
        for (;;) {
            if (eat('+'))
                a = pool_.add(a, term());
            else if (eat('-'))
                a = pool_.sub(a, term());
            else
                return a;
        }
    }
    SymId term() {
        SymId a = unary();
        for (;;) {
            if (eat('*'))
                a = pool_.mul(a, unary());
            else if (eat('/'))
                a = pool_.div(a, unary());
            else
                return a;
        }
    }
    SymId unary() {
        if (eat('-')) return pool_.neg(unary());
        return primary();
    }
    SymId primary() {
        skip();
        if (eat('(')) {
            SymId e = expr();
            if (!eat(')')) fail("')' expected");
            return e;
        }
        if (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.'))
            return pool_.constant(number());
        std::size_t st = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
        if (st == i_) fail("expression expected");
        std::string name = s_.substr(st, i_ - st);
        if (eat('(')) {
            if (name == "interval") {
                double lo = signed_number();
                if (!eat(',')) fail("',' expected");
                double hi = signed_number();
                if (!eat(')')) fail("')' expected");
                return pool_.constant(Interval{lo, hi});
            }
            SymId a = expr();
            if (!eat(')')) fail("')' expected");
            if (name == "abs") return pool_.abs(a);
            if (name == "sign") return pool_.sign(a);
            fail("unknown function '" + name + "'");
        }
        if (pool_.var_index(name) < 0) fail("undeclared variable '" + name + "'");
        return pool_.var(name);
    }
    double signed_number() {
        bool neg = eat('-');
        double v = number();
        return neg ? -v : v;
    }

    ExprPool& pool_;
    const std::string& s_;
    std::size_t i_ = 0;
    std::size_t line_;
};

}  // namespace

OptimizerProblem parse_optimizer_problem(ExprPool& pool, const std::string& text) {
    OptimizerProblem prob;
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::pair<int, Interval>> ranges;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "var") {
            std::string name;
            double lo, hi;
            if (!(ls >> name >> lo >> hi) || !(lo <= hi))
                throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 'var <name> <lo> <hi>'");
            pool.var(name);
            ranges.emplace_back(pool.var_index(name), Interval{lo, hi});
        } else if (kw == "max") {
            std::string rest;
            std::getline(ls, rest);
            prob.f = ExprReader(pool, rest, lineno).parse();
        } else {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown keyword '" + kw + "'");
        }
    }
    if (prob.f < 0) throw std::invalid_argument("no 'max' line");
    prob.box.assign(static_cast<std::size_t>(pool.var_count()), Interval{0.0});
    for (const auto& [v, iv] : ranges) prob.box[static_cast<std::size_t>(v)] = iv;
    return prob;
}

}  // namespace proberr
