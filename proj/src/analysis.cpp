#include "proberr/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace proberr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string node_var(char prefix, int id) { return prefix + std::to_string(id); }

DSStructure point_ds(Interval v) {
    DSStructure d;
    d.elements.emplace_back(v, 1.0);
    return d;
}

std::vector<Interval> merge_intervals(std::vector<Interval> v) {
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    std::vector<Interval> out;
    for (const auto& iv : v) {
        if (!out.empty() && iv.lo <= out.back().hi)
            out.back().hi = std::max(out.back().hi, iv.hi);
        else
            out.push_back(iv);
    }
    return out;
}

// Merges the closest neighbouring pieces until the product of piece counts
// fits the cap.
void cap_pieces(std::vector<std::vector<Interval>>& pieces, std::size_t cap) {
    auto product = [&] {
        double p = 1;
        for (const auto& v : pieces) p *= static_cast<double>(v.size());
        return p;
    };
    while (product() > static_cast<double>(cap)) {
        auto it = std::max_element(pieces.begin(), pieces.end(),
                                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
        auto& v = *it;
        std::size_t best = 0;
        for (std::size_t k = 1; k + 1 < v.size(); ++k)
            if (v[k + 1].lo - v[k].hi < v[best + 1].lo - v[best].hi) best = k;
        v[best].hi = v[best + 1].hi;
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    }
}

}  // namespace

Box CondErrProblem::full_box() const {
    Box box(static_cast<std::size_t>(pool->var_count()), Interval{0.0});
    for (const auto& l : leaves) box[static_cast<std::size_t>(l.var)] = l.ds.support();
    return box;
}

std::pair<std::vector<Interval>, bool> collected_ranges(const DSStructure& ds, double confidence) {
    std::vector<const FocalElement*> els;
    for (const auto& f : ds.elements)
        if (f.pmax > 0) els.push_back(&f);
    std::stable_sort(els.begin(), els.end(), [](const FocalElement* a, const FocalElement* b) {
        if (a->pmin != b->pmin) return a->pmin > b->pmin;
        return std::fabs(a->iv.mid()) < std::fabs(b->iv.mid());
    });
    std::vector<Interval> taken;
    double mass = 0;
    for (const auto* f : els) {
        if (mass >= confidence - 1e-12) break;
        taken.push_back(f->iv);
        mass += f->pmin;
    }
    bool complete = taken.size() == els.size();
    return {merge_intervals(std::move(taken)), complete};
}

GoptResult cond_err(const CondErrProblem& prob, double confidence) {
    std::vector<std::vector<Interval>> pieces;
    for (const auto& l : prob.leaves) {
        auto [ranges, complete] = collected_ranges(l.ds, confidence);
        if (complete || ranges.empty()) ranges = {l.ds.support()};
        pieces.push_back(std::move(ranges));
    }
    cap_pieces(pieces, 256);

    const Box base = prob.full_box();
    std::vector<Box> boxes{base};
    for (std::size_t k = 0; k < prob.leaves.size(); ++k) {
        std::vector<Box> next;
        for (const auto& b : boxes)
            for (const auto& iv : pieces[k]) {
                Box nb = b;
                nb[static_cast<std::size_t>(prob.leaves[k].var)] = iv;
                next.push_back(std::move(nb));
            }
        boxes = std::move(next);
    }

    std::vector<BoxConstraint> cons;
    for (const auto& in : prob.inner) {
        auto [ranges, complete] = collected_ranges(in.ds, confidence);
        if (complete || ranges.empty()) continue;
        BoxConstraint c;
        c.expr = in.range;
        for (const auto& r : ranges) c.allowed.push_back({down(r.lo - in.err_bound), up(r.hi + in.err_bound)});
        c.allowed = merge_intervals(std::move(c.allowed));
        cons.push_back(std::move(c));
    }
    return maximize_boxes(*prob.pool, prob.objective, boxes, cons, prob.gopt);
}

DSStructure rounding_factor_ds(const DSStructure& e_ds, const FloatFormat& fmt) {
    DSStructure out;
    const Interval u{fmt.u()};
    for (const auto& f : e_ds.elements) out.elements.emplace_back(Interval{1.0} - u * f.iv, f.pmin, f.pmax);
    return out;
}

DSStructure apply_rounding(const DSStructure& exact, const DSStructure& e_ds, const FloatFormat& fmt, std::size_t n,
                           bool dependent) {
    const double mn = fmt.min_normal();
    const Interval u{fmt.u()};
    const Interval spread = Interval{1.0} - u * Interval{-1.0, 1.0};
    // continuous part of E, renormalized: values of normal magnitude never
    // flush, overflow was ruled out before
    DSStructure cont;
    double mass = 0;
    for (const auto& f : e_ds.elements)
        if (f.iv.subset_of({-1.0, 1.0}) && f.pmax > 0) {
            cont.elements.push_back(f);
            mass += f.pmin;
        }
    for (auto& f : cont.elements) {
        f.pmin /= mass;
        f.pmax = f.pmin;
    }
    DSStructure factor = rounding_factor_ds(cont, fmt);

    DSStructure out;
    for (const auto& x : exact.elements) {
        if (x.pmax <= 0) continue;
        if (x.iv.mig() < mn) {
            // may flush to zero or round up to the smallest normal
            out.elements.emplace_back(hull(x.iv * spread, Interval{-mn, mn}), x.pmin, x.pmax);
        } else if (dependent || mass <= 0) {
            out.elements.emplace_back(x.iv * spread, x.pmin, x.pmax);
        } else {
            for (const auto& f : factor.elements)
                out.elements.emplace_back(x.iv * f.iv, x.pmin * f.pmin, x.pmax * f.pmax);
        }
    }
    return condense(out, n);
}

ErrorDistribution error_model_for_ds(const DSStructure& ds, const FloatFormat& fmt, std::size_t n,
                                     DSStructure& ds_out) {
    const double inv_u = std::ldexp(1.0, fmt.p + 1);
    std::vector<double> breaks;
    double cont = 0;
    DSStructure points;
    for (const auto& f : ds.elements) {
        if (f.pmax <= 0) continue;
        if (!f.known()) throw std::logic_error("error model needs resolved masses");
        if (f.iv.width() > 0) {
            breaks.push_back(f.iv.lo);
            breaks.push_back(f.iv.hi);
            cont += f.p();
            continue;
        }
        double v = f.iv.lo;
        double e = 0;
        if (v != 0) {
            e = err_rel(v, fmt);
            if (!std::isfinite(e)) throw DomainError("value " + std::to_string(v) + " overflows the target format");
            e *= inv_u;
        }
        points.elements.emplace_back(Interval{down(e), up(e)}, f.p());
    }

    ErrorDistribution err;
    err.fmt = fmt;
    ds_out = DSStructure{};
    if (cont > 0) {
        std::sort(breaks.begin(), breaks.end());
        breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
        std::vector<std::vector<double>> coeffs(breaks.size() - 1, std::vector<double>{0.0});
        for (const auto& f : ds.elements) {
            if (f.pmax <= 0 || f.iv.width() <= 0) continue;
            double dens = f.p() / cont / f.iv.width();
            auto a = std::lower_bound(breaks.begin(), breaks.end(), f.iv.lo) - breaks.begin();
            auto b = std::lower_bound(breaks.begin(), breaks.end(), f.iv.hi) - breaks.begin();
            for (auto k = a; k < b; ++k) coeffs[static_cast<std::size_t>(k)][0] += dens;
        }
        err = select_error_model(make_piecewise(breaks, coeffs), fmt);
        if (err.atom_overflow > 0) throw DomainError("intermediate value may overflow the target format");
        ds_out = error_ds(err, n);
        for (auto& f : ds_out.elements) {
            f.pmin *= cont;
            f.pmax *= cont;
        }
        err.atom_zero *= cont;
        err.atom_underflow *= cont;
    }
    for (const auto& f : points.elements) {
        ds_out.elements.push_back(f);
        if (f.iv.lo >= inv_u) err.atom_zero += f.p();
        else if (f.iv.hi < -1.0) err.atom_underflow += f.p();
    }
    return err;
}

AnalysisReport analyze(const Program& prog, const AnalysisConfig& cfg) {
    const auto t_start = Clock::now();
    const FloatFormat& fmt = cfg.fmt;
    const std::size_t n = cfg.n_intervals;
    const double u = fmt.u(), mn = fmt.min_normal();

    AnalysisReport rep;
    rep.fmt = fmt;
    rep.confidence = cfg.confidence;
    double t_disc = 0, t_err = 0, t_dep = 0;

    Dag dag = build_dag(prog);
    rep.root = dag.root;
    auto pool = std::make_shared<ExprPool>();
    std::map<std::string, DSStructure> leaf_ds;
    for (const auto& nd : dag.nodes) {
        if (nd.kind != ExprKind::Var || leaf_ds.count(nd.name)) continue;
        const DistDecl* d = prog.find_decl(nd.name);
        if (!d) throw std::invalid_argument("undeclared variable " + nd.name);
        pool->var(nd.name);
        auto t0 = Clock::now();
        leaf_ds[nd.name] = discretize(*d->make(), n, cfg.discretization);
        t_disc += seconds_since(t0);
    }
    Box domain(static_cast<std::size_t>(pool->var_count()));
    for (const auto& [name, ds] : leaf_ds) domain[static_cast<std::size_t>(pool->var_index(name))] = ds.support();

    SAContext ctx(*pool, fmt, cfg.exact_constants);
    ctx.set_domain(domain);
    ErrorFormResult form = build_error_form(ctx, prog);

    std::unique_ptr<SolverPool> solvers;
    if (cfg.use_solver) solvers = std::make_unique<SolverPool>(cfg.solver);
    DepOpConfig dcfg;
    dcfg.n_out = n;
    dcfg.budget = cfg.eval_budget ? cfg.eval_budget : n;
    dcfg.tol_rel = cfg.prune_tol_rel;
    dcfg.prune_seconds = cfg.prune_budget_s;

    // leaves pass their declared distribution, inner nodes get the mixture model
    auto rounding = [&](NodeResult& r, const std::string& from, const Trace& base_trace, const DistPtr& dist) {
        DSStructure e_ds;
        auto t0 = Clock::now();
        if (dist) {
            r.error_dist = select_error_model(dist, fmt);
            if (r.error_dist->atom_overflow > 0) throw DomainError("input " + r.label + " may overflow the target format");
            e_ds = error_ds(*r.error_dist, n);
        } else {
            r.error_dist = error_model_for_ds(r.ds_exact, fmt, n, e_ds);
        }
        t_err += seconds_since(t0);
        const std::string v = node_var('n', r.id);
        r.ds = apply_rounding(r.ds_exact, e_ds, fmt, n, cfg.dependent_rounding);
        r.trace = base_trace;
        bool underflow = r.ds_exact.support().mig() < mn;
        r.trace.add(TraceFact::rounding(v, from, node_var('e', r.id), u, mn, underflow));
        r.trace.add(TraceFact::in_range(v, r.ds.support()));
        r.value_var = v;
    };

    rep.nodes.resize(dag.nodes.size());
    for (std::size_t i = 0; i < dag.nodes.size(); ++i) {
        const auto t_node = Clock::now();
        const DagNode& nd = dag.nodes[i];
        NodeResult& r = rep.nodes[i];
        r.id = static_cast<int>(i);
        r.label = dag.label(r.id);
        r.kind = nd.kind;
        r.pair = form.pairs[i];
        switch (nd.kind) {
            case ExprKind::Var: {
                const DistDecl* d = prog.find_decl(nd.name);
                r.exact_var = "x_" + nd.name;
                r.ds_exact = leaf_ds.at(nd.name);
                Trace t;
                t.add_input(r.exact_var, r.ds_exact.support());
                if (d->exact) {
                    r.ds = r.ds_exact;
                    r.trace = std::move(t);
                    r.value_var = r.exact_var;
                } else {
                    rounding(r, r.exact_var, t, d->make());
                }
                break;
            }
            case ExprKind::Const: {
                double v = round_rational(nd.value, fmt);
                if (!std::isfinite(v)) throw DomainError("constant " + nd.literal + " overflows the target format");
                r.ds_exact = point_ds({to_double_down(nd.value), to_double_up(nd.value)});
                r.ds = point_ds(Interval{v});
                r.value_var = node_var('n', r.id);
                r.trace.add(TraceFact::constant(r.value_var, v));
                break;
            }
            case ExprKind::Neg: {
                const NodeResult& a = rep.nodes[static_cast<std::size_t>(nd.a)];
                r.ds_exact = negate(a.ds_exact);
                r.ds = negate(a.ds);
                r.value_var = node_var('n', r.id);
                r.trace = a.trace;
                r.trace.add(TraceFact::negation(r.value_var, a.value_var));
                break;
            }
            case ExprKind::Bin: {
                const NodeResult& a = rep.nodes[static_cast<std::size_t>(nd.a)];
                const NodeResult& b = rep.nodes[static_cast<std::size_t>(nd.b)];
                if (nd.op == ArithOp::Div && b.ds.support().contains_zero())
                    throw DivisionByZero("divisor of " + r.label + " may be zero");
                r.exact_var = node_var('s', r.id);
                Trace t;
                if (a.trace.shares_inputs(b.trace)) {
                    auto t0 = Clock::now();
                    auto dr = dep_op(a.ds, b.ds, nd.op, a.trace, b.trace, a.value_var, b.value_var, r.exact_var,
                                     solvers.get(), dcfg);
                    t_dep += seconds_since(t0);
                    r.ds_exact = std::move(dr.ds);
                    t = std::move(dr.trace);
                    r.dependent = true;
                    r.dep_stats = dr.stats;
                } else {
                    r.ds_exact = condense(ind_combine(a.ds, b.ds, nd.op), n);
                    t = a.trace;
                    t.merge(b.trace);
                    t.add(TraceFact::operation(r.exact_var, a.value_var, nd.op, b.value_var));
                }
                t.add(TraceFact::in_range(r.exact_var, r.ds_exact.support()));
                rounding(r, r.exact_var, t, nullptr);
                break;
            }
        }
        r.pbox = ds_to_pbox(r.ds);
        r.seconds = seconds_since(t_node);
        if (r.error_dist) {
            rep.atom_zero = std::max(rep.atom_zero, r.error_dist->atom_zero);
            rep.atom_underflow = std::max(rep.atom_underflow, r.error_dist->atom_underflow);
            rep.atom_overflow = std::max(rep.atom_overflow, r.error_dist->atom_overflow);
        }
    }
    const NodeResult& out = rep.nodes[static_cast<std::size_t>(dag.root)];
    rep.output_ds = out.ds;
    rep.output_pbox = out.pbox;
    if (solvers) rep.solver_stats = solvers->stats();

    // error optimization
    const auto t_opt = Clock::now();
    CondErrProblem& prob = rep.problem;
    prob.pool = pool;
    prob.objective = ctx.magnitude(form.output.err);
    prob.gopt = cfg.gopt;
    for (const auto& [name, ds] : leaf_ds) prob.leaves.push_back({pool->var_index(name), ds});
    for (std::size_t i = 0; i < dag.nodes.size(); ++i) {
        if (dag.nodes[i].kind != ExprKind::Bin) continue;
        CondErrProblem::Inner in;
        in.range = form.pairs[i].range;
        in.ds = rep.nodes[i].ds;
        in.err_bound = ctx.concretize(form.pairs[i].err, domain).mag();
        prob.inner.push_back(std::move(in));
    }
    rep.error_form = ctx.to_string(form.output.err);

    if (cfg.gopt.optimizer_cmd.empty()) {
        rep.worst_result = maximize(*pool, prob.objective, domain, {}, cfg.gopt);
    } else {
        rep.worst_result.upper =
            run_external_optimizer(cfg.gopt.optimizer_cmd, optimizer_problem(*pool, prob.objective, domain));
    }
    rep.worst_case_bound = rep.worst_result.upper;
    if (cfg.confidence >= 1.0) {
        rep.cond_result = rep.worst_result;
    } else {
        GoptConfig g = cfg.gopt;
        g.optimizer_cmd.clear();
        CondErrProblem p = prob;
        p.gopt = g;
        rep.cond_result = cond_err(p, cfg.confidence);
    }
    // the conditioned region is a subset of the full box
    rep.error_bound = std::min(rep.cond_result.upper, rep.worst_case_bound);
    rep.timings["optimize"] = seconds_since(t_opt);

    rep.timings["discretize"] = t_disc;
    rep.timings["error_models"] = t_err;
    rep.timings["dependent_ops"] = t_dep;
    rep.timings["total"] = seconds_since(t_start);
    return rep;
}

}  // namespace proberr
