#include "proberr/depops.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace proberr {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

bool inside(Interval a, Interval b) { return !a.is_empty() && b.lo <= a.lo && a.hi <= b.hi; }

// Looks for input points whose exact evaluation lands in the cell. Inputs
// are fixed one at a time inside the cell's contracted box, propagating
// after each choice so later inputs are steered toward the cell. The chosen
// point is then checked by propagating the inputs alone: the exact
// evaluation (every rounding variable 0) satisfies all facts, so enclosures
// of both operands inside the cell prove the cell feasible.
bool find_witness(const Trace& trace, const std::map<std::string, Interval>& box, const std::string& vx, Interval ix,
                  const std::string& vy, Interval iy, std::size_t tries, std::size_t seed) {
    const auto& inputs = trace.inputs();
    for (const auto& v : inputs) {
        auto it = box.find(v);
        if (it == box.end() || !std::isfinite(it->second.lo) || !std::isfinite(it->second.hi)) return false;
    }
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ seed);
    for (std::size_t t = 0; t < tries; ++t) {
        std::map<std::string, Interval> steer = box;
        std::map<std::string, Interval> pt;
        bool ok = true;
        for (const auto& v : inputs) {
            Interval d = steer[v];
            double r = t == 0 ? d.mid() : std::uniform_real_distribution<double>(d.lo, d.hi)(rng);
            r = std::clamp(r, d.lo, d.hi);
            steer[v] = pt[v] = Interval{r, r};
            if (!trace.contract(steer, 64)) {
                ok = false;
                break;
            }
        }
        if (!ok || !trace.contract(pt, 64)) continue;
        auto a = pt.find(vx), b = pt.find(vy);
        if (a != pt.end() && b != pt.end() && inside(a->second, ix) && inside(b->second, iy)) return true;
    }
    return false;
}

}  // namespace

std::vector<double> select_evaluation_points(const std::vector<DepCell>& cells, std::size_t budget) {
    if (budget == 0) throw std::invalid_argument("evaluation budget must be at least 1");
    std::vector<double> ends;
    for (const auto& c : cells) {
        if (!c.feasible) continue;
        ends.push_back(c.iv.lo);
        ends.push_back(c.iv.hi);
    }
    if (ends.empty()) return {};
    std::sort(ends.begin(), ends.end());
    std::vector<double> distinct = ends;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (budget >= distinct.size()) return distinct;
    std::vector<double> out;
    const std::size_t m = ends.size();
    for (std::size_t k = 1; k <= budget; ++k) {
        std::size_t idx = (k * m + budget - 1) / budget - 1;
        out.push_back(ends[std::min(idx, m - 1)]);
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PBox envelope_from_cells(const std::vector<DepCell>& cells, const std::vector<double>& px, const std::vector<double>& py,
                         const std::vector<double>& thresholds, std::size_t* lp_solves) {
    TransportProblem tp;
    tp.rows = px;
    tp.cols = py;
    tp.feasible.assign(px.size(), std::vector<bool>(py.size(), false));
    double zmin = HUGE_VAL, zmax = -HUGE_VAL;
    for (const auto& c : cells) {
        if (!c.feasible) continue;
        tp.feasible[c.i][c.j] = true;
        zmin = std::min(zmin, c.iv.lo);
        zmax = std::max(zmax, c.iv.hi);
    }
    if (!(zmin <= zmax)) throw InfeasibleLP("every cell of the dependent operation is infeasible");
    const double total = std::accumulate(px.begin(), px.end(), 0.0);
    std::vector<std::vector<bool>> below(px.size(), std::vector<bool>(py.size()));
    std::vector<std::vector<bool>> above(px.size(), std::vector<bool>(py.size()));
    PBox pb;
    std::vector<double> ts = thresholds;
    std::sort(ts.begin(), ts.end());
    std::size_t solves = 0;
    for (double x : ts) {
        for (auto& r : below) std::fill(r.begin(), r.end(), false);
        for (auto& r : above) std::fill(r.begin(), r.end(), false);
        for (const auto& c : cells) {
            if (!c.feasible) continue;
            below[c.i][c.j] = c.iv.lo <= x;
            above[c.i][c.j] = c.iv.hi > x;
        }
        // F(x) <= max mass of cells that can reach x; F(x) >= mass of cells wholly below
        double hi = std::min(1.0, tp.max_mass(below) + kLpWiden);
        double lo = std::max(0.0, total - tp.max_mass(above) - kLpWiden);
        solves += 2;
        pb.grid.push_back(x);
        pb.cdf_lo.push_back(std::min(lo, hi));
        pb.cdf_hi.push_back(hi);
    }
    if (lp_solves) *lp_solves += solves;
    // anchor the support: nothing below zmin, everything at zmax
    if (pb.grid.empty() || pb.grid.front() > zmin) {
        double hi0 = pb.grid.empty() ? 1.0 : pb.cdf_hi.front();
        pb.grid.insert(pb.grid.begin(), zmin);
        pb.cdf_lo.insert(pb.cdf_lo.begin(), 0.0);
        pb.cdf_hi.insert(pb.cdf_hi.begin(), hi0);
    }
    if (pb.grid.back() < zmax) {
        pb.grid.push_back(zmax);
        pb.cdf_lo.push_back(1.0);
        pb.cdf_hi.push_back(1.0);
    } else {
        pb.cdf_lo.back() = 1.0;
        pb.cdf_hi.back() = 1.0;
    }
    for (std::size_t i = 1; i < pb.size(); ++i) {
        pb.cdf_lo[i] = std::max(pb.cdf_lo[i], pb.cdf_lo[i - 1]);
        pb.cdf_hi[i] = std::max(pb.cdf_hi[i], pb.cdf_hi[i - 1]);
    }
    return pb;
}

DepOpResult dep_op(const DSStructure& dx, const DSStructure& dy, ArithOp op, const Trace& tx, const Trace& ty,
                   const std::string& vx, const std::string& vy, const std::string& vz, SolverPool* pool,
                   const DepOpConfig& cfg) {
    if (!dx.all_known() || !dy.all_known()) throw std::logic_error("dependent operation needs resolved operand masses");
    DepOpResult res;
    res.trace = tx;
    res.trace.merge(ty);
    res.trace.add(TraceFact::operation(vz, vx, op, vy));

    const std::size_t nx = dx.size(), ny = dy.size();
    std::vector<DepCell> cells;
    for (std::size_t i = 0; i < nx; ++i) {
        if (dx.elements[i].p() <= 0) continue;
        for (std::size_t j = 0; j < ny; ++j) {
            if (dy.elements[j].p() <= 0) continue;
            cells.push_back({i, j, apply(op, dx.elements[i].iv, dy.elements[j].iv), true});
        }
    }
    res.stats.cells = cells.size();

    // interval propagation first: it refutes most cells without the solver
    std::vector<char> refuted(cells.size(), 0), witnessed(cells.size(), 0);
    if (cfg.use_contractor) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            auto& c = cells[k];
            std::map<std::string, Interval> box{{vx, dx.elements[c.i].iv}, {vy, dy.elements[c.j].iv}, {vz, c.iv}};
            if (vx == vy) box[vx] = intersect(dx.elements[c.i].iv, dy.elements[c.j].iv);
            if (box[vx].is_empty() || !res.trace.contract(box)) {
                refuted[k] = 1;
                continue;
            }
            c.iv = intersect(c.iv, box[vz]);
            if (c.iv.is_empty()) {
                refuted[k] = 1;
                continue;
            }
            if (pool && find_witness(res.trace, box, vx, dx.elements[c.i].iv, vy, dy.elements[c.j].iv,
                                     cfg.witness_tries, k)) {
                witnessed[k] = 1;
            }
        }
    }

    if (pool) {
        Constraint base = res.trace.to_constraint();
        std::vector<char> unsat(cells.size(), 0), pruned(cells.size(), 0);
        const double prune_deadline = now_seconds() + cfg.prune_seconds;
        pool->run(cells.size(), [&](std::size_t k, SolverSession& s) {
            if (refuted[k]) return;
            auto& c = cells[k];
            Constraint q = base;
            q.declare(vx);
            q.declare(vy);
            q.add(smt_in(vx, dx.elements[c.i].iv));
            q.add(smt_in(vy, dy.elements[c.j].iv));
            if (!witnessed[k]) {
                Constraint fq = q;
                fq.declare(vz);
                fq.add(smt_in(vz, c.iv));
                if (s.check(fq) == SatResult::Unsat) {
                    unsat[k] = 1;
                    return;
                }
            }
            double w = apply(op, dx.elements[c.i].iv, dy.elements[c.j].iv).width();
            double left = prune_deadline - now_seconds();
            if (c.iv.width() > 0 && w > 0 && left > 0) {
                auto pr = prune_interval(s, q, vz, c.iv, cfg.tol_rel * w, true, left);
                if (pr) c.iv = *pr;
                pruned[k] = 1;
            }
        });
        res.stats.pruned = static_cast<std::size_t>(std::count(pruned.begin(), pruned.end(), 1));
        for (std::size_t k = 0; k < cells.size(); ++k)
            if (unsat[k]) {
                refuted[k] = 1;
                res.stats.solver_infeasible++;
            }
    }
    for (std::size_t k = 0; k < cells.size(); ++k)
        if (refuted[k]) cells[k].feasible = false;
    res.stats.witnessed = static_cast<std::size_t>(std::count(witnessed.begin(), witnessed.end(), 1));
    res.stats.contractor_infeasible = static_cast<std::size_t>(std::count(refuted.begin(), refuted.end(), 1)) -
                                      res.stats.solver_infeasible;

    std::vector<double> px(nx), py(ny);
    for (std::size_t i = 0; i < nx; ++i) px[i] = dx.elements[i].p();
    for (std::size_t j = 0; j < ny; ++j) py[j] = dy.elements[j].p();
    auto th = select_evaluation_points(cells, cfg.budget);
    res.pbox = envelope_from_cells(cells, px, py, th, &res.stats.lp_solves);
    res.ds = pbox_to_ds(res.pbox, cfg.n_out);
    res.cells = std::move(cells);
    return res;
}

}  // namespace proberr
