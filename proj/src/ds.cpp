#include "proberr/ds.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace proberr {

bool DSStructure::all_known() const {
    return std::all_of(elements.begin(), elements.end(), [](const FocalElement& f) { return f.known(); });
}

double DSStructure::total_min() const {
    double s = 0;
    for (const auto& f : elements) s += f.pmin;
    return s;
}

double DSStructure::total_max() const {
    double s = 0;
    for (const auto& f : elements) s += f.pmax;
    return s;
}

Interval DSStructure::support() const {
    Interval h = Interval::empty();
    for (const auto& f : elements) h = hull(h, f.iv);
    return h;
}

void DSStructure::sort() {
    std::stable_sort(elements.begin(), elements.end(), [](const FocalElement& a, const FocalElement& b) {
        if (a.iv.lo != b.iv.lo) return a.iv.lo < b.iv.lo;
        return a.iv.hi < b.iv.hi;
    });
}

bool PBox::valid(double tol) const {
    if (grid.empty() || cdf_lo.size() != grid.size() || cdf_hi.size() != grid.size()) return false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (cdf_lo[i] > cdf_hi[i] + tol) return false;
        if (cdf_lo[i] < -tol || cdf_hi[i] > 1 + tol) return false;
        if (i > 0) {
            if (grid[i] < grid[i - 1]) return false;
            if (cdf_lo[i] + tol < cdf_lo[i - 1] || cdf_hi[i] + tol < cdf_hi[i - 1]) return false;
        }
    }
    return true;
}

double PBox::upper_at(double x) const {
    if (x < grid.front()) return 0.0;
    auto it = std::lower_bound(grid.begin(), grid.end(), x);
    if (it == grid.end()) return 1.0;
    return cdf_hi[static_cast<std::size_t>(it - grid.begin())];
}

double PBox::lower_at(double x) const {
    if (x < grid.front()) return 0.0;
    if (x >= grid.back()) return 1.0;
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    return cdf_lo[static_cast<std::size_t>(it - grid.begin()) - 1];
}

PBox ds_to_pbox(const DSStructure& ds) {
    PBox pb;
    if (ds.empty()) throw std::invalid_argument("empty DS-structure");
    std::vector<std::pair<double, double>> by_lo, by_hi;
    by_lo.reserve(ds.size());
    by_hi.reserve(ds.size());
    for (const auto& f : ds.elements) {
        pb.grid.push_back(f.iv.lo);
        pb.grid.push_back(f.iv.hi);
        by_lo.emplace_back(f.iv.lo, f.pmax);
        by_hi.emplace_back(f.iv.hi, f.pmin);
    }
    std::sort(pb.grid.begin(), pb.grid.end());
    pb.grid.erase(std::unique(pb.grid.begin(), pb.grid.end()), pb.grid.end());
    std::sort(by_lo.begin(), by_lo.end());
    std::sort(by_hi.begin(), by_hi.end());
    std::size_t a = 0, b = 0;
    double shi = 0, slo = 0;
    for (double x : pb.grid) {
        while (a < by_lo.size() && by_lo[a].first <= x) shi += by_lo[a++].second;
        while (b < by_hi.size() && by_hi[b].first <= x) slo += by_hi[b++].second;
        pb.cdf_hi.push_back(std::clamp(shi, 0.0, 1.0));
        pb.cdf_lo.push_back(std::clamp(slo, 0.0, 1.0));
    }
    return pb;
}

DSStructure pbox_to_ds(const PBox& pb, std::size_t n) {
    if (n == 0) throw std::invalid_argument("pbox_to_ds needs n >= 1");
    if (pb.grid.empty()) throw std::invalid_argument("empty p-box");
    DSStructure out;
    const std::size_t m = pb.grid.size();
    const double mass = 1.0 / static_cast<double>(n);
    std::size_t j = 0, k = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        double level_lo = static_cast<double>(i - 1) / static_cast<double>(n);
        double level_hi = static_cast<double>(i) / static_cast<double>(n);
        while (j < m && !(pb.cdf_hi[j] > level_lo)) ++j;
        double left = j == 0 ? pb.grid.front() : pb.grid[std::min(j, m) - 1];
        while (k < m && pb.cdf_lo[k] < level_hi) ++k;
        double right = k < m ? pb.grid[k] : pb.grid.back();
        if (right < left) right = left;
        out.elements.emplace_back(Interval{left, right}, mass);
    }
    return out;
}

DSStructure ind_combine(const DSStructure& x, const DSStructure& y, ArithOp op) {
    DSStructure out;
    out.elements.reserve(x.size() * y.size());
    for (const auto& fx : x.elements) {
        if (fx.pmax == 0) continue;
        for (const auto& fy : y.elements) {
            if (fy.pmax == 0) continue;
            out.elements.emplace_back(apply(op, fx.iv, fy.iv), fx.pmin * fy.pmin, fx.pmax * fy.pmax);
        }
    }
    out.sort();
    return out;
}

DSStructure negate(const DSStructure& x) {
    DSStructure out = x;
    for (auto& f : out.elements) f.iv = -f.iv;
    out.sort();
    return out;
}

DSStructure condense(const DSStructure& ds, std::size_t n) {
    if (n == 0) throw std::invalid_argument("condense needs n >= 1");
    if (!ds.all_known()) throw std::logic_error("condense requires resolved probabilities");
    if (ds.size() <= n) {
        DSStructure out = ds;
        out.sort();
        return out;
    }
    struct Node {
        Interval iv;
        double mass;
        long prev, next;
        unsigned version;
        bool alive;
    };
    std::vector<FocalElement> els;
    for (const auto& f : ds.elements)
        if (f.pmax > 0) els.push_back(f);
    std::stable_sort(els.begin(), els.end(), [](const FocalElement& a, const FocalElement& b) {
        double ma = a.iv.mid(), mb = b.iv.mid();
        if (ma != mb) return ma < mb;
        if (a.iv.lo != b.iv.lo) return a.iv.lo < b.iv.lo;
        return a.iv.hi < b.iv.hi;
    });
    std::vector<Node> nodes;
    nodes.reserve(els.size());
    for (std::size_t i = 0; i < els.size(); ++i)
        nodes.push_back({els[i].iv, els[i].p(), static_cast<long>(i) - 1,
                         i + 1 < els.size() ? static_cast<long>(i + 1) : -1, 0u, true});

    struct Cand {
        double cost;
        long left;
        unsigned vl, vr;
        bool operator>(const Cand& o) const { return cost != o.cost ? cost > o.cost : left > o.left; }
    };
    std::priority_queue<Cand, std::vector<Cand>, std::greater<Cand>> pq;
    auto push = [&](long l) {
        if (l < 0) return;
        long r = nodes[l].next;
        if (r < 0) return;
        Interval h = hull(nodes[l].iv, nodes[r].iv);
        pq.push({h.width() * (nodes[l].mass + nodes[r].mass), l, nodes[l].version, nodes[r].version});
    };
    for (long i = 0; i + 1 < static_cast<long>(nodes.size()); ++i) push(i);
    std::size_t alive = nodes.size();
    while (alive > n && !pq.empty()) {
        Cand c = pq.top();
        pq.pop();
        Node& L = nodes[c.left];
        if (!L.alive || L.version != c.vl || L.next < 0) continue;
        Node& R = nodes[L.next];
        if (!R.alive || R.version != c.vr) continue;
        L.iv = hull(L.iv, R.iv);
        L.mass += R.mass;
        L.version++;
        R.alive = false;
        L.next = R.next;
        if (R.next >= 0) nodes[R.next].prev = c.left;
        --alive;
        push(L.prev);
        push(c.left);
    }
    DSStructure out;
    for (const auto& nd : nodes)
        if (nd.alive) out.elements.emplace_back(nd.iv, nd.mass);
    out.sort();
    return out;
}

Interval prob_between(const PBox& pb, double a, double b) {
    // F(a^-) is bounded below by the lower CDF at the last abscissa < a
    double lo_left = 0.0;
    auto it = std::lower_bound(pb.grid.begin(), pb.grid.end(), a);
    if (it != pb.grid.begin()) lo_left = pb.cdf_lo[static_cast<std::size_t>(it - pb.grid.begin()) - 1];
    double hi_left = pb.upper_at(a);
    double up = std::clamp(pb.upper_at(b) - lo_left, 0.0, 1.0);
    double lo = std::clamp(pb.lower_at(b) - hi_left, 0.0, 1.0);
    return {lo, up};
}

bool envelope_contains(const PBox& outer, const PBox& inner, double tol) {
    std::vector<double> xs = outer.grid;
    xs.insert(xs.end(), inner.grid.begin(), inner.grid.end());
    std::sort(xs.begin(), xs.end());
    for (double x : xs) {
        if (outer.lower_at(x) > inner.lower_at(x) + tol) return false;
        if (inner.upper_at(x) > outer.upper_at(x) + tol) return false;
    }
    return true;
}

std::string to_csv(const PBox& pb) {
    std::ostringstream os;
    os << "x,cdf_lo,cdf_hi\n";
    char buf[128];
    for (std::size_t i = 0; i < pb.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", pb.grid[i], pb.cdf_lo[i], pb.cdf_hi[i]);
        os << buf;
    }
    return os.str();
}

}  // namespace proberr
