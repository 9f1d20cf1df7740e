#include "proberr/lp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace proberr {

namespace {

// Min-cost flow by successive shortest paths (queue-based Bellman-Ford, so
// the -1 costs need no potentials).
class MinCostFlow {
public:
    explicit MinCostFlow(int n) : head_(static_cast<std::size_t>(n), -1) {}

    void add_edge(int from, int to, double cap, int cost) {
        edges_.push_back({to, head_[from], cap, cost});
        head_[from] = static_cast<int>(edges_.size()) - 1;
        edges_.push_back({from, head_[to], 0.0, -cost});
        head_[to] = static_cast<int>(edges_.size()) - 1;
    }

    // returns {flow, cost}
    std::pair<double, double> solve(int s, int t) {
        const int n = static_cast<int>(head_.size());
        const double eps = 1e-15;
        double flow = 0, cost = 0;
        std::vector<long> dist(static_cast<std::size_t>(n));
        std::vector<int> prev_edge(static_cast<std::size_t>(n));
        std::vector<char> inq(static_cast<std::size_t>(n));
        for (;;) {
            std::fill(dist.begin(), dist.end(), std::numeric_limits<long>::max());
            std::fill(prev_edge.begin(), prev_edge.end(), -1);
            std::fill(inq.begin(), inq.end(), 0);
            std::deque<int> q{s};
            dist[s] = 0;
            inq[s] = 1;
            while (!q.empty()) {
                int v = q.front();
                q.pop_front();
                inq[v] = 0;
                for (int e = head_[v]; e >= 0; e = edges_[e].next) {
                    const Edge& ed = edges_[e];
                    if (ed.cap <= eps) continue;
                    long nd = dist[v] + ed.cost;
                    if (nd < dist[ed.to]) {
                        dist[ed.to] = nd;
                        prev_edge[ed.to] = e;
                        if (!inq[ed.to]) {
                            inq[ed.to] = 1;
                            q.push_back(ed.to);
                        }
                    }
                }
            }
            if (prev_edge[t] < 0) break;
            double push = std::numeric_limits<double>::infinity();
            for (int v = t; v != s; v = edges_[prev_edge[v] ^ 1].to) push = std::min(push, edges_[prev_edge[v]].cap);
            for (int v = t; v != s; v = edges_[prev_edge[v] ^ 1].to) {
                edges_[prev_edge[v]].cap -= push;
                edges_[prev_edge[v] ^ 1].cap += push;
            }
            flow += push;
            cost += push * static_cast<double>(dist[t]);
        }
        return {flow, cost};
    }

private:
    struct Edge {
        int to;
        int next;
        double cap;
        int cost;
    };
    std::vector<int> head_;
    std::vector<Edge> edges_;
};

}  // namespace

double TransportProblem::max_mass(const std::vector<std::vector<bool>>& target) const {
    const int R = static_cast<int>(rows.size()), C = static_cast<int>(cols.size());
    const int S = 0, T = R + C + 1;
    MinCostFlow g(R + C + 2);
    for (int i = 0; i < R; ++i) g.add_edge(S, 1 + i, rows[i], 0);
    for (int j = 0; j < C; ++j) g.add_edge(1 + R + j, T, cols[j], 0);
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j)
            if (feasible[i][j]) g.add_edge(1 + i, 1 + R + j, inf, target[i][j] ? -1 : 0);
    auto [flow, cost] = g.solve(S, T);
    double need = std::min(std::accumulate(rows.begin(), rows.end(), 0.0), std::accumulate(cols.begin(), cols.end(), 0.0));
    if (flow < need - 1e-9)
        throw InfeasibleLP("marginals cannot be matched on the feasible cells (flow " + std::to_string(flow) + " of " +
                           std::to_string(need) + ")");
    return -cost;
}

Interval lp_bounds(const TransportProblem& tp, const std::vector<std::vector<bool>>& target) {
    auto complement = target;
    for (std::size_t i = 0; i < complement.size(); ++i)
        for (std::size_t j = 0; j < complement[i].size(); ++j) complement[i][j] = !target[i][j];
    double total = std::accumulate(tp.rows.begin(), tp.rows.end(), 0.0);
    double hi = tp.max_mass(target);
    double lo = total - tp.max_mass(complement);
    return {std::max(0.0, lo - kLpWiden), std::min(total, hi) + kLpWiden};
}

std::vector<Interval> lp_bounds(const TransportProblem& tp, const std::vector<std::vector<std::vector<bool>>>& targets) {
    std::vector<Interval> out;
    out.reserve(targets.size());
    for (const auto& t : targets) out.push_back(lp_bounds(tp, t));
    return out;
}

}  // namespace proberr
