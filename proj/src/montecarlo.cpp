#include "proberr/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace proberr {

namespace {

using Ref = __float128;
constexpr std::size_t kShards = 16;

struct Compiled {
    Dag dag;
    std::vector<DistPtr> dists;  // Var nodes only
    std::vector<bool> exact;
    std::vector<double> const_fp;
    std::vector<Ref> const_ref;
};

Compiled compile(const Program& prog, const FloatFormat& fmt) {
    Compiled c;
    c.dag = build_dag(prog);
    const std::size_t n = c.dag.nodes.size();
    c.dists.resize(n);
    c.exact.assign(n, false);
    c.const_fp.assign(n, 0.0);
    c.const_ref.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const DagNode& nd = c.dag.nodes[i];
        if (nd.kind == ExprKind::Var) {
            const DistDecl* d = prog.find_decl(nd.name);
            if (!d) throw std::invalid_argument("undeclared variable " + nd.name);
            c.dists[i] = d->make();
            c.exact[i] = d->exact;
        } else if (nd.kind == ExprKind::Const) {
            c.const_fp[i] = round_rational(nd.value, fmt);
            // double-double is ample for a 113-bit reference
            double hi = to_double(nd.value);
            double lo = to_double(nd.value - to_rational(hi));
            c.const_ref[i] = static_cast<Ref>(hi) + static_cast<Ref>(lo);
        }
    }
    return c;
}

template <class T>
T arith(ArithOp op, T a, T b) {
    switch (op) {
        case ArithOp::Add: return a + b;
        case ArithOp::Sub: return a - b;
        case ArithOp::Mul: return a * b;
        case ArithOp::Div: return a / b;
    }
    return a;
}

// T must be wide enough that rounding a T result to fmt equals rounding the
// exact result directly.
template <class T>
void run_shard(const Compiled& c, const FloatFormat& fmt, std::uint64_t seed, std::size_t count,
               MonteCarloResult& out) {
    Rng rng(seed);
    const std::size_t n = c.dag.nodes.size();
    std::vector<T> fp(n);
    std::vector<Ref> ref(n);
    const double u = fmt.u();
    const auto root = static_cast<std::size_t>(c.dag.root);
    for (std::size_t s = 0; s < count; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            const DagNode& nd = c.dag.nodes[i];
            switch (nd.kind) {
                case ExprKind::Var: {
                    double x = draw(*c.dists[i], rng);
                    ref[i] = x;
                    fp[i] = c.exact[i] ? static_cast<T>(x) : static_cast<T>(round_value(x, fmt));
                    break;
                }
                case ExprKind::Const:
                    ref[i] = c.const_ref[i];
                    fp[i] = static_cast<T>(c.const_fp[i]);
                    break;
                case ExprKind::Neg:
                    ref[i] = -ref[static_cast<std::size_t>(nd.a)];
                    fp[i] = -fp[static_cast<std::size_t>(nd.a)];
                    break;
                case ExprKind::Bin: {
                    auto a = static_cast<std::size_t>(nd.a), b = static_cast<std::size_t>(nd.b);
                    ref[i] = arith<Ref>(nd.op, ref[a], ref[b]);
                    fp[i] = round_value(arith<T>(nd.op, fp[a], fp[b]), fmt);
                    break;
                }
            }
        }
        Ref d = ref[root] - static_cast<Ref>(fp[root]);
        out.values.push_back(static_cast<double>(fp[root]));
        out.abs_errors.push_back(static_cast<double>(d < 0 ? -d : d));
        out.rel_errors.push_back(ref[root] == 0 ? 0.0 : static_cast<double>(d / ref[root]) / u);
    }
}

}  // namespace

MonteCarloResult monte_carlo(const Program& prog, const FloatFormat& fmt, const MonteCarloConfig& cfg) {
    if (fmt.p > 52) throw std::invalid_argument("simulation supports at most 52 fraction bits");
    const Compiled c = compile(prog, fmt);
    std::vector<MonteCarloResult> parts(kShards);
    std::seed_seq seq{cfg.seed, static_cast<std::uint64_t>(0x9e3779b97f4a7c15ULL)};
    std::vector<std::uint32_t> seeds(2 * kShards);
    seq.generate(seeds.begin(), seeds.end());

    auto shard = [&](std::size_t k) {
        std::size_t count = cfg.samples / kShards + (k < cfg.samples % kShards ? 1 : 0);
        std::uint64_t seed = (static_cast<std::uint64_t>(seeds[2 * k]) << 32) | seeds[2 * k + 1];
        parts[k].values.reserve(count);
        // 64-bit long double: a second rounding is innocuous up to 30 fraction bits
        if (fmt.p <= 30)
            run_shard<long double>(c, fmt, seed, count, parts[k]);
        else
            run_shard<double>(c, fmt, seed, count, parts[k]);
    };
    const std::size_t w = std::clamp<std::size_t>(cfg.workers, 1, kShards);
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < w; ++t)
        threads.emplace_back([&, t] {
            for (std::size_t k = t; k < kShards; k += w) shard(k);
        });
    for (auto& t : threads) t.join();

    MonteCarloResult res;
    for (auto& p : parts) {
        res.values.insert(res.values.end(), p.values.begin(), p.values.end());
        res.abs_errors.insert(res.abs_errors.end(), p.abs_errors.begin(), p.abs_errors.end());
        res.rel_errors.insert(res.rel_errors.end(), p.rel_errors.begin(), p.rel_errors.end());
    }
    return res;
}

DkwCheck dkw_check(const PBox& pb, std::vector<double> samples, double alpha) {
    DkwCheck r;
    if (samples.empty()) throw std::invalid_argument("no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    r.epsilon = std::sqrt(std::log(2.0 / alpha) / (2.0 * n));
    for (std::size_t i = 0; i < pb.size(); ++i) {
        double fn = static_cast<double>(std::upper_bound(samples.begin(), samples.end(), pb.grid[i]) - samples.begin()) / n;
        double v = std::max(pb.cdf_lo[i] - r.epsilon - fn, fn - pb.cdf_hi[i] - r.epsilon);
        if (v > 0) {
            r.inside = false;
            r.worst_violation = std::max(r.worst_violation, v);
        }
    }
    return r;
}

double empirical_quantile(std::vector<double> samples, double q) {
    if (samples.empty()) throw std::invalid_argument("no samples");
    std::sort(samples.begin(), samples.end());
    auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
    k = std::clamp<std::size_t>(k, 1, samples.size());
    return samples[k - 1];
}

std::string ecdf_csv(std::vector<double> samples, std::size_t points) {
    std::sort(samples.begin(), samples.end());
    std::ostringstream os;
    os.precision(17);
    os << "x,ecdf\n";
    const std::size_t n = samples.size();
    if (n == 0) return os.str();
    const std::size_t step = std::max<std::size_t>(1, n / std::max<std::size_t>(points, 1));
    std::size_t last = 0;
    for (std::size_t i = step - 1; i < n; i += step) {
        os << samples[i] << ',' << static_cast<double>(i + 1) / static_cast<double>(n) << '\n';
        last = i;
    }
    if (last != n - 1) os << samples[n - 1] << ",1\n";
    return os.str();
}

}  // namespace proberr
