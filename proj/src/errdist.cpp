#include "proberr/errdist.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace proberr {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

double gk(const std::function<double(double)>& f, double a, double b, double* err) {
    if (!(a < b)) return 0.0;
    double e = 0;
    double v = GK::integrate(f, a, b, 6, 1e-11, &e);
    if (err) *err += std::abs(e);
    return v;
}

void sort_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Exponents e (emin < e < emax) whose extended binade [2^e(1-u), 2^e(2-u)]
// carries mass on the given side of zero.
std::vector<int> active_binades(const Distribution& d, const FloatFormat& fmt, bool negative) {
    const double u = fmt.u();
    Interval s = d.support();
    double lo = negative ? std::max(0.0, -s.hi) : std::max(0.0, s.lo);
    double hi = negative ? -s.lo : s.hi;
    std::vector<int> out;
    if (!(hi > 0)) return out;
    int e0 = fmt.emin + 1, e1 = fmt.emax - 1;
    if (lo > 0) e0 = std::max(e0, std::ilogb(lo) - 1);
    if (std::isfinite(hi)) e1 = std::min(e1, std::ilogb(hi) + 1);
    for (int e = e0; e <= e1; ++e) {
        double a = std::ldexp(1.0 - u, e), b = std::ldexp(2.0 - u, e);
        double m = negative ? d.mass(-b, -a) : d.mass(a, b);
        if (m > 0) out.push_back(e);
    }
    return out;
}

struct BinadeSet {
    std::vector<int> pos, neg;
};

BinadeSet binades(const Distribution& d, const FloatFormat& fmt) {
    return {active_binades(d, fmt, false), active_binades(d, fmt, true)};
}

double binade_sum_impl(const Distribution& d, const BinadeSet& bs, const FloatFormat& fmt, double r) {
    const double u = fmt.u();
    double s = 0;
    for (int e : bs.pos) {
        double a = std::ldexp(1.0 - u, e), b = std::ldexp(r, e);
        s += std::ldexp(d.first_moment(a, b), -(e + 1));
    }
    for (int e : bs.neg) {
        double a = std::ldexp(1.0 - u, e), b = std::ldexp(r, e);
        s -= std::ldexp(d.first_moment(-b, -a), -(e + 1));
    }
    return s;
}

struct Atoms {
    double zero = 0, underflow = 0, overflow = 0;
};

Atoms compute_atoms(const Distribution& d, const FloatFormat& fmt) {
    Atoms a;
    double th = fmt.underflow_threshold();
    a.zero = d.mass(-th, th);
    double low = std::ldexp(1.0, fmt.emin) / (1.0 + fmt.u());
    a.underflow = d.mass(th, low) + d.mass(-low, -th);
    double big = std::ldexp(2.0 - fmt.u(), fmt.emax);
    const double inf = std::numeric_limits<double>::infinity();
    a.overflow = d.mass(big, inf) + d.mass(-inf, -big);
    return a;
}

// t-points where the binade form has kinks: |t| = 1/(v 2^-e + u) for support
// breakpoints v inside an active binade
std::vector<double> hp_kinks(const Distribution& d, const BinadeSet& bs, const FloatFormat& fmt) {
    const double u = fmt.u();
    std::vector<double> out;
    for (double v : d.breakpoints()) {
        if (v == 0 || !std::isfinite(v)) continue;
        const auto& list = v > 0 ? bs.pos : bs.neg;
        for (int e : list) {
            double r = std::ldexp(std::abs(v), -e);
            if (r > 1.0 - u && r < 2.0 - u) {
                double t = 1.0 / (r + u);
                out.push_back(t);
                out.push_back(-t);
            }
        }
    }
    return out;
}

void fill_atoms(ErrorDistribution& ed, const Atoms& a) {
    ed.atom_zero = a.zero;
    ed.atom_underflow = a.underflow;
    ed.atom_overflow = a.overflow;
}

}  // namespace

double ErrorDistribution::density_at(double t) const {
    if (t < -1 || t > 1) return 0.0;
    if (density_fn) return density_fn(t);
    auto it = std::lower_bound(grid.begin(), grid.end(), t);
    if (it == grid.end()) return density.back();
    return density[static_cast<std::size_t>(it - grid.begin())];
}

std::string ErrorDistribution::method_name() const {
    switch (method) {
        case Method::Exact: return "exact";
        case Method::HighPrecision: return "high-precision";
        case Method::Typical: return "typical";
    }
    return "?";
}

std::vector<double> error_grid() {
    std::vector<double> g;
    for (int i = 0; i <= 512; ++i) g.push_back(-1.0 + i / 256.0);
    for (int k = 1; k <= 24; ++k) {
        double h = std::ldexp(1.0, -8 - k);
        for (double c : {0.5, 1.0}) {
            g.push_back(c - h);
            g.push_back(-(c - h));
            if (c < 1) {
                g.push_back(c + h);
                g.push_back(-(c + h));
            }
        }
    }
    sort_unique(g);
    return g;
}

double binade_sum(const Distribution& d, const FloatFormat& fmt, double r) {
    return binade_sum_impl(d, binades(d, fmt), fmt, r);
}

double typical_density(double t) {
    double a = std::abs(t);
    if (a > 1) return 0.0;
    if (a <= 0.5) return 0.75;
    double w = 1.0 / a - 1.0;
    return 0.5 * w + 0.25 * w * w;
}

double typical_cdf(double t) {
    if (t <= -1) return 0.0;
    if (t >= 1) return 1.0;
    // beyond 1/2 the density is 1/(4t^2) - 1/4, with antiderivative -1/(4t) - t/4
    auto tail = [](double a) { return -0.5 + 0.25 / a + 0.25 * a; };  // mass on [a, 1]
    if (t < -0.5) return tail(-t);
    if (t <= 0.5) return 0.125 + 0.75 * (t + 0.5);
    return 1.0 - tail(t);
}

RemainderParts hp_remainder(const Distribution& d, const FloatFormat& fmt) {
    RemainderParts rp;
    const double u = fmt.u();
    const double ulp = std::ldexp(1.0, -fmt.p);
    // rounding to an extremal exponent
    double a = std::ldexp(1.0, fmt.emin - 1), b = std::ldexp(1.0 - 0.5 * u, fmt.emin + 1);
    double c = std::ldexp(1.0 - 0.5 * u, fmt.emax), e2 = std::ldexp(2.0 - u, fmt.emax);
    rp.extremal_mass = d.mass(a, b) + d.mass(-b, -a) + d.mass(c, e2) + d.mass(-e2, -c);

    Interval s = d.support();
    std::vector<double> bps = d.breakpoints();
    auto g = [&](double x) { return std::abs(d.dpdf(x) * x + d.pdf(x)); };
    double sum = 0;
    for (int sign : {1, -1}) {
        for (int e = fmt.emin + 1; e < fmt.emax; ++e) {
            // xi ranges over the significands of the binade
            double lo = std::ldexp(1.0, e), hi = std::ldexp(2.0 - ulp, e);
            Interval bin = sign > 0 ? Interval{lo, hi} : Interval{-hi, -lo};
            Interval w = intersect(bin, s);
            if (w.is_empty() || !(w.lo < w.hi)) continue;
            if (d.mass(w.lo, w.hi) <= 0) continue;
            std::vector<double> pts;
            const int m = 256;
            for (int i = 0; i <= m; ++i) pts.push_back(w.lo + (w.hi - w.lo) * i / m);
            for (double v : bps) {
                if (v >= w.lo && v <= w.hi) {
                    pts.push_back(v);
                    pts.push_back(std::max(w.lo, std::nextafter(v, -HUGE_VAL)));
                    pts.push_back(std::min(w.hi, std::nextafter(v, HUGE_VAL)));
                }
            }
            sort_unique(pts);
            double best = 0, pad = 0, prev = g(pts[0]);
            best = prev;
            for (std::size_t i = 1; i < pts.size(); ++i) {
                double v = g(pts[i]);
                // jumps at breakpoints are not smooth variation
                bool jump = std::find(bps.begin(), bps.end(), pts[i]) != bps.end() ||
                            std::find(bps.begin(), bps.end(), pts[i - 1]) != bps.end();
                if (!jump) pad = std::max(pad, std::abs(v - prev));
                best = std::max(best, v);
                prev = v;
            }
            sum += (best + pad) * std::ldexp(1.0, 2 * e - fmt.p);
        }
    }
    rp.taylor = 0.75 * sum;

    // a jump of f at v inside one rounding cell breaks the midpoint argument there
    for (double v : bps) {
        if (v == 0 || !std::isfinite(v)) continue;
        int e = std::ilogb(std::abs(v));
        if (e <= fmt.emin || e >= fmt.emax) continue;
        double jump = std::abs(d.pdf(std::nextafter(v, HUGE_VAL)) - d.pdf(std::nextafter(v, -HUGE_VAL)));
        rp.discontinuity += 4.5 * jump * std::ldexp(1.0, e - fmt.p);
    }
    return rp;
}

std::vector<double> exact_density_breaks(const Distribution& d, const FloatFormat& fmt) {
    if (!fmt.enumerable()) throw std::invalid_argument("format too large to enumerate");
    const double u = fmt.u();
    Interval s = d.support();
    std::vector<double> bps = d.breakpoints();
    std::vector<double> out;
    FloatValue z = next_positive(FloatValue::zero(), fmt);
    while (z.kind == FloatValue::Kind::Finite) {
        RoundingInterval ri = rounding_interval(z, fmt);
        double lo = to_double(ri.lo), hi = to_double(ri.hi), zv = z.value(fmt);
        for (int sg : {1, -1}) {
            Interval cell = sg > 0 ? Interval{lo, hi} : Interval{-hi, -lo};
            if (!intersect(cell, s).is_empty() && d.mass(cell.lo, cell.hi) > 0) {
                double zz = sg * zv;
                for (double x : {cell.lo, cell.hi}) {
                    double t = (1.0 - zz / x) / u;
                    if (t > -1 && t < 1) out.push_back(t);
                }
                for (double v : bps) {
                    if (v > cell.lo && v < cell.hi) {
                        double t = (1.0 - zz / v) / u;
                        if (t > -1 && t < 1) out.push_back(t);
                    }
                }
            }
        }
        z = next_positive(z, fmt);
    }
    sort_unique(out);
    return out;
}

ErrorDistribution exact_error_density(const DistPtr& dp, const FloatFormat& fmt) {
    if (!fmt.enumerable())
        throw std::invalid_argument("format " + fmt.name + " is too large for the exact error density");
    const Distribution& d = *dp;
    const double u = fmt.u();
    struct Cell {
        double z, lo, hi;
    };
    auto cells = std::make_shared<std::vector<Cell>>();
    Interval s = d.support();
    FloatValue z = next_positive(FloatValue::zero(), fmt);
    while (z.kind == FloatValue::Kind::Finite) {
        RoundingInterval ri = rounding_interval(z, fmt);
        double lo = to_double(ri.lo), hi = to_double(ri.hi), zv = z.value(fmt);
        if (!intersect(Interval{lo, hi}, s).is_empty() && d.mass(lo, hi) > 0) cells->push_back({zv, lo, hi});
        if (!intersect(Interval{-hi, -lo}, s).is_empty() && d.mass(-hi, -lo) > 0) cells->push_back({-zv, -hi, -lo});
        z = next_positive(z, fmt);
    }

    ErrorDistribution ed;
    ed.method = ErrorDistribution::Method::Exact;
    ed.fmt = fmt;
    fill_atoms(ed, compute_atoms(d, fmt));
    ed.density_fn = [dp, cells, u](double t) {
        if (t < -1 || t > 1) return 0.0;
        double den = 1.0 - t * u, acc = 0;
        for (const auto& c : *cells) {
            double x = c.z / den;
            if (x >= c.lo && x <= c.hi) acc += dp->pdf(x) * u * std::abs(c.z) / (den * den);
        }
        return acc;
    };
    // continuous mass with E in [-1, t], cell by cell
    auto cdf = [&](double t) {
        double acc = 0;
        for (const auto& c : *cells) {
            double x = c.z / (1.0 - t * u), x1 = c.z / (1.0 + u);
            if (c.z > 0) acc += d.mass(std::max(c.lo, x1), std::min(c.hi, x));
            else acc += d.mass(std::max(c.lo, x), std::min(c.hi, x1));
        }
        return acc;
    };
    ed.grid = error_grid();
    for (double t : ed.grid) {
        ed.density.push_back(ed.density_fn(t));
        ed.cdf.push_back(cdf(t));
    }
    for (std::size_t i = 1; i < ed.cdf.size(); ++i) ed.cdf[i] = std::max(ed.cdf[i], ed.cdf[i - 1]);
    return ed;
}

ErrorDistribution hp_error_density(const DistPtr& dp, const FloatFormat& fmt) {
    const Distribution& d = *dp;
    const double u = fmt.u();
    auto bs = std::make_shared<BinadeSet>(binades(d, fmt));
    const double K = binade_sum_impl(d, *bs, fmt, 2.0 - u);

    ErrorDistribution ed;
    ed.method = ErrorDistribution::Method::HighPrecision;
    ed.fmt = fmt;
    fill_atoms(ed, compute_atoms(d, fmt));
    RemainderParts rp = hp_remainder(d, fmt);
    ed.remainder = rp.total();
    ed.extra_slack = rp.discontinuity;
    ed.density_fn = [dp, bs, fmt, u, K](double t) {
        double a = std::abs(t);
        if (a > 1) return 0.0;
        double h = a <= 0.5 ? K : binade_sum_impl(*dp, *bs, fmt, 1.0 / a - u);
        return std::max(0.0, h) / (1.0 - t * u);
    };

    std::vector<double> g = error_grid();
    for (double k : hp_kinks(d, *bs, fmt)) g.push_back(k);
    sort_unique(g);
    ed.grid = g;
    double acc = 0, qerr = 0;
    ed.cdf.push_back(0.0);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        double a = g[i], b = g[i + 1];
        if (a >= -0.5 && b <= 0.5) acc += K * (std::log1p(-a * u) - std::log1p(-b * u)) / u;
        else acc += gk(ed.density_fn, a, b, &qerr);
        ed.cdf.push_back(acc);
    }
    for (double t : g) ed.density.push_back(ed.density_fn(t));
    // per-binade first-moment tolerance, integrated over t in [-1, 1]
    qerr += 2.0 * 1e-12 * static_cast<double>(bs->pos.size() + bs->neg.size());
    ed.quadrature_error = qerr;
    return ed;
}

ErrorDistribution typical_error_distribution(const DistPtr& dp, const FloatFormat& fmt) {
    ErrorDistribution hp = hp_error_density(dp, fmt);
    ErrorDistribution ed;
    ed.method = ErrorDistribution::Method::Typical;
    ed.fmt = fmt;
    ed.atom_zero = hp.atom_zero;
    ed.atom_underflow = hp.atom_underflow;
    ed.atom_overflow = hp.atom_overflow;
    ed.remainder = hp.remainder;
    double qerr = hp.quadrature_error;
    std::vector<double> splits = hp.grid;
    ed.extra_slack = hp.extra_slack + l1_distance(typical_density, hp.density_fn, -1, 1, splits, &qerr);
    ed.quadrature_error = qerr;
    ed.density_fn = typical_density;
    ed.grid = error_grid();
    for (double t : ed.grid) {
        ed.density.push_back(typical_density(t));
        ed.cdf.push_back(typical_cdf(t));
    }
    return ed;
}

bool equiprobable_significands(const Distribution& d) {
    auto us = d.uniform_support();
    if (!us) return false;
    double a = us->lo, b = us->hi;
    if (a < 0 && b > 0) return false;
    if (a == 0 || b == 0) return false;
    double lo = std::min(std::abs(a), std::abs(b)), hi = std::max(std::abs(a), std::abs(b));
    auto pow2 = [](double x) {
        int e;
        return std::frexp(x, &e) == 0.5;
    };
    return pow2(lo) && pow2(hi) && hi >= 2 * lo;
}

ErrorDistribution select_error_model(const DistPtr& d, const FloatFormat& fmt) {
    if (fmt.enumerable()) return exact_error_density(d, fmt);
    if (fmt.p >= 23 && equiprobable_significands(*d)) return typical_error_distribution(d, fmt);
    return hp_error_density(d, fmt);
}

PBox error_pbox(const ErrorDistribution& e) {
    if (e.atom_overflow > 0) throw std::domain_error("input may overflow the target format");
    const double big = std::ldexp(1.0, e.fmt.p + 1);  // 1/u
    const double s = e.slack();
    PBox pb;
    const double U = e.atom_underflow;
    if (U > 0) {
        pb.grid.push_back(-big);
        pb.cdf_lo.push_back(0.0);
        pb.cdf_hi.push_back(std::min(1.0, U));
    }
    const double top = std::clamp(1.0 - e.atom_zero, 0.0, 1.0);
    for (std::size_t i = 0; i < e.grid.size(); ++i) {
        double c = e.cdf[i];
        double lo = std::clamp(U + c - s, 0.0, 1.0), hi = std::clamp(U + c + s, 0.0, 1.0);
        // the continuous part sits in [-1, 1]: nothing of it lies below -1 and all of it below 1
        if (i == 0) lo = std::min(lo, U);
        if (i + 1 == e.grid.size()) {
            lo = top;
            hi = std::max(hi, top);
        }
        hi = std::min(hi, top);
        lo = std::min(lo, hi);
        pb.grid.push_back(e.grid[i]);
        pb.cdf_lo.push_back(lo);
        pb.cdf_hi.push_back(hi);
    }
    if (e.atom_zero > 0) {
        pb.grid.push_back(big);
        pb.cdf_lo.push_back(1.0);
        pb.cdf_hi.push_back(1.0);
    }
    for (std::size_t i = 1; i < pb.size(); ++i) {
        pb.cdf_lo[i] = std::max(pb.cdf_lo[i], pb.cdf_lo[i - 1]);
        pb.cdf_hi[i] = std::max(pb.cdf_hi[i], pb.cdf_hi[i - 1]);
    }
    return pb;
}

DSStructure error_ds(const ErrorDistribution& e, std::size_t n) {
    if (e.atom_overflow > 0) throw std::domain_error("input may overflow the target format");
    const double big = std::ldexp(1.0, e.fmt.p + 1);
    const double M = 1.0 - e.atom_zero - e.atom_underflow;
    DSStructure out;
    if (M > 0) {
        // envelope of the continuous part conditioned on E in [-1, 1]
        PBox pb;
        const double s = e.slack();
        for (std::size_t i = 0; i < e.grid.size(); ++i) {
            double c = e.cdf[i];
            double lo = std::clamp((c - s) / M, 0.0, 1.0), hi = std::clamp((c + s) / M, 0.0, 1.0);
            if (i == 0) lo = 0.0;
            if (i + 1 == e.grid.size()) lo = hi = 1.0;
            pb.grid.push_back(e.grid[i]);
            pb.cdf_lo.push_back(std::min(lo, hi));
            pb.cdf_hi.push_back(hi);
        }
        for (std::size_t i = 1; i < pb.size(); ++i) {
            pb.cdf_lo[i] = std::max(pb.cdf_lo[i], pb.cdf_lo[i - 1]);
            pb.cdf_hi[i] = std::max(pb.cdf_hi[i], pb.cdf_hi[i - 1]);
        }
        DSStructure c = pbox_to_ds(pb, n);
        for (auto& f : c.elements) {
            f.pmin *= M;
            f.pmax *= M;
        }
        out = std::move(c);
    }
    if (e.atom_underflow > 0) out.elements.emplace_back(Interval{-big, -1.0}, e.atom_underflow);
    if (e.atom_zero > 0) out.elements.emplace_back(Interval{big, big}, e.atom_zero);
    out.sort();
    return out;
}

CovarianceBounds covariance_bounds(const DistPtr& dp, const FloatFormat& fmt) {
    const Distribution& d = *dp;
    Interval s = d.support();
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi)) throw std::invalid_argument("covariance bounds need bounded support");
    const double u = fmt.u();
    CovarianceBounds cb;
    BinadeSet bs = binades(d, fmt);
    cb.K = binade_sum_impl(d, bs, fmt, 2.0 - u);
    // pair the two signs per exponent so symmetric densities cancel exactly
    double L = 0;
    for (int e = fmt.emin + 1; e < fmt.emax; ++e) {
        double x = std::ldexp(1.0, e);
        if (x > std::max(std::abs(s.lo), std::abs(s.hi)) * 2) break;
        double term = d.pdf(x) - d.pdf(-x);
        L += term * std::ldexp(1.0, 2 * e);
    }
    cb.L = L * 1.5 * u * u;
    double ex = d.mean();
    double b1 = cb.L - ex * cb.K * (4.0 * u / 3.0);
    double b2 = cb.L - ex * cb.K * (u / 6.0);
    cb.lo = std::min(b1, b2);
    cb.hi = std::max(b1, b2);
    return cb;
}

double l1_distance(const std::function<double(double)>& f, const std::function<double(double)>& g, double a, double b,
                   std::vector<double> splits, double* err) {
    std::vector<double> cuts{a, b};
    for (double x : splits)
        if (x > a && x < b) cuts.push_back(x);
    sort_unique(cuts);
    std::function<double(double)> h = [&](double t) { return std::abs(f(t) - g(t)); };
    double s = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += gk(h, cuts[i], cuts[i + 1], err);
    return s;
}

std::string density_csv(const ErrorDistribution& e) {
    PBox pb = error_pbox(e);
    std::ostringstream os;
    os << "t,density,cdf_lo,cdf_hi\n";
    char buf[160];
    for (std::size_t i = 0; i < pb.size(); ++i) {
        double t = pb.grid[i];
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", t, e.density_at(t), pb.cdf_lo[i], pb.cdf_hi[i]);
        os << buf;
    }
    return os.str();
}

}  // namespace proberr
