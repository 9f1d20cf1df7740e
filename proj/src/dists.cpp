#include "proberr/dists.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/laplace.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/rayleigh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace proberr {

namespace bm = boost::math;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gk_integrate(const std::function<double(double)>& f, double a, double b) {
    if (!(a < b)) return 0.0;
    double err = 0;
    return bm::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14, &err);
}

// integrates f over [a,b] split at the given breakpoints
double split_integrate(const std::function<double(double)>& f, double a, double b, const std::vector<double>& bps) {
    std::vector<double> cuts{a};
    for (double x : bps)
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    double s = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += gk_integrate(f, cuts[i], cuts[i + 1]);
    return s;
}

std::string fmt_num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

double Distribution::mass(double a, double b) const {
    Interval s = support();
    a = std::max(a, s.lo);
    b = std::min(b, s.hi);
    if (!(a < b)) return 0.0;
    double m = cdf(a) > 0.5 ? ccdf(a) - ccdf(b) : cdf(b) - cdf(a);
    return std::max(0.0, m);
}

double Distribution::first_moment(double a, double b) const {
    Interval s = support();
    a = std::max(a, s.lo);
    b = std::min(b, s.hi);
    if (!(a < b)) return 0.0;
    return split_integrate([this](double x) { return x * pdf(x); }, a, b, breakpoints());
}

double Distribution::mean() const {
    Interval s = support();
    return first_moment(s.lo, s.hi);
}

std::vector<double> Distribution::breakpoints() const {
    Interval s = support();
    std::vector<double> out;
    if (std::isfinite(s.lo)) out.push_back(s.lo);
    if (std::isfinite(s.hi)) out.push_back(s.hi);
    return out;
}

namespace {

class UniformDist final : public Distribution {
public:
    UniformDist(double a, double b) : a_(a), b_(b) {
        if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("uniform needs a < b");
    }
    double pdf(double x) const override { return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0; }
    double dpdf(double) const override { return 0.0; }
    double cdf(double x) const override { return x <= a_ ? 0.0 : x >= b_ ? 1.0 : (x - a_) / (b_ - a_); }
    double ccdf(double x) const override { return x <= a_ ? 1.0 : x >= b_ ? 0.0 : (b_ - x) / (b_ - a_); }
    double quantile(double q) const override { return a_ + q * (b_ - a_); }
    double cquantile(double q) const override { return b_ - q * (b_ - a_); }
    Interval support() const override { return {a_, b_}; }
    double mass(double a, double b) const override {
        a = std::max(a, a_);
        b = std::min(b, b_);
        return a < b ? (b - a) / (b_ - a_) : 0.0;
    }
    double first_moment(double a, double b) const override {
        a = std::max(a, a_);
        b = std::min(b, b_);
        return a < b ? (b - a) * (0.5 * a + 0.5 * b) / (b_ - a_) : 0.0;
    }
    std::string describe() const override { return "uniform(" + fmt_num(a_) + ", " + fmt_num(b_) + ")"; }
    std::optional<Interval> uniform_support() const override { return Interval{a_, b_}; }

private:
    double a_, b_;
};

class NormalDist final : public Distribution {
public:
    NormalDist(double mu, double sigma) : d_(mu, sigma) {
        if (!(sigma > 0)) throw std::invalid_argument("normal needs sigma > 0");
    }
    double pdf(double x) const override { return bm::pdf(d_, x); }
    double dpdf(double x) const override {
        double s = d_.standard_deviation();
        return -(x - d_.mean()) / (s * s) * pdf(x);
    }
    double cdf(double x) const override { return std::isinf(x) ? (x > 0) : bm::cdf(d_, x); }
    double ccdf(double x) const override { return std::isinf(x) ? (x < 0) : bm::cdf(bm::complement(d_, x)); }
    double quantile(double q) const override { return bm::quantile(d_, q); }
    double cquantile(double q) const override { return bm::quantile(bm::complement(d_, q)); }
    Interval support() const override { return {-kInf, kInf}; }
    double first_moment(double a, double b) const override {
        double s = d_.standard_deviation();
        double fa = std::isinf(a) ? 0.0 : pdf(a);
        double fb = std::isinf(b) ? 0.0 : pdf(b);
        return d_.mean() * mass(a, b) - s * s * (fb - fa);
    }
    double mean() const override { return d_.mean(); }
    std::vector<double> breakpoints() const override { return {}; }
    std::string describe() const override {
        return "normal(" + fmt_num(d_.mean()) + ", " + fmt_num(d_.standard_deviation()) + ")";
    }

private:
    bm::normal_distribution<double> d_;
};

class LaplaceDist final : public Distribution {
public:
    LaplaceDist(double mu, double b) : d_(mu, b) {
        if (!(b > 0)) throw std::invalid_argument("laplace needs a positive scale");
    }
    double pdf(double x) const override { return bm::pdf(d_, x); }
    double dpdf(double x) const override {
        double s = x > d_.location() ? -1.0 : 1.0;
        return s / d_.scale() * pdf(x);
    }
    double cdf(double x) const override { return std::isinf(x) ? (x > 0) : bm::cdf(d_, x); }
    double ccdf(double x) const override { return std::isinf(x) ? (x < 0) : bm::cdf(bm::complement(d_, x)); }
    double quantile(double q) const override { return bm::quantile(d_, q); }
    double cquantile(double q) const override { return bm::quantile(bm::complement(d_, q)); }
    Interval support() const override { return {-kInf, kInf}; }
    double mean() const override { return d_.location(); }
    std::vector<double> breakpoints() const override { return {d_.location()}; }
    std::string describe() const override {
        return "laplace(" + fmt_num(d_.location()) + ", " + fmt_num(d_.scale()) + ")";
    }

private:
    bm::laplace_distribution<double> d_;
};

class ExponentialDist final : public Distribution {
public:
    explicit ExponentialDist(double lambda) : d_(lambda) {
        if (!(lambda > 0)) throw std::invalid_argument("exponential needs lambda > 0");
    }
    double pdf(double x) const override { return x < 0 ? 0.0 : bm::pdf(d_, x); }
    double dpdf(double x) const override { return -d_.lambda() * pdf(x); }
    double cdf(double x) const override { return x <= 0 ? 0.0 : std::isinf(x) ? 1.0 : bm::cdf(d_, x); }
    double ccdf(double x) const override {
        return x <= 0 ? 1.0 : std::isinf(x) ? 0.0 : bm::cdf(bm::complement(d_, x));
    }
    double quantile(double q) const override { return bm::quantile(d_, q); }
    double cquantile(double q) const override { return bm::quantile(bm::complement(d_, q)); }
    Interval support() const override { return {0.0, kInf}; }
    double first_moment(double a, double b) const override {
        a = std::max(a, 0.0);
        if (!(a < b)) return 0.0;
        double l = d_.lambda();
        auto anti = [l](double x) { return std::isinf(x) ? 0.0 : -(x + 1.0 / l) * std::exp(-l * x); };
        return anti(b) - anti(a);
    }
    double mean() const override { return 1.0 / d_.lambda(); }
    std::string describe() const override { return "exponential(" + fmt_num(d_.lambda()) + ")"; }

private:
    bm::exponential_distribution<double> d_;
};

class RayleighDist final : public Distribution {
public:
    explicit RayleighDist(double sigma) : d_(sigma) {
        if (!(sigma > 0)) throw std::invalid_argument("rayleigh needs sigma > 0");
    }
    double pdf(double x) const override { return x < 0 ? 0.0 : bm::pdf(d_, x); }
    double dpdf(double x) const override {
        if (x <= 0) return 0.0;
        double s2 = d_.sigma() * d_.sigma();
        return (1.0 / s2 - x * x / (s2 * s2)) * std::exp(-x * x / (2 * s2));
    }
    double cdf(double x) const override { return x <= 0 ? 0.0 : std::isinf(x) ? 1.0 : bm::cdf(d_, x); }
    double ccdf(double x) const override {
        return x <= 0 ? 1.0 : std::isinf(x) ? 0.0 : bm::cdf(bm::complement(d_, x));
    }
    double quantile(double q) const override { return bm::quantile(d_, q); }
    double cquantile(double q) const override { return bm::quantile(bm::complement(d_, q)); }
    Interval support() const override { return {0.0, kInf}; }
    double mean() const override { return bm::mean(d_); }
    std::string describe() const override { return "rayleigh(" + fmt_num(d_.sigma()) + ")"; }

private:
    bm::rayleigh_distribution<double> d_;
};

class BetaDist final : public Distribution {
public:
    BetaDist(double a, double b) : d_(a, b) {
        if (!(a > 0 && b > 0)) throw std::invalid_argument("beta needs positive shape parameters");
    }
    double pdf(double x) const override {
        if (x < 0 || x > 1) return 0.0;
        if ((x == 0 && d_.alpha() < 1) || (x == 1 && d_.beta() < 1)) return kInf;
        return bm::pdf(d_, x);
    }
    double dpdf(double x) const override {
        if (x <= 0 || x >= 1) return 0.0;
        return pdf(x) * ((d_.alpha() - 1) / x - (d_.beta() - 1) / (1 - x));
    }
    double cdf(double x) const override { return x <= 0 ? 0.0 : x >= 1 ? 1.0 : bm::cdf(d_, x); }
    double ccdf(double x) const override { return x <= 0 ? 1.0 : x >= 1 ? 0.0 : bm::cdf(bm::complement(d_, x)); }
    double quantile(double q) const override { return bm::quantile(d_, q); }
    double cquantile(double q) const override { return bm::quantile(bm::complement(d_, q)); }
    Interval support() const override { return {0.0, 1.0}; }
    double first_moment(double a, double b) const override {
        // x f_{a,b}(x) = a/(a+b) f_{a+1,b}(x)
        a = std::max(a, 0.0);
        b = std::min(b, 1.0);
        if (!(a < b)) return 0.0;
        bm::beta_distribution<double> up(d_.alpha() + 1, d_.beta());
        double m = bm::cdf(up, b) - bm::cdf(up, a);
        return d_.alpha() / (d_.alpha() + d_.beta()) * m;
    }
    double mean() const override { return d_.alpha() / (d_.alpha() + d_.beta()); }
    std::string describe() const override {
        return "beta(" + fmt_num(d_.alpha()) + ", " + fmt_num(d_.beta()) + ")";
    }

private:
    bm::beta_distribution<double> d_;
};

class TruncatedDist final : public Distribution {
public:
    TruncatedDist(DistPtr base, Interval w) : base_(std::move(base)) {
        Interval s = base_->support();
        win_ = intersect(s, w);
        if (win_.is_empty() || !(win_.lo < win_.hi)) throw std::invalid_argument("truncation window misses the support");
        z_ = base_->mass(win_.lo, win_.hi);
        if (!(z_ > 0)) throw std::invalid_argument("truncation window carries zero probability mass");
        upper_tail_ = base_->cdf(win_.lo) > 0.5;
        f_lo_ = base_->cdf(win_.lo);
        c_hi_ = base_->ccdf(win_.hi);
    }
    double pdf(double x) const override { return win_.contains(x) ? base_->pdf(x) / z_ : 0.0; }
    double dpdf(double x) const override { return win_.contains(x) ? base_->dpdf(x) / z_ : 0.0; }
    double cdf(double x) const override {
        if (x <= win_.lo) return 0.0;
        if (x >= win_.hi) return 1.0;
        return std::min(1.0, base_->mass(win_.lo, x) / z_);
    }
    double ccdf(double x) const override {
        if (x <= win_.lo) return 1.0;
        if (x >= win_.hi) return 0.0;
        return std::min(1.0, base_->mass(x, win_.hi) / z_);
    }
    double quantile(double q) const override {
        double x;
        if (upper_tail_) x = base_->cquantile(c_hi_ + (1.0 - q) * z_);
        else x = base_->quantile(f_lo_ + q * z_);
        return std::clamp(x, win_.lo, win_.hi);
    }
    Interval support() const override { return win_; }
    double mass(double a, double b) const override {
        a = std::max(a, win_.lo);
        b = std::min(b, win_.hi);
        return a < b ? std::min(1.0, base_->mass(a, b) / z_) : 0.0;
    }
    double first_moment(double a, double b) const override {
        a = std::max(a, win_.lo);
        b = std::min(b, win_.hi);
        return a < b ? base_->first_moment(a, b) / z_ : 0.0;
    }
    double mean() const override { return first_moment(win_.lo, win_.hi); }
    std::vector<double> breakpoints() const override {
        std::vector<double> out{win_.lo};
        for (double x : base_->breakpoints())
            if (x > win_.lo && x < win_.hi) out.push_back(x);
        out.push_back(win_.hi);
        return out;
    }
    std::string describe() const override { return base_->describe() + " in " + to_string(win_); }
    std::optional<Interval> uniform_support() const override {
        if (base_->uniform_support()) return win_;
        return std::nullopt;
    }

private:
    DistPtr base_;
    Interval win_;
    double z_ = 1, f_lo_ = 0, c_hi_ = 0;
    bool upper_tail_ = false;
};

class PiecewiseDist final : public Distribution {
public:
    PiecewiseDist(std::vector<double> breaks, std::vector<std::vector<double>> coeffs)
        : breaks_(std::move(breaks)), coeffs_(std::move(coeffs)) {
        if (breaks_.size() < 2 || coeffs_.size() + 1 != breaks_.size())
            throw std::invalid_argument("piecewise needs one polynomial per interval between breakpoints");
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
            if (!(breaks_[i] < breaks_[i + 1]) || !std::isfinite(breaks_[i]) || !std::isfinite(breaks_[i + 1]))
                throw std::invalid_argument("piecewise breakpoints must be finite and strictly increasing");
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            for (int j = 0; j <= 64; ++j) {
                double x = breaks_[i] + (breaks_[i + 1] - breaks_[i]) * j / 64.0;
                if (poly(i, x) < -1e-12) throw std::invalid_argument("piecewise density is negative");
            }
        }
        cum_.push_back(0.0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            cum_.push_back(cum_.back() + anti(i, breaks_[i + 1]) - anti(i, breaks_[i]));
        total_ = cum_.back();
        if (!(total_ > 0)) throw std::invalid_argument("piecewise density has zero mass");
        cmom_.push_back(0.0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            cmom_.push_back(cmom_.back() + part(i, breaks_[i], breaks_[i + 1], true));
    }
    double pdf(double x) const override {
        long i = piece(x);
        return i < 0 ? 0.0 : std::max(0.0, poly(static_cast<std::size_t>(i), x)) / total_;
    }
    double dpdf(double x) const override {
        long i = piece(x);
        if (i < 0) return 0.0;
        const auto& c = coeffs_[static_cast<std::size_t>(i)];
        double s = 0;
        for (std::size_t j = c.size(); j-- > 1;) s = s * x + static_cast<double>(j) * c[j];
        return s / total_;
    }
    double cdf(double x) const override {
        if (x <= breaks_.front()) return 0.0;
        if (x >= breaks_.back()) return 1.0;
        std::size_t i = static_cast<std::size_t>(piece(x));
        return std::clamp((cum_[i] + anti(i, x) - anti(i, breaks_[i])) / total_, 0.0, 1.0);
    }
    double quantile(double q) const override {
        double lo = breaks_.front(), hi = breaks_.back();
        for (int it = 0; it < 200 && lo < hi; ++it) {
            double m = 0.5 * (lo + hi);
            if (m == lo || m == hi) break;
            if (cdf(m) < q) lo = m;
            else hi = m;
        }
        return 0.5 * (lo + hi);
    }
    Interval support() const override { return {breaks_.front(), breaks_.back()}; }
    double mass(double a, double b) const override {
        a = std::max(a, breaks_.front());
        b = std::min(b, breaks_.back());
        if (!(a < b)) return 0.0;
        return std::max(0.0, integral(a, b, false) / total_);
    }
    double first_moment(double a, double b) const override {
        a = std::max(a, breaks_.front());
        b = std::min(b, breaks_.back());
        if (!(a < b)) return 0.0;
        return integral(a, b, true) / total_;
    }
    std::vector<double> breakpoints() const override { return breaks_; }
    std::string describe() const override {
        std::ostringstream os;
        os << "piecewise(" << breaks_.size() - 1 << " pieces on " << to_string(support()) << ")";
        return os.str();
    }
    std::optional<Interval> uniform_support() const override {
        if (coeffs_.size() != 1) return std::nullopt;
        for (std::size_t j = 1; j < coeffs_[0].size(); ++j)
            if (coeffs_[0][j] != 0) return std::nullopt;
        return support();
    }

private:
    long piece(double x) const {
        if (x < breaks_.front() || x > breaks_.back()) return -1;
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
        long i = static_cast<long>(it - breaks_.begin()) - 1;
        return std::min(i, static_cast<long>(coeffs_.size()) - 1);
    }
    double poly(std::size_t i, double x) const {
        double s = 0;
        for (std::size_t j = coeffs_[i].size(); j-- > 0;) s = s * x + coeffs_[i][j];
        return s;
    }
    // antiderivative of the unnormalized piece
    double anti(std::size_t i, double x) const {
        double s = 0;
        for (std::size_t j = coeffs_[i].size(); j-- > 0;) s = s * x + coeffs_[i][j] / static_cast<double>(j + 1);
        return s * x;
    }
    double anti_x(std::size_t i, double x) const {
        double s = 0;
        for (std::size_t j = coeffs_[i].size(); j-- > 0;) s = s * x + coeffs_[i][j] / static_cast<double>(j + 2);
        return s * x * x;
    }
    double part(std::size_t i, double l, double h, bool moment) const {
        if (coeffs_[i].size() == 1)
            // constant pieces: avoid cancellation in the antiderivative
            return moment ? coeffs_[i][0] * (h - l) * (0.5 * l + 0.5 * h) : coeffs_[i][0] * (h - l);
        return moment ? anti_x(i, h) - anti_x(i, l) : anti(i, h) - anti(i, l);
    }
    // a < b, both inside the support; whole pieces come from prefix sums
    double integral(double a, double b, bool moment) const {
        auto i = static_cast<std::size_t>(piece(a)), j = static_cast<std::size_t>(piece(b));
        if (i == j) return part(i, a, b, moment);
        const auto& c = moment ? cmom_ : cum_;
        return part(i, a, breaks_[i + 1], moment) + (c[j] - c[i + 1]) + part(j, breaks_[j], b, moment);
    }

    std::vector<double> breaks_;
    std::vector<std::vector<double>> coeffs_;
    std::vector<double> cum_;
    std::vector<double> cmom_;
    double total_ = 1;
};

}  // namespace

std::string kind_name(BuiltinKind k) {
    switch (k) {
        case BuiltinKind::Uniform: return "uniform";
        case BuiltinKind::Normal: return "normal";
        case BuiltinKind::Laplace: return "laplace";
        case BuiltinKind::Exponential: return "exponential";
        case BuiltinKind::Rayleigh: return "rayleigh";
        case BuiltinKind::Beta: return "beta";
    }
    return "?";
}

BuiltinKind kind_from_name(const std::string& n) {
    if (n == "uniform") return BuiltinKind::Uniform;
    if (n == "normal") return BuiltinKind::Normal;
    if (n == "laplace") return BuiltinKind::Laplace;
    if (n == "exponential") return BuiltinKind::Exponential;
    if (n == "rayleigh") return BuiltinKind::Rayleigh;
    if (n == "beta") return BuiltinKind::Beta;
    throw std::invalid_argument("unknown distribution '" + n + "'");
}

DistPtr make_uniform(double a, double b) { return std::make_shared<UniformDist>(a, b); }
DistPtr make_normal(double mu, double sigma) { return std::make_shared<NormalDist>(mu, sigma); }

DistPtr truncate(DistPtr base, Interval window) { return std::make_shared<TruncatedDist>(std::move(base), window); }

DistPtr make_builtin(const BuiltinSpec& spec, std::optional<Interval> truncation) {
    auto need = [&](std::size_t n) {
        if (spec.params.size() != n)
            throw std::invalid_argument(kind_name(spec.kind) + " takes " + std::to_string(n) + " parameter(s)");
    };
    DistPtr d;
    switch (spec.kind) {
        case BuiltinKind::Uniform: need(2); d = make_uniform(spec.params[0], spec.params[1]); break;
        case BuiltinKind::Normal: need(2); d = make_normal(spec.params[0], spec.params[1]); break;
        case BuiltinKind::Laplace: need(2); d = std::make_shared<LaplaceDist>(spec.params[0], spec.params[1]); break;
        case BuiltinKind::Exponential: need(1); d = std::make_shared<ExponentialDist>(spec.params[0]); break;
        case BuiltinKind::Rayleigh: need(1); d = std::make_shared<RayleighDist>(spec.params[0]); break;
        case BuiltinKind::Beta: need(2); d = std::make_shared<BetaDist>(spec.params[0], spec.params[1]); break;
    }
    if (truncation) return truncate(d, *truncation);
    return d;
}

DistPtr make_piecewise(std::vector<double> breaks, std::vector<std::vector<double>> coeffs) {
    return std::make_shared<PiecewiseDist>(std::move(breaks), std::move(coeffs));
}

DSStructure discretize(const Distribution& d, std::size_t n, Discretization scheme) {
    if (n == 0) throw std::invalid_argument("discretize needs n >= 1");
    Interval s = d.support();
    if (!std::isfinite(s.lo) || !std::isfinite(s.hi))
        throw std::invalid_argument("unbounded support: truncate " + d.describe() + " before discretizing");
    std::vector<double> cuts(n + 1);
    cuts[0] = s.lo;
    cuts[n] = s.hi;
    for (std::size_t i = 1; i < n; ++i) {
        double q = static_cast<double>(i) / static_cast<double>(n);
        cuts[i] = scheme == Discretization::EqualWidth ? s.lo + (s.hi - s.lo) * q : d.quantile(q);
        cuts[i] = std::clamp(cuts[i], cuts[i - 1], s.hi);
    }
    DSStructure ds;
    for (std::size_t i = 0; i < n; ++i) ds.elements.emplace_back(Interval{cuts[i], cuts[i + 1]}, d.mass(cuts[i], cuts[i + 1]));
    return ds;
}

double draw(const Distribution& d, Rng& rng) { return d.quantile(rng.uniform01()); }

std::vector<double> sample(const Distribution& d, std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = draw(d, rng);
    return out;
}

double ks_critical(std::size_t n, double alpha) {
    double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c / std::sqrt(static_cast<double>(n));
}

}  // namespace proberr
