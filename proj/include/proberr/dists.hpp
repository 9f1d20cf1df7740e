#ifndef PROBERR_DISTS_HPP
#define PROBERR_DISTS_HPP

#include "proberr/ds.hpp"
#include "proberr/interval.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace proberr {

class Distribution {
public:
    virtual ~Distribution() = default;

    virtual double pdf(double x) const = 0;
    // derivative of the pdf where it exists (one-sided at breakpoints)
    virtual double dpdf(double x) const = 0;
    virtual double cdf(double x) const = 0;
    virtual double ccdf(double x) const { return 1.0 - cdf(x); }
    virtual double quantile(double q) const = 0;
    // quantile of the upper tail: x with P[X > x] = q
    virtual double cquantile(double q) const { return quantile(1.0 - q); }
    virtual Interval support() const = 0;
    // P[a <= X <= b], computed without cancellation where possible
    virtual double mass(double a, double b) const;
    // integral of x f(x) over [a, b]
    virtual double first_moment(double a, double b) const;
    virtual double mean() const;
    // points where the pdf or its derivative is discontinuous, support ends included
    virtual std::vector<double> breakpoints() const;
    virtual std::string describe() const = 0;

    // uniform on [a, b] when applicable
    virtual std::optional<Interval> uniform_support() const { return std::nullopt; }
};

using DistPtr = std::shared_ptr<const Distribution>;

enum class BuiltinKind { Uniform, Normal, Laplace, Exponential, Rayleigh, Beta };

struct BuiltinSpec {
    BuiltinKind kind = BuiltinKind::Uniform;
    std::vector<double> params;
};

std::string kind_name(BuiltinKind k);
BuiltinKind kind_from_name(const std::string& name);

// Parameter lists: uniform(a,b), normal(mu,sigma), laplace(mu,b),
// exponential(lambda), rayleigh(sigma), beta(alpha,beta). The result is
// renormalized to the truncation window when one is given.
DistPtr make_builtin(const BuiltinSpec& spec, std::optional<Interval> truncation = std::nullopt);
DistPtr make_uniform(double a, double b);
DistPtr make_normal(double mu, double sigma);
DistPtr truncate(DistPtr base, Interval window);

// Piece i covers [breaks[i], breaks[i+1]] with density sum_j coeffs[i][j] x^j.
DistPtr make_piecewise(std::vector<double> breaks, std::vector<std::vector<double>> coeffs);

enum class Discretization { EqualWidth, EqualMass };

DSStructure discretize(const Distribution& d, std::size_t n, Discretization scheme = Discretization::EqualWidth);

// Reproducible stream of uniforms in (0,1) built from the raw 64-bit output,
// so results do not depend on the standard library's distribution classes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform01() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }
    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

double draw(const Distribution& d, Rng& rng);
std::vector<double> sample(const Distribution& d, std::uint64_t seed, std::size_t n);

// Kolmogorov-Smirnov statistic of samples against a CDF
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double f = cdf(xs[i]);
        d = std::max(d, std::max(f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// asymptotic critical value at level alpha (0.01 -> 1.628 / sqrt(n))
double ks_critical(std::size_t n, double alpha = 0.01);

}  // namespace proberr

#endif
