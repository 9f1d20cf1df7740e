#ifndef PROBERR_ERRDIST_HPP
#define PROBERR_ERRDIST_HPP

#include "proberr/dists.hpp"
#include "proberr/ds.hpp"
#include "proberr/fpcore.hpp"

#include <functional>
#include <string>
#include <vector>

namespace proberr {

// Distribution of E = err_rel(X)/u. The continuous part lives on [-1, 1].
// Discrete components:
//   atom_zero      X rounds to 0, err_rel = 1, E = 1/u
//   atom_underflow X rounds up to +-2^emin from below 2^emin/(1+u), E in [-1/u, -1]
//   atom_overflow  X rounds to +-inf
struct ErrorDistribution {
    enum class Method { Exact, HighPrecision, Typical };

    Method method = Method::HighPrecision;
    FloatFormat fmt;
    std::vector<double> grid;
    std::vector<double> density;
    // mass of the continuous part on [-1, grid[i]]
    std::vector<double> cdf;
    double atom_zero = 0.0;
    double atom_underflow = 0.0;
    double atom_overflow = 0.0;
    // model error of the closed form, total variation (0 when exact)
    double remainder = 0.0;
    double quadrature_error = 0.0;
    // density jumps inside rounding cells, or the measured gap of the typical form
    double extra_slack = 0.0;
    std::function<double(double)> density_fn;

    double slack() const { return remainder + quadrature_error + extra_slack; }
    double density_at(double t) const;
    double continuous_mass() const { return cdf.empty() ? 0.0 : cdf.back(); }
    std::string method_name() const;
};

// Explicit sum over every representable value; needs fmt.enumerable().
ErrorDistribution exact_error_density(const DistPtr& d, const FloatFormat& fmt);
// Binade-integral approximation with its rigorous remainder.
ErrorDistribution hp_error_density(const DistPtr& d, const FloatFormat& fmt);
// Limit density when all significands are equally likely.
double typical_density(double t);
double typical_cdf(double t);
// Typical density with slack = measured L1 gap to the binade form + that form's remainder.
ErrorDistribution typical_error_distribution(const DistPtr& d, const FloatFormat& fmt);

// uniform whose endpoints are same-sign powers of two at least one binade apart
bool equiprobable_significands(const Distribution& d);
ErrorDistribution select_error_model(const DistPtr& d, const FloatFormat& fmt);

// Sound CDF envelope of E, discrete components included.
PBox error_pbox(const ErrorDistribution& e);
// n slices of the continuous envelope plus one element per discrete component.
DSStructure error_ds(const ErrorDistribution& e, std::size_t n);

struct CovarianceBounds {
    double lo = 0.0;
    double hi = 0.0;
    double L = 0.0;
    double K = 0.0;
};
CovarianceBounds covariance_bounds(const DistPtr& d, const FloatFormat& fmt);

struct RemainderParts {
    double extremal_mass = 0.0;  // P[Round(X) has exponent emin or emax]
    double taylor = 0.0;         // per-binade smoothness term
    double discontinuity = 0.0;  // density jumps, not covered by the smoothness term
    double total() const { return extremal_mass + taylor; }
};
RemainderParts hp_remainder(const Distribution& d, const FloatFormat& fmt);

// Binade integral sum H(r) = sum_{s,e} 2^-(e+1) int |x| f(x) dx over
// [2^e (1-u), 2^e r] for emin < e < emax; K = H(2-u).
double binade_sum(const Distribution& d, const FloatFormat& fmt, double r);

// t values in [-1, 1] where the exact density jumps
std::vector<double> exact_density_breaks(const Distribution& d, const FloatFormat& fmt);

// integral over [a, b] of |f - g|, split at the given points; err receives the
// accumulated quadrature estimate
double l1_distance(const std::function<double(double)>& f, const std::function<double(double)>& g, double a, double b,
                   std::vector<double> splits, double* err = nullptr);

// 512 uniform cells on [-1, 1] plus geometric refinement towards |t| = 1/2 and 1
std::vector<double> error_grid();

// t,density,cdf_lo,cdf_hi
std::string density_csv(const ErrorDistribution& e);

}  // namespace proberr

#endif
