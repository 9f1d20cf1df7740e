#ifndef PROBERR_MONTECARLO_HPP
#define PROBERR_MONTECARLO_HPP

#include "proberr/ast.hpp"
#include "proberr/ds.hpp"
#include "proberr/fpcore.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace proberr {

struct MonteCarloConfig {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
};

// Samples of the program run in the target format next to a 113-bit
// reference run on the same inputs. Results do not depend on the worker
// count: the sample stream is split into a fixed number of seeded shards.
struct MonteCarloResult {
    std::vector<double> values;      // finite-precision output
    std::vector<double> abs_errors;  // |fp - reference|
    std::vector<double> rel_errors;  // (reference - fp) / reference / u, 0 where reference is 0
};

MonteCarloResult monte_carlo(const Program& prog, const FloatFormat& fmt, const MonteCarloConfig& cfg);

// Dvoretzky-Kiefer-Wolfowitz check of samples against a CDF envelope at
// every grid point: lo - eps <= F_n <= hi + eps.
struct DkwCheck {
    bool inside = true;
    double epsilon = 0.0;
    double worst_violation = 0.0;  // largest excursion beyond the widened envelope
};
DkwCheck dkw_check(const PBox& pb, std::vector<double> samples, double alpha = 0.01);

// empirical quantile, q in [0, 1]
double empirical_quantile(std::vector<double> samples, double q);

// x,ecdf on at most `points` evenly spaced sample ranks
std::string ecdf_csv(std::vector<double> samples, std::size_t points = 1000);

}  // namespace proberr

#endif
