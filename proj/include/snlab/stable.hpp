#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "snlab/cluster.hpp"
#include "snlab/partial_sums.hpp"

namespace snlab {

struct CharTriple {
    double alpha = 1.0;
    double theta = 1.0;
    double p = 1.0;  // tail balance of the marginal law
    double c_plus = 0.0;
    double c_minus = 0.0;
    double gamma1 = 0.0;
    double r2 = 0.0;  // E (sum_j eta_j^2)^{alpha/2}
    double gamma2 = 0.0;
    // cluster moments used by the series remainder
    double mean_sum = 0.0;    // E U, U = sum_j eta_j
    double mean_sum2 = 0.0;   // E U^2
    double mean_sq = 0.0;     // E W, W = sum_j eta_j^2
    double mean_sq2 = 0.0;    // E W^2
    double se_c_plus = 0.0;
    double se_c_minus = 0.0;
    double se_r2 = 0.0;
    bool gamma1_numerical = false;  // alpha = 1: Monte Carlo value, no closed form
    std::string regime() const { return alpha < 1.0 ? "(0,1)" : "[1,2)"; }
};

struct StableParams {
    double alpha = 1.0;
    double c = 1.0;
    double beta = 0.0;
    double tau = 0.0;
};

// Monte Carlo over mc_size clusters. gamma1 follows the regime formulas:
// theta alpha (c+ - c-)/(1 - alpha) below 1, alpha/(alpha-1)(p - q - theta(c+ - c-))
// above, and -theta E[sum_j eta_j log|U/eta_j|] at alpha = 1.
CharTriple triple_from_cluster(double alpha, double theta, const ClusterDistribution& cluster, double p, double q,
                               std::size_t mc_size, std::uint64_t seed);

StableParams stable_params(const CharTriple& t);

std::vector<double> cms_sampler(const StableParams& sp, std::size_t m, std::uint64_t seed);

std::complex<double> charfn_stable(double z, const StableParams& sp);

// psi(z) with E exp(i z L_1(1)) = exp(psi(z)), by quadrature over nu_1.
std::complex<double> levy_exponent(double z, const CharTriple& t);

// int_0^inf (sin x - x 1{x <= 1}) x^{-2} dx by quadrature (equals 1 - Euler's gamma)
double sine_compensator_constant();

struct SeriesOptions {
    std::size_t n_points = 1000;
    std::size_t grid = 1000;           // extra breakpoints k/grid for drift and remainder
    double max_remainder_sd = 1.0;     // relative to c^{1/alpha}
};

struct LevyRemainder {
    double level = 0.0;     // truncation u = P_N
    double mean1 = 0.0;     // per unit time
    double sd1 = 0.0;
    double mean2 = 0.0;
    double sd2 = 0.0;
    double compensator = 0.0;  // per unit time, alpha >= 1
};

// Truncation error model for a given point count; throws when sd1 is above
// the tolerance relative to c^{1/alpha}.
LevyRemainder series_remainder(const CharTriple& t, const SeriesOptions& opt);

// Poisson-cluster series for (L_1, L_2) on [0,1]. For alpha >= 1, L_2 is
// centered by alpha/(2-alpha) per unit time (b2n in the result); add it
// back for the raw sum of squares.
JointPathPair simulate_levy_pair(const CharTriple& t, const ClusterDistribution& cluster, const SeriesOptions& opt,
                                 std::uint64_t seed);

// Marginals of one draw: L_1 at each t in t_grid, L_2 (as above) at each t,
// and the raw L_2(1).
struct LevyDraw {
    std::vector<double> l1;
    std::vector<double> l2;
    double l2_raw_1 = 0.0;
};
LevyDraw simulate_levy_values(const CharTriple& t, const ClusterDistribution& cluster, const SeriesOptions& opt,
                              std::uint64_t seed, const std::vector<double>& t_grid);

// key=value text record
std::string to_record(const CharTriple& t);
std::string to_record(const StableParams& sp);

}  // namespace snlab
