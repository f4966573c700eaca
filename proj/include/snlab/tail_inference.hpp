#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "snlab/cluster.hpp"
#include "snlab/models.hpp"

namespace snlab {

// Blocks of length r_n; only the k_n = floor(n / r_n) complete blocks are used.
struct BlockingScheme {
    std::size_t r_n = 1;
    std::size_t k_n(std::size_t n) const { return n / r_n; }
    // r_n = ceil(n^kappa), kappa in (0,1)
    static BlockingScheme from_exponent(std::size_t n, double kappa);
    void validate(std::size_t n) const;
};

// Hill estimator from the k largest |X|.
double hill_alpha(const std::vector<double>& data, std::size_t k);

// (1 - 1/n)-quantile of |X| over a pooled sample.
double empirical_an(const std::vector<double>& pooled, std::size_t n);

// Absolute threshold exceeded by exactly floor(n (1 - level)) of the |X_i|
// (an order statistic, so it scales exactly with the data).
double abs_threshold(const std::vector<double>& data, double level);

// Blocks estimator: blocks whose max |X| exceeds u over exceedances of u.
double extremal_index_blocks(const std::vector<double>& data, const BlockingScheme& scheme, double u);

struct CurvePoint {
    double m = 0.0;
    double prob = 0.0;
    std::size_t anchors = 0;
};

// P(max_{m <= |i| < r_n} |X_{t+i}| > u  given |X_t| > u), over all anchors t
// whose window fits in the sample. The window is empty for m = r_n.
std::vector<CurvePoint> anticluster_diagnostic(const std::vector<double>& data, const BlockingScheme& scheme,
                                               double u, const std::vector<std::size_t>& m_grid);

struct SignSwitchResult {
    std::size_t violations = 0;         // blocks whose exceedances carry both signs
    std::size_t exceeding_blocks = 0;   // blocks with at least one exceedance
    std::size_t multi_blocks = 0;       // blocks with two or more exceedances
};
SignSwitchResult sign_switch_diagnostic(const std::vector<double>& data, const BlockingScheme& scheme, double u);

struct SmallJumpPoint {
    double u = 0.0;
    double prob_l1 = 0.0;  // P(max_k |sum_{i<=k} (X_i/a_n) 1{|X_i|/a_n <= u} - centering| > delta)
    double prob_l2 = 0.0;  // same for X_i^2 / a_n^2
    std::size_t replicates = 0;
};

// Centering: none, analytic (two-sided Pareto `canonical`), or the pooled
// empirical mean of the truncated terms when `canonical` is null.
std::vector<SmallJumpPoint> small_jump_diagnostic(const std::vector<std::vector<double>>& replicates, double a_n,
                                                  const std::vector<double>& u_grid, double delta, bool center,
                                                  const RegVarSpec* canonical = nullptr);

struct LagSummary {
    int lag = 0;
    std::size_t anchors = 0;
    std::vector<double> levels;     // quantile levels
    std::vector<double> tail_q;     // quantiles of X_{t+i} / u
    std::vector<double> spectral_q; // quantiles of X_{t+i} / |X_t|
    double near_zero = 0.0;         // fraction with |X_{t+i}| / |X_t| < 0.05
};

// Anchors are t with |X_t| > u and t +- h inside the sample; needs >= 100.
std::vector<LagSummary> empirical_tail_process(const std::vector<double>& data, double u, int h);

// Blocks with an exceedance of u; marks are the block's exceedances scaled
// by the block's largest |X|.
ClusterDistribution empirical_cluster_law(const std::vector<double>& data, const BlockingScheme& scheme, double u);

struct TailDiagnostics {
    double alpha_hat = 0.0;
    double an_hat = 0.0;
    double theta_hat = 0.0;
    std::vector<CurvePoint> anticluster_curve;
    std::size_t sign_switch_violations = 0;
    std::vector<SmallJumpPoint> small_jump_curve;
};

}  // namespace snlab
