#pragma once

#include <cstddef>
#include <vector>

namespace snlab {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t count = 0;
};

MeanSe mean_se(const std::vector<double>& xs);

// Two-sample Kolmogorov-Smirnov statistic sup|F_a - F_b|, in [0,1].
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic two-sample KS critical value at level `level` (e.g. 0.01).
double ks_critical(std::size_t na, std::size_t nb, double level);

// Wasserstein-1 distance between two empirical laws.
double wasserstein1(std::vector<double> a, std::vector<double> b);

// Type-7 quantile (linear interpolation between order statistics).
double quantile(std::vector<double> xs, double level);
double quantile_sorted(const std::vector<double>& sorted, double level);

}  // namespace snlab
