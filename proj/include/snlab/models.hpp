#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "snlab/cluster.hpp"

namespace snlab {

// Two-sided Pareto law: P(|X| > x) = (x/scale)^-alpha for x >= scale,
// sign positive with probability p.
struct RegVarSpec {
    double alpha = 1.0;
    double p = 1.0;
    double scale = 1.0;
    double q() const { return 1.0 - p; }
    void validate() const;
};

struct IidModel {
    RegVarSpec rv;
};

// X_i = sum_{j=0}^{m} phi_j Z_{i-j}
struct LinearModel {
    std::vector<double> coeffs;
    RegVarSpec innovation;
};

// sigma_k^2 = omega + (a1 Z_{k-1}^2 + b1) sigma_{k-1}^2, X_k = sigma_k Z_k,
// Z standard normal. burn_in = 0 picks the default length.
struct GarchModel {
    double omega = 1.0;
    double a1 = 0.0;
    double b1 = 0.0;
    std::size_t burn_in = 0;
};

// (X_k^2, sigma_k^2) of the inner GARCH(1,1)
struct SquaredGarchModel {
    GarchModel inner;
};

using ModelSpec = std::variant<IidModel, LinearModel, GarchModel, SquaredGarchModel>;

std::string model_name(const ModelSpec& spec);

struct SeriesSample {
    std::vector<double> values;  // first coordinate
    std::vector<double> second;  // second coordinate, squared GARCH only
    std::vector<double> sigma2;  // volatility, GARCH only
    std::uint64_t seed = 0;
    ModelSpec spec;
    double tail_index = 0.0;  // of `values`
    std::string warning;
    std::size_t dim() const { return second.empty() ? 1 : 2; }
};

SeriesSample sample_iid(const RegVarSpec& spec, std::size_t n, std::uint64_t seed);
SeriesSample sample_linear(const LinearModel& spec, std::size_t n, std::uint64_t seed);
SeriesSample sample_garch(const GarchModel& spec, std::size_t n, std::uint64_t seed);
SeriesSample sample_squared_garch(const SquaredGarchModel& spec, std::size_t n, std::uint64_t seed);
SeriesSample sample_model(const ModelSpec& spec, std::size_t n, std::uint64_t seed);

double linear_tail_ratio(const LinearModel& spec);
double linear_extremal_index(const LinearModel& spec);
ClusterDistribution linear_cluster_law(const LinearModel& spec);

std::size_t garch_burn_in(const GarchModel& spec);

// Root alpha in (0,2] of E[(a1 Z^2 + b1)^alpha] = 1: the tail index of
// sigma^2 and X^2 (X itself has index 2 alpha).
double solve_garch_alpha(const GarchModel& spec, double tol = 1e-10);
// E[(a1 Z^2 + b1)^alpha] by quadrature
double garch_moment(const GarchModel& spec, double alpha);

// Analytic model constants, where known.
struct ModelTail {
    double alpha = 0.0;  // tail index of the (first) coordinate
    double p = 0.5;      // positive-tail weight
    double theta = 1.0;  // extremal index, NaN if unknown
    bool analytic_an = false;
};
ModelTail model_tail(const ModelSpec& spec);

// E[|X|^order 1{|X| <= level}] for the two-sided Pareto law, order in {1,2}.
double pareto_truncated_moment(const RegVarSpec& rv, int order, double level);

// a_n with n P(|X| > a_n) -> 1, for i.i.d. and linear models.
double analytic_an(const ModelSpec& spec, std::size_t n);

void write_sample_csv(std::ostream& os, const SeriesSample& s);

}  // namespace snlab
