#pragma once

#include <string>
#include <vector>

#include "snlab/rng.hpp"

namespace snlab {

// Law of a normalized cluster (eta_j) with max_j |eta_j| = 1.
// Analytic laws are a finite mixture of mark templates, each optionally
// multiplied by an independent sign (+1 w.p. p, -1 w.p. 1-p). Empirical
// laws resample observed clusters uniformly and carry their own signs.
struct ClusterDistribution {
    std::vector<std::vector<double>> templates;
    std::vector<double> weights;  // mixture weights, sum to 1
    bool random_sign = false;
    double p = 1.0;
    std::vector<double> anchor_probs;  // P(M = m) for linear laws, empty otherwise
    std::string source;                // "analytic" or "empirical"

    static ClusterDistribution singleton(double p);
    static ClusterDistribution empirical(std::vector<std::vector<double>> clusters);

    std::vector<double> sample(Rng& rng) const;
    void validate() const;  // every template has max |mark| = 1
};

}  // namespace snlab
