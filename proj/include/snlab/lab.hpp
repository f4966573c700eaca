#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "snlab/models.hpp"
#include "snlab/partial_sums.hpp"
#include "snlab/stable.hpp"
#include "snlab/tail_inference.hpp"

namespace snlab {

using Json = nlohmann::ordered_json;

struct ExperimentConfig {
    ModelSpec model = IidModel{{0.5, 1.0, 1.0}};
    std::vector<std::size_t> n_grid{100, 1000, 10000};
    std::size_t replicates = 2000;
    std::size_t limit_draws = 2000;
    std::size_t series_points = 1000;
    std::vector<double> t_grid{0.25, 0.5, 0.75, 1.0};
    double u = 0.1;
    double kappa = 1.0 / 3.0;  // r_n = ceil(n^kappa)
    std::uint64_t seed = 42;
    unsigned workers = 0;  // 0: hardware concurrency
    std::size_t triple_mc = 100000;

    // J1 vs M1 contrast
    std::vector<double> contrast_phi{1.0, 1.0};
    std::vector<std::size_t> contrast_n{100, 1000, 4000};
    std::size_t contrast_replicates = 100;

    // Karamata truncated moments (canonical Pareto)
    std::vector<double> karamata_alpha{0.5, 0.8};
    std::vector<double> karamata_u{0.05, 0.1, 0.5};
    std::vector<double> karamata_n{1e4, 1e6, 1e8};
    std::size_t karamata_mc = 1000000;

    // small-jump bound
    double slutsky_alpha = 0.5;
    std::vector<double> slutsky_u{0.01, 0.05, 0.1};
    std::vector<double> slutsky_eps{0.5, 1.0, 2.0};
    std::size_t slutsky_n = 10000;
    std::size_t slutsky_replicates = 500;

    std::map<std::string, double> tolerances;  // filled by default_tolerances()

    BlockingScheme scheme(std::size_t n) const { return BlockingScheme::from_exponent(n, kappa); }
    double tolerance(const std::string& key) const;  // throws if absent
    void validate() const;
};

std::map<std::string, double> default_tolerances();
ExperimentConfig default_config();

struct Verdict {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string tolerance;  // config key the threshold came from
    std::string detail;
};

struct ConvergenceReport {
    std::string check;
    std::vector<Json> rows;  // every row carries n, t or grid keys, replicates, seed derivation
    std::vector<Verdict> verdicts;
    std::optional<Json> diagnostics;
    double runtime_seconds = 0.0;
    bool passed() const;
};


// KS between replicate L_1n(t), L_2n(t) and series draws of L_1(t), L_2(t).
ConvergenceReport run_fidi_convergence(const ExperimentConfig& cfg);

// KS between replicate S_[nt]/V_n and L_1(t)/sqrt(L_2(1)) from shared points.
ConvergenceReport run_selfnorm_convergence(const ExperimentConfig& cfg);

// m1 and j1 distances between L_1n and its cluster-collapsed version.
ConvergenceReport run_j1_vs_m1_contrast(const ExperimentConfig& cfg);

// Stratified Monte Carlo truncated moments against the Karamata limits.
ConvergenceReport run_karamata_check(const ExperimentConfig& cfg);

// Truncated moments of the canonical Pareto law, by stratified sampling.
struct TruncatedMoment {
    double first = 0.0, se_first = 0.0;
    double second = 0.0, se_second = 0.0;
};
TruncatedMoment karamata_moments(double alpha, double n, double u, std::size_t mc, std::uint64_t seed);
double karamata_limit_first(double alpha, double u);
double karamata_limit_second(double alpha, double u);

// P(sup_t |L_n - L_n^(u)| > eps) against eps^{-1} alpha u^{1-alpha}(1/(1-alpha) + u/(2-alpha)).
ConvergenceReport run_slutsky_bound_check(const ExperimentConfig& cfg);
double slutsky_bound(double alpha, double u, double eps);

// Tail-inference diagnostics on one sample of the configured model.
ConvergenceReport run_diagnostics(const ExperimentConfig& cfg);

struct SuiteResult {
    std::vector<ConvergenceReport> reports;
    std::vector<std::string> failures;  // verdict names that failed or errored checks
    bool passed() const { return failures.empty(); }
};

// Runs every check, recording errors as failed verdicts, and writes the
// bundle (report.jsonl, paths/*.csv, summary.txt, manifest.json,
// runtime.json) into out_dir.
SuiteResult run_full_suite(const ExperimentConfig& cfg, const std::string& out_dir);

// JSON text with every float printed as %.17g
std::string dump_json(const Json& j);

// Canonical JSON echo of a config with every field, defaults included.
Json config_to_json(const ExperimentConfig& cfg);

// One replicate of (L_1n, L_2n) at sample size n, and one path of the
// simulated limit pair.
JointPathPair sample_data_pair(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed);
JointPathPair sample_limit_pair(const ExperimentConfig& cfg, std::uint64_t seed);

// Characteristic triple of the configured model's limit.
CharTriple limit_triple(const ExperimentConfig& cfg);

}  // namespace snlab
