#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "snlab/cadlag.hpp"
#include "snlab/models.hpp"
#include "snlab/tail_inference.hpp"

namespace snlab {

// Atoms (time, mark) with nonzero marks. n > 0 marks a sample-based measure
// with atom times i/n; n = 0 is a simulated measure with arbitrary times.
struct PointMeasure {
    std::vector<double> times;
    std::vector<double> marks;
    std::size_t n = 0;
    std::size_t size() const { return times.size(); }
};

PointMeasure build_point_measure(const std::vector<double>& data, double a_n);

struct CenteringConstants {
    double b1n = 0.0;
    double b2n = 0.0;
    bool heavy_regime = false;  // alpha >= 1: centering applied
    double se1 = 0.0;           // Monte Carlo standard errors, 0 for closed form
    double se2 = 0.0;
    std::string method = "none";  // none | closed_form | monte_carlo
};

struct CenteringOptions {
    double u = 1.0;  // truncation level of the centering moments
    std::size_t mc_size = 1000000;
    std::uint64_t seed = 0;
    double max_se = std::numeric_limits<double>::infinity();  // absolute SE tolerance on b1n
};

// b1n = E[(X/a_n) 1{|X|/a_n <= u}], b2n = E[(X^2/a_n^2) 1{|X|/a_n <= u}] for
// alpha >= 1, zero below. Closed form for the i.i.d. Pareto model.
CenteringConstants centering_constants(const ModelSpec& spec, double a_n, std::size_t n,
                                       const CenteringOptions& opt = {});

struct JointPathPair {
    CadlagPath l1n = CadlagPath::constant(0.0);
    CadlagPath l2n = CadlagPath::constant(0.0);
    std::size_t n = 0;
    double a_n = 1.0;
    bool centered = false;
    double u = std::numeric_limits<double>::quiet_NaN();  // NaN: no truncation
    double b1n = 0.0;
    double b2n = 0.0;
};

// L_1n(k/n) = sum_{i<=k} X_i/a_n - k b1n, L_2n(k/n) = sum_{i<=k} (X_i/a_n)^2 - k b2n
JointPathPair build_Ln(const std::vector<double>& data, double a_n, const CenteringConstants& c = {});

// Phi^(u): only atoms with |mark| > u, squared marks in the second coordinate.
JointPathPair truncate_Ln(const PointMeasure& pm, double u);

// t -> S_{floor(nt)} / V_n with V_n^2 = sum X_k^2, breakpoints k/n.
CadlagPath self_normalized_path(const std::vector<double>& data);
std::vector<double> self_normalized_values(const std::vector<double>& data, const std::vector<double>& t_grid);

// Keeps the breakpoints j r_n / n (value S_{j r_n}) and the endpoint 1 with
// the full sum, merging each block's jumps into one.
CadlagPath collapse_clusters(const CadlagPath& path, const BlockingScheme& scheme);

// "# kind=step d=2", "# n=.. an=.. u=..|none b1n=.. b2n=..", "t,l1,l2", rows
void write_joint_csv(std::ostream& os, const JointPathPair& p);

}  // namespace snlab
