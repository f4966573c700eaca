#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace snlab {

enum class PathKind { Step, Linear };

// Right-continuous path on [0,1] with finitely many breakpoints.
// Step paths are constant on [t_i, t_{i+1}); linear paths interpolate
// continuously between breakpoints. Both are constant after the last one.
class CadlagPath {
public:
    CadlagPath(std::vector<double> times, std::vector<std::vector<double>> coords, PathKind kind);

    static CadlagPath step(std::vector<double> times, std::vector<double> values);
    static CadlagPath linear(std::vector<double> times, std::vector<double> values);
    static CadlagPath constant(double value, std::size_t dim = 1);

    PathKind kind() const { return kind_; }
    std::size_t dim() const { return coords_.size(); }
    std::size_t size() const { return times_.size(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& values(std::size_t coord = 0) const { return coords_.at(coord); }
    CadlagPath coordinate(std::size_t coord) const;

    // breakpoints where some coordinate differs from its left limit
    std::size_t jump_count() const;

    friend bool operator==(const CadlagPath& a, const CadlagPath& b) {
        return a.kind_ == b.kind_ && a.times_ == b.times_ && a.coords_ == b.coords_;
    }

private:
    std::vector<double> times_;
    std::vector<std::vector<double>> coords_;
    PathKind kind_;
};

std::vector<double> eval(const CadlagPath& x, double t);
double eval1(const CadlagPath& x, double t, std::size_t coord = 0);
std::vector<double> left_limit(const CadlagPath& x, double t);
double left_limit1(const CadlagPath& x, double t, std::size_t coord = 0);

// Thin completed graph: the vertical segment [x(t-), x(t)] at each jump.
struct CompletedGraph {
    struct Segment {
        double t;
        double from;  // x(t-)
        double to;    // x(t)
    };
    std::vector<Segment> segments;
};
CompletedGraph completed_graph(const CadlagPath& x, std::size_t coord = 0);

// Samples (r_i, u_i) of a parametric representation of a completed graph.
struct ParametricRep {
    std::vector<double> r;
    std::vector<double> u;
    std::size_t resolution() const { return r.size(); }
};

// Representation of x's completed graph with `resolution` samples
// (at least one per graph vertex).
ParametricRep parametric_representation(const CadlagPath& x, std::size_t resolution);

bool on_completed_graph(const CadlagPath& x, double r, double u, double tol = 1e-9);
bool is_valid_representation(const CadlagPath& x, const ParametricRep& rep, double tol = 1e-9);

double uniform_distance(const CadlagPath& x, const CadlagPath& y);

// Smallest resolution accepted by m1_distance for this pair.
std::size_t min_resolution(const CadlagPath& x, const CadlagPath& y);

struct M1Result {
    double value = 0.0;        // feasible level, never below the true distance
    double lower = 0.0;        // certified infeasible level (true distance >= lower)
    double upper_bound = 0.0;  // uniform distance
    double tolerance = 0.0;    // bracket width target derived from the resolution
    bool gap_flag = false;     // value - lower exceeded the caller tolerance
};

// Strong M1 distance of two one-coordinate paths. The decision problem
// "is there a pair of representations within eps" is solved exactly by a
// reachability sweep over the segment grid of the two completed graphs;
// eps is bracketed until the gap is below upper_bound / resolution^2.
M1Result m1_distance_report(const CadlagPath& x, const CadlagPath& y, std::size_t resolution,
                            double caller_tol = std::numeric_limits<double>::infinity());
double m1_distance(const CadlagPath& x, const CadlagPath& y, std::size_t resolution);
double m1_distance(const CadlagPath& x, const CadlagPath& y);

// A pair of representations achieving the reported M1 value.
struct M1Coupling {
    ParametricRep x_rep;
    ParametricRep y_rep;
    double value = 0.0;
};
M1Coupling m1_coupling(const CadlagPath& x, const CadlagPath& y, std::size_t resolution);

// Max over coordinates of m1_distance.
double weak_m1_distance(const CadlagPath& x, const CadlagPath& y, std::size_t resolution);
double weak_m1_distance(const CadlagPath& x, const CadlagPath& y);

// J1 distance between step paths, solved by bisection over a
// jump-alignment reachability table (earliest placement of each jump).
double j1_distance(const CadlagPath& x, const CadlagPath& y);

bool is_monotone_nondecreasing(const CadlagPath& x);
double monotone_m1_distance(const CadlagPath& x, const CadlagPath& y);

// Pointwise x/y on the merged grid; y must be positive, continuous and
// nondecreasing.
CadlagPath ratio_path(const CadlagPath& x, const CadlagPath& y);

struct ProductResult {
    CadlagPath path;
    bool opposite_jump_warning = false;
};
ProductResult product_path(const CadlagPath& x, const CadlagPath& y);

// Step approximation of a path: each linear piece becomes `pieces` steps
// taking the left-end value of every sub-interval. Step paths pass through.
CadlagPath step_refinement(const CadlagPath& x, std::size_t pieces);

// CSV: "# kind=step|pl d=<dim>", optional extra comment lines, optional
// column header, then rows "t,v1[,v2]".
void write_path_csv(std::ostream& os, const CadlagPath& x,
                    const std::vector<std::string>& extra_comments = {},
                    const std::string& column_header = "");
CadlagPath read_path_csv(std::istream& is);
CadlagPath read_path_csv_file(const std::string& filename);

// %.17g rendering shared by every text artifact
std::string fmt_double(double v);

}  // namespace snlab
