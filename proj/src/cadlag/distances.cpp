#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "graph.hpp"
#include "snlab/cadlag.hpp"
#include "snlab/errors.hpp"

namespace snlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> merged_times(const CadlagPath& x, const CadlagPath& y) {
    std::vector<double> ts;
    ts.reserve(x.size() + y.size() + 1);
    std::merge(x.times().begin(), x.times().end(), y.times().begin(), y.times().end(), std::back_inserter(ts));
    ts.push_back(1.0);
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

void require_same_dim(const CadlagPath& x, const CadlagPath& y) {
    if (x.dim() != y.dim()) {
        throw PreconditionError("dimension mismatch: " + std::to_string(x.dim()) + " vs " + std::to_string(y.dim()));
    }
}

}  // namespace

double uniform_distance(const CadlagPath& x, const CadlagPath& y) {
    require_same_dim(x, y);
    double d = 0.0;
    for (double t : merged_times(x, y)) {
        for (std::size_t c = 0; c < x.dim(); ++c) {
            d = std::max(d, std::fabs(eval1(x, t, c) - eval1(y, t, c)));
            if (t > 0.0) d = std::max(d, std::fabs(left_limit1(x, t, c) - left_limit1(y, t, c)));
        }
    }
    return d;
}

// ---------------------------------------------------------------- J1

namespace {

struct Jumps {
    double v0 = 0.0;
    std::vector<double> at;     // jump times, 1-based use via at[k-1]
    std::vector<double> after;  // value after each jump
    double value(std::size_t k) const { return k == 0 ? v0 : after[k - 1]; }
};

Jumps jumps_of(const CadlagPath& x) {
    Jumps j;
    j.v0 = x.values()[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (x.values()[i] != x.values()[i - 1]) {
            j.at.push_back(x.times()[i]);
            j.after.push_back(x.values()[i]);
        }
    }
    return j;
}

// Is there an increasing homeomorphism lambda with |lambda - id| <= eps and
// |x o lambda - y| <= eps? row[b] holds the earliest time at which the
// first a jumps of x (moved) and b jumps of y can have occurred.
bool j1_feasible(const Jumps& X, const Jumps& Y, double eps) {
    const std::size_t nx = X.at.size(), ny = Y.at.size();
    if (std::fabs(X.v0 - Y.v0) > eps) return false;
    std::vector<double> row(ny + 1, kInf), next(ny + 1, kInf);
    row[0] = 0.0;
    for (std::size_t a = 0;; ++a) {
        const double xa = X.value(a);
        for (std::size_t b = 1; b <= ny; ++b) {
            double tb = Y.at[b - 1];
            if (row[b - 1] < tb && std::fabs(xa - Y.value(b)) <= eps) row[b] = std::min(row[b], tb);
        }
        if (a == nx) break;
        std::fill(next.begin(), next.end(), kInf);
        const double s = X.at[a];
        const double xn = X.value(a + 1);
        bool any = false;
        for (std::size_t b = 0; b <= ny; ++b) {
            const double tau = row[b];
            if (tau == kInf) continue;
            // x jump alone, placed as early as allowed
            if (std::fabs(xn - Y.value(b)) <= eps) {
                if (s < 1.0) {
                    double p = std::max(tau, s - eps);
                    bool before_next = b == ny || p < Y.at[b];
                    if (p <= s + eps && p < 1.0 && before_next) {
                        next[b] = std::min(next[b], p);
                        any = true;
                    }
                } else if (b == ny && tau < 1.0) {
                    next[b] = std::min(next[b], 1.0);
                    any = true;
                }
            }
            // x jump aligned with y jump b+1
            if (b < ny) {
                double tb = Y.at[b];
                bool ends_match = (s == 1.0) == (tb == 1.0);
                if (tb > tau && std::fabs(tb - s) <= eps && ends_match && std::fabs(xn - Y.value(b + 1)) <= eps) {
                    next[b + 1] = std::min(next[b + 1], tb);
                    any = true;
                }
            }
        }
        if (!any) return false;
        std::swap(row, next);
    }
    return row[ny] < kInf;
}

}  // namespace

double j1_distance(const CadlagPath& x, const CadlagPath& y) {
    if (x.kind() != PathKind::Step || y.kind() != PathKind::Step) {
        throw PreconditionError("j1_distance needs step paths; apply step_refinement to piecewise-linear input");
    }
    if (x.dim() != 1 || y.dim() != 1) throw PreconditionError("j1_distance: one coordinate expected");
    Jumps X = jumps_of(x), Y = jumps_of(y);
    // symmetric by construction: always solve with the lexicographically smaller path first
    if (std::tie(Y.v0, Y.at, Y.after) < std::tie(X.v0, X.at, X.after)) std::swap(X, Y);
    double lo = std::max(std::fabs(X.v0 - Y.v0), std::fabs(eval1(x, 1.0) - eval1(y, 1.0)));
    double hi = uniform_distance(x, y);
    if (hi == 0.0) return 0.0;
    if (j1_feasible(X, Y, lo)) return lo;
    hi = hi * (1.0 + 1e-12) + 1e-300;
    const double width = 1e-12 * hi;
    while (hi - lo > width) {
        double mid = 0.5 * (lo + hi);
        if (j1_feasible(X, Y, mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

// ------------------------------------------------------- monotone M1

bool is_monotone_nondecreasing(const CadlagPath& x) {
    for (std::size_t c = 0; c < x.dim(); ++c) {
        const auto& v = x.values(c);
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v[i] < v[i - 1]) return false;
        }
    }
    return true;
}

namespace {

double right_at(const CadlagPath& f, double s) { return eval1(f, std::clamp(s, 0.0, 1.0)); }
double left_at(const CadlagPath& f, double s) {
    s = std::clamp(s, 0.0, 1.0);
    return s > 0.0 ? left_limit1(f, s) : eval1(f, 0.0);
}

// Every point of the completed graph of g lies within eps of the graph of f.
// For nondecreasing f the graph over [t-eps, t+eps] covers [f((t-eps)-), f(t+eps)].
bool covered(const CadlagPath& f, const CadlagPath& g, const std::vector<double>& crit, double eps) {
    for (double c : crit) {
        double g_r = eval1(g, c);
        double g_l = c > 0.0 ? left_limit1(g, c) : g_r;
        if (g_r > right_at(f, c + eps) + eps) return false;
        if (g_l > (c + eps >= 1.0 ? right_at(f, 1.0) : left_at(f, c + eps)) + eps) return false;
        if (g_l < left_at(f, c - eps) - eps) return false;
        if (g_r < (c - eps <= 0.0 ? right_at(f, 0.0) : right_at(f, c - eps)) - eps) return false;
    }
    return true;
}

bool monotone_feasible(const CadlagPath& x, const CadlagPath& y, double eps) {
    std::vector<double> crit{0.0, 1.0, std::min(eps, 1.0), std::max(1.0 - eps, 0.0)};
    for (const CadlagPath* p : {&x, &y}) {
        for (double t : p->times()) {
            crit.push_back(t);
            if (t + eps <= 1.0) crit.push_back(t + eps);
            if (t - eps >= 0.0) crit.push_back(t - eps);
        }
    }
    std::sort(crit.begin(), crit.end());
    crit.erase(std::unique(crit.begin(), crit.end()), crit.end());
    return covered(x, y, crit, eps) && covered(y, x, crit, eps);
}

}  // namespace

double monotone_m1_distance(const CadlagPath& x, const CadlagPath& y) {
    if (x.dim() != 1 || y.dim() != 1) throw PreconditionError("monotone_m1_distance: one coordinate expected");
    if (!is_monotone_nondecreasing(x) || !is_monotone_nondecreasing(y)) {
        throw PreconditionError("monotone_m1_distance: input path is not nondecreasing");
    }
    double hi = uniform_distance(x, y);
    if (hi == 0.0) return 0.0;
    double lo = 0.0;
    if (monotone_feasible(x, y, lo)) return lo;
    hi = hi * (1.0 + 1e-12) + 1e-300;
    const double width = 1e-12 * hi;
    while (hi - lo > width) {
        double mid = 0.5 * (lo + hi);
        if (monotone_feasible(x, y, mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

}  // namespace snlab
