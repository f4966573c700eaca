#include "snlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snlab {

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe r;
    r.count = xs.size();
    if (xs.empty()) return r;
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    r.mean = m;
    if (xs.size() > 1) {
        double var = ss / static_cast<double>(xs.size() - 1);
        r.se = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return r;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_critical(std::size_t na, std::size_t nb, double level) {
    double c = std::sqrt(-0.5 * std::log(level / 2.0));
    double a = static_cast<double>(na), b = static_cast<double>(nb);
    return c * std::sqrt((a + b) / (a * b));
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    // integrate |F_a - F_b| over the merged support
    std::vector<double> pts;
    pts.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(pts));
    double total = 0.0;
    std::size_t i = 0, j = 0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        while (i < a.size() && a[i] <= pts[k]) ++i;
        while (j < b.size() && b[j] <= pts[k]) ++j;
        total += std::fabs(i / na - j / nb) * (pts[k + 1] - pts[k]);
    }
    return total;
}

double quantile_sorted(const std::vector<double>& s, double level) {
    if (s.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(level >= 0.0 && level <= 1.0)) throw std::domain_error("quantile: level outside [0,1]");
    double h = level * static_cast<double>(s.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, s.size() - 1);
    return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double quantile(std::vector<double> xs, double level) {
    if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(level >= 0.0 && level <= 1.0)) throw std::domain_error("quantile: level outside [0,1]");
    double h = level * static_cast<double>(xs.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto it = xs.begin() + static_cast<std::ptrdiff_t>(lo);
    std::nth_element(xs.begin(), it, xs.end());
    double a = *it;
    if (lo + 1 >= xs.size()) return a;
    double b = *std::min_element(it + 1, xs.end());
    return a + (h - static_cast<double>(lo)) * (b - a);
}

}  // namespace snlab
