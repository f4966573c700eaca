#include <algorithm>
#include <cmath>
#include <functional>

#include "snlab/errors.hpp"
#include "snlab/stats.hpp"
#include "snlab/tail_inference.hpp"

namespace snlab {

BlockingScheme BlockingScheme::from_exponent(std::size_t n, double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw PreconditionError("block exponent kappa must lie in (0,1)");
    if (n == 0) throw PreconditionError("n must be positive");
    BlockingScheme s;
    s.r_n = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), kappa)));
    s.r_n = std::clamp<std::size_t>(s.r_n, 1, n);
    return s;
}

void BlockingScheme::validate(std::size_t n) const {
    if (r_n < 1 || r_n > n) {
        throw PreconditionError("block length r_n=" + std::to_string(r_n) + " outside [1, " + std::to_string(n) + "]");
    }
}

namespace {

std::vector<double> abs_values(const std::vector<double>& data) {
    std::vector<double> a(data.size());
    std::transform(data.begin(), data.end(), a.begin(), [](double v) { return std::fabs(v); });
    return a;
}

}  // namespace

double hill_alpha(const std::vector<double>& data, std::size_t k) {
    if (k == 0) throw PreconditionError("hill_alpha: k must be positive");
    if (k >= data.size()) throw PreconditionError("hill_alpha: k must be below the sample size");
    auto a = abs_values(data);
    std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), a.end(), std::greater<>());
    const double ref = a[k];
    if (!(ref > 0.0)) throw PreconditionError("hill_alpha: fewer than k+1 nonzero values");
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::log(a[i] / ref);
    if (!(s > 0.0)) throw PreconditionError("hill_alpha: degenerate ties in the upper order statistics");
    return static_cast<double>(k) / s;
}

double empirical_an(const std::vector<double>& pooled, std::size_t n) {
    if (n < 2) throw PreconditionError("empirical_an: n must be at least 2");
    if (pooled.empty()) throw PreconditionError("empirical_an: empty sample");
    return quantile(abs_values(pooled), 1.0 - 1.0 / static_cast<double>(n));
}

double abs_threshold(const std::vector<double>& data, double level) {
    if (!(level > 0.0 && level < 1.0)) throw PreconditionError("threshold level must lie in (0,1)");
    const std::size_t n = data.size();
    const auto k = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - level)));
    if (k == 0 || k >= n) throw PreconditionError("threshold level leaves no exceedances");
    auto a = abs_values(data);
    auto it = a.begin() + static_cast<std::ptrdiff_t>(n - k - 1);
    std::nth_element(a.begin(), it, a.end());
    return *it;
}

double extremal_index_blocks(const std::vector<double>& data, const BlockingScheme& scheme, double u) {
    scheme.validate(data.size());
    const std::size_t r = scheme.r_n, kb = scheme.k_n(data.size());
    std::size_t blocks = 0, exceed = 0;
    for (std::size_t b = 0; b < kb; ++b) {
        bool hit = false;
        for (std::size_t i = b * r; i < (b + 1) * r; ++i) {
            if (std::fabs(data[i]) > u) {
                ++exceed;
                hit = true;
            }
        }
        blocks += hit;
    }
    if (exceed == 0) throw PreconditionError("extremal_index_blocks: no exceedances of the threshold");
    return std::min(1.0, static_cast<double>(blocks) / static_cast<double>(exceed));
}

std::vector<CurvePoint> anticluster_diagnostic(const std::vector<double>& data, const BlockingScheme& scheme,
                                               double u, const std::vector<std::size_t>& m_grid) {
    if (!(u > 0.0)) throw PreconditionError("anticluster_diagnostic: u must be positive");
    const std::size_t n = data.size();
    scheme.validate(n);
    const std::size_t r = scheme.r_n;
    for (auto m : m_grid) {
        if (m < 1 || m > r) throw PreconditionError("anticluster_diagnostic: m outside [1, r_n]");
    }
    std::vector<std::size_t> anchors;
    for (std::size_t t = r; t + r < n; ++t) {
        if (std::fabs(data[t]) > u) anchors.push_back(t);
    }
    if (anchors.empty()) throw PreconditionError("anticluster_diagnostic: no anchor exceedances");
    // the farthest exceeding lag below r_n answers every m at once
    std::vector<CurvePoint> out;
    std::vector<std::size_t> farthest(anchors.size(), 0);
    for (std::size_t a = 0; a < anchors.size(); ++a) {
        const std::size_t t = anchors[a];
        for (std::size_t i = r - 1; i >= 1; --i) {
            if (std::fabs(data[t + i]) > u || std::fabs(data[t - i]) > u) {
                farthest[a] = i;
                break;
            }
        }
    }
    for (auto m : m_grid) {
        std::size_t hits = 0;
        for (std::size_t a = 0; a < anchors.size(); ++a) hits += farthest[a] >= m;
        out.push_back({static_cast<double>(m), static_cast<double>(hits) / static_cast<double>(anchors.size()),
                       anchors.size()});
    }
    return out;
}

SignSwitchResult sign_switch_diagnostic(const std::vector<double>& data, const BlockingScheme& scheme, double u) {
    scheme.validate(data.size());
    SignSwitchResult res;
    const std::size_t r = scheme.r_n, kb = scheme.k_n(data.size());
    for (std::size_t b = 0; b < kb; ++b) {
        std::size_t pos = 0, neg = 0;
        for (std::size_t i = b * r; i < (b + 1) * r; ++i) {
            if (std::fabs(data[i]) > u) (data[i] > 0 ? pos : neg) += 1;
        }
        if (pos + neg > 0) ++res.exceeding_blocks;
        if (pos + neg > 1) ++res.multi_blocks;
        if (pos > 0 && neg > 0) ++res.violations;
    }
    return res;
}

std::vector<SmallJumpPoint> small_jump_diagnostic(const std::vector<std::vector<double>>& replicates, double a_n,
                                                  const std::vector<double>& u_grid, double delta, bool center,
                                                  const RegVarSpec* canonical) {
    if (!(delta > 0.0)) throw PreconditionError("small_jump_diagnostic: delta must be positive");
    if (!(a_n > 0.0)) throw PreconditionError("small_jump_diagnostic: a_n must be positive");
    if (replicates.empty()) throw PreconditionError("small_jump_diagnostic: no replicates");
    std::vector<SmallJumpPoint> out;
    for (double u : u_grid) {
        if (!(u > 0.0)) throw PreconditionError("small_jump_diagnostic: u must be positive");
        double c1 = 0.0, c2 = 0.0;
        if (center) {
            if (canonical) {
                const double lvl = u * a_n;
                c1 = (canonical->p - canonical->q()) * pareto_truncated_moment(*canonical, 1, lvl) / a_n;
                c2 = pareto_truncated_moment(*canonical, 2, lvl) / (a_n * a_n);
            } else {
                double s1 = 0.0, s2 = 0.0;
                std::size_t cnt = 0;
                for (const auto& rep : replicates) {
                    for (double x : rep) {
                        double y = x / a_n;
                        if (std::fabs(y) <= u) {
                            s1 += y;
                            s2 += y * y;
                        }
                        ++cnt;
                    }
                }
                c1 = s1 / static_cast<double>(cnt);
                c2 = s2 / static_cast<double>(cnt);
            }
        }
        std::size_t e1 = 0, e2 = 0;
        for (const auto& rep : replicates) {
            double s1 = 0.0, s2 = 0.0, m1 = 0.0, m2 = 0.0;
            for (double x : rep) {
                double y = x / a_n;
                bool keep = std::fabs(y) <= u;
                s1 += (keep ? y : 0.0) - c1;
                s2 += (keep ? y * y : 0.0) - c2;
                m1 = std::max(m1, std::fabs(s1));
                m2 = std::max(m2, std::fabs(s2));
            }
            e1 += m1 > delta;
            e2 += m2 > delta;
        }
        const double R = static_cast<double>(replicates.size());
        out.push_back({u, static_cast<double>(e1) / R, static_cast<double>(e2) / R, replicates.size()});
    }
    return out;
}

std::vector<LagSummary> empirical_tail_process(const std::vector<double>& data, double u, int h) {
    if (!(u > 0.0)) throw PreconditionError("empirical_tail_process: u must be positive");
    if (h < 0) throw PreconditionError("empirical_tail_process: lag window must be nonnegative");
    const std::size_t H = static_cast<std::size_t>(h), n = data.size();
    std::vector<std::size_t> anchors;
    for (std::size_t t = H; t + H < n; ++t) {
        if (std::fabs(data[t]) > u) anchors.push_back(t);
    }
    if (anchors.size() < 100) {
        throw PreconditionError("empirical_tail_process: " + std::to_string(anchors.size()) +
                                " anchors, at least 100 needed");
    }
    const std::vector<double> levels{0.05, 0.25, 0.5, 0.75, 0.95};
    std::vector<LagSummary> out;
    for (int lag = -h; lag <= h; ++lag) {
        std::vector<double> ty, th;
        std::size_t small = 0;
        for (auto t : anchors) {
            double x = data[static_cast<std::size_t>(static_cast<long long>(t) + lag)];
            ty.push_back(x / u);
            double ratio = x / std::fabs(data[t]);
            th.push_back(ratio);
            small += std::fabs(ratio) < 0.05;
        }
        LagSummary s;
        s.lag = lag;
        s.anchors = anchors.size();
        s.levels = levels;
        std::sort(ty.begin(), ty.end());
        std::sort(th.begin(), th.end());
        for (double l : levels) {
            s.tail_q.push_back(quantile_sorted(ty, l));
            s.spectral_q.push_back(quantile_sorted(th, l));
        }
        s.near_zero = static_cast<double>(small) / static_cast<double>(anchors.size());
        out.push_back(std::move(s));
    }
    return out;
}

ClusterDistribution empirical_cluster_law(const std::vector<double>& data, const BlockingScheme& scheme, double u) {
    scheme.validate(data.size());
    const std::size_t r = scheme.r_n, kb = scheme.k_n(data.size());
    std::vector<std::vector<double>> clusters;
    for (std::size_t b = 0; b < kb; ++b) {
        double mx = 0.0;
        for (std::size_t i = b * r; i < (b + 1) * r; ++i) mx = std::max(mx, std::fabs(data[i]));
        if (!(mx > u)) continue;
        std::vector<double> marks;
        for (std::size_t i = b * r; i < (b + 1) * r; ++i) {
            if (std::fabs(data[i]) > u) marks.push_back(std::fabs(data[i]) == mx ? std::copysign(1.0, data[i]) : data[i] / mx);
        }
        clusters.push_back(std::move(marks));
    }
    if (clusters.empty()) throw PreconditionError("empirical_cluster_law: no block exceeds the threshold");
    return ClusterDistribution::empirical(std::move(clusters));
}

}  // namespace snlab
