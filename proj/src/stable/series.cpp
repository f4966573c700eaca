#include <algorithm>
#include <cmath>
#include <numeric>

#include "snlab/errors.hpp"
#include "snlab/rng.hpp"
#include "snlab/stable.hpp"

namespace snlab {

namespace {

// Typical truncation level for N points: P_N = (Gamma_N/theta)^{-1/alpha}
// with Gamma_N ~ N.
double typical_level(const CharTriple& t, std::size_t n) {
    return std::pow(static_cast<double>(n) / t.theta, -1.0 / t.alpha);
}

LevyRemainder remainder_at(const CharTriple& t, double u) {
    const double a = t.alpha, th = t.theta, q = 1.0 - t.p;
    LevyRemainder r;
    r.level = u;
    // Points below u have intensity theta alpha y^{-alpha-1} on (0,u).
    if (a < 1.0) {
        r.mean1 = th * a * t.mean_sum * std::pow(u, 1.0 - a) / (1.0 - a);
    } else {
        // atoms above u minus (p-q) alpha int_u^1 x^{-alpha} dx; the
        // compensated small atoms have mean 0, variance from whole clusters
        r.compensator = a == 1.0 ? (t.p - q) * -std::log(u) : (t.p - q) * a * (std::pow(u, 1.0 - a) - 1.0) / (a - 1.0);
    }
    r.sd1 = std::sqrt(th * a * t.mean_sum2 * std::pow(u, 2.0 - a) / (2.0 - a));
    r.mean2 = th * a * t.mean_sq * std::pow(u, 2.0 - a) / (2.0 - a);
    r.sd2 = std::sqrt(th * a * t.mean_sq2 * std::pow(u, 4.0 - a) / (4.0 - a));
    return r;
}

void check_options(const CharTriple& t, const SeriesOptions& opt) {
    if (opt.n_points < 1000) throw PreconditionError("series needs at least 10^3 points");
    if (!(t.alpha > 0.0 && t.alpha < 2.0)) throw PreconditionError("alpha must lie in (0,2)");
    if (!(t.theta > 0.0 && t.theta <= 1.0)) throw PreconditionError("theta must lie in (0,1]");
}

struct Draw {
    std::vector<double> times, l1, l2;  // sorted breakpoints with values
    double u = 0.0;
    double l2_raw_1 = 0.0;
    LevyRemainder rem;
};

Draw generate(const CharTriple& t, const ClusterDistribution& cluster, const SeriesOptions& opt, std::uint64_t seed,
              const std::vector<double>& extra) {
    const double a = t.alpha;
    const std::size_t N = opt.n_points;
    Rng rng(seed);
    std::vector<double> T(N), J1(N), J2(N);
    double gam = 0.0;
    std::vector<double> P(N);
    std::vector<std::vector<double>> eta(N);
    for (std::size_t i = 0; i < N; ++i) {
        gam += rng.exponential();
        P[i] = std::pow(gam / t.theta, -1.0 / a);
        T[i] = rng.uniform();
        eta[i] = cluster.sample(rng);
    }
    const double u = P[N - 1];
    Draw d;
    d.u = u;
    d.rem = remainder_at(t, u);
    for (std::size_t i = 0; i < N; ++i) {
        double s1 = 0.0, s2 = 0.0;
        for (double e : eta[i]) {
            double x = P[i] * e;
            if (a < 1.0 || std::fabs(x) > u) s1 += x;
            s2 += x * x;
        }
        J1[i] = s1;
        J2[i] = s2;
    }

    // breakpoints: 0, 1, grid k/G, extra times, jump times
    std::vector<double> times;
    times.reserve(N + opt.grid + extra.size() + 1);
    times.push_back(0.0);
    times.push_back(1.0);
    for (std::size_t k = 1; k <= opt.grid; ++k) times.push_back(static_cast<double>(k) / opt.grid);
    for (double x : extra) times.push_back(x);
    for (double x : T) times.push_back(x);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());

    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return T[x] < T[y]; });

    // L_2 keeps only the remainder mean: its fluctuation (sd2) is of
    // smaller order and a Gaussian term could make the path decrease.
    const double centre2 = a >= 1.0 ? a / (2.0 - a) : 0.0;
    const double drift1 = d.rem.mean1 - d.rem.compensator;
    const double drift2 = d.rem.mean2 - centre2;
    d.times = times;
    d.l1.resize(times.size());
    d.l2.resize(times.size());
    double s1 = 0.0, s2 = 0.0, b1 = 0.0;
    std::size_t next = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0) b1 += d.rem.sd1 * std::sqrt(times[k] - times[k - 1]) * rng.normal();
        while (next < N && T[order[next]] <= times[k]) {
            s1 += J1[order[next]];
            s2 += J2[order[next]];
            ++next;
        }
        d.l1[k] = s1 + drift1 * times[k] + b1;
        d.l2[k] = s2 + drift2 * times[k];
    }
    d.l2_raw_1 = s2 + d.rem.mean2 * times.back();
    return d;
}

}  // namespace

LevyRemainder series_remainder(const CharTriple& t, const SeriesOptions& opt) {
    check_options(t, opt);
    LevyRemainder r = remainder_at(t, typical_level(t, opt.n_points));
    if (t.alpha >= 1.0) {
        double scale = std::pow(stable_params(t).c, 1.0 / t.alpha);
        if (r.sd1 > opt.max_remainder_sd * scale) {
            throw NumericalError("series truncation too coarse: remainder sd above tolerance", r.sd1 / scale);
        }
    }
    return r;
}

JointPathPair simulate_levy_pair(const CharTriple& t, const ClusterDistribution& cluster, const SeriesOptions& opt,
                                 std::uint64_t seed) {
    series_remainder(t, opt);
    Draw d = generate(t, cluster, opt, seed, {});
    JointPathPair out;
    out.l1n = CadlagPath::step(d.times, std::move(d.l1));
    out.l2n = CadlagPath::step(std::move(d.times), std::move(d.l2));
    out.n = 0;
    out.a_n = 1.0;
    out.u = d.u;
    out.centered = t.alpha >= 1.0;
    out.b1n = d.rem.compensator;
    out.b2n = t.alpha >= 1.0 ? t.alpha / (2.0 - t.alpha) : 0.0;
    return out;
}

LevyDraw simulate_levy_values(const CharTriple& t, const ClusterDistribution& cluster, const SeriesOptions& opt,
                              std::uint64_t seed, const std::vector<double>& t_grid) {
    series_remainder(t, opt);
    for (double x : t_grid) {
        if (!(x >= 0.0 && x <= 1.0)) throw PreconditionError("evaluation times must lie in [0,1]");
    }
    Draw d = generate(t, cluster, opt, seed, t_grid);
    LevyDraw out;
    for (double x : t_grid) {
        auto it = std::upper_bound(d.times.begin(), d.times.end(), x);
        std::size_t k = static_cast<std::size_t>(it - d.times.begin()) - 1;
        out.l1.push_back(d.l1[k]);
        out.l2.push_back(d.l2[k]);
    }
    out.l2_raw_1 = d.l2_raw_1;
    return out;
}

}  // namespace snlab
