#include <cmath>
#include <sstream>

#include "snlab/cadlag.hpp"
#include "snlab/errors.hpp"
#include "snlab/rng.hpp"
#include "snlab/stable.hpp"

namespace snlab {

namespace {

struct Acc {
    double s = 0.0, s2 = 0.0;
    void add(double v) {
        s += v;
        s2 += v * v;
    }
    double mean(double m) const { return s / m; }
    double se(double m) const {
        double mu = s / m;
        double var = std::max(0.0, s2 / m - mu * mu);
        return std::sqrt(var / m);
    }
};

}  // namespace

CharTriple triple_from_cluster(double alpha, double theta, const ClusterDistribution& cluster, double p, double q,
                               std::size_t mc_size, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw PreconditionError("alpha must lie in (0,2)");
    if (!(theta > 0.0 && theta <= 1.0)) throw PreconditionError("theta must lie in (0,1]");
    if (!(p >= 0.0 && q >= 0.0 && std::fabs(p + q - 1.0) < 1e-12)) throw PreconditionError("need p, q >= 0, p + q = 1");
    if (mc_size < 10000) throw PreconditionError("mc_size must be at least 10^4");
    cluster.validate();

    Rng rng(stream_seed(seed, "triple"));
    Acc cp, cm, r2, u1, u2, w1, w2, lg;
    for (std::size_t k = 0; k < mc_size; ++k) {
        std::vector<double> eta = cluster.sample(rng);
        double u = 0.0, w = 0.0, etalog = 0.0;
        for (double e : eta) {
            u += e;
            w += e * e;
            if (e != 0.0) etalog += e * std::log(std::fabs(e));
        }
        cp.add(u > 0.0 ? std::pow(u, alpha) : 0.0);
        cm.add(u < 0.0 ? std::pow(-u, alpha) : 0.0);
        r2.add(std::pow(w, alpha / 2.0));
        u1.add(u);
        u2.add(u * u);
        w1.add(w);
        w2.add(w * w);
        // sum_j eta_j log|U/eta_j| = U log|U| - sum_j eta_j log|eta_j|, 0 log 0 = 0
        if (alpha == 1.0) lg.add((u != 0.0 ? u * std::log(std::fabs(u)) : 0.0) - etalog);
    }
    const double m = static_cast<double>(mc_size);
    CharTriple t;
    t.alpha = alpha;
    t.theta = theta;
    t.p = p;
    t.c_plus = cp.mean(m);
    t.c_minus = cm.mean(m);
    t.se_c_plus = cp.se(m);
    t.se_c_minus = cm.se(m);
    t.r2 = r2.mean(m);
    t.se_r2 = r2.se(m);
    t.mean_sum = u1.mean(m);
    t.mean_sum2 = u2.mean(m);
    t.mean_sq = w1.mean(m);
    t.mean_sq2 = w2.mean(m);
    t.gamma2 = theta * alpha / (2.0 - alpha) * t.r2;
    if (alpha < 1.0) {
        t.gamma1 = theta * alpha * (t.c_plus - t.c_minus) / (1.0 - alpha);
    } else if (alpha > 1.0) {
        t.gamma1 = alpha / (alpha - 1.0) * (p - q - theta * (t.c_plus - t.c_minus));
    } else {
        // difference between cluster-level and atom-level truncation
        t.gamma1 = -theta * lg.mean(m);
        t.gamma1_numerical = true;
    }
    return t;
}

std::string to_record(const CharTriple& t) {
    std::ostringstream os;
    os << "{alpha=" << fmt_double(t.alpha) << ", theta=" << fmt_double(t.theta) << ", p=" << fmt_double(t.p)
       << ", c_plus=" << fmt_double(t.c_plus) << ", c_minus=" << fmt_double(t.c_minus)
       << ", gamma1=" << fmt_double(t.gamma1) << ", r2=" << fmt_double(t.r2) << ", gamma2=" << fmt_double(t.gamma2)
       << ", regime=" << t.regime() << ", se_c_plus=" << fmt_double(t.se_c_plus)
       << ", se_c_minus=" << fmt_double(t.se_c_minus) << ", se_r2=" << fmt_double(t.se_r2)
       << ", gamma1_numerical=" << (t.gamma1_numerical ? "true" : "false") << "}";
    return os.str();
}

std::string to_record(const StableParams& sp) {
    std::ostringstream os;
    os << "{alpha=" << fmt_double(sp.alpha) << ", c=" << fmt_double(sp.c) << ", beta=" << fmt_double(sp.beta)
       << ", tau=" << fmt_double(sp.tau) << "}";
    return os.str();
}

}  // namespace snlab
