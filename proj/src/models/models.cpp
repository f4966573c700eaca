#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "snlab/cadlag.hpp"
#include "snlab/errors.hpp"
#include "snlab/models.hpp"

namespace snlab {

// ---------------------------------------------------------------- clusters

ClusterDistribution ClusterDistribution::singleton(double p) {
    ClusterDistribution c;
    c.templates = {{1.0}};
    c.weights = {1.0};
    c.random_sign = true;
    c.p = p;
    c.anchor_probs = {1.0};
    c.source = "analytic";
    return c;
}

ClusterDistribution ClusterDistribution::empirical(std::vector<std::vector<double>> clusters) {
    if (clusters.empty()) throw PreconditionError("empirical cluster law needs at least one cluster");
    ClusterDistribution c;
    c.templates = std::move(clusters);
    c.weights.assign(c.templates.size(), 1.0 / static_cast<double>(c.templates.size()));
    c.source = "empirical";
    c.validate();
    return c;
}

std::vector<double> ClusterDistribution::sample(Rng& rng) const {
    std::size_t k = 0;
    if (templates.size() > 1) {
        double u = rng.uniform(), acc = 0.0;
        for (k = 0; k + 1 < weights.size(); ++k) {
            acc += weights[k];
            if (u < acc) break;
        }
    }
    std::vector<double> marks = templates[k];
    if (random_sign) {
        double s = rng.uniform() < p ? 1.0 : -1.0;
        for (double& m : marks) m *= s;
    }
    return marks;
}

void ClusterDistribution::validate() const {
    if (templates.empty() || templates.size() != weights.size()) {
        throw PreconditionError("cluster law: one weight per template required");
    }
    for (const auto& t : templates) {
        double mx = 0.0;
        for (double v : t) {
            if (!std::isfinite(v)) throw PreconditionError("cluster law: non-finite mark");
            mx = std::max(mx, std::fabs(v));
        }
        if (std::fabs(mx - 1.0) > 1e-12) throw PreconditionError("cluster law: marks must have max |eta| = 1");
    }
    if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("cluster law: p outside [0,1]");
}

// ---------------------------------------------------------------- specs

void RegVarSpec::validate() const {
    if (!(alpha > 0.0 && alpha < 2.0)) throw PreconditionError("alpha must lie in (0,2)");
    if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("p must lie in [0,1]");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw PreconditionError("scale must be positive");
}

namespace {

void validate_linear(const LinearModel& m) {
    m.innovation.validate();
    if (m.coeffs.empty()) throw PreconditionError("linear model needs at least one coefficient");
    bool any = false;
    for (double c : m.coeffs) {
        if (!std::isfinite(c)) throw PreconditionError("linear coefficients must be finite");
        any = any || c != 0.0;
    }
    if (!any) throw PreconditionError("linear model: all coefficients are zero");
}

double pareto_draw(Rng& rng, const RegVarSpec& s) {
    double mag = s.scale * std::pow(rng.uniform(), -1.0 / s.alpha);
    return rng.uniform() < s.p ? mag : -mag;
}

double sum_abs_pow(const std::vector<double>& phi, double alpha) {
    double s = 0.0;
    for (double c : phi) s += std::pow(std::fabs(c), alpha);
    return s;
}

}  // namespace

std::string model_name(const ModelSpec& spec) {
    switch (spec.index()) {
        case 0: return "iid";
        case 1: return "linear";
        case 2: return "garch";
        default: return "squared_garch";
    }
}

SeriesSample sample_iid(const RegVarSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (n == 0) throw PreconditionError("sample size must be positive");
    SeriesSample s;
    s.seed = seed;
    s.spec = IidModel{spec};
    s.tail_index = spec.alpha;
    s.values.resize(n);
    Rng rng(seed);
    for (auto& v : s.values) v = pareto_draw(rng, spec);
    return s;
}

SeriesSample sample_linear(const LinearModel& spec, std::size_t n, std::uint64_t seed) {
    validate_linear(spec);
    if (n == 0) throw PreconditionError("sample size must be positive");
    const std::size_t m = spec.coeffs.size() - 1;
    std::vector<double> z(n + m);
    Rng rng(seed);
    for (auto& v : z) v = pareto_draw(rng, spec.innovation);
    SeriesSample s;
    s.seed = seed;
    s.spec = spec;
    s.tail_index = spec.innovation.alpha;
    if (std::accumulate(spec.coeffs.begin(), spec.coeffs.end(), 0.0) == 0.0) {
        s.warning = "coefficients sum to zero: cluster sums vanish and the stable limit degenerates";
    }
    s.values.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= m; ++j) acc += spec.coeffs[j] * z[i + m - j];
        s.values[i] = acc;
    }
    return s;
}

double linear_tail_ratio(const LinearModel& spec) {
    validate_linear(spec);
    return sum_abs_pow(spec.coeffs, spec.innovation.alpha);
}

double linear_extremal_index(const LinearModel& spec) {
    validate_linear(spec);
    double mx = 0.0;
    for (double c : spec.coeffs) mx = std::max(mx, std::fabs(c));
    return std::pow(mx, spec.innovation.alpha) / sum_abs_pow(spec.coeffs, spec.innovation.alpha);
}

// The cluster generated by one extreme innovation Z is (phi_j Z)_j; scaled
// by its largest modulus it is (phi_j / max|phi|) sign(Z) whichever lag M
// anchors the tail process, so the M-law only enters as metadata.
ClusterDistribution linear_cluster_law(const LinearModel& spec) {
    validate_linear(spec);
    const double a = spec.innovation.alpha;
    double mx = 0.0;
    for (double c : spec.coeffs) mx = std::max(mx, std::fabs(c));
    ClusterDistribution c;
    std::vector<double> marks;
    for (double phi : spec.coeffs) marks.push_back(phi / mx);
    c.templates = {marks};
    c.weights = {1.0};
    c.random_sign = true;
    c.p = spec.innovation.p;
    const double tot = sum_abs_pow(spec.coeffs, a);
    for (double phi : spec.coeffs) c.anchor_probs.push_back(std::pow(std::fabs(phi), a) / tot);
    c.source = "analytic";
    return c;
}

SeriesSample sample_model(const ModelSpec& spec, std::size_t n, std::uint64_t seed) {
    return std::visit(
        [&](const auto& m) -> SeriesSample {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IidModel>) return sample_iid(m.rv, n, seed);
            else if constexpr (std::is_same_v<T, LinearModel>) return sample_linear(m, n, seed);
            else if constexpr (std::is_same_v<T, GarchModel>) return sample_garch(m, n, seed);
            else return sample_squared_garch(m, n, seed);
        },
        spec);
}

ModelTail model_tail(const ModelSpec& spec) {
    ModelTail t;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (auto* m = std::get_if<IidModel>(&spec)) {
        m->rv.validate();
        t = {m->rv.alpha, m->rv.p, 1.0, true};
    } else if (auto* l = std::get_if<LinearModel>(&spec)) {
        const double a = l->innovation.alpha, p = l->innovation.p;
        double pos = 0.0;
        for (double c : l->coeffs) {
            if (c > 0) pos += std::pow(c, a) * p;
            else if (c < 0) pos += std::pow(-c, a) * (1.0 - p);
        }
        t = {a, pos / linear_tail_ratio(*l), linear_extremal_index(*l), true};
    } else if (auto* g = std::get_if<GarchModel>(&spec)) {
        t = {2.0 * solve_garch_alpha(*g), 0.5, nan, false};
    } else {
        t = {solve_garch_alpha(std::get<SquaredGarchModel>(spec).inner), 1.0, nan, false};
    }
    return t;
}

double pareto_truncated_moment(const RegVarSpec& rv, int order, double level) {
    rv.validate();
    if (order != 1 && order != 2) throw PreconditionError("truncated moment order must be 1 or 2");
    const double s = rv.scale, a = rv.alpha, k = order;
    if (level <= s) return 0.0;
    // int_s^level x^k alpha s^alpha x^{-alpha-1} dx
    if (a == k) return a * std::pow(s, a) * std::log(level / s);
    return a * std::pow(s, a) * (std::pow(level, k - a) - std::pow(s, k - a)) / (k - a);
}

double analytic_an(const ModelSpec& spec, std::size_t n) {
    if (n == 0) throw PreconditionError("n must be positive");
    const double dn = static_cast<double>(n);
    if (auto* m = std::get_if<IidModel>(&spec)) return m->rv.scale * std::pow(dn, 1.0 / m->rv.alpha);
    if (auto* l = std::get_if<LinearModel>(&spec)) {
        const auto& z = l->innovation;
        return z.scale * std::pow(linear_tail_ratio(*l) * dn, 1.0 / z.alpha);
    }
    throw PreconditionError("no closed-form a_n for " + model_name(spec) + "; use the empirical quantile");
}

void write_sample_csv(std::ostream& os, const SeriesSample& s) {
    os << (s.dim() == 2 ? "i,x2,sigma2" : (s.sigma2.empty() ? "i,x" : "i,x,sigma2")) << '\n';
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        os << i + 1 << ',' << fmt_double(s.values[i]);
        if (s.dim() == 2) os << ',' << fmt_double(s.second[i]);
        else if (!s.sigma2.empty()) os << ',' << fmt_double(s.sigma2[i]);
        os << '\n';
    }
}

}  // namespace snlab
