#include <algorithm>
#include <cmath>
#include <ostream>

#include "snlab/errors.hpp"
#include "snlab/partial_sums.hpp"
#include "snlab/stats.hpp"

namespace snlab {

namespace {

std::vector<double> grid_times(std::size_t n) {
    std::vector<double> t(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t[k] = static_cast<double>(k) / static_cast<double>(n);
    return t;
}

}  // namespace

PointMeasure build_point_measure(const std::vector<double>& data, double a_n) {
    if (!(a_n > 0.0)) throw PreconditionError("build_point_measure: a_n must be positive");
    PointMeasure pm;
    pm.n = data.size();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i] == 0.0) continue;
        pm.times.push_back(static_cast<double>(i + 1) / static_cast<double>(data.size()));
        pm.marks.push_back(data[i] / a_n);
    }
    return pm;
}

CenteringConstants centering_constants(const ModelSpec& spec, double a_n, std::size_t n, const CenteringOptions& opt) {
    if (!(a_n > 0.0)) throw PreconditionError("centering_constants: a_n must be positive");
    if (!(opt.u > 0.0)) throw PreconditionError("centering_constants: u must be positive");
    (void)n;
    CenteringConstants c;
    const ModelTail tail = model_tail(spec);
    if (tail.alpha < 1.0) return c;
    c.heavy_regime = true;
    if (auto* m = std::get_if<IidModel>(&spec)) {
        const auto& rv = m->rv;
        const double lvl = opt.u * a_n;
        c.b1n = (rv.p - rv.q()) * pareto_truncated_moment(rv, 1, lvl) / a_n;
        c.b2n = pareto_truncated_moment(rv, 2, lvl) / (a_n * a_n);
        c.method = "closed_form";
        return c;
    }
    auto s = sample_model(spec, opt.mc_size, opt.seed);
    std::vector<double> t1(s.values.size()), t2(s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        double y = s.values[i] / a_n;
        bool keep = std::fabs(y) <= opt.u;
        t1[i] = keep ? y : 0.0;
        t2[i] = keep ? y * y : 0.0;
    }
    auto m1 = mean_se(t1), m2 = mean_se(t2);
    if (m1.se > opt.max_se) {
        throw NumericalError("centering_constants: Monte Carlo SE " + fmt_double(m1.se) +
                                 " above tolerance; increase mc_size",
                             m1.se);
    }
    c.b1n = m1.mean;
    c.b2n = m2.mean;
    c.se1 = m1.se;
    c.se2 = m2.se;
    c.method = "monte_carlo";
    return c;
}

JointPathPair build_Ln(const std::vector<double>& data, double a_n, const CenteringConstants& c) {
    if (data.empty()) throw PreconditionError("build_Ln: empty data");
    if (!(a_n > 0.0)) throw PreconditionError("build_Ln: a_n must be positive");
    const std::size_t n = data.size();
    std::vector<double> v1(n + 1, 0.0), v2(n + 1, 0.0);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        double y = data[k - 1] / a_n;
        s1 += y;
        s2 += y * y;
        v1[k] = s1 - static_cast<double>(k) * c.b1n;
        v2[k] = s2 - static_cast<double>(k) * c.b2n;
    }
    auto t = grid_times(n);
    JointPathPair p;
    p.l1n = CadlagPath::step(t, std::move(v1));
    p.l2n = CadlagPath::step(std::move(t), std::move(v2));
    p.n = n;
    p.a_n = a_n;
    p.centered = c.b1n != 0.0 || c.b2n != 0.0;
    p.b1n = c.b1n;
    p.b2n = c.b2n;
    return p;
}

JointPathPair truncate_Ln(const PointMeasure& pm, double u) {
    if (!(u > 0.0)) throw PreconditionError("truncate_Ln: u must be positive");
    JointPathPair p;
    p.u = u;
    p.n = pm.n;
    if (pm.n > 0) {
        // sample grid: atom i sits at breakpoint round(t n)
        std::vector<double> v1(pm.n + 1, 0.0), v2(pm.n + 1, 0.0);
        std::vector<double> add1(pm.n + 1, 0.0), add2(pm.n + 1, 0.0);
        for (std::size_t a = 0; a < pm.size(); ++a) {
            if (!(std::fabs(pm.marks[a]) > u)) continue;
            auto k = static_cast<std::size_t>(std::llround(pm.times[a] * static_cast<double>(pm.n)));
            add1[k] += pm.marks[a];
            add2[k] += pm.marks[a] * pm.marks[a];
        }
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t k = 1; k <= pm.n; ++k) {
            s1 += add1[k];
            s2 += add2[k];
            v1[k] = s1;
            v2[k] = s2;
        }
        auto t = grid_times(pm.n);
        p.l1n = CadlagPath::step(t, std::move(v1));
        p.l2n = CadlagPath::step(std::move(t), std::move(v2));
        return p;
    }
    std::vector<std::size_t> idx;
    for (std::size_t a = 0; a < pm.size(); ++a) {
        if (std::fabs(pm.marks[a]) > u) idx.push_back(a);
    }
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return pm.times[a] < pm.times[b]; });
    std::vector<double> t{0.0}, v1{0.0}, v2{0.0};
    for (auto a : idx) {
        double m = pm.marks[a];
        if (pm.times[a] == t.back()) {
            v1.back() += m;
            v2.back() += m * m;
        } else {
            t.push_back(pm.times[a]);
            v1.push_back(v1.back() + m);
            v2.push_back(v2.back() + m * m);
        }
    }
    p.l1n = CadlagPath::step(t, std::move(v1));
    p.l2n = CadlagPath::step(std::move(t), std::move(v2));
    return p;
}

CadlagPath self_normalized_path(const std::vector<double>& data) {
    if (data.empty()) throw PreconditionError("self_normalized_path: empty data");
    // Divide by max|x| first. If the data are rescaled by lambda without
    // rounding, each x_i / max|x| is the same correctly rounded quotient,
    // so the result is bitwise invariant for any such lambda.
    double mx = 0.0;
    for (double x : data) {
        if (!std::isfinite(x)) throw NumericalError("self_normalized_path: non-finite value", x);
        mx = std::max(mx, std::fabs(x));
    }
    if (!(mx > 0.0)) throw PreconditionError("self_normalized_path: V_n = 0 (all-zero data)");
    const std::size_t n = data.size();
    std::vector<double> y(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = data[i] / mx;
        ss += y[i] * y[i];
    }
    const double vn = std::sqrt(ss);
    std::vector<double> v(n + 1, 0.0);
    double s = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        s += y[k - 1];
        v[k] = s / vn;
    }
    return CadlagPath::step(grid_times(n), std::move(v));
}

std::vector<double> self_normalized_values(const std::vector<double>& data, const std::vector<double>& t_grid) {
    auto path = self_normalized_path(data);
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) out.push_back(eval1(path, t));
    return out;
}

CadlagPath collapse_clusters(const CadlagPath& path, const BlockingScheme& scheme) {
    if (path.kind() != PathKind::Step) throw PreconditionError("collapse_clusters: step path expected");
    const std::size_t n = path.size() - 1;
    if (n == 0) return path;
    scheme.validate(n);
    const std::size_t r = scheme.r_n;
    std::vector<double> t;
    std::vector<std::vector<double>> v(path.dim());
    for (std::size_t k = 0; k <= n; k += r) {
        t.push_back(path.times()[k]);
        for (std::size_t c = 0; c < path.dim(); ++c) v[c].push_back(path.values(c)[k]);
    }
    if (n % r != 0) {
        t.push_back(path.times()[n]);
        for (std::size_t c = 0; c < path.dim(); ++c) v[c].push_back(path.values(c)[n]);
    }
    return CadlagPath(std::move(t), std::move(v), PathKind::Step);
}

void write_joint_csv(std::ostream& os, const JointPathPair& p) {
    if (p.l1n.times() != p.l2n.times()) throw PreconditionError("write_joint_csv: paths must share breakpoints");
    CadlagPath both(p.l1n.times(), {p.l1n.values(), p.l2n.values()}, PathKind::Step);
    std::string meta = "n=" + std::to_string(p.n) + " an=" + fmt_double(p.a_n) +
                       " u=" + (std::isnan(p.u) ? std::string("none") : fmt_double(p.u)) +
                       " b1n=" + fmt_double(p.b1n) + " b2n=" + fmt_double(p.b2n);
    write_path_csv(os, both, {meta}, "t,l1,l2");
}

}  // namespace snlab
