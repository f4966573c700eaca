#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>

#include "snlab/errors.hpp"
#include "snlab/lab.hpp"
#include "snlab/parallel.hpp"
#include "snlab/partial_sums.hpp"
#include "snlab/rng.hpp"
#include "snlab/stable.hpp"
#include "snlab/stats.hpp"
#include "snlab/tail_inference.hpp"

namespace snlab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

unsigned workers_of(const ExperimentConfig& cfg) { return cfg.workers ? cfg.workers : default_workers(); }

std::string seed_note(const std::string& tag) { return "stream_seed(seed,\"" + tag + "\") ^ r"; }

Verdict make_verdict(const ExperimentConfig& cfg, const std::string& name, double value, const std::string& key,
                     bool upper, const std::string& detail = {}) {
    Verdict v;
    v.name = name;
    v.value = value;
    v.tolerance = key;
    v.threshold = cfg.tolerance(key);
    v.pass = upper ? value <= v.threshold : value >= v.threshold;
    v.detail = detail;
    return v;
}

// ------------------------------------------------------------ limit setup

struct LimitSetup {
    CharTriple triple;
    ClusterDistribution cluster;
    double theta = 1.0;
    bool analytic = true;
};

double pilot_an(const ModelSpec& spec, std::size_t n, std::uint64_t seed) {
    std::size_t m = std::max<std::size_t>(1000000, 100 * n);
    return empirical_an(sample_model(spec, m, stream_seed(seed, "pilot-an")).values, n);
}

double model_an(const ModelSpec& spec, std::size_t n, std::uint64_t seed) {
    if (std::holds_alternative<IidModel>(spec) || std::holds_alternative<LinearModel>(spec)) {
        return analytic_an(spec, n);
    }
    return pilot_an(spec, n, seed);
}

LimitSetup limit_setup(const ExperimentConfig& cfg) {
    ModelTail mt = model_tail(cfg.model);
    if (!(mt.alpha > 0.0 && mt.alpha < 2.0)) {
        throw PreconditionError("model tail index " + fmt_double(mt.alpha) + " is outside the stable range (0,2)");
    }
    LimitSetup s;
    if (const auto* iid = std::get_if<IidModel>(&cfg.model)) {
        s.cluster = ClusterDistribution::singleton(iid->rv.p);
        s.theta = 1.0;
    } else if (const auto* lin = std::get_if<LinearModel>(&cfg.model)) {
        s.cluster = linear_cluster_law(*lin);
        s.theta = linear_extremal_index(*lin);
    } else {
        // clusters and theta from a long pilot sample
        const std::size_t m = 1000000;
        auto x = sample_model(cfg.model, m, stream_seed(cfg.seed, "pilot-cluster")).values;
        BlockingScheme sch = BlockingScheme::from_exponent(m, cfg.kappa);
        double u = abs_threshold(x, 1.0 - 1.0 / (25.0 * static_cast<double>(sch.r_n)));
        s.cluster = empirical_cluster_law(x, sch, u);
        s.theta = extremal_index_blocks(x, sch, u);
        double pos = 0.0, tot = 0.0;
        for (double v : x) {
            if (std::fabs(v) > u) {
                tot += 1.0;
                pos += v > 0.0;
            }
        }
        mt.p = pos / tot;
        s.analytic = false;
    }
    s.triple = triple_from_cluster(mt.alpha, s.theta, s.cluster, mt.p, 1.0 - mt.p, cfg.triple_mc,
                                   stream_seed(cfg.seed, "triple"));
    return s;
}

std::size_t floor_index(std::size_t n, double t) {
    return std::min(n, static_cast<std::size_t>(std::floor(t * static_cast<double>(n) + 1e-9)));
}

struct LimitSample {
    std::vector<std::vector<double>> l1, l2;  // [t][draw]
    std::vector<std::vector<double>> sn;      // L_1(t) / sqrt(L_2(1))
};

LimitSample limit_sample(const ExperimentConfig& cfg, const LimitSetup& ls) {
    SeriesOptions opt;
    opt.n_points = cfg.series_points;
    opt.grid = 0;
    const std::size_t m = cfg.limit_draws, nt = cfg.t_grid.size();
    LimitSample out;
    out.l1.assign(nt, std::vector<double>(m));
    out.l2 = out.l1;
    out.sn = out.l1;
    const std::uint64_t base = stream_seed(cfg.seed, "limit");
    parallel_for(m, workers_of(cfg), [&](std::size_t r) {
        LevyDraw d = simulate_levy_values(ls.triple, ls.cluster, opt, base ^ r, cfg.t_grid);
        double root = std::sqrt(d.l2_raw_1);
        for (std::size_t k = 0; k < nt; ++k) {
            out.l1[k][r] = d.l1[k];
            out.l2[k][r] = d.l2[k];
            out.sn[k][r] = d.l1[k] / root;
        }
    });
    return out;
}

Json ks_row(const std::string& check, const std::string& quantity, std::size_t n, double t,
            const std::vector<double>& data, const std::vector<double>& limit, const std::string& seed_tag) {
    Json row;
    row["check"] = check;
    row["quantity"] = quantity;
    row["n"] = n;
    row["t"] = t;
    row["ks"] = ks_two_sample(data, limit);
    row["w1"] = wasserstein1(data, limit);
    row["replicates"] = data.size();
    row["limit_draws"] = limit.size();
    row["seed"] = seed_note(seed_tag);
    return row;
}

void check_replicates(const ExperimentConfig& cfg) {
    if (cfg.replicates < 200) throw PreconditionError("at least 200 replicates are required");
    if (cfg.limit_draws < 200) throw PreconditionError("at least 200 limit draws are required");
}

CenteringConstants data_centering(const ExperimentConfig& cfg, double an, std::size_t n) {
    CenteringOptions co;
    co.seed = stream_seed(cfg.seed, "centering");
    return centering_constants(cfg.model, an, n, co);
}

double ks_at(const std::vector<Json>& rows, const std::string& quantity, std::size_t n, double t) {
    for (const auto& r : rows) {
        if (r["quantity"] == quantity && r["n"].get<std::size_t>() == n && r["t"].get<double>() == t) {
            return r["ks"].get<double>();
        }
    }
    throw PreconditionError("no KS row for " + quantity);
}

void add_trend_rows(ConvergenceReport& rep, const ExperimentConfig& cfg, const std::vector<std::string>& quantities) {
    if (cfg.n_grid.size() < 2) return;
    for (const auto& q : quantities) {
        for (double t : cfg.t_grid) {
            Json row;
            row["check"] = rep.check;
            row["quantity"] = q;
            row["t"] = t;
            row["n_small"] = cfg.n_grid.front();
            row["n_large"] = cfg.n_grid.back();
            double a = ks_at(rep.rows, q, cfg.n_grid.front(), t), b = ks_at(rep.rows, q, cfg.n_grid.back(), t);
            row["ks_small"] = a;
            row["ks_large"] = b;
            row["decreasing"] = b < a;
            rep.rows.push_back(row);
        }
    }
}

}  // namespace

JointPathPair sample_data_pair(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed) {
    const double an = model_an(cfg.model, n, cfg.seed);
    auto x = sample_model(cfg.model, n, seed).values;
    return build_Ln(x, an, data_centering(cfg, an, n));
}

CharTriple limit_triple(const ExperimentConfig& cfg) {
    cfg.validate();
    return limit_setup(cfg).triple;
}

JointPathPair sample_limit_pair(const ExperimentConfig& cfg, std::uint64_t seed) {
    LimitSetup ls = limit_setup(cfg);
    SeriesOptions opt;
    opt.n_points = cfg.series_points;
    return simulate_levy_pair(ls.triple, ls.cluster, opt, seed);
}

// ------------------------------------------------------------ fidi

ConvergenceReport run_fidi_convergence(const ExperimentConfig& cfg) {
    auto t0 = Clock::now();
    cfg.validate();
    check_replicates(cfg);
    ConvergenceReport rep;
    rep.check = "fidi";
    LimitSetup ls = limit_setup(cfg);
    LimitSample lim = limit_sample(cfg, ls);
    const std::size_t nt = cfg.t_grid.size(), R = cfg.replicates;
    for (std::size_t n : cfg.n_grid) {
        const double an = model_an(cfg.model, n, cfg.seed);
        const CenteringConstants cc = data_centering(cfg, an, n);
        std::vector<std::vector<double>> l1(nt, std::vector<double>(R)), l2 = l1;
        const std::string tag = "fidi/n=" + std::to_string(n);
        const std::uint64_t base = stream_seed(cfg.seed, tag);
        parallel_for(R, workers_of(cfg), [&](std::size_t r) {
            auto x = sample_model(cfg.model, n, base ^ r).values;
            std::vector<double> s(n + 1, 0.0), q(n + 1, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                double y = x[i] / an;
                s[i + 1] = s[i] + y;
                q[i + 1] = q[i] + y * y;
            }
            for (std::size_t k = 0; k < nt; ++k) {
                std::size_t j = floor_index(n, cfg.t_grid[k]);
                double dj = static_cast<double>(j);
                l1[k][r] = s[j] - dj * cc.b1n;
                l2[k][r] = q[j] - dj * cc.b2n;
            }
        });
        for (std::size_t k = 0; k < nt; ++k) {
            rep.rows.push_back(ks_row(rep.check, "L1", n, cfg.t_grid[k], l1[k], lim.l1[k], tag));
            rep.rows.push_back(ks_row(rep.check, "L2", n, cfg.t_grid[k], l2[k], lim.l2[k], tag));
        }
    }
    add_trend_rows(rep, cfg, {"L1", "L2"});
    const std::size_t nmax = cfg.n_grid.back();
    rep.verdicts.push_back(make_verdict(cfg, "fidi_ks_l1", ks_at(rep.rows, "L1", nmax, 1.0), "fidi_ks", true,
                                        "KS of L_1n(1) vs L_1(1) at n=" + std::to_string(nmax)));
    rep.verdicts.push_back(make_verdict(cfg, "fidi_ks_l2", ks_at(rep.rows, "L2", nmax, 1.0), "fidi_ks", true,
                                        "KS of L_2n(1) vs L_2(1) at n=" + std::to_string(nmax)));
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

// ------------------------------------------------------------ self-normalized

ConvergenceReport run_selfnorm_convergence(const ExperimentConfig& cfg) {
    auto t0 = Clock::now();
    cfg.validate();
    check_replicates(cfg);
    ConvergenceReport rep;
    rep.check = "selfnorm";
    LimitSetup ls = limit_setup(cfg);
    LimitSample lim = limit_sample(cfg, ls);
    const bool centered = ls.triple.alpha >= 1.0;
    const std::size_t nt = cfg.t_grid.size(), R = cfg.replicates;
    for (std::size_t n : cfg.n_grid) {
        double an = 1.0;
        CenteringConstants cc;
        if (centered) {
            an = model_an(cfg.model, n, cfg.seed);
            cc = data_centering(cfg, an, n);
        }
        std::vector<std::vector<double>> sn(nt, std::vector<double>(R));
        const std::string tag = "selfnorm/n=" + std::to_string(n);
        const std::uint64_t base = stream_seed(cfg.seed, tag);
        parallel_for(R, workers_of(cfg), [&](std::size_t r) {
            auto x = sample_model(cfg.model, n, base ^ r).values;
            if (!centered) {
                auto v = self_normalized_values(x, cfg.t_grid);
                for (std::size_t k = 0; k < nt; ++k) sn[k][r] = v[k];
                return;
            }
            // centered numerator over the raw sum of squares
            std::vector<double> s(n + 1, 0.0);
            double qq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double y = x[i] / an;
                s[i + 1] = s[i] + y;
                qq += y * y;
            }
            double root = std::sqrt(qq);
            for (std::size_t k = 0; k < nt; ++k) {
                std::size_t j = floor_index(n, cfg.t_grid[k]);
                sn[k][r] = (s[j] - static_cast<double>(j) * cc.b1n) / root;
            }
        });
        for (std::size_t k = 0; k < nt; ++k) {
            rep.rows.push_back(ks_row(rep.check, "S/V", n, cfg.t_grid[k], sn[k], lim.sn[k], tag));
        }
    }
    add_trend_rows(rep, cfg, {"S/V"});
    const std::size_t nmax = cfg.n_grid.back();
    rep.verdicts.push_back(make_verdict(cfg, "selfnorm_ks", ks_at(rep.rows, "S/V", nmax, 1.0), "selfnorm_ks", true,
                                        "KS of S_n/V_n vs L_1(1)/sqrt(L_2(1)) at n=" + std::to_string(nmax)));
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

// ------------------------------------------------------------ J1 vs M1

ConvergenceReport run_j1_vs_m1_contrast(const ExperimentConfig& cfg) {
    auto t0 = Clock::now();
    cfg.validate();
    ConvergenceReport rep;
    rep.check = "contrast";
    RegVarSpec rv{0.8, 1.0, 1.0};
    if (const auto* iid = std::get_if<IidModel>(&cfg.model)) rv = iid->rv;
    if (const auto* lin = std::get_if<LinearModel>(&cfg.model)) rv = lin->innovation;
    const std::size_t R = cfg.contrast_replicates;
    if (R == 0) throw PreconditionError("contrast needs at least one replicate");

    struct Case {
        std::string name;
        LinearModel model;
    };
    std::vector<Case> cases{{"clustered", LinearModel{cfg.contrast_phi, rv}}, {"iid", LinearModel{{1.0}, rv}}};
    std::vector<double> med_m1_clustered;
    double order_frac_last = 0.0;
    for (const auto& cs : cases) {
        for (std::size_t n : cfg.contrast_n) {
            const double an = analytic_an(cs.model, n);
            CenteringConstants cc;
            if (rv.alpha >= 1.0) cc = centering_constants(cs.model, an, n, {1.0, 200000, stream_seed(cfg.seed, "centering")});
            const BlockingScheme sch = cfg.scheme(n);
            std::vector<double> m1(R), j1(R), share(R);
            const std::string tag = "contrast/" + cs.name + "/n=" + std::to_string(n);
            const std::uint64_t base = stream_seed(cfg.seed, tag);
            parallel_for(R, workers_of(cfg), [&](std::size_t r) {
                auto x = sample_linear(cs.model, n, base ^ r).values;
                CadlagPath path = build_Ln(x, an, cc).l1n;
                CadlagPath col = collapse_clusters(path, sch);
                m1[r] = m1_distance(path, col);
                j1[r] = j1_distance(path, col);
                double big = 0.0;
                const auto& cv = col.values();
                for (std::size_t k = 1; k < cv.size(); ++k) big = std::max(big, std::fabs(cv[k] - cv[k - 1]));
                share[r] = big > 0.0 ? j1[r] / big : 0.0;
            });
            double below = 0.0;
            for (std::size_t r = 0; r < R; ++r) below += m1[r] < j1[r];
            Json row;
            row["check"] = rep.check;
            row["case"] = cs.name;
            row["n"] = n;
            row["r_n"] = sch.r_n;
            row["replicates"] = R;
            row["median_m1"] = quantile(m1, 0.5);
            row["median_j1"] = quantile(j1, 0.5);
            row["q90_m1"] = quantile(m1, 0.9);
            row["q90_j1"] = quantile(j1, 0.9);
            row["median_j1_over_largest_jump"] = quantile(share, 0.5);
            row["frac_m1_below_j1"] = below / static_cast<double>(R);
            row["seed"] = seed_note(tag);
            rep.rows.push_back(row);
            if (cs.name == "clustered") {
                med_m1_clustered.push_back(quantile(m1, 0.5));
                order_frac_last = below / static_cast<double>(R);
            }
        }
    }
    rep.verdicts.push_back(make_verdict(cfg, "contrast_order", order_frac_last, "contrast_order_frac", false,
                                        "fraction of clustered replicates with m1 < j1 at the largest n"));
    double ratio = med_m1_clustered.front() > 0.0 ? med_m1_clustered.back() / med_m1_clustered.front() : 0.0;
    rep.verdicts.push_back(make_verdict(cfg, "contrast_m1_shrinks", ratio, "contrast_m1_ratio", true,
                                        "median m1 at the largest n over median m1 at the smallest n"));
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

// ------------------------------------------------------------ Karamata

double karamata_limit_first(double alpha, double u) { return std::pow(u, 1.0 - alpha) * alpha / (1.0 - alpha); }
double karamata_limit_second(double alpha, double u) { return std::pow(u, 2.0 - alpha) * alpha / (2.0 - alpha); }

TruncatedMoment karamata_moments(double alpha, double n, double u, std::size_t mc, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("Karamata check needs alpha in (0,1)");
    if (!(u > 0.0) || !(n >= 1.0)) throw PreconditionError("Karamata check needs u > 0, n >= 1");
    const double an = std::pow(n, 1.0 / alpha);
    const double b = u * an;  // |X| ranges over [1, b] inside the window
    TruncatedMoment out;
    if (b <= 1.0) return out;
    // log-spaced strata of the Pareto law on [1, b], inverse-cdf draws
    const std::size_t K = 64;
    const std::size_t per = std::max<std::size_t>(2, mc / K);
    Rng rng(stream_seed(seed, "karamata"));
    double m1 = 0.0, v1 = 0.0, m2 = 0.0, v2 = 0.0;
    const double lb = std::log(b);
    for (std::size_t k = 0; k < K; ++k) {
        double lo = std::exp(lb * k / K), hi = std::exp(lb * (k + 1) / K);
        double flo = std::pow(lo, -alpha), fhi = std::pow(hi, -alpha);
        double pk = flo - fhi;
        double s1 = 0.0, q1 = 0.0, s2 = 0.0, q2 = 0.0;
        for (std::size_t i = 0; i < per; ++i) {
            double x = std::pow(flo - rng.uniform() * pk, -1.0 / alpha);
            double y = x / an;
            s1 += y;
            q1 += y * y;
            s2 += y * y;
            q2 += y * y * y * y;
        }
        double dp = static_cast<double>(per);
        double mean1 = s1 / dp, mean2 = s2 / dp;
        m1 += pk * mean1;
        m2 += pk * mean2;
        v1 += pk * pk * std::max(0.0, q1 / dp - mean1 * mean1) / (dp - 1.0);
        v2 += pk * pk * std::max(0.0, q2 / dp - mean2 * mean2) / (dp - 1.0);
    }
    out.first = n * m1;
    out.se_first = n * std::sqrt(v1);
    out.second = n * m2;
    out.se_second = n * std::sqrt(v2);
    return out;
}

ConvergenceReport run_karamata_check(const ExperimentConfig& cfg) {
    auto t0 = Clock::now();
    cfg.validate();
    ConvergenceReport rep;
    rep.check = "karamata";
    const double nmax = *std::max_element(cfg.karamata_n.begin(), cfg.karamata_n.end());
    for (double a : cfg.karamata_alpha) {
        for (double u : cfg.karamata_u) {
            for (double n : cfg.karamata_n) {
                std::string tag = "karamata/a=" + fmt_double(a) + "/u=" + fmt_double(u) + "/n=" + fmt_double(n);
                TruncatedMoment tm = karamata_moments(a, n, u, cfg.karamata_mc, stream_seed(cfg.seed, tag));
                double l1 = karamata_limit_first(a, u), l2 = karamata_limit_second(a, u);
                Json row;
                row["check"] = rep.check;
                row["alpha"] = a;
                row["u"] = u;
                row["n"] = n;
                row["mc_size"] = cfg.karamata_mc;
                row["first"] = tm.first;
                row["se_first"] = tm.se_first;
                row["limit_first"] = l1;
                row["rel_err_first"] = std::fabs(tm.first - l1) / l1;
                row["second"] = tm.second;
                row["se_second"] = tm.se_second;
                row["limit_second"] = l2;
                row["rel_err_second"] = std::fabs(tm.second - l2) / l2;
                row["seed"] = "stream_seed(seed,\"" + tag + "\")";
                rep.rows.push_back(row);
                if (n == nmax) {
                    char id_buf[64];
                    std::snprintf(id_buf, sizeof id_buf, "_a%g_u%g", a, u);
                    const std::string id = id_buf;
                    rep.verdicts.push_back(make_verdict(cfg, "karamata_first" + id, row["rel_err_first"].get<double>(),
                                                        "karamata_rel", true, "n=" + fmt_double(n)));
                    rep.verdicts.push_back(make_verdict(cfg, "karamata_second" + id,
                                                        row["rel_err_second"].get<double>(), "karamata_rel", true,
                                                        "n=" + fmt_double(n)));
                }
            }
        }
    }
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

// ------------------------------------------------------------ small-jump bound

double slutsky_bound(double alpha, double u, double eps) {
    return alpha * std::pow(u, 1.0 - alpha) * (1.0 / (1.0 - alpha) + u / (2.0 - alpha)) / eps;
}

ConvergenceReport run_slutsky_bound_check(const ExperimentConfig& cfg) {
    auto t0 = Clock::now();
    cfg.validate();
    ConvergenceReport rep;
    rep.check = "slutsky";
    const double a = cfg.slutsky_alpha;
    if (!(a > 0.0 && a < 1.0)) throw PreconditionError("small-jump bound needs alpha in (0,1)");
    const std::size_t n = cfg.slutsky_n, R = cfg.slutsky_replicates;
    const IidModel model{{a, 1.0, 1.0}};
    const double an = analytic_an(model, n);
    const std::size_t nu = cfg.slutsky_u.size();
    // gap[u][r] = sup_t (|L_1n - L_1n^(u)| + |L_2n - L_2n^(u)|)
    std::vector<std::vector<double>> gap(nu, std::vector<double>(R));
    const std::string tag = "slutsky";
    const std::uint64_t base = stream_seed(cfg.seed, tag);
    parallel_for(R, workers_of(cfg), [&](std::size_t r) {
        auto x = sample_iid(model.rv, n, base ^ r).values;
        for (std::size_t k = 0; k < nu; ++k) {
            const double u = cfg.slutsky_u[k];
            double g1 = 0.0, g2 = 0.0, sup = 0.0;
            for (double v : x) {
                double y = v / an;
                if (std::fabs(y) <= u) {
                    g1 += y;
                    g2 += y * y;
                    sup = std::max(sup, std::fabs(g1) + std::fabs(g2));
                }
            }
            gap[k][r] = sup;
        }
    });
    std::size_t violations = 0, nonmonotone = 0;
    for (std::size_t k = 0; k < nu; ++k) {
        double prev = 2.0;
        std::vector<double> eps = cfg.slutsky_eps;
        std::sort(eps.begin(), eps.end());
        for (double e : eps) {
            double cnt = 0.0;
            for (double g : gap[k]) cnt += g > e;
            double ph = cnt / static_cast<double>(R);
            double se = std::sqrt(ph * (1.0 - ph) / static_cast<double>(R));
            double bound = slutsky_bound(a, cfg.slutsky_u[k], e);
            bool viol = ph > bound + 3.0 * se;
            violations += viol;
            nonmonotone += ph > prev;
            prev = ph;
            Json row;
            row["check"] = rep.check;
            row["alpha"] = a;
            row["n"] = n;
            row["u"] = cfg.slutsky_u[k];
            row["eps"] = e;
            row["replicates"] = R;
            row["prob"] = ph;
            row["se"] = se;
            row["bound"] = bound;
            row["violation"] = viol;
            row["seed"] = seed_note(tag);
            rep.rows.push_back(row);
        }
    }
    rep.verdicts.push_back(make_verdict(cfg, "slutsky_violations", static_cast<double>(violations),
                                        "slutsky_max_violations", true, "cells with prob > bound + 3 SE"));
    rep.verdicts.push_back(make_verdict(cfg, "slutsky_monotone", static_cast<double>(nonmonotone),
                                        "slutsky_max_violations", true, "cells where prob increases with eps"));
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

// ------------------------------------------------------------ diagnostics

ConvergenceReport run_diagnostics(const ExperimentConfig& cfg) {
    auto t0 = Clock::now();
    cfg.validate();
    ConvergenceReport rep;
    rep.check = "diagnostics";
    const std::size_t n = std::max<std::size_t>(100000, 10 * cfg.n_grid.back());
    auto x = sample_model(cfg.model, n, stream_seed(cfg.seed, "diagnostics")).values;
    ModelTail mt = model_tail(cfg.model);
    const BlockingScheme sch = cfg.scheme(n);
    const double u = abs_threshold(x, 1.0 - 1.0 / (25.0 * static_cast<double>(sch.r_n)));
    const auto k = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));

    Json d;
    d["n"] = n;
    d["model"] = model_name(cfg.model);
    d["alpha_true"] = mt.alpha;
    d["alpha_hat"] = hill_alpha(x, k);
    d["hill_k"] = k;
    d["an_hat"] = empirical_an(x, n);
    d["r_n"] = sch.r_n;
    d["threshold"] = u;
    d["theta_hat"] = extremal_index_blocks(x, sch, u);
    Json curve = Json::array();
    for (const auto& c : anticluster_diagnostic(x, sch, u, {1, 2, 5, 10, sch.r_n / 2})) {
        curve.push_back(Json{{"m", c.m}, {"prob", c.prob}, {"anchors", c.anchors}});
    }
    d["anticluster"] = curve;
    auto ss = sign_switch_diagnostic(x, sch, u);
    d["sign_switch"] = Json{{"violations", ss.violations}, {"exceeding_blocks", ss.exceeding_blocks},
                            {"multi_blocks", ss.multi_blocks}};
    Json tp = Json::array();
    // tail process at the 99% level: the block threshold leaves too few anchors
    const double u_tp = abs_threshold(x, 0.99);
    d["tail_process_threshold"] = u_tp;
    for (const auto& lg : empirical_tail_process(x, u_tp, 3)) {
        tp.push_back(Json{{"lag", lg.lag}, {"anchors", lg.anchors}, {"tail_median", lg.tail_q[2]},
                          {"spectral_median", lg.spectral_q[2]}, {"near_zero", lg.near_zero}});
    }
    d["tail_process"] = tp;
    d["seed"] = "stream_seed(seed,\"diagnostics\")";

    double theta_true = std::numeric_limits<double>::quiet_NaN();
    if (std::holds_alternative<IidModel>(cfg.model)) theta_true = 1.0;
    if (const auto* lin = std::get_if<LinearModel>(&cfg.model)) theta_true = linear_extremal_index(*lin);
    d["theta_true"] = theta_true;
    rep.diagnostics = d;
    Json row = d;
    row["check"] = rep.check;
    rep.rows.push_back(row);

    if (mt.alpha < 2.0) {
        rep.verdicts.push_back(make_verdict(cfg, "diagnostics_hill", std::fabs(d["alpha_hat"].get<double>() - mt.alpha),
                                            "hill_abs", true, "|alpha_hat - alpha|, k = sqrt(n)"));
    }
    if (std::isfinite(theta_true)) {
        rep.verdicts.push_back(make_verdict(cfg, "diagnostics_theta",
                                            std::fabs(d["theta_hat"].get<double>() - theta_true), "theta_abs", true,
                                            "|theta_hat - theta|"));
    }
    rep.runtime_seconds = seconds_since(t0);
    return rep;
}

}  // namespace snlab
