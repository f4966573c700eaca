#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "snlab/errors.hpp"
#include "snlab/models.hpp"
#include "snlab/stats.hpp"
#include "snlab/tail_inference.hpp"

using namespace snlab;
using Catch::Approx;

namespace {

std::vector<double> scaled(std::vector<double> v, double s) {
    for (auto& x : v) x *= s;
    return v;
}

// Blocks estimator expectation for i.i.d. data with exceedance probability pu:
// E[#blocks hit] / E[#exceedances] = (1 - (1-pu)^r) / (r pu).
double iid_blocks_oracle(double pu, double r) { return (1.0 - std::pow(1.0 - pu, r)) / (r * pu); }

}  // namespace

TEST_CASE("hill estimator") {
    auto x = sample_iid({1.0, 0.5, 1.0}, 1000000, 1).values;
    CHECK(hill_alpha(x, 10000) == Approx(1.0).margin(0.05));
    auto y = sample_iid({0.5, 1.0, 1.0}, 1000000, 2).values;
    CHECK(hill_alpha(y, 10000) == Approx(0.5).margin(0.03));
    CHECK(hill_alpha(scaled(x, 8.0), 10000) == hill_alpha(x, 10000));
    CHECK(hill_alpha(scaled(x, 10.0), 10000) == Approx(hill_alpha(x, 10000)).epsilon(1e-12));
    CHECK_THROWS_AS(hill_alpha(x, 0), PreconditionError);
    CHECK_THROWS_AS(hill_alpha(std::vector<double>(10, 0.0), 3), PreconditionError);
}

TEST_CASE("tail index recovery across models") {
    const std::size_t n = 1000000;
    const auto k = static_cast<std::size_t>(std::ceil(std::pow(double(n), 0.6)));
    for (double a : {0.5, 0.8, 1.2, 1.5}) {
        RegVarSpec rv{a, 0.7, 1.0};
        CHECK(hill_alpha(sample_iid(rv, n, 10).values, k) == Approx(a).margin(0.1));
        CHECK(hill_alpha(sample_linear({{1.0, 0.5, 0.25}, rv}, n, 11).values, k) == Approx(a).margin(0.1));
    }
    SquaredGarchModel sq{{1.0, 0.5, 0.3}};
    auto s = sample_squared_garch(sq, n, 12);
    CHECK(hill_alpha(s.values, k) == Approx(s.tail_index).margin(0.1));
}

TEST_CASE("sign balance and no-sign-switch") {
    for (double p : {1.0, 0.7, 0.5}) {
        RegVarSpec rv{1.0, p, 1.0};
        for (auto x : {sample_iid(rv, 1000000, 20).values, sample_linear({{1.0, 0.6}, rv}, 1000000, 21).values}) {
            double u = abs_threshold(x, 0.999);
            std::size_t pos = 0, all = 0;
            for (double v : x) {
                if (std::fabs(v) > u) {
                    ++all;
                    pos += v > 0;
                }
            }
            CHECK(double(pos) / double(all) == Approx(p).margin(0.05));
        }
    }
    RegVarSpec one{0.8, 1.0, 1.0};
    auto x = sample_linear({{1.0, 0.7, 0.3}, one}, 1000000, 22).values;
    auto scheme = BlockingScheme::from_exponent(x.size(), 0.5);
    CHECK(sign_switch_diagnostic(x, scheme, abs_threshold(x, 0.99)).violations == 0);
}

TEST_CASE("empirical a_n") {
    CHECK(analytic_an(IidModel{{1.5, 1.0, 1.0}}, 100) == Approx(21.5443).epsilon(1e-5));
    CHECK(analytic_an(IidModel{{1.0, 1.0, 1.0}}, 10000) == Approx(1e4));
    RegVarSpec rv{1.0, 0.5, 1.0};
    std::vector<double> pooled;
    for (int r = 0; r < 400; ++r) {
        auto x = sample_iid(rv, 10000, 100 + r).values;
        pooled.insert(pooled.end(), x.begin(), x.end());
    }
    CHECK(empirical_an(pooled, 10000) == Approx(1e4).epsilon(0.15));
    CHECK_THROWS_AS(empirical_an(pooled, 1), PreconditionError);
}

TEST_CASE("blocks estimator") {
    const std::size_t n = 100000;
    RegVarSpec rv{1.0, 1.0, 1.0};
    auto x = sample_iid(rv, n, 3).values;

    // r_n = ceil(n^0.5), u at the 99% level: about 3 exceedances per block,
    // so the estimator sits near (1 - e^{-3.16}) / 3.16, far from theta = 1
    auto sqrt_scheme = BlockingScheme::from_exponent(n, 0.5);
    CHECK(sqrt_scheme.r_n == 317);
    double u99 = abs_threshold(x, 0.99);
    CHECK(extremal_index_blocks(x, sqrt_scheme, u99) == Approx(iid_blocks_oracle(0.01, 317)).margin(0.03));

    // r_n = ceil(n^{1/3}) with r_n P(|X| > u) = 1/25 keeps block collisions rare
    auto scheme = BlockingScheme::from_exponent(n, 1.0 / 3.0);
    CHECK(scheme.r_n == 47);
    const double level = 1.0 - 1.0 / (25.0 * 47.0);
    struct Case {
        std::vector<double> phi;
        double theta;
    };
    for (const auto& c : std::vector<Case>{{{1.0}, 1.0}, {{1.0, 0.5}, 2.0 / 3.0}, {{1.0, 1.0}, 0.5}}) {
        double acc = 0.0;
        for (int r = 0; r < 50; ++r) {
            auto y = sample_linear({c.phi, rv}, n, 500 + r).values;
            acc += extremal_index_blocks(y, scheme, abs_threshold(y, level));
        }
        CHECK(acc / 50.0 == Approx(c.theta).margin(0.08));
        if (c.phi.size() == 1) {
            CHECK(acc / 50.0 >= 0.88);
            CHECK(acc / 50.0 <= 1.0);
        }
    }
    CHECK(extremal_index_blocks(scaled(x, 4.0), sqrt_scheme, 4.0 * u99) == extremal_index_blocks(x, sqrt_scheme, u99));
    CHECK(abs_threshold(scaled(x, 10.0), 0.99) == 10.0 * u99);
    CHECK_THROWS_AS(extremal_index_blocks(x, sqrt_scheme, 1e300), PreconditionError);
    CHECK_THROWS_AS(BlockingScheme{0}.validate(10), PreconditionError);
    CHECK_THROWS_AS(BlockingScheme{11}.validate(10), PreconditionError);
}

TEST_CASE("anticluster diagnostic") {
    const std::size_t n = 100000;
    RegVarSpec rv{1.0, 0.5, 1.0};
    auto x = sample_iid(rv, n, 4).values;
    BlockingScheme scheme{40};
    double u = abs_threshold(x, 0.995);
    std::vector<std::size_t> grid{1, 2, 5, 10, 20, 39, 40};
    auto curve = anticluster_diagnostic(x, scheme, u, grid);
    REQUIRE(curve.size() == grid.size());
    for (const auto& pt : curve) {
        double oracle = 1.0 - std::pow(1.0 - 0.005, 2.0 * (40.0 - pt.m));
        double se = std::sqrt(std::max(oracle * (1 - oracle), 1e-4) / double(pt.anchors));
        CHECK(pt.prob == Approx(oracle).margin(4 * se + 1e-12));
        CHECK(pt.prob >= 0.0);
        CHECK(pt.prob <= 1.0);
    }
    CHECK(curve.back().prob == 0.0);

    auto ma = sample_linear({{1.0, 0.5}, rv}, n, 5).values;
    double um = abs_threshold(ma, 0.995);
    auto mc = anticluster_diagnostic(ma, scheme, um, {1, 2, 3});
    CHECK(mc[0].prob > 0.25);
    CHECK(mc[1].prob < 0.45);
    // beyond lag 1 only independent clusters remain: rate theta * P(|X| > u)
    CHECK(mc[1].prob == Approx(1.0 - std::pow(1.0 - 0.005 * 2.0 / 3.0, 2.0 * 38)).margin(0.06));

    // monotone in m up to noise over replicates
    std::size_t violations = 0, points = 0;
    std::vector<std::size_t> full;
    for (std::size_t m = 1; m <= 40; ++m) full.push_back(m);
    for (int r = 0; r < 50; ++r) {
        auto y = sample_iid(rv, 20000, 900 + r).values;
        auto c = anticluster_diagnostic(y, scheme, abs_threshold(y, 0.995), full);
        for (std::size_t i = 1; i < c.size(); ++i, ++points) violations += c[i].prob > c[i - 1].prob;
    }
    CHECK(violations <= points / 20);
    CHECK_THROWS_AS(anticluster_diagnostic(x, scheme, 1e300, {1}), PreconditionError);
    CHECK_THROWS_AS(anticluster_diagnostic(x, scheme, u, {41}), PreconditionError);
}

TEST_CASE("sign switch diagnostic") {
    const std::size_t n = 100000;
    auto scheme = BlockingScheme::from_exponent(n, 0.5);
    auto pos = sample_iid({1.0, 1.0, 1.0}, n, 6).values;
    CHECK(sign_switch_diagnostic(pos, scheme, abs_threshold(pos, 0.99)).violations == 0);
    auto alt = sample_linear({{1.0, -1.0}, {1.0, 1.0, 1.0}}, n, 7).values;
    CHECK(sign_switch_diagnostic(alt, scheme, abs_threshold(alt, 0.999)).violations > 0);
    auto sym = sample_iid({1.0, 0.5, 1.0}, n, 8).values;
    auto res = sign_switch_diagnostic(sym, scheme, abs_threshold(sym, 0.9999));
    // with at most ~10 exceedances overall, blocks with two of them are rare
    CHECK(res.violations <= res.multi_blocks);
    CHECK(res.exceeding_blocks >= 1);
}

TEST_CASE("small jump diagnostic") {
    RegVarSpec rv{0.5, 1.0, 1.0};
    const std::size_t n = 10000;
    std::vector<std::vector<double>> reps;
    for (int r = 0; r < 300; ++r) reps.push_back(sample_iid(rv, n, 40 + r).values);
    const double an = analytic_an(IidModel{rv}, n);
    std::vector<double> grid{0.5, 0.1, 0.01, 0.001};
    auto curve = small_jump_diagnostic(reps, an, grid, 1.0, false);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double u = grid[i], a = 0.5;
        double bound = a * std::pow(u, 1 - a) * (1 / (1 - a) + u / (2 - a));
        double se = std::sqrt(std::max(curve[i].prob_l1 * (1 - curve[i].prob_l1), 1e-4) / 300.0);
        CHECK(curve[i].prob_l1 <= bound + 3 * se);
        if (i > 0) CHECK(curve[i].prob_l1 <= curve[i - 1].prob_l1);
    }
    CHECK(curve.back().prob_l1 == 0.0);
    auto huge = small_jump_diagnostic(reps, an, grid, 1e6, false);
    for (auto& pt : huge) {
        CHECK(pt.prob_l1 == 0.0);
        CHECK(pt.prob_l2 == 0.0);
    }
    RegVarSpec r12{1.2, 0.5, 1.0};
    std::vector<std::vector<double>> reps12;
    for (int r = 0; r < 100; ++r) reps12.push_back(sample_iid(r12, 2000, 70 + r).values);
    auto an12 = analytic_an(IidModel{r12}, 2000);
    auto centered = small_jump_diagnostic(reps12, an12, {0.5, 0.1, 0.01}, 0.5, true, &r12);
    auto pooled = small_jump_diagnostic(reps12, an12, {0.5, 0.1, 0.01}, 0.5, true);
    for (std::size_t i = 0; i < centered.size(); ++i) {
        CHECK(centered[i].prob_l1 >= 0.0);
        CHECK(centered[i].prob_l1 <= 1.0);
        CHECK(pooled[i].prob_l2 <= 1.0);
    }
    CHECK_THROWS_AS(small_jump_diagnostic(reps, an, grid, 0.0, false), PreconditionError);
}

TEST_CASE("empirical tail process") {
    const std::size_t n = 1000000;
    RegVarSpec rv{1.0, 1.0, 1.0};
    auto x = sample_iid(rv, n, 13).values;
    double u = abs_threshold(x, 0.999);
    auto tp = empirical_tail_process(x, u, 2);
    REQUIRE(tp.size() == 5);
    const auto& lag0 = tp[2];
    CHECK(lag0.lag == 0);
    // |Y_0| is Pareto(alpha): quantile (1 - l)^{-1/alpha}
    for (std::size_t i = 0; i < lag0.levels.size(); ++i) {
        double want = std::pow(1.0 - lag0.levels[i], -1.0);
        double above = double(lag0.anchors) * (1.0 - lag0.levels[i]);  // relative SE ~ 1/(alpha sqrt(above))
        CHECK(lag0.tail_q[i] == Approx(want).epsilon(4.0 / std::sqrt(above)));
        CHECK(lag0.spectral_q[i] == 1.0);
    }
    for (int l : {0, 1, 3, 4}) {
        CHECK(tp[l].near_zero > 0.9);
        CHECK(tp[l].tail_q.back() < 0.05);
    }
    auto big = empirical_tail_process(scaled(x, 10.0), abs_threshold(scaled(x, 10.0), 0.999), 2);
    for (std::size_t l = 0; l < tp.size(); ++l) {
        for (std::size_t i = 0; i < tp[l].tail_q.size(); ++i) {
            CHECK(big[l].tail_q[i] == Approx(tp[l].tail_q[i]).epsilon(1e-12));
            CHECK(big[l].spectral_q[i] == Approx(tp[l].spectral_q[i]).epsilon(1e-12));
        }
    }

    // MA(1): the anchor is the first cluster member with probability P(M=0)
    LinearModel ma{{1.0, 0.5}, rv};
    auto y = sample_linear(ma, n, 14).values;
    auto tpy = empirical_tail_process(y, abs_threshold(y, 0.999), 1);
    auto law = linear_cluster_law(ma);
    CHECK(tpy[0].near_zero == Approx(law.anchor_probs[0]).margin(0.06));  // lag -1
    CHECK(tpy[2].near_zero == Approx(law.anchor_probs[1]).margin(0.06));  // lag +1
    CHECK(tpy[2].spectral_q[4] == Approx(0.5).margin(0.05));
    CHECK_THROWS_AS(empirical_tail_process(x, abs_threshold(x, 0.99999), 1), PreconditionError);
}

TEST_CASE("empirical cluster law") {
    RegVarSpec rv{1.0, 1.0, 1.0};
    auto y = sample_linear({{1.0, 0.5}, rv}, 200000, 15).values;
    auto scheme = BlockingScheme::from_exponent(y.size(), 1.0 / 3.0);
    auto law = empirical_cluster_law(y, scheme, abs_threshold(y, 0.9995));
    CHECK(law.source == "empirical");
    CHECK_NOTHROW(law.validate());
    std::size_t pairs = 0;
    for (const auto& c : law.templates) pairs += c.size() == 2;
    CHECK(double(pairs) / double(law.templates.size()) > 0.2);
}
