#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "snlab/errors.hpp"
#include "snlab/partial_sums.hpp"
#include "snlab/stats.hpp"

using namespace snlab;
using Catch::Approx;

TEST_CASE("point measure") {
    auto pm = build_point_measure({1.0, 0.0, -2.0, 3.0}, 1.0);
    REQUIRE(pm.size() == 3);
    CHECK(pm.times == std::vector<double>{0.25, 0.75, 1.0});
    CHECK(pm.marks == std::vector<double>{1.0, -2.0, 3.0});
    CHECK(build_point_measure({0.0, 0.0}, 2.0).size() == 0);
    auto a = build_point_measure({1.5, -3.0}, 2.0), b = build_point_measure({3.0, -6.0}, 4.0);
    CHECK(a.marks == b.marks);
    CHECK_THROWS_AS(build_point_measure({1.0}, 0.0), PreconditionError);
}

TEST_CASE("centering constants") {
    auto c = centering_constants(IidModel{{0.8, 1.0, 1.0}}, 100.0, 1000);
    CHECK(c.b1n == 0.0);
    CHECK(c.b2n == 0.0);
    CHECK_FALSE(c.heavy_regime);

    const double alpha = 1.5, n = 1e4, an = std::pow(n, 1 / alpha);
    auto d = centering_constants(IidModel{{alpha, 1.0, 1.0}}, an, 10000);
    CHECK(d.method == "closed_form");
    CHECK(d.b1n == Approx(alpha / (alpha - 1) * (1 - std::pow(an, 1 - alpha)) / an).epsilon(1e-12));
    // Monte Carlo cross-check
    auto x = sample_iid({alpha, 1.0, 1.0}, 2000000, 3).values;
    std::vector<double> t1, t2;
    for (double v : x) {
        double y = v / an;
        t1.push_back(std::fabs(y) <= 1 ? y : 0.0);
        t2.push_back(std::fabs(y) <= 1 ? y * y : 0.0);
    }
    auto m1 = mean_se(t1), m2 = mean_se(t2);
    CHECK(std::fabs(m1.mean - d.b1n) <= 4 * m1.se);
    CHECK(std::fabs(m2.mean - d.b2n) <= 4 * m2.se);

    CHECK(centering_constants(IidModel{{1.3, 0.5, 1.0}}, an, 10000).b1n == 0.0);

    LinearModel lm{{1.0, 0.5}, {1.5, 1.0, 1.0}};
    CenteringOptions opt;
    opt.mc_size = 200000;
    opt.seed = 4;
    auto e = centering_constants(lm, analytic_an(lm, 10000), 10000, opt);
    CHECK(e.method == "monte_carlo");
    CHECK(e.se1 > 0.0);
    opt.max_se = 1e-12;
    CHECK_THROWS_AS(centering_constants(lm, analytic_an(lm, 10000), 10000, opt), NumericalError);
}

TEST_CASE("build_Ln") {
    auto p = build_Ln({1.0, -1.0}, 1.0);
    CHECK(p.l1n.values() == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(p.l2n.values() == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(p.l1n.times() == std::vector<double>{0.0, 0.5, 1.0});
    CHECK_FALSE(p.centered);

    auto x = sample_iid({1.2, 0.4, 1.0}, 5000, 8).values;
    auto q = build_Ln(x, 37.0);
    double ss = 0.0;
    for (double v : x) ss += v * v;
    CHECK(q.l2n.values().back() * 37.0 * 37.0 == Approx(ss).epsilon(1e-13));
    CHECK(is_monotone_nondecreasing(q.l2n));
    CHECK(q.l1n.times() == q.l2n.times());
    auto pw = build_Ln(x, 32.0);  // power-of-two norming: exact
    double s2 = 0.0;
    for (double v : x) s2 += (v / 32.0) * (v / 32.0);
    CHECK(pw.l2n.values().back() == s2);
}

TEST_CASE("centered L_1n(1) has mean zero for symmetric data") {
    RegVarSpec rv{1.5, 0.5, 1.0};
    const std::size_t n = 2000;
    const double an = analytic_an(IidModel{rv}, n);
    auto c = centering_constants(IidModel{rv}, an, n);
    CHECK(c.b1n == 0.0);
    std::vector<double> l1;
    for (int r = 0; r < 1000; ++r) l1.push_back(build_Ln(sample_iid(rv, n, 300 + r).values, an, c).l1n.values().back());
    auto ms = mean_se(l1);
    CHECK(std::fabs(ms.mean) <= 3 * ms.se);
}

TEST_CASE("truncate_Ln") {
    auto pm = build_point_measure({1.0, -2.0, 3.0}, 1.0);
    auto t = truncate_Ln(pm, 1.5);
    CHECK(t.l1n.values() == std::vector<double>{0.0, 0.0, -2.0, 1.0});
    CHECK(t.l2n.values() == std::vector<double>{0.0, 0.0, 4.0, 13.0});
    auto none = truncate_Ln(pm, 10.0);
    CHECK(uniform_distance(none.l1n, CadlagPath::constant(0.0)) == 0.0);
    CHECK(uniform_distance(none.l2n, CadlagPath::constant(0.0)) == 0.0);

    auto x = sample_iid({0.7, 0.6, 1.0}, 3000, 9).values;
    const double an = 100.0;
    auto pmx = build_point_measure(x, an);
    auto full = build_Ln(x, an);
    auto low = truncate_Ln(pmx, 1e-9);
    CHECK(low.l1n == full.l1n);
    CHECK(low.l2n == full.l2n);
    // monotone approach as u decreases through the mark magnitudes
    double prev = std::numeric_limits<double>::infinity();
    for (double u : {10.0, 1.0, 0.1, 0.05, 0.03, 0.011}) {
        double d = uniform_distance(truncate_Ln(pmx, u).l2n, full.l2n);
        CHECK(d <= prev);
        prev = d;
    }

    PointMeasure sim;
    sim.times = {0.7, 0.2, 0.2};
    sim.marks = {1.0, 2.0, -0.5};
    auto ts = truncate_Ln(sim, 0.1);
    CHECK(ts.l1n.times() == std::vector<double>{0.0, 0.2, 0.7});
    CHECK(ts.l1n.values() == std::vector<double>{0.0, 1.5, 2.5});
    CHECK(ts.l2n.values() == std::vector<double>{0.0, 4.25, 5.25});
}

TEST_CASE("self-normalized path") {
    auto one = self_normalized_path({-3.5});
    CHECK(one.values().back() == -1.0);
    CHECK(self_normalized_path({2.0}).values().back() == 1.0);
    CHECK_THROWS_AS(self_normalized_path({0.0, 0.0}), PreconditionError);

    Rng rng(1);
    for (int r = 0; r < 200; ++r) {
        auto x = sample_iid({0.9, 0.5, 1.0}, 50 + r, 1000 + r).values;
        auto p = self_normalized_path(x);
        for (double lam : {0.125, 2.0, 1024.0, 0x1p-40, 0x1p60}) {
            std::vector<double> y = x;
            for (auto& v : y) v *= lam;
            CHECK(self_normalized_path(y).values() == p.values());
        }
        // 24-bit mantissas: scaling by 10 or 1e6 is exact, so invariance holds
        std::vector<double> xf = x;
        for (auto& v : xf) v = static_cast<float>(v);
        auto pf = self_normalized_path(xf);
        for (double lam : {10.0, 1e6, 3.0, 0.75}) {
            std::vector<double> y = xf;
            for (auto& v : y) v *= lam;
            CHECK(self_normalized_path(y).values() == pf.values());
        }
        std::vector<double> neg = x;
        for (auto& v : neg) v = -v;
        auto pn = self_normalized_path(neg);
        for (std::size_t k = 0; k < p.size(); ++k) CHECK(pn.values()[k] == -p.values()[k]);
        double mx = 0.0;
        for (double v : p.values()) mx = std::max(mx, std::fabs(v));
        CHECK(mx <= std::sqrt(double(x.size())));
    }
    auto x = sample_iid({0.9, 0.5, 1.0}, 100, 5).values;
    auto v = self_normalized_values(x, {0.25, 0.5, 1.0});
    double s = 0, ss = 0;
    for (double e : x) ss += e * e;
    for (int i = 0; i < 25; ++i) s += x[i];
    CHECK(v[0] == Approx(s / std::sqrt(ss)).epsilon(1e-14));
}

TEST_CASE("collapse clusters") {
    auto x = sample_iid({0.8, 1.0, 1.0}, 100, 2).values;
    auto p = build_Ln(x, 10.0).l1n;
    CHECK(collapse_clusters(p, BlockingScheme{1}) == p);
    auto whole = collapse_clusters(p, BlockingScheme{100});
    CHECK(whole.times() == std::vector<double>{0.0, 1.0});
    CHECK(whole.values().back() == p.values().back());
    auto c7 = collapse_clusters(p, BlockingScheme{7});
    CHECK(c7.size() == 16);  // 0,7,...,98 and the endpoint
    CHECK(c7.values().back() == p.values().back());
    CHECK_THROWS_AS(collapse_clusters(p, BlockingScheme{101}), PreconditionError);

    // MA(1) with a dominant cluster: M1 sees a single merged jump, J1 does not
    LinearModel ma{{1.0, 1.0}, {0.8, 1.0, 1.0}};
    const std::size_t n = 1000;
    auto y = sample_linear(ma, n, 3).values;
    auto path = build_Ln(y, analytic_an(ma, n)).l1n;
    auto col = collapse_clusters(path, BlockingScheme{10});
    double m1 = m1_distance(path, col), j1 = j1_distance(path, col);
    CHECK(m1 <= j1 + 1e-9);
    // largest within-block jump that the collapse moves to the block end
    double big = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        if (k % 10 != 0) big = std::max(big, std::fabs(path.values()[k] - path.values()[k - 1]));
    }
    CHECK(j1 <= big + 1e-9);
}

TEST_CASE("joint csv") {
    auto p = build_Ln({1.0, -2.0}, 2.0);
    std::stringstream ss;
    write_joint_csv(ss, p);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "# kind=step d=2");
    std::getline(ss, line);
    CHECK(line == "# n=2 an=2 u=none b1n=0 b2n=0");
    std::getline(ss, line);
    CHECK(line == "t,l1,l2");
    std::stringstream again;
    write_joint_csv(again, p);
    auto back = read_path_csv(again);
    CHECK(back.coordinate(0) == p.l1n);
    CHECK(back.coordinate(1) == p.l2n);
}
