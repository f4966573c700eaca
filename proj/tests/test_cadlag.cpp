#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "snlab/cadlag.hpp"
#include "snlab/errors.hpp"
#include "snlab/rng.hpp"

using namespace snlab;
using Catch::Approx;

namespace {

CadlagPath unit_step(double at) { return CadlagPath::step({0.0, at}, {0.0, 1.0}); }
CadlagPath ramp(double a, double b) { return CadlagPath::linear({0.0, a, b}, {0.0, 0.0, 1.0}); }

// Dense sampling of the completed graph as a polyline in (t, v).
std::vector<std::pair<double, double>> dense_graph(const CadlagPath& x, std::size_t per_unit) {
    std::vector<std::pair<double, double>> pts;
    auto add_seg = [&](double t0, double v0, double t1, double v1) {
        double len = std::max(std::fabs(t1 - t0), std::fabs(v1 - v0));
        std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len * per_unit)));
        for (std::size_t i = (pts.empty() ? 0 : 1); i <= k; ++i) {
            double s = double(i) / double(k);
            pts.emplace_back(t0 + s * (t1 - t0), v0 + s * (v1 - v0));
        }
    };
    const auto& ts = x.times();
    const auto& vs = x.values();
    pts.emplace_back(0.0, vs[0]);
    for (std::size_t i = 1; i < ts.size(); ++i) {
        double prev = vs[i - 1];
        if (x.kind() == PathKind::Step) {
            add_seg(ts[i - 1], prev, ts[i], prev);
            add_seg(ts[i], prev, ts[i], vs[i]);
        } else {
            add_seg(ts[i - 1], prev, ts[i], vs[i]);
        }
    }
    add_seg(ts.back(), vs.back(), 1.0, vs.back());
    return pts;
}

// Discrete Frechet distance (L-inf on (t, v)) between dense graph samples.
// Bounds the continuous value from above by at most the sample spacing.
double discrete_frechet(const CadlagPath& x, const CadlagPath& y, std::size_t per_unit) {
    auto p = dense_graph(x, per_unit), q = dense_graph(y, per_unit);
    auto d = [&](std::size_t i, std::size_t j) {
        return std::max(std::fabs(p[i].first - q[j].first), std::fabs(p[i].second - q[j].second));
    };
    std::vector<double> prev(q.size()), cur(q.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = 0; j < q.size(); ++j) {
            double best;
            if (i == 0 && j == 0) best = 0.0;
            else if (i == 0) best = cur[j - 1];
            else if (j == 0) best = prev[j];
            else best = std::min({prev[j], prev[j - 1], cur[j - 1]});
            cur[j] = std::max(best, d(i, j));
        }
        std::swap(prev, cur);
    }
    return prev.back();
}

double dense_sup(const CadlagPath& x, const CadlagPath& y, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        double t = double(i) / double(n);
        m = std::max(m, std::fabs(eval1(x, t) - eval1(y, t)));
    }
    return m;
}

CadlagPath random_step(Rng& rng, std::size_t max_jumps) {
    std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * max_jumps);
    std::vector<double> ts{0.0};
    for (std::size_t i = 0; i < k; ++i) ts.push_back(rng.uniform());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    std::vector<double> vs;
    double v = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        vs.push_back(v);
        v += 2.0 * rng.uniform() - 1.0;
    }
    return CadlagPath::step(ts, vs);
}

}  // namespace

TEST_CASE("eval and left limits") {
    auto x = unit_step(0.5);
    CHECK(eval1(x, 0.5) == 1.0);
    CHECK(eval1(x, 0.49) == 0.0);
    CHECK(eval1(CadlagPath::constant(3.0), 0.7) == 3.0);
    CHECK(left_limit1(x, 0.5) == 0.0);
    CHECK(left_limit1(x, 0.75) == 1.0);
    CHECK(left_limit1(ramp(0.4, 0.6), 0.5) == Approx(0.5));
    CHECK_THROWS_AS(eval1(x, 1.5), std::domain_error);
    CHECK_THROWS_AS(eval1(x, -0.1), std::domain_error);
    CHECK_THROWS_AS(left_limit1(x, 0.0), std::domain_error);
}

TEST_CASE("path construction invariants") {
    CHECK_THROWS_AS(CadlagPath::step({}, {}), PreconditionError);
    CHECK_THROWS_AS(CadlagPath::step({0.1}, {1.0}), PreconditionError);
    CHECK_THROWS_AS(CadlagPath::step({0.0, 0.5, 0.5}, {1, 2, 3}), PreconditionError);
    CHECK_THROWS_AS(CadlagPath::step({0.0, 1.2}, {1, 2}), PreconditionError);
    CHECK_THROWS_AS(CadlagPath::step({0.0}, {std::nan("")}), PreconditionError);
    auto single = CadlagPath::step({0.0}, {2.0});
    CHECK(single.jump_count() == 0);
    CHECK(uniform_distance(single, CadlagPath::constant(2.0)) == 0.0);
}

TEST_CASE("completed graph has one segment per jump") {
    auto x = CadlagPath::step({0.0, 0.3, 0.6}, {0.0, 2.0, -1.0});
    auto g = completed_graph(x);
    REQUIRE(g.segments.size() == 2);
    CHECK(g.segments[0].t == 0.3);
    CHECK(g.segments[0].from == 0.0);
    CHECK(g.segments[0].to == 2.0);
    CHECK(g.segments[1].from == 2.0);
    CHECK(g.segments[1].to == -1.0);
    CHECK(completed_graph(ramp(0.2, 0.4)).segments.empty());
}

TEST_CASE("uniform distance") {
    auto x = unit_step(0.5);
    CHECK(uniform_distance(x, x) == 0.0);
    CHECK(uniform_distance(x, CadlagPath::constant(0.0)) == 1.0);
    for (double w : {0.1, 0.01}) {
        auto r = ramp(0.5 - w, 0.5);
        CHECK(uniform_distance(x, r) == Approx(dense_sup(x, r, 100000)).margin(1.0 / (w * 1e5) + 1e-12));
    }
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        auto a = random_step(rng, 6), b = random_step(rng, 6);
        CHECK(uniform_distance(a, b) >= dense_sup(a, b, 100000) - 1e-12);
    }
    CHECK_THROWS_AS(uniform_distance(x, CadlagPath::constant(0.0, 2)), PreconditionError);
}

TEST_CASE("m1 distance examples") {
    auto x = unit_step(0.5);
    CHECK(m1_distance(x, x) == 0.0);
    double w = 0.01;
    CHECK(m1_distance(x, ramp(0.5 - w, 0.5)) <= w + 1e-6);
    CHECK(m1_distance(x, unit_step(0.55)) == Approx(0.05).margin(1e-6));
    CHECK(discrete_frechet(x, unit_step(0.55), 2000) == Approx(0.05).margin(1e-3));
    CHECK_THROWS_AS(m1_distance(CadlagPath::constant(0.0, 2), CadlagPath::constant(0.0, 2)), PreconditionError);
    CHECK_THROWS_AS(m1_distance(x, unit_step(0.55), 3), PreconditionError);
}

TEST_CASE("m1 distance agrees with a discrete Frechet oracle") {
    Rng rng(2024);
    const std::size_t per_unit = 400;
    for (int i = 0; i < 25; ++i) {
        auto a = random_step(rng, 4), b = random_step(rng, 4);
        auto rep = m1_distance_report(a, b, std::max<std::size_t>(1024, min_resolution(a, b)));
        double oracle = discrete_frechet(a, b, per_unit);
        CHECK(rep.value <= oracle + rep.tolerance);
        CHECK(rep.value >= oracle - 1.0 / per_unit - 1e-9);
    }
    auto lin = CadlagPath::linear({0.0, 0.3, 0.7}, {0.0, 1.0, -0.5});
    auto st = CadlagPath::step({0.0, 0.35, 0.8}, {0.0, 1.2, -0.4});
    CHECK(m1_distance(lin, st) == Approx(discrete_frechet(lin, st, 2000)).margin(1e-3));
}

TEST_CASE("m1 report brackets the value") {
    auto x = unit_step(0.5), y = CadlagPath::step({0.0, 0.5, 0.52}, {0.0, 0.5, 1.0});
    auto rep = m1_distance_report(x, y, 64);
    CHECK(rep.lower <= rep.value);
    CHECK(rep.value <= rep.upper_bound);
    CHECK(rep.value - rep.lower <= rep.tolerance + 1e-15);
    CHECK_FALSE(rep.gap_flag);
    auto tight = m1_distance_report(x, y, 16, 0.0);
    CHECK(tight.gap_flag);
}

TEST_CASE("metric axioms and ordering on random step paths") {
    Rng rng(77);
    for (int i = 0; i < 200; ++i) {
        auto a = random_step(rng, 5), b = random_step(rng, 5), c = random_step(rng, 5);
        std::size_t res = std::max<std::size_t>({1024, min_resolution(a, b), min_resolution(b, c), min_resolution(a, c)});
        double ab = m1_distance(a, b, res), ba = m1_distance(b, a, res);
        double bc = m1_distance(b, c, res), ac = m1_distance(a, c, res);
        CHECK(ab == ba);
        CHECK(m1_distance(a, a, res) == 0.0);
        double tol = uniform_distance(a, b) / double(res * res);
        CHECK(ac <= ab + bc + 1e-6 + tol);
        CHECK(ab <= uniform_distance(a, b) + 1e-15);
        CHECK(ab <= j1_distance(a, b) + tol + 1e-12);
        CHECK(j1_distance(a, b) == j1_distance(b, a));
    }
}

TEST_CASE("ramp collapse: m1 vanishes, j1 does not") {
    auto x = unit_step(0.5);
    for (double w : {0.1, 0.01, 0.001}) {
        auto r = ramp(0.5 - w / 2.0, 0.5 + w / 2.0);
        double m = m1_distance(x, r);
        CHECK(m <= w + 1e-6);
        CHECK(m >= w / 4.0);
        double j = j1_distance(x, step_refinement(r, 1000));
        CHECK(j >= 0.5 - w);
    }
}

TEST_CASE("j1 distance") {
    auto x = unit_step(0.5);
    CHECK(j1_distance(x, x) == 0.0);
    CHECK(j1_distance(x, unit_step(0.55)) == Approx(0.05).epsilon(1e-9));
    double d = 0.01;
    auto halves = CadlagPath::step({0.0, 0.5, 0.5 + d}, {0.0, 0.5, 1.0});
    CHECK(j1_distance(x, halves) >= 0.5 - d);
    CHECK(m1_distance(x, halves) <= d + 1e-6);
    CHECK_THROWS_AS(j1_distance(x, ramp(0.4, 0.6)), PreconditionError);
    // jump sizes differ: time shift cannot fix the magnitude gap
    CHECK(j1_distance(x, CadlagPath::step({0.0, 0.5}, {0.0, 0.7})) == Approx(0.3).epsilon(1e-9));
}

TEST_CASE("weak m1 distance") {
    auto two = [](const CadlagPath& a, const CadlagPath& b) {
        std::vector<std::vector<double>> v;
        auto ts = a.times();
        REQUIRE(ts == b.times());
        return CadlagPath(ts, {a.values(), b.values()}, a.kind());
    };
    auto x = two(unit_step(0.5), CadlagPath::step({0.0, 0.5}, {1.0, 1.0}));
    CHECK(weak_m1_distance(x, x) == 0.0);
    auto g = CadlagPath::step({0.0, 0.5}, {0.0, 0.0});
    auto shifted = CadlagPath::step({0.0, 0.5}, {0.3, 0.3});
    CHECK(weak_m1_distance(two(g, g), two(g, shifted)) == Approx(0.3).margin(1e-9));

    auto a = CadlagPath(std::vector<double>{0.0, 0.5, 0.55}, {{0.0, 1.0, 1.0}, {0.0, 1.0, 1.0}}, PathKind::Step);
    auto b = CadlagPath(std::vector<double>{0.0, 0.5, 0.55}, {{0.0, 0.0, 1.0}, {0.0, 1.0, 1.0}}, PathKind::Step);
    double c0 = m1_distance(a.coordinate(0), b.coordinate(0));
    double c1 = m1_distance(a.coordinate(1), b.coordinate(1));
    CHECK(c0 == Approx(0.05).margin(1e-6));
    CHECK(c1 == 0.0);
    CHECK(weak_m1_distance(a, b) == std::max(c0, c1));
}

TEST_CASE("parametric representations lie on the completed graph") {
    Rng rng(5);
    for (int i = 0; i < 30; ++i) {
        auto a = random_step(rng, 6);
        auto rep = parametric_representation(a, 200);
        CHECK(rep.resolution() == 200);
        CHECK(rep.r.front() == 0.0);
        CHECK(rep.r.back() == 1.0);
        CHECK(is_valid_representation(a, rep));
    }
    auto lin = ramp(0.2, 0.9);
    CHECK(is_valid_representation(lin, parametric_representation(lin, 50)));
    ParametricRep bad{{0.0, 0.5, 1.0}, {0.0, 0.7, 1.0}};
    CHECK_FALSE(is_valid_representation(unit_step(0.4), bad));
}

TEST_CASE("m1 coupling is a witness") {
    Rng rng(9);
    for (int i = 0; i < 30; ++i) {
        auto a = random_step(rng, 4), b = random_step(rng, 4);
        std::size_t res = 2 * min_resolution(a, b);
        auto cpl = m1_coupling(a, b, res);
        REQUIRE(cpl.x_rep.resolution() == cpl.y_rep.resolution());
        CHECK(is_valid_representation(a, cpl.x_rep, 1e-9));
        CHECK(is_valid_representation(b, cpl.y_rep, 1e-9));
        double worst = 0.0;
        for (std::size_t k = 0; k < cpl.x_rep.resolution(); ++k) {
            worst = std::max({worst, std::fabs(cpl.x_rep.r[k] - cpl.y_rep.r[k]),
                              std::fabs(cpl.x_rep.u[k] - cpl.y_rep.u[k])});
        }
        CHECK(worst <= cpl.value + 1e-9);
        CHECK(cpl.value == m1_distance(a, b, res));
    }
}

TEST_CASE("monotone m1 characterization") {
    auto a = unit_step(0.5);
    CHECK(monotone_m1_distance(a, a) == 0.0);
    CHECK(monotone_m1_distance(a, unit_step(0.55)) == Approx(0.05).margin(1e-9));
    auto lin = CadlagPath::linear({0.0, 1.0}, {0.0, 1.0});
    std::vector<double> ts, sq;
    for (int i = 0; i <= 200; ++i) {
        ts.push_back(i / 200.0);
        sq.push_back(ts.back() * ts.back());
    }
    auto quad = CadlagPath::linear(ts, sq);
    double mm = monotone_m1_distance(lin, quad);
    CHECK(mm == Approx(m1_distance(lin, quad)).margin(1e-6));
    CHECK(mm <= uniform_distance(lin, quad));
    CHECK(!is_monotone_nondecreasing(CadlagPath::step({0.0, 0.5}, {1.0, 0.0})));
    CHECK_THROWS_AS(monotone_m1_distance(a, CadlagPath::step({0.0, 0.5}, {1.0, 0.0})), PreconditionError);

    Rng rng(31);
    for (int i = 0; i < 40; ++i) {
        auto mk = [&] {
            std::vector<double> t{0.0}, v{rng.uniform()};
            std::size_t k = 1 + static_cast<std::size_t>(rng.uniform() * 4);
            for (std::size_t j = 0; j < k; ++j) t.push_back(rng.uniform());
            std::sort(t.begin(), t.end());
            for (std::size_t j = 1; j < t.size(); ++j) v.push_back(v.back() + rng.uniform());
            return CadlagPath::step(t, v);
        };
        auto p = mk(), q = mk();
        CHECK(monotone_m1_distance(p, q) == Approx(m1_distance(p, q)).margin(1e-6));
    }
}

TEST_CASE("ratio and product paths") {
    auto x = CadlagPath::step({0.0, 0.25, 0.7}, {0.3, -1.7, 2.9});
    auto r = ratio_path(x, CadlagPath::constant(1.0));
    CHECK(r.values() == x.values());
    CHECK(r.times() == x.times());

    double c = 2.5;
    auto y = CadlagPath::linear({0.0, 0.5, 1.0}, {c * 1.0, c * 2.0, c * 4.0});
    auto q = ratio_path(CadlagPath::constant(c), y);
    CHECK(q.kind() == PathKind::Linear);
    for (double t : q.times()) CHECK(eval1(q, t) == Approx(c / eval1(y, t)).epsilon(1e-15));
    CHECK_THROWS_WITH(ratio_path(x, CadlagPath::linear({0.0, 1.0}, {0.0, 1.0})), Catch::Matchers::ContainsSubstring("y(0) > 0"));
    CHECK_THROWS_WITH(ratio_path(x, CadlagPath::linear({0.0, 1.0}, {2.0, 1.0})), Catch::Matchers::ContainsSubstring("nondecreasing"));
    CHECK_THROWS_WITH(ratio_path(x, CadlagPath::step({0.0, 0.5}, {1.0, 2.0})), Catch::Matchers::ContainsSubstring("continuous"));

    auto p = product_path(x, CadlagPath::constant(1.0));
    CHECK(p.path.values() == x.values());
    CHECK_FALSE(p.opposite_jump_warning);
    auto s = unit_step(0.5);
    auto sq = product_path(s, s);
    CHECK(sq.path == s);
    CHECK_FALSE(sq.opposite_jump_warning);
    auto down = CadlagPath::step({0.0, 0.5}, {1.0, 0.0});
    auto w = product_path(s, down);
    CHECK(w.opposite_jump_warning);
    CHECK(eval1(w.path, 0.7) == 0.0);
}

TEST_CASE("csv round trip") {
    auto x = CadlagPath(std::vector<double>{0.0, 0.1, 0.35}, {{1.0 / 3.0, -2e-17, 5.5}, {0.0, 1e300, -7.0}},
                        PathKind::Linear);
    std::stringstream ss;
    write_path_csv(ss, x, {"n=10"}, "t,v1,v2");
    CHECK(ss.str().rfind("# kind=pl d=2\n", 0) == 0);
    auto back = read_path_csv(ss);
    CHECK(back == x);

    std::stringstream bad("# kind=step d=1\n0,1\n0.5,abc\n");
    try {
        read_path_csv(bad);
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::stringstream noheader("0,1\n");
    CHECK_THROWS_AS(read_path_csv(noheader), ParseError);
    std::stringstream fields("# kind=step d=1\n0,1,2\n");
    CHECK_THROWS_AS(read_path_csv(fields), ParseError);
}
