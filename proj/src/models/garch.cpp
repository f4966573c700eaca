#include <algorithm>
#include <cmath>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "snlab/errors.hpp"
#include "snlab/models.hpp"

namespace snlab {

namespace {

void validate_garch(const GarchModel& g) {
    if (!(g.omega > 0.0) || !std::isfinite(g.omega)) throw PreconditionError("garch: omega must be positive");
    if (!(g.a1 >= 0.0) || !(g.b1 >= 0.0) || !std::isfinite(g.a1) || !std::isfinite(g.b1)) {
        throw PreconditionError("garch: a1 and b1 must be nonnegative");
    }
}

}  // namespace

std::size_t garch_burn_in(const GarchModel& g) {
    if (g.burn_in > 0) return g.burn_in;
    double s = std::min(g.a1 + g.b1, 0.99);
    return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(50.0 / (1.0 - s))));
}

double garch_moment(const GarchModel& g, double alpha) {
    validate_garch(g);
    using boost::math::constants::one_div_root_two_pi;
    // 2 * int_0^inf (a1 z^2 + b1)^alpha phi(z) dz
    auto f = [&](double z) {
        double base = g.a1 * z * z + g.b1;
        if (base <= 0.0) return 0.0;
        return 2.0 * one_div_root_two_pi<double>() * std::exp(alpha * std::log(base) - 0.5 * z * z);
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    double v = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13, &err);
    if (!(err <= 1e-9 * std::max(1.0, v))) throw NumericalError("garch moment quadrature did not converge", err);
    return v;
}

// f(alpha) = E[(a1 Z^2 + b1)^alpha] - 1 is convex with f(0) = 0, so a root
// in (0,2] exists iff f < 0 just right of 0 and f(2) >= 0.
double solve_garch_alpha(const GarchModel& g, double tol) {
    validate_garch(g);
    auto f = [&](double a) { return garch_moment(g, a) - 1.0; };
    double hi = 2.0;
    double fhi = f(hi);
    if (fhi < 0.0) throw NumericalError("garch: no tail index in (0,2]; moment equation stays below 1", fhi);
    double lo = 1e-3;
    double flo = f(lo);
    if (!(flo < 0.0)) {
        throw NumericalError("garch: no tail index in (0,2]; E log(a1 Z^2 + b1) >= 0 (b1 >= 1 or similar)", flo);
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fm < 0.0) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-14 && std::fabs(fm) <= tol) break;
    }
    double a = 0.5 * (lo + hi);
    double r = f(a);
    if (std::fabs(r) > tol) throw NumericalError("garch: root residual above tolerance", r);
    return a;
}

SeriesSample sample_garch(const GarchModel& g, std::size_t n, std::uint64_t seed) {
    validate_garch(g);
    if (n == 0) throw PreconditionError("sample size must be positive");
    SeriesSample s;
    s.seed = seed;
    s.spec = g;
    if (g.a1 == 0.0 && g.b1 == 0.0) {
        s.warning = "degenerate garch: a1 = b1 = 0 gives i.i.d. scaled normal noise";
        s.tail_index = std::numeric_limits<double>::infinity();
    } else {
        s.tail_index = 2.0 * solve_garch_alpha(g);
    }
    const std::size_t burn = garch_burn_in(g);
    Rng rng(seed);
    double sig2 = (g.a1 + g.b1 < 1.0) ? g.omega / (1.0 - g.a1 - g.b1) : g.omega;
    double zprev = 0.0;
    bool first = true;
    s.values.resize(n);
    s.sigma2.resize(n);
    for (std::size_t k = 0; k < burn + n; ++k) {
        if (!first) sig2 = g.omega + (g.a1 * zprev * zprev + g.b1) * sig2;
        first = false;
        double z = rng.normal();
        if (k >= burn) {
            s.values[k - burn] = std::sqrt(sig2) * z;
            s.sigma2[k - burn] = sig2;
        }
        zprev = z;
    }
    return s;
}

SeriesSample sample_squared_garch(const SquaredGarchModel& spec, std::size_t n, std::uint64_t seed) {
    SeriesSample g = sample_garch(spec.inner, n, seed);
    SeriesSample s;
    s.seed = seed;
    s.spec = spec;
    s.warning = g.warning;
    s.tail_index = g.tail_index / 2.0;
    s.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.values[i] = g.values[i] * g.values[i];
    s.second = std::move(g.sigma2);
    return s;
}

}  // namespace snlab
