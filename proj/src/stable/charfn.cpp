#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "snlab/errors.hpp"
#include "snlab/rng.hpp"
#include "snlab/stable.hpp"

namespace snlab {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// (sin(y) - y) / y^3 for small y
double sin_minus_id_cubed(double y) {
    double y2 = y * y;
    return -1.0 / 6 + y2 * (1.0 / 120 + y2 * (-1.0 / 5040 + y2 / 362880));
}

// int_0^inf (e^{izx} - 1 - izx 1{x<=1}) alpha x^{-alpha-1} dx for z > 0.
cplx positive_part(double z, double alpha) {
    const double A = std::max(1.0, 200.0 / z);
    // powers split so that x near 0 neither overflows nor loses digits
    auto re = [&](double x) {
        double s = std::sin(z * x / 2) / x;
        return -2.0 * s * s * alpha * std::pow(x, 1 - alpha);
    };
    auto im = [&](double x) {
        if (x <= 1.0 && z * x < 0.05) return sin_minus_id_cubed(z * x) * z * z * z * alpha * std::pow(x, 2 - alpha);
        double v = x <= 1.0 ? std::sin(z * x) - z * x : std::sin(z * x);
        return v * alpha * std::pow(x, -alpha - 1);
    };

    // [0, b] by tanh-sinh (integrable singularity at 0), then half periods
    const double half = kPi / z;
    const double b = std::min({1.0, half, A});
    boost::math::quadrature::tanh_sinh<double> ts;
    double err_re = 0.0, err_im = 0.0, l1 = 0.0;
    double r = ts.integrate(re, 0.0, b, 1e-13, &err_re, &l1);
    double i = ts.integrate(im, 0.0, b, 1e-13, &err_im, &l1);
    double scale = std::fabs(r) + std::fabs(i) + 1e-300;
    double worst = std::max(err_re, err_im);

    std::vector<double> cuts{b};
    for (double k = std::ceil(b / half); k * half < A; k += 1.0) {
        if (k * half > cuts.back()) cuts.push_back(k * half);
    }
    if (b < 1.0 && 1.0 < A) {
        cuts.push_back(1.0);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    }
    if (cuts.back() < A) cuts.push_back(A);
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double e1 = 0.0, e2 = 0.0;
        r += GK::integrate(re, cuts[k], cuts[k + 1], 10, 1e-13, &e1);
        i += GK::integrate(im, cuts[k], cuts[k + 1], 10, 1e-13, &e2);
        worst = std::max({worst, e1, e2});
    }

    // tail: alpha int_A^inf e^{izx} x^{-beta} dx - A^{-alpha}, beta = alpha+1,
    // by repeated integration by parts
    const double beta = alpha + 1.0;
    const cplx iz(0.0, z);
    cplx term = std::pow(A, -beta), sum = 0.0;
    for (int k = 0; k < 60; ++k) {
        sum += term;
        cplx next = term * (beta + k) / (iz * A);
        if (std::abs(next) >= std::abs(term) || std::abs(next) < 1e-18 * std::abs(sum)) break;
        term = next;
    }
    cplx tail = alpha * (-std::exp(iz * A) / iz * sum) - std::pow(A, -alpha);

    scale = std::fabs(r) + std::fabs(i);
    if (worst > 1e-8 * std::max(1.0, scale)) {
        throw NumericalError("levy exponent quadrature did not converge", worst);
    }
    return cplx(r, i) + tail;
}

}  // namespace

double sine_compensator_constant() { return positive_part(1.0, 1.0).imag(); }

std::complex<double> levy_exponent(double z, const CharTriple& t) {
    if (z == 0.0) return 0.0;
    cplx ip = positive_part(std::fabs(z), t.alpha);
    if (z < 0.0) ip = std::conj(ip);
    return cplx(0.0, t.gamma1 * z) + t.theta * (t.c_plus * ip + t.c_minus * std::conj(ip));
}

StableParams stable_params(const CharTriple& t) {
    const double a = t.alpha;
    const double s = t.c_plus + t.c_minus;
    if (!(s > 0.0)) throw PreconditionError("degenerate law: c_plus + c_minus = 0");
    if (!(a > 0.0 && a < 2.0)) throw PreconditionError("alpha must lie in (0,2)");
    StableParams sp;
    sp.alpha = a;
    sp.beta = (t.c_plus - t.c_minus) / s;
    const double d = t.theta * (t.c_plus - t.c_minus);
    if (a == 1.0) {
        sp.c = t.theta * s * kPi / 2;
        sp.tau = t.gamma1 + d * sine_compensator_constant();
    } else {
        sp.c = t.theta * s * std::tgamma(1.0 - a) * std::cos(kPi * a / 2);
        // tau = gamma1 - int_{|x|<=1} x nu_1(dx) below 1, + int_{|x|>1} above 1
        sp.tau = a < 1.0 ? t.gamma1 - a * d / (1.0 - a) : t.gamma1 + a * d / (a - 1.0);
    }
    return sp;
}

std::complex<double> charfn_stable(double z, const StableParams& sp) {
    if (z == 0.0) return 1.0;
    const double az = std::fabs(z), sg = z > 0 ? 1.0 : -1.0;
    cplx expo;
    if (sp.alpha == 1.0) {
        expo = cplx(0.0, sp.tau * z) - sp.c * az * cplx(1.0, sp.beta * (2.0 / kPi) * sg * std::log(az));
    } else {
        expo = cplx(0.0, sp.tau * z) -
               sp.c * std::pow(az, sp.alpha) * cplx(1.0, -sp.beta * sg * std::tan(kPi * sp.alpha / 2));
    }
    return std::exp(expo);
}

std::vector<double> cms_sampler(const StableParams& sp, std::size_t m, std::uint64_t seed) {
    const double a = sp.alpha, b = sp.beta;
    if (!(a > 0.0 && a < 2.0)) throw PreconditionError("alpha must lie in (0,2)");
    if (!(sp.c > 0.0)) throw PreconditionError("scale c must be positive");
    if (!(std::fabs(b) <= 1.0)) throw PreconditionError("beta must lie in [-1,1]");
    const double sigma = std::pow(sp.c, 1.0 / a);
    Rng rng(stream_seed(seed, "cms"));
    std::vector<double> out(m);
    if (a != 1.0) {
        const double tn = b * std::tan(kPi * a / 2);
        const double B = std::atan(tn) / a;
        const double S = std::pow(1.0 + tn * tn, 1.0 / (2 * a));
        for (auto& x : out) {
            double V = kPi * (rng.uniform() - 0.5);
            double W = rng.exponential();
            double X = S * std::sin(a * (V + B)) / std::pow(std::cos(V), 1.0 / a) *
                       std::pow(std::cos(V - a * (V + B)) / W, (1.0 - a) / a);
            x = sigma * X + sp.tau;
        }
    } else {
        for (auto& x : out) {
            double V = kPi * (rng.uniform() - 0.5);
            double W = rng.exponential();
            double h = kPi / 2 + b * V;
            double X = 2.0 / kPi * (h * std::tan(V) - b * std::log((kPi / 2) * W * std::cos(V) / h));
            x = sigma * X + 2.0 / kPi * b * sigma * std::log(sigma) + sp.tau;
        }
    }
    return out;
}

}  // namespace snlab
