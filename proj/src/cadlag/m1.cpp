#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "graph.hpp"
#include "snlab/cadlag.hpp"
#include "snlab/errors.hpp"

namespace snlab {

namespace {

using detail::Vtx;

struct Iv {
    double lo = 1.0;
    double hi = 0.0;
    bool empty() const { return lo > hi; }
};

// Parameters lambda in [0,1] with |a + lambda (b - a) - c|_inf <= eps.
Iv free_interval(const Vtx& c, const Vtx& a, const Vtx& b, double eps) {
    Iv iv{0.0, 1.0};
    const double cs[2] = {c.t, c.v}, as[2] = {a.t, a.v}, bs[2] = {b.t, b.v};
    for (int k = 0; k < 2; ++k) {
        double d = bs[k] - as[k];
        if (d == 0.0) {
            if (std::fabs(as[k] - cs[k]) > eps) return Iv{};
            continue;
        }
        double l = (cs[k] - eps - as[k]) / d, h = (cs[k] + eps - as[k]) / d;
        if (d < 0.0) std::swap(l, h);
        iv.lo = std::max(iv.lo, l);
        iv.hi = std::min(iv.hi, h);
    }
    return iv;
}

double dist_inf(const Vtx& a, const Vtx& b) { return std::max(std::fabs(a.t - b.t), std::fabs(a.v - b.v)); }

// Per-row storage kept only when a coupling is requested.
struct Row {
    std::size_t jl = 0, jh = 0;  // inclusive band of Q segments
    std::vector<Iv> left;        // reachable part of the left edge of cell (i,j)
    std::vector<Iv> bottom;      // reachable part of the bottom edge of cell (i,j)
};

// Free-space reachability for polygonal curves P and Q under the max norm.
// The free space inside a cell is convex, so an edge point is reachable iff
// some reachable point on the cell's entry edges is componentwise below it.
// Cells whose time ranges are more than eps apart hold no free points, which
// restricts the sweep to a band along the diagonal.
class FreeSpace {
public:
    FreeSpace(const std::vector<Vtx>& P, const std::vector<Vtx>& Q) : P_(P), Q_(Q) {}

    bool decide(double eps, std::vector<Row>* keep) const {
        const std::size_t nP = P_.size() - 1, nQ = Q_.size() - 1;
        if (dist_inf(P_.front(), Q_.front()) > eps || dist_inf(P_.back(), Q_.back()) > eps) return false;
        if (keep) keep->assign(nP, Row{});

        std::vector<Iv> left_cur, left_next;
        std::size_t cur_jl = 0, cur_jh = 0;
        bool bottom_boundary_ok = true;
        std::size_t jl = 0, jh = 0;

        for (std::size_t i = 0; i < nP; ++i) {
            const double ta = P_[i].t - eps, tb = P_[i + 1].t + eps;
            while (jl < nQ && Q_[jl + 1].t < ta) ++jl;
            if (jh < jl) jh = jl;
            while (jh + 1 < nQ && Q_[jh + 1].t <= tb) ++jh;
            if (jl >= nQ || Q_[jl].t > tb) return false;

            const std::size_t width = jh - jl + 1;
            std::vector<Iv> left(width);
            if (i == 0) {
                bool ok = true;
                for (std::size_t j = 0; j <= jh; ++j) {
                    Iv L = free_interval(P_[0], Q_[j], Q_[j + 1], eps);
                    if (ok && !L.empty() && L.lo <= 0.0) {
                        if (j >= jl) left[j - jl] = L;
                        ok = L.hi >= 1.0;
                    } else {
                        ok = false;
                    }
                }
            } else {
                for (std::size_t j = jl; j <= jh; ++j) {
                    if (j >= cur_jl && j <= cur_jh) left[j - jl] = left_cur[j - cur_jl];
                }
            }

            Iv bottom;
            if (jl == 0) {
                Iv B = free_interval(Q_[0], P_[i], P_[i + 1], eps);
                if (bottom_boundary_ok && !B.empty() && B.lo <= 0.0) {
                    bottom = B;
                    bottom_boundary_ok = B.hi >= 1.0;
                } else {
                    bottom_boundary_ok = false;
                }
            } else {
                bottom_boundary_ok = false;
            }

            left_next.assign(width, Iv{});
            if (keep) {
                Row& r = (*keep)[i];
                r.jl = jl;
                r.jh = jh;
                r.left = left;
                r.bottom.assign(width, Iv{});
            }
            bool any = false;
            for (std::size_t j = jl; j <= jh; ++j) {
                const Iv& L = left[j - jl];
                if (keep) (*keep)[i].bottom[j - jl] = bottom;
                Iv top, right;
                if (!L.empty() || !bottom.empty()) {
                    Iv Bt = free_interval(Q_[j + 1], P_[i], P_[i + 1], eps);
                    if (!L.empty()) top = Bt;
                    else if (!Bt.empty()) top = Iv{std::max(Bt.lo, bottom.lo), Bt.hi};
                    Iv Lr = free_interval(P_[i + 1], Q_[j], Q_[j + 1], eps);
                    if (!bottom.empty()) right = Lr;
                    else if (!Lr.empty()) right = Iv{std::max(Lr.lo, L.lo), Lr.hi};
                }
                left_next[j - jl] = right;
                any = any || !right.empty() || !top.empty();
                bottom = top;
            }
            if (!any) return false;
            std::swap(left_cur, left_next);
            cur_jl = jl;
            cur_jh = jh;
        }
        // the end corner lies on the right edge of the last cell
        if (cur_jh != nQ - 1) return false;
        const Iv& last = left_cur[nQ - 1 - cur_jl];
        return !last.empty() && last.hi >= 1.0;
    }

private:
    const std::vector<Vtx>& P_;
    const std::vector<Vtx>& Q_;
};

Vtx point_on(const std::vector<Vtx>& C, double s) {
    auto i = static_cast<std::size_t>(std::floor(s));
    if (i + 1 >= C.size()) return C.back();
    double w = s - static_cast<double>(i);
    return {C[i].t + w * (C[i + 1].t - C[i].t), C[i].v + w * (C[i + 1].v - C[i].v)};
}

struct Prepared {
    std::vector<Vtx> P, Q;
    bool swapped = false;
    double upper = 0.0;
    double lower = 0.0;
};

void require_scalar(const CadlagPath& x, const CadlagPath& y) {
    if (x.dim() != 1 || y.dim() != 1) {
        throw PreconditionError("m1_distance is defined per coordinate; use weak_m1_distance for 2-d paths");
    }
}

Prepared prepare(const CadlagPath& x, const CadlagPath& y) {
    Prepared p;
    p.P = detail::graph_vertices(x, 0);
    p.Q = detail::graph_vertices(y, 0);
    // fixed operand order makes the result bitwise symmetric
    auto key = [](const std::vector<Vtx>& v) {
        std::vector<double> k;
        k.reserve(2 * v.size());
        for (const auto& q : v) {
            k.push_back(q.t);
            k.push_back(q.v);
        }
        return k;
    };
    if (key(p.Q) < key(p.P)) {
        std::swap(p.P, p.Q);
        p.swapped = true;
    }
    p.upper = uniform_distance(x, y);
    p.lower = std::max(dist_inf(p.P.front(), p.Q.front()), dist_inf(p.P.back(), p.Q.back()));
    return p;
}

// Bracket the smallest feasible eps. Probing upward from small levels first
// keeps the band narrow for close paths.
M1Result solve(const Prepared& p, std::size_t resolution, double caller_tol) {
    M1Result res;
    res.upper_bound = p.upper;
    const double r = static_cast<double>(resolution);
    res.tolerance = std::max(p.upper / (r * r), 1e-15 * p.upper);
    if (p.upper == 0.0) return res;
    FreeSpace fs(p.P, p.Q);
    double lo = p.lower;
    if (fs.decide(lo, nullptr)) {
        res.value = res.lower = lo;
        return res;
    }
    double hi = p.upper * (1.0 + 1e-12) + 1e-300;
    double probe = std::max(2.0 * lo, hi / 64.0);
    while (probe < hi) {
        if (fs.decide(probe, nullptr)) {
            hi = probe;
            break;
        }
        lo = probe;
        probe *= 2.0;
    }
    while (hi - lo > res.tolerance) {
        double mid = 0.5 * (lo + hi);
        if (fs.decide(mid, nullptr)) hi = mid;
        else lo = mid;
    }
    res.value = std::min(hi, p.upper);
    res.lower = lo;
    res.gap_flag = (res.value - res.lower) > caller_tol;
    return res;
}

}  // namespace

constexpr std::size_t kDefaultResolution = 1024;

std::size_t min_resolution(const CadlagPath& x, const CadlagPath& y) {
    return 2 * (x.jump_count() + y.jump_count() + x.size() + y.size());
}

M1Result m1_distance_report(const CadlagPath& x, const CadlagPath& y, std::size_t resolution, double caller_tol) {
    require_scalar(x, y);
    if (resolution < min_resolution(x, y)) {
        throw PreconditionError("resolution " + std::to_string(resolution) + " below required " +
                                std::to_string(min_resolution(x, y)));
    }
    return solve(prepare(x, y), resolution, caller_tol);
}

double m1_distance(const CadlagPath& x, const CadlagPath& y, std::size_t resolution) {
    return m1_distance_report(x, y, resolution).value;
}

double m1_distance(const CadlagPath& x, const CadlagPath& y) {
    require_scalar(x, y);
    return m1_distance(x, y, std::max(kDefaultResolution, min_resolution(x, y)));
}

double weak_m1_distance(const CadlagPath& x, const CadlagPath& y, std::size_t resolution) {
    if (x.dim() != y.dim()) throw PreconditionError("dimension mismatch in weak_m1_distance");
    double d = 0.0;
    for (std::size_t c = 0; c < x.dim(); ++c) d = std::max(d, m1_distance(x.coordinate(c), y.coordinate(c), resolution));
    return d;
}

double weak_m1_distance(const CadlagPath& x, const CadlagPath& y) {
    if (x.dim() != y.dim()) throw PreconditionError("dimension mismatch in weak_m1_distance");
    double d = 0.0;
    for (std::size_t c = 0; c < x.dim(); ++c) d = std::max(d, m1_distance(x.coordinate(c), y.coordinate(c)));
    return d;
}

M1Coupling m1_coupling(const CadlagPath& x, const CadlagPath& y, std::size_t resolution) {
    M1Result res = m1_distance_report(x, y, resolution);
    Prepared p = prepare(x, y);
    M1Coupling out;
    out.value = res.value;
    if (res.upper_bound == 0.0) {
        out.x_rep = parametric_representation(x, detail::graph_vertices(x, 0).size());
        out.y_rep = out.x_rep;
        return out;
    }
    double eps = res.value;
    std::vector<Row> rows;
    FreeSpace fs(p.P, p.Q);
    // the value may be the uniform bound itself; widen by rounding slack
    while (!fs.decide(eps, &rows)) eps = eps * (1.0 + 1e-12) + 1e-300;

    const std::size_t nP = p.P.size() - 1, nQ = p.Q.size() - 1;
    auto left_of = [&](std::size_t i, std::size_t j) -> Iv {
        const Row& r = rows[i];
        return (j >= r.jl && j <= r.jh) ? r.left[j - r.jl] : Iv{};
    };
    auto bottom_of = [&](std::size_t i, std::size_t j) -> Iv {
        const Row& r = rows[i];
        return (j >= r.jl && j <= r.jh) ? r.bottom[j - r.jl] : Iv{};
    };

    // walk back from (nP, nQ) through cells, always stepping to an entry point
    // that is componentwise below the current exit point
    std::vector<std::pair<double, double>> pts{{static_cast<double>(nP), static_cast<double>(nQ)}};
    std::size_t i = nP - 1, j = nQ - 1;
    bool via_right = true;
    for (;;) {
        auto [s, t] = pts.back();
        Iv L = left_of(i, j), B = bottom_of(i, j);
        double si = static_cast<double>(i), tj = static_cast<double>(j);
        bool use_bottom;
        double ns, nt;
        if (via_right) {
            use_bottom = !B.empty();
            if (use_bottom) {
                ns = si + B.hi;
                nt = tj;
            } else {
                ns = si;
                nt = tj + std::min(L.hi, t - tj);
            }
        } else {
            use_bottom = L.empty();
            if (!use_bottom) {
                ns = si;
                nt = tj + L.hi;
            } else {
                ns = si + std::min(B.hi, s - si);
                nt = tj;
            }
        }
        pts.emplace_back(ns, nt);
        if (!use_bottom) {
            if (i == 0) {
                // slide down the left boundary through Q's vertices
                for (double k = std::ceil(nt) - 1.0; k >= 1.0; k -= 1.0) pts.emplace_back(0.0, k);
                break;
            }
            --i;
            via_right = true;
        } else {
            if (j == 0) {
                for (double k = std::ceil(ns) - 1.0; k >= 1.0; k -= 1.0) pts.emplace_back(k, 0.0);
                break;
            }
            --j;
            via_right = false;
        }
    }
    pts.emplace_back(0.0, 0.0);
    std::reverse(pts.begin(), pts.end());

    ParametricRep rp, rq;
    for (auto [s, t] : pts) {
        Vtx a = point_on(p.P, s), b = point_on(p.Q, t);
        if (!rp.r.empty() && rp.r.back() == a.t && rp.u.back() == a.v && rq.r.back() == b.t && rq.u.back() == b.v) continue;
        rp.r.push_back(a.t);
        rp.u.push_back(a.v);
        rq.r.push_back(b.t);
        rq.u.push_back(b.v);
    }
    if (p.swapped) std::swap(rp, rq);
    out.x_rep = std::move(rp);
    out.y_rep = std::move(rq);
    return out;
}

}  // namespace snlab
