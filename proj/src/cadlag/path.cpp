#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "graph.hpp"
#include "snlab/cadlag.hpp"
#include "snlab/errors.hpp"

namespace snlab {

CadlagPath::CadlagPath(std::vector<double> times, std::vector<std::vector<double>> coords, PathKind kind)
    : times_(std::move(times)), coords_(std::move(coords)), kind_(kind) {
    if (times_.empty()) throw PreconditionError("path needs at least the breakpoint t=0");
    if (times_.front() != 0.0) throw PreconditionError("first breakpoint must be t=0");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) throw PreconditionError("breakpoints must be strictly increasing");
    }
    if (!(times_.back() <= 1.0)) throw PreconditionError("breakpoints must lie in [0,1]");
    if (coords_.empty() || coords_.size() > 2) throw PreconditionError("path dimension must be 1 or 2");
    for (const auto& c : coords_) {
        if (c.size() != times_.size()) throw PreconditionError("one value per breakpoint and coordinate");
        for (double v : c) {
            if (!std::isfinite(v)) throw PreconditionError("path values must be finite");
        }
    }
}

CadlagPath CadlagPath::step(std::vector<double> times, std::vector<double> values) {
    return CadlagPath(std::move(times), {std::move(values)}, PathKind::Step);
}

CadlagPath CadlagPath::linear(std::vector<double> times, std::vector<double> values) {
    return CadlagPath(std::move(times), {std::move(values)}, PathKind::Linear);
}

CadlagPath CadlagPath::constant(double value, std::size_t dim) {
    return CadlagPath({0.0}, std::vector<std::vector<double>>(dim, std::vector<double>{value}), PathKind::Step);
}

CadlagPath CadlagPath::coordinate(std::size_t coord) const {
    return CadlagPath(times_, {coords_.at(coord)}, kind_);
}

std::size_t CadlagPath::jump_count() const {
    if (kind_ == PathKind::Linear) return 0;
    std::size_t n = 0;
    for (std::size_t i = 1; i < times_.size(); ++i) {
        for (const auto& c : coords_) {
            if (c[i] != c[i - 1]) {
                ++n;
                break;
            }
        }
    }
    return n;
}

namespace detail {

void require_unit_time(double t, bool allow_zero) {
    if (!(t >= 0.0 && t <= 1.0) || (!allow_zero && t == 0.0)) {
        throw std::domain_error("time " + std::to_string(t) + (allow_zero ? " outside [0,1]" : " outside (0,1]"));
    }
}

std::vector<Vtx> graph_vertices(const CadlagPath& x, std::size_t coord) {
    const auto& ts = x.times();
    const auto& vs = x.values(coord);
    std::vector<Vtx> raw;
    raw.reserve(2 * ts.size() + 1);
    raw.push_back({0.0, vs[0]});
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (x.kind() == PathKind::Step) {
            raw.push_back({ts[i], vs[i - 1]});
            if (vs[i] != vs[i - 1]) raw.push_back({ts[i], vs[i]});
        } else {
            raw.push_back({ts[i], vs[i]});
        }
    }
    if (ts.back() < 1.0) raw.push_back({1.0, vs.back()});

    std::vector<Vtx> out;
    out.reserve(raw.size());
    for (const Vtx& p : raw) {
        if (!out.empty() && out.back().t == p.t && out.back().v == p.v) continue;
        if (out.size() >= 2) {
            const Vtx& a = out[out.size() - 2];
            const Vtx& b = out.back();
            bool flat = a.v == b.v && b.v == p.v;
            bool vertical = a.t == b.t && b.t == p.t && (b.v - a.v) * (p.v - b.v) > 0.0;
            if (flat || vertical) {
                out.back() = p;
                continue;
            }
        }
        out.push_back(p);
    }
    if (out.size() == 1) out.push_back({1.0, out[0].v});
    return out;
}

}  // namespace detail

namespace {

std::size_t locate(const std::vector<double>& ts, double t) {
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    return static_cast<std::size_t>(it - ts.begin()) - 1;
}

double value_at(const CadlagPath& x, std::size_t i, double t, std::size_t c) {
    const auto& ts = x.times();
    const auto& vs = x.values(c);
    if (x.kind() == PathKind::Step || i + 1 == ts.size()) return vs[i];
    double w = (t - ts[i]) / (ts[i + 1] - ts[i]);
    return vs[i] + w * (vs[i + 1] - vs[i]);
}

}  // namespace

double eval1(const CadlagPath& x, double t, std::size_t coord) {
    detail::require_unit_time(t, true);
    return value_at(x, locate(x.times(), t), t, coord);
}

std::vector<double> eval(const CadlagPath& x, double t) {
    detail::require_unit_time(t, true);
    std::size_t i = locate(x.times(), t);
    std::vector<double> out(x.dim());
    for (std::size_t c = 0; c < x.dim(); ++c) out[c] = value_at(x, i, t, c);
    return out;
}

double left_limit1(const CadlagPath& x, double t, std::size_t coord) {
    detail::require_unit_time(t, false);
    if (x.kind() == PathKind::Linear) return value_at(x, locate(x.times(), t), t, coord);
    auto it = std::lower_bound(x.times().begin(), x.times().end(), t);
    auto i = static_cast<std::size_t>(it - x.times().begin()) - 1;
    return x.values(coord)[i];
}

std::vector<double> left_limit(const CadlagPath& x, double t) {
    std::vector<double> out(x.dim());
    for (std::size_t c = 0; c < x.dim(); ++c) out[c] = left_limit1(x, t, c);
    return out;
}

CompletedGraph completed_graph(const CadlagPath& x, std::size_t coord) {
    CompletedGraph g;
    if (x.kind() == PathKind::Linear) return g;
    const auto& ts = x.times();
    const auto& vs = x.values(coord);
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (vs[i] != vs[i - 1]) g.segments.push_back({ts[i], vs[i - 1], vs[i]});
    }
    return g;
}

ParametricRep parametric_representation(const CadlagPath& x, std::size_t resolution) {
    if (x.dim() != 1) throw PreconditionError("parametric_representation: one coordinate expected");
    auto verts = detail::graph_vertices(x, 0);
    if (resolution < verts.size()) {
        throw PreconditionError("resolution " + std::to_string(resolution) + " below graph vertex count " +
                                std::to_string(verts.size()));
    }
    std::size_t segs = verts.size() - 1;
    std::vector<double> len(segs);
    double total = 0.0;
    for (std::size_t k = 0; k < segs; ++k) {
        len[k] = std::max(verts[k + 1].t - verts[k].t, std::fabs(verts[k + 1].v - verts[k].v));
        total += len[k];
    }
    std::size_t extra = resolution - verts.size();
    std::vector<std::size_t> inner(segs, 0);
    std::size_t used = 0;
    for (std::size_t k = 0; k < segs && total > 0.0; ++k) {
        inner[k] = static_cast<std::size_t>(std::floor(static_cast<double>(extra) * len[k] / total));
        used += inner[k];
    }
    for (std::size_t k = 0; used < extra; k = (k + 1) % segs, ++used) ++inner[k];

    ParametricRep rep;
    rep.r.reserve(resolution);
    rep.u.reserve(resolution);
    for (std::size_t k = 0; k < segs; ++k) {
        rep.r.push_back(verts[k].t);
        rep.u.push_back(verts[k].v);
        for (std::size_t m = 1; m <= inner[k]; ++m) {
            double w = static_cast<double>(m) / static_cast<double>(inner[k] + 1);
            rep.r.push_back(verts[k].t + w * (verts[k + 1].t - verts[k].t));
            rep.u.push_back(verts[k].v + w * (verts[k + 1].v - verts[k].v));
        }
    }
    rep.r.push_back(verts.back().t);
    rep.u.push_back(verts.back().v);
    return rep;
}

bool on_completed_graph(const CadlagPath& x, double r, double u, double tol) {
    if (x.dim() != 1) throw PreconditionError("on_completed_graph: one coordinate expected");
    if (r < -tol || r > 1.0 + tol) return false;
    r = std::clamp(r, 0.0, 1.0);
    double hi = eval1(x, r);
    double lo = r > 0.0 ? left_limit1(x, r) : hi;
    if (lo > hi) std::swap(lo, hi);
    return u >= lo - tol && u <= hi + tol;
}

bool is_valid_representation(const CadlagPath& x, const ParametricRep& rep, double tol) {
    if (rep.r.empty() || rep.r.size() != rep.u.size()) return false;
    if (rep.r.front() != 0.0 || rep.r.back() != 1.0) return false;
    for (std::size_t i = 0; i < rep.r.size(); ++i) {
        if (i > 0 && rep.r[i] < rep.r[i - 1]) return false;
        if (!on_completed_graph(x, rep.r[i], rep.u[i], tol)) return false;
    }
    // graph order: along a vertical segment u must move from x(t-) to x(t)
    for (std::size_t i = 1; i < rep.r.size(); ++i) {
        if (rep.r[i] != rep.r[i - 1]) continue;
        double t = rep.r[i];
        if (t == 0.0) continue;
        double from = left_limit1(x, t), to = eval1(x, t);
        double d_prev = std::fabs(rep.u[i - 1] - from), d_cur = std::fabs(rep.u[i] - from);
        if (d_cur + tol < d_prev && from != to) return false;
    }
    return true;
}

CadlagPath step_refinement(const CadlagPath& x, std::size_t pieces) {
    if (x.kind() == PathKind::Step) return x;
    if (pieces == 0) throw PreconditionError("step_refinement: pieces must be positive");
    const auto& ts = x.times();
    std::vector<double> times;
    std::vector<std::vector<double>> coords(x.dim());
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        double h = (ts[i + 1] - ts[i]) / static_cast<double>(pieces);
        for (std::size_t k = 0; k < pieces; ++k) {
            double t = ts[i] + static_cast<double>(k) * h;
            if (!times.empty() && !(t > times.back())) continue;
            times.push_back(t);
            for (std::size_t c = 0; c < x.dim(); ++c) {
                double w = static_cast<double>(k) / static_cast<double>(pieces);
                coords[c].push_back(x.values(c)[i] + w * (x.values(c)[i + 1] - x.values(c)[i]));
            }
        }
    }
    times.push_back(ts.back());
    for (std::size_t c = 0; c < x.dim(); ++c) coords[c].push_back(x.values(c).back());
    return CadlagPath(std::move(times), std::move(coords), PathKind::Step);
}

}  // namespace snlab
