#include <algorithm>
#include <cmath>

#include "snlab/cadlag.hpp"
#include "snlab/errors.hpp"

namespace snlab {

namespace {

std::vector<double> union_times(const CadlagPath& x, const CadlagPath& y) {
    std::vector<double> ts;
    std::merge(x.times().begin(), x.times().end(), y.times().begin(), y.times().end(), std::back_inserter(ts));
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

bool has_jumps(const CadlagPath& p) { return p.kind() == PathKind::Step && p.jump_count() > 0; }

}  // namespace

CadlagPath ratio_path(const CadlagPath& x, const CadlagPath& y) {
    if (y.dim() != 1) throw PreconditionError("ratio_path: divisor must have one coordinate");
    const auto& yv = y.values();
    if (!(yv[0] > 0.0)) throw PreconditionError("ratio_path: divisor violates C-up-0 condition y(0) > 0");
    for (std::size_t i = 1; i < yv.size(); ++i) {
        if (yv[i] < yv[i - 1]) throw PreconditionError("ratio_path: divisor violates C-up-0 condition: not nondecreasing");
    }
    if (has_jumps(y)) throw PreconditionError("ratio_path: divisor violates C-up-0 condition: not continuous");

    auto ts = union_times(x, y);
    std::vector<std::vector<double>> coords(x.dim(), std::vector<double>(ts.size()));
    for (std::size_t i = 0; i < ts.size(); ++i) {
        double d = eval1(y, ts[i]);
        for (std::size_t c = 0; c < x.dim(); ++c) coords[c][i] = eval1(x, ts[i], c) / d;
    }
    // a continuous numerator follows the divisor's interpolation
    PathKind kind = has_jumps(x) ? PathKind::Step : (x.kind() == PathKind::Linear ? x.kind() : y.kind());
    return CadlagPath(std::move(ts), std::move(coords), kind);
}

ProductResult product_path(const CadlagPath& x, const CadlagPath& y) {
    if (x.dim() != y.dim()) throw PreconditionError("product_path: dimension mismatch");
    PathKind kind;
    if (x.kind() == y.kind()) kind = x.kind();
    else if (!has_jumps(x) && x.kind() == PathKind::Step) kind = y.kind();
    else if (!has_jumps(y) && y.kind() == PathKind::Step) kind = x.kind();
    else throw PreconditionError("product_path: cannot merge a jumping step path with a piecewise-linear path");

    auto ts = union_times(x, y);
    ProductResult out{CadlagPath::constant(0.0, x.dim()), false};
    std::vector<std::vector<double>> coords(x.dim(), std::vector<double>(ts.size()));
    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t c = 0; c < x.dim(); ++c) {
            double xv = eval1(x, ts[i], c), yv = eval1(y, ts[i], c);
            coords[c][i] = xv * yv;
            if (i > 0 && kind == PathKind::Step) {
                double dx = xv - left_limit1(x, ts[i], c), dy = yv - left_limit1(y, ts[i], c);
                if (dx * dy < 0.0) out.opposite_jump_warning = true;
            }
        }
    }
    out.path = CadlagPath(std::move(ts), std::move(coords), kind);
    return out;
}

}  // namespace snlab
