#pragma once

#include <cstddef>
#include <vector>

#include "snlab/cadlag.hpp"

namespace snlab::detail {

struct Vtx {
    double t;
    double v;
};

// Vertices of the thin completed graph of one coordinate, in graph order,
// with exact duplicates and straight horizontal/vertical runs merged.
std::vector<Vtx> graph_vertices(const CadlagPath& x, std::size_t coord);

void require_unit_time(double t, bool allow_zero);

}  // namespace snlab::detail
