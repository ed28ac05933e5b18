#include "torb/build_util.hpp"

#include <cmath>

#include "torb/errors.hpp"
#include "torb/metrics.hpp"

namespace torb {

int MeshAssembler::edge_for(const Ref& from, const Ref& to, int8_t& sign) {
    IVec3 w = to.lift - from.lift;
    auto fwd = std::make_tuple(from.v, to.v, w.x, w.y, w.z);
    auto it = edge_ids_.find(fwd);
    if (it != edge_ids_.end()) {
        sign = 1;
        return it->second;
    }
    auto rev = std::make_tuple(to.v, from.v, -w.x, -w.y, -w.z);
    it = edge_ids_.find(rev);
    if (it != edge_ids_.end()) {
        sign = -1;
        return it->second;
    }
    for (int c = 0; c < 3; ++c)
        if (std::abs(w[c]) > 1)
            throw Error("assembler: edge wrap component exceeds 1 (triangle too large)");
    int id = mesh_.add_edge(from.v, to.v, w);
    edge_ids_[fwd] = id;
    sign = 1;
    return id;
}

void MeshAssembler::tri(Ref a, Ref b, Ref c, int front, int back) {
    std::array<int, 3> es;
    std::array<int8_t, 3> sg;
    es[0] = edge_for(a, b, sg[0]);
    es[1] = edge_for(b, c, sg[1]);
    es[2] = edge_for(c, a, sg[2]);
    mesh_.add_facet(es, sg, front, back);
}

Mesh MeshAssembler::finish(double v1_target, double v2_target) {
    mesh_.bodies.clear();
    mesh_.bodies.push_back(Body{1, v1_target, 0});
    mesh_.bodies.push_back(Body{2, v2_target, 0});
    const double det = mesh_.lattice.cell_volume();
    auto raw = raw_region_volumes(mesh_);
    mesh_.body(1).vol_const = std::llround((v1_target - raw[1]) / det);
    mesh_.body(2).vol_const = std::llround((v2_target - raw[2]) / det);
    mesh_.recompute_triple_flags();
    return std::move(mesh_);
}

} // namespace torb
