#pragma once

#include <map>
#include <tuple>

#include "torb/mesh.hpp"

namespace torb {

// Assembles a mesh from lifted triangles. Callers name vertices by canonical
// position once, then emit triangles whose corners are (vertex id, integer
// lift); edge wraps and sharing fall out of the integer bookkeeping.
class MeshAssembler {
public:
    explicit MeshAssembler(const Lattice& lat) { mesh_.lattice = lat; }

    int vertex(const Vec3& canonical_u) { return mesh_.add_vertex(canonical_u); }

    struct Ref {
        int v;
        IVec3 lift;
    };

    // Winding: the u-space normal of (a,b,c) points from `back` into `front`.
    void tri(Ref a, Ref b, Ref c, int front, int back);

    Mesh& mesh() { return mesh_; }

    // Set bodies, anchor volume constants to the targets, refresh caches.
    Mesh finish(double v1_target, double v2_target);

private:
    Mesh mesh_;
    std::map<std::tuple<int, int, int, int, int>, int> edge_ids_;
    int edge_for(const Ref& from, const Ref& to, int8_t& sign);
};

} // namespace torb
