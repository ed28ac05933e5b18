#pragma once

// Hand-built meshes with exactly known geometry, used to pin down the metric
// and relaxation machinery independent of the candidate constructors.

#include <array>
#include <cstdint>

#include "torb/build_util.hpp"
#include "torb/mesh.hpp"

namespace torb::fixtures {

// Axis-aligned grid wall normal to `axis` at height `level`, oriented with
// u-space normal along +axis; front/back as given.
inline void add_wall(MeshAssembler& as, int axis, double level, int grid, int front, int back) {
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    std::vector<int> ids(size_t(grid) * grid);
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            Vec3 u;
            u[axis] = level;
            u[a1] = double(i) / grid;
            u[a2] = double(j) / grid;
            ids[size_t(i) * grid + j] = as.vertex(u);
        }
    auto ref = [&](int i, int j) {
        MeshAssembler::Ref r;
        r.v = ids[size_t(i % grid) * grid + (j % grid)];
        r.lift = IVec3{};
        r.lift[a1] = i / grid;
        r.lift[a2] = j / grid;
        return r;
    };
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            // wind so that cross(b-a, c-a) points along +axis: (a1, a2, axis) cyclic
            // u-space: e_{a1} x e_{a2} = e_axis  (axis, a1, a2 is a cyclic triple)
            as.tri(ref(i, j), ref(i + 1, j), ref(i + 1, j + 1), front, back);
            as.tri(ref(i, j), ref(i + 1, j + 1), ref(i, j + 1), front, back);
        }
}

// Double slab along `axis`: region 1 in [c, c+t1), region 2 in [c+t1, c+t1+t2).
inline Mesh double_slab(const Lattice& lat, int axis, double c, double t1, double t2,
                        int grid = 4) {
    MeshAssembler as(lat);
    const double det = lat.cell_volume();
    auto lv = [&](double x) { return x - std::floor(x); };
    // walls with +axis normals: at c (0 -> 1), c+t1 (1 -> 2), c+t1+t2 (2 -> 0)
    add_wall(as, axis, lv(c), grid, 1, 0);
    add_wall(as, axis, lv(c + t1), grid, 2, 1);
    add_wall(as, axis, lv(c + t1 + t2), grid, 0, 2);
    return as.finish(t1 * det, t2 * det);
}

// Axis-aligned box [lo, hi] as `region`; faces share vertices along box edges.
inline void add_box(MeshAssembler& as, const Vec3& lo, const Vec3& hi, int region, int grid) {
    const int n = grid;
    std::map<std::array<int, 3>, int> surf;
    auto vid = [&](int i, int j, int k) {
        auto key = std::array<int, 3>{i, j, k};
        auto it = surf.find(key);
        if (it != surf.end()) return it->second;
        Vec3 u{lo.x + (hi.x - lo.x) * i / n, lo.y + (hi.y - lo.y) * j / n,
               lo.z + (hi.z - lo.z) * k / n};
        int id = as.vertex(u);
        surf[key] = id;
        return id;
    };
    for (int axis = 0; axis < 3; ++axis) {
        for (int side = 0; side < 2; ++side) {
            auto at = [&](int i, int j) { // (i along a1, j along a2) -> index triple
                std::array<int, 3> idx;
                idx[axis] = side ? n : 0;
                idx[(axis + 1) % 3] = i;
                idx[(axis + 2) % 3] = j;
                return idx;
            };
            auto ref = [&](int i, int j) {
                auto ix = at(i, j);
                return MeshAssembler::Ref{vid(ix[0], ix[1], ix[2]), IVec3{}};
            };
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    if (side) { // outward normal +axis = e_a1 x e_a2 winding
                        as.tri(ref(i, j), ref(i + 1, j), ref(i + 1, j + 1), 0, region);
                        as.tri(ref(i, j), ref(i + 1, j + 1), ref(i, j + 1), 0, region);
                    } else {
                        as.tri(ref(i, j), ref(i, j + 1), ref(i + 1, j + 1), 0, region);
                        as.tri(ref(i, j), ref(i + 1, j + 1), ref(i + 1, j), 0, region);
                    }
                }
        }
    }
}

// Two disjoint axis-aligned box bubbles.
inline Mesh box_pair(const Lattice& lat, const Vec3& lo1, const Vec3& hi1, const Vec3& lo2,
                     const Vec3& hi2, int grid = 2) {
    MeshAssembler as(lat);
    add_box(as, lo1, hi1, 1, grid);
    add_box(as, lo2, hi2, 2, grid);
    const double det = lat.cell_volume();
    double v1 = (hi1.x - lo1.x) * (hi1.y - lo1.y) * (hi1.z - lo1.z);
    double v2 = (hi2.x - lo2.x) * (hi2.y - lo2.y) * (hi2.z - lo2.z);
    return as.finish(v1 * det, v2 * det);
}

// Square tube (region) wrapping along `axis`, transverse cross-section
// [lo1,hi1]x[lo2,hi2] in the other two axes; built as an extruded closed ring
// so the four walls share corner vertices.
inline void add_square_tube(MeshAssembler& as, int axis, double lo1, double hi1, double lo2,
                            double hi2, int region, int grid) {
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    // ring traversed CCW as seen from +axis
    std::vector<std::pair<double, double>> ring;
    for (int j = 0; j < grid; ++j) ring.push_back({hi1, lo2 + (hi2 - lo2) * j / grid});
    for (int j = 0; j < grid; ++j) ring.push_back({hi1 - (hi1 - lo1) * j / grid, hi2});
    for (int j = 0; j < grid; ++j) ring.push_back({lo1, hi2 - (hi2 - lo2) * j / grid});
    for (int j = 0; j < grid; ++j) ring.push_back({lo1 + (hi1 - lo1) * j / grid, lo2});
    const int nr = int(ring.size());
    std::vector<int> ids(size_t(grid) * nr);
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < nr; ++j) {
            Vec3 u;
            u[axis] = double(i) / grid;
            u[a1] = ring[j].first;
            u[a2] = ring[j].second;
            ids[size_t(i) * nr + j] = as.vertex(u);
        }
    auto ref = [&](int i, int j) {
        MeshAssembler::Ref r{ids[size_t(i % grid) * nr + (j % nr)], IVec3{}};
        r.lift[axis] = i / grid;
        return r;
    };
    // outward normal = t_ring x e_axis for a CCW ring
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < nr; ++j) {
            as.tri(ref(i, j), ref(i, j + 1), ref(i + 1, j + 1), 0, region);
            as.tri(ref(i, j), ref(i + 1, j + 1), ref(i + 1, j), 0, region);
        }
}

inline Mesh tube_pair(const Lattice& lat, int axis1, double a_lo1, double a_hi1, double a_lo2,
                      double a_hi2, int axis2, double b_lo1, double b_hi1, double b_lo2,
                      double b_hi2, int grid = 3) {
    MeshAssembler as(lat);
    add_square_tube(as, axis1, a_lo1, a_hi1, a_lo2, a_hi2, 1, grid);
    add_square_tube(as, axis2, b_lo1, b_hi1, b_lo2, b_hi2, 2, grid);
    const double det = lat.cell_volume();
    double v1 = (a_hi1 - a_lo1) * (a_hi2 - a_lo2); // in lattice fractions
    double v2 = (b_hi1 - b_lo1) * (b_hi2 - b_lo2);
    return as.finish(v1 * det, v2 * det);
}

} // namespace torb::fixtures
