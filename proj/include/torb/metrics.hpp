#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "torb/mesh.hpp"

namespace torb {

// Per-vertex ambient 3-vectors, indexed by vertex id (dead ids hold zeros).
struct GradientField {
    std::vector<Vec3> g;
    Vec3& operator[](int v) { return g[v]; }
    const Vec3& operator[](int v) const { return g[v]; }
    int size() const { return int(g.size()); }
};

// Anchored body volume: value = raw + k * det(basis), 0 < value < det.
struct VolumeReading {
    double raw = 0;
    long long k = 0;
    double value = 0;
};

// Sum of facet areas, each wall counted once.
double total_area(const Mesh& m);

// Exact gradient of total_area with respect to ambient vertex positions.
GradientField area_gradient(const Mesh& m);

// Unanchored region volumes {v0, v1, v2}, each defined modulo det(basis).
// Computed by the torus flux formula: facet potential terms plus cut-plane
// segment and point corrections, so each value is exact mod det and invariant
// under choice of vertex representatives.
std::array<double, 3> raw_region_volumes(const Mesh& m);

// Anchored volume of region 1 or 2 using the stored body constant.
VolumeReading body_volume(const Mesh& m, int region);

// Exact gradient of body_volume(...).value w.r.t. ambient vertex positions;
// supported only on vertices of facets bounding the region.
GradientField volume_gradient(const Mesh& m, int region);

// Re-pick the body's volume constant so the anchored value is closest to
// `previous_value`; call after topology-changing operations.
void reanchor_body(Mesh& m, int region, double previous_value);

// Volume re-anchored against an external reference instead of the stored
// constant: raw + round((reference - raw)/det) * det. Safe whenever the true
// volume is known to lie within det/2 of the reference (as it is throughout
// constrained relaxation, where volumes stay pinned to the body targets).
double anchored_volume_near(const Mesh& m, int region, double reference);

// Region containing the given canonical lattice-coordinate point, by ray
// casting toward a fixed irrational direction with perturb-and-retry.
int point_region(const Mesh& m, const Vec3& u);

// Reusable ray-cast acceleration structure for repeated queries.
class RegionLocator {
public:
    explicit RegionLocator(const Mesh& m);
    int locate(const Vec3& u) const; // throws ClassificationError after 8 retries

private:
    const Mesh& mesh_;
    struct Tri {
        Vec3 a, e1, e2; // u-space, pre-translated
        int facet;
    };
    std::vector<Tri> tris_;
    int grid_n_ = 1;
    std::vector<std::vector<int>> cells_;
    double det_scale_ = 1;
    int locate_once(const Vec3& u) const; // -1 = ambiguous
};

struct MonteCarloVolumes {
    std::array<double, 3> value{};  // per region, in volume units
    std::array<double, 3> stderr_{};
    long long samples = 0;
};

// Uniform sampling in the fundamental domain; deterministic for a fixed seed.
MonteCarloVolumes monte_carlo_volumes(const Mesh& m, long long n_samples, uint64_t seed);

} // namespace torb
