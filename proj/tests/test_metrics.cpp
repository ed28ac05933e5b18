#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "torb/errors.hpp"
#include "torb/metrics.hpp"

using namespace torb;
using namespace torb::fixtures;

namespace {

double hash_unit(uint64_t x) { // deterministic pseudo-random in [-1, 1]
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ull;
    x ^= x >> 33;
    return 2.0 * (double(x >> 11) * 0x1.0p-53) - 1.0;
}

void jiggle(Mesh& m, double amp) {
    std::vector<Vec3> du(m.n_vertices());
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (!m.vertex_alive(v)) continue;
        for (int c = 0; c < 3; ++c) du[v][c] = amp * hash_unit(uint64_t(v) * 3 + c + 1);
    }
    m.move_vertices_u(du);
}

// Max relative component error between analytic gradient and central finite
// differences of `value` at step h (ambient coordinates).
template <typename F>
double fd_gradient_error(Mesh& m, const GradientField& grad, F value, double h) {
    double gmax = 0;
    for (const Vec3& g : grad.g) gmax = std::max(gmax, norm_inf(g));
    double worst = 0;
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (!m.vertex_alive(v)) continue;
        for (int c = 0; c < 3; ++c) {
            Vec3 dx{};
            dx[c] = h;
            Vec3 du = m.lattice.inv_basis * dx;
            std::vector<Vec3> step(m.n_vertices());
            step[v] = du;
            Mesh plus = m;
            plus.move_vertices_u(step);
            step[v] = -du;
            Mesh minus = m;
            minus.move_vertices_u(step);
            double fd = (value(plus) - value(minus)) / (2 * h);
            double an = grad[v][c];
            double denom = std::max({std::abs(fd), std::abs(an), 1e-3 * gmax});
            worst = std::max(worst, std::abs(fd - an) / denom);
        }
    }
    return worst;
}

} // namespace

TEST_CASE("double slab: exact area and volumes in all orientations") {
    for (int axis = 0; axis < 3; ++axis) {
        // straddle the flux cut planes on purpose
        for (double c : {0.05, 0.20, 0.70}) {
            Lattice lat = make_cubic(1.0);
            Mesh m = double_slab(lat, axis, c, 1.0 / 3, 1.0 / 3);
            REQUIRE(m.validate().ok());
            CHECK(total_area(m) == doctest::Approx(3.0).epsilon(1e-12));
            auto v1 = body_volume(m, 1);
            auto v2 = body_volume(m, 2);
            CHECK(v1.value == doctest::Approx(1.0 / 3).epsilon(1e-12));
            CHECK(v2.value == doctest::Approx(1.0 / 3).epsilon(1e-12));
        }
    }
}

TEST_CASE("slab thickness sweep hits exact volumes") {
    Lattice lat = make_cubic(1.0);
    for (double t1 : {0.1, 0.17, 0.4}) {
        Mesh m = double_slab(lat, 2, 0.11, t1, 0.25);
        CHECK(body_volume(m, 1).value == doctest::Approx(t1).epsilon(1e-12));
        CHECK(body_volume(m, 2).value == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("box pair: compact regions, exact volumes, partition identity") {
    Lattice lat = make_rectangular(1.0, 1.2, 0.9);
    // box 1 deliberately straddles all three cut planes (0.414, 0.732, 0.236)
    Vec3 lo1{0.30, 0.60, 0.10}, hi1{0.55, 0.85, 0.35};
    Vec3 lo2{0.65, 0.05, 0.55}, hi2{0.95, 0.35, 0.95};
    Mesh m = box_pair(lat, lo1, hi1, lo2, hi2, 3);
    REQUIRE(m.validate().ok());
    const double det = lat.cell_volume();
    double v1e = 0.25 * 0.25 * 0.25 * det, v2e = 0.30 * 0.30 * 0.40 * det;
    CHECK(body_volume(m, 1).value == doctest::Approx(v1e).epsilon(1e-12));
    CHECK(body_volume(m, 2).value == doctest::Approx(v2e).epsilon(1e-12));
    auto raw = raw_region_volumes(m);
    double v0 = raw[0] + std::round(((det - v1e - v2e) - raw[0]) / det) * det;
    CHECK(v0 == doctest::Approx(det - v1e - v2e).epsilon(1e-9));
}

TEST_CASE("square tubes: wrapped regions, exact volumes") {
    Lattice lat = make_cubic(1.0);
    // tube 1 along x straddling the z cut; tube 2 along z straddling the x cut
    Mesh m = tube_pair(lat, 0, 0.55, 0.85, 0.10, 0.40, 2, 0.30, 0.55, 0.05, 0.30);
    REQUIRE(m.validate().ok());
    CHECK(body_volume(m, 1).value == doctest::Approx(0.3 * 0.3).epsilon(1e-12));
    CHECK(body_volume(m, 2).value == doctest::Approx(0.25 * 0.25).epsilon(1e-12));
    // area: tube 1 perimeter 4*0.3 * period 1 + tube 2 perimeter 4*0.25
    CHECK(total_area(m) == doctest::Approx(4 * 0.3 + 4 * 0.25).epsilon(1e-12));
}

TEST_CASE("volume tracks translations modulo det; stale anchors are reported") {
    Lattice lat = make_cubic(1.0);
    Mesh m = tube_pair(lat, 0, 0.55, 0.85, 0.10, 0.40, 2, 0.30, 0.55, 0.05, 0.30, 4);
    const double det = lat.cell_volume();
    double expect1 = body_volume(m, 1).value;
    double expect2 = body_volume(m, 2).value;
    // drag everything around the torus; raw may jump by whole multiples of det
    // when flat walls sweep across the flux cut planes, never by anything else
    for (int step = 0; step < 40; ++step) {
        m.translate(Vec3{0.05, 0.013, -0.027});
        CHECK(anchored_volume_near(m, 1, expect1) == doctest::Approx(expect1).epsilon(1e-10));
        CHECK(anchored_volume_near(m, 2, expect2) == doctest::Approx(expect2).epsilon(1e-10));
        reanchor_body(m, 1, expect1);
        reanchor_body(m, 2, expect2);
        CHECK(body_volume(m, 1).value == doctest::Approx(expect1).epsilon(1e-10));
        double raw_residue = std::fmod(std::abs(raw_region_volumes(m)[1] - expect1), det);
        raw_residue = std::min(raw_residue, det - raw_residue);
        CHECK(raw_residue < 1e-10); // jumps are exact multiples of det
    }
    CHECK(m.validate().ok());

    // a deliberately stale constant is detected, not silently absorbed
    m.body(1).vol_const += 1;
    CHECK_THROWS_AS(body_volume(m, 1), AnchorError);
}

TEST_CASE("jiggled meshes: gradients match finite differences") {
    Lattice lat = make_cubic(1.0);

    Mesh slab = double_slab(lat, 2, 0.21, 0.3, 0.3, 4);
    jiggle(slab, 0.012);
    REQUIRE(slab.validate().ok());

    Mesh tubes = tube_pair(lat, 0, 0.55, 0.85, 0.10, 0.40, 2, 0.30, 0.55, 0.05, 0.30);
    jiggle(tubes, 0.012);
    REQUIRE(tubes.validate().ok());

    Mesh boxes = box_pair(lat, Vec3{0.30, 0.60, 0.10}, Vec3{0.55, 0.85, 0.35},
                          Vec3{0.65, 0.05, 0.55}, Vec3{0.95, 0.35, 0.95}, 2);
    jiggle(boxes, 0.012);
    REQUIRE(boxes.validate().ok());

    for (Mesh* mp : {&slab, &tubes, &boxes}) {
        Mesh& m = *mp;
        auto ag = area_gradient(m);
        double e1 = fd_gradient_error(m, ag, [](const Mesh& mm) { return total_area(mm); }, 1e-6);
        CHECK(e1 < 1e-5);
        for (int region : {1, 2}) {
            auto vg = volume_gradient(m, region);
            double e2 = fd_gradient_error(
                m, vg, [region](const Mesh& mm) { return body_volume(mm, region).value; }, 1e-6);
            CHECK(e2 < 1e-5);
            // support: zero on vertices not bounding the region
            auto vf = m.vertex_facets();
            for (int v = 0; v < m.n_vertices(); ++v) {
                if (!m.vertex_alive(v)) continue;
                bool touches = false;
                for (int f : vf[v])
                    touches |= (m.facet(f).front == region || m.facet(f).back == region);
                if (!touches) CHECK(norm(vg[v]) == 0.0);
            }
        }
    }
}

TEST_CASE("area gradient scaling degree") {
    Lattice lat1 = make_cubic(1.0), lat2 = make_cubic(2.0);
    Mesh a = double_slab(lat1, 2, 0.21, 0.3, 0.3);
    Mesh b = double_slab(lat2, 2, 0.21, 0.3, 0.3);
    jiggle(a, 0.01);
    jiggle(b, 0.01);
    auto ga = area_gradient(a), gb = area_gradient(b);
    for (int v = 0; v < a.n_vertices(); ++v)
        for (int c = 0; c < 3; ++c) CHECK(gb[v][c] == doctest::Approx(2 * ga[v][c]).epsilon(1e-9));
}

TEST_CASE("flat wall interior vertices are area-critical") {
    Lattice lat = make_cubic(1.0);
    Mesh m = double_slab(lat, 1, 0.05, 0.25, 0.5);
    auto g = area_gradient(m);
    for (int v = 0; v < m.n_vertices(); ++v)
        if (m.vertex_alive(v)) CHECK(norm(g[v]) < 1e-12);
}

TEST_CASE("point_region on the double slab") {
    Lattice lat = make_cubic(1.0);
    Mesh m = double_slab(lat, 2, 0.1, 0.3, 0.3);
    CHECK(point_region(m, Vec3{0.5, 0.5, 0.25}) == 1);  // inside region 1 slab
    CHECK(point_region(m, Vec3{0.5, 0.5, 0.55}) == 2);
    CHECK(point_region(m, Vec3{0.5, 0.5, 0.9}) == 0);
    CHECK(point_region(m, Vec3{0, 0, 0}) == 0);
}

TEST_CASE("point_region on boxes and tubes") {
    Lattice lat = make_cubic(1.0);
    Mesh boxes = box_pair(lat, Vec3{0.30, 0.60, 0.10}, Vec3{0.55, 0.85, 0.35},
                          Vec3{0.65, 0.05, 0.55}, Vec3{0.95, 0.35, 0.95}, 2);
    CHECK(point_region(boxes, Vec3{0.4, 0.7, 0.2}) == 1);
    CHECK(point_region(boxes, Vec3{0.8, 0.2, 0.7}) == 2);
    CHECK(point_region(boxes, Vec3{0.1, 0.1, 0.1}) == 0);

    Mesh tubes = tube_pair(lat, 0, 0.55, 0.85, 0.10, 0.40, 2, 0.30, 0.55, 0.05, 0.30);
    CHECK(point_region(tubes, Vec3{0.02, 0.7, 0.25}) == 1);
    CHECK(point_region(tubes, Vec3{0.4, 0.15, 0.9}) == 2);
    CHECK(point_region(tubes, Vec3{0.1, 0.45, 0.7}) == 0);
}

TEST_CASE("monte carlo volumes agree with exact volumes") {
    Lattice lat = make_cubic(1.0);
    Mesh m = double_slab(lat, 2, 0.1, 1.0 / 3, 1.0 / 3);
    auto mc = monte_carlo_volumes(m, 200000, 7);
    for (int r = 0; r < 3; ++r) {
        CHECK(std::abs(mc.value[r] - 1.0 / 3) < 3.5 * mc.stderr_[r]);
    }
    // determinism
    auto mc2 = monte_carlo_volumes(m, 200000, 7);
    CHECK(mc.value == mc2.value);
    CHECK_THROWS_AS(monte_carlo_volumes(m, 0, 1), InvalidParameter);
}

TEST_CASE("total_area invariant under lattice translation") {
    Lattice lat = make_rectangular(1.0, 0.9, 1.1);
    Mesh m = box_pair(lat, Vec3{0.30, 0.60, 0.10}, Vec3{0.55, 0.85, 0.35}, Vec3{0.65, 0.05, 0.55},
                      Vec3{0.95, 0.35, 0.95}, 2);
    jiggle(m, 0.01);
    double a0 = total_area(m);
    double v1 = body_volume(m, 1).value;
    double v2 = body_volume(m, 2).value;
    m.translate(Vec3{0.37, 0.61, 0.93});
    reanchor_body(m, 1, v1); // raw is defined mod det; translations can re-bin it
    reanchor_body(m, 2, v2);
    CHECK(m.validate().ok());
    CHECK(total_area(m) == doctest::Approx(a0).epsilon(1e-12));
    CHECK(body_volume(m, 1).value == doctest::Approx(v1).epsilon(1e-10));
}
