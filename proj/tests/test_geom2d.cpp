#include <doctest.h>

#include <cmath>

#include "torb/errors.hpp"
#include "torb/geom2d.hpp"

using namespace torb;

namespace {
constexpr double PI = 3.14159265358979323846;

// independent quadrature oracles: integrate along densely sampled polylines
double polyline_revolve_volume(const PlanarArc& a, int n = 20000) {
    auto pts = a.sample(n);
    double acc = 0;
    for (int i = 0; i < n; ++i) {
        auto [x0, r0] = pts[i];
        auto [x1, r1] = pts[i + 1];
        acc += PI * (x1 - x0) * (r0 * r0 + r0 * r1 + r1 * r1) / 3.0;
    }
    return acc;
}

double polyline_plane_area(const PlanarArc& a, int n = 20000) {
    auto pts = a.sample(n);
    double acc = 0;
    for (int i = 0; i < n; ++i)
        acc += 0.5 * (pts[i].first * pts[i + 1].second - pts[i + 1].first * pts[i].second);
    return acc;
}
} // namespace

TEST_CASE("revolve volume: sphere and spherical cap") {
    double R = 0.7;
    PlanarArc arc = make_arc(0, 0, R, 0, PI); // upper meridian, CCW with the axis
    double vol = -revolve_volume_term(arc);
    CHECK(vol == doctest::Approx(4.0 / 3 * PI * R * R * R).epsilon(1e-14));
    CHECK(-polyline_revolve_volume(arc) == doctest::Approx(vol).epsilon(1e-7));

    // cap of height h beyond the plane x = R - h: lid up, then arc to the pole
    double h = 0.25;
    double t_cut = std::acos((R - h) / R);
    PlanarArc cap = make_arc(0, 0, R, 0, t_cut); // pole up to the junction ring
    PlanarArc lid = make_segment(R - h, R * std::sin(t_cut), R - h, 0);
    double vcap = -(revolve_volume_term(cap) + revolve_volume_term(lid));
    CHECK(vcap == doctest::Approx(PI * h * h * (3 * R - h) / 3).epsilon(1e-13));
}

TEST_CASE("revolve area: sphere zone") {
    double R = 0.9, h = 0.3;
    double t_cut = std::acos((R - h) / R);
    PlanarArc cap = make_arc(0, 0, R, 0, t_cut);
    CHECK(revolve_area(cap) == doctest::Approx(2 * PI * R * h).epsilon(1e-13));
}

TEST_CASE("sdb closed form: equal volumes against hand formulas") {
    double v = 0.01;
    Sdb3D s = sdb_closed_form(v, v);
    CHECK(s.planar_interface);
    double R = std::cbrt(8 * v / (9 * PI));
    CHECK(s.r1 == doctest::Approx(R).epsilon(1e-12));
    CHECK(s.r2 == doctest::Approx(R).epsilon(1e-12));
    CHECK(s.rho == doctest::Approx(std::sqrt(3.0) / 2 * R).epsilon(1e-12));
    CHECK(s.area == doctest::Approx(6.75 * PI * R * R).epsilon(1e-12));
    CHECK(s.v1 == doctest::Approx(v).epsilon(1e-12));
    CHECK(s.v2 == doctest::Approx(v).epsilon(1e-12));
}

TEST_CASE("sdb closed form: general volumes, quadrature oracle, symmetry") {
    double v1 = 0.02, v2 = 0.01;
    Sdb3D s = sdb_closed_form(v1, v2);
    CHECK(s.v1 == doctest::Approx(v1).epsilon(1e-10));
    CHECK(s.v2 == doctest::Approx(v2).epsilon(1e-10));
    CHECK(!s.planar_interface);
    // pressure balance: the interface curvature is the pressure difference
    CHECK(1 / s.r0 == doctest::Approx(1 / s.r2 - 1 / s.r1).epsilon(1e-10));

    double q1 = -(polyline_revolve_volume(s.interface_meridian) +
                  polyline_revolve_volume(s.left_meridian));
    CHECK(q1 == doctest::Approx(v1).epsilon(1e-7));

    Sdb3D t = sdb_closed_form(v2, v1);
    CHECK(t.area == doctest::Approx(s.area).epsilon(1e-11));

    auto sphere_area = [](double v) { return std::cbrt(36 * PI * v * v); };
    CHECK(s.area < sphere_area(v1) + sphere_area(v2));

    for (double ratio : {1.5, 3.0, 8.0, 20.0}) {
        Sdb3D u = sdb_closed_form(ratio * 0.004, 0.004);
        CHECK(u.v1 / u.v2 == doctest::Approx(ratio).epsilon(1e-9));
        CHECK(u.r1 > u.r2); // larger volume, larger exterior sphere
    }
}

TEST_CASE("sdb 2d: areas from the quadrature oracle") {
    Sdb2D s = sdb_2d(0.05, 0.02);
    CHECK(s.a1 == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(s.a2 == doctest::Approx(0.02).epsilon(1e-10));
    double q1 = polyline_plane_area(s.films.left) + polyline_plane_area(s.films.interface);
    CHECK(q1 == doctest::Approx(0.05).epsilon(1e-7));
    CHECK(1 / s.r0 == doctest::Approx(1 / s.r2 - 1 / s.r1).epsilon(1e-10));

    Sdb2D e = sdb_2d(0.03, 0.03);
    CHECK(e.straight_interface);
    // equal case: each exterior arc spans 240 degrees, chord length 2 rho
    CHECK(e.perimeter ==
          doctest::Approx(2 * e.r1 * (4 * PI / 3) + 2 * e.films.rho).epsilon(1e-12));
}

TEST_CASE("band with lens: closed form and feasibility") {
    BandLens2D bl = band_lens_2d(0.3, 0.05, 1.0, 1.0);
    const double seg = PI / 3 - std::sqrt(3.0) / 4;
    CHECK(2 * bl.R * bl.R * seg == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(bl.w == doctest::Approx(bl.R * std::sqrt(3.0) / 2).epsilon(1e-12));
    CHECK(bl.band_width == doctest::Approx(0.3 + 0.025).epsilon(1e-12));
    CHECK(bl.perimeter == doctest::Approx(2 - 2 * bl.w + 4 * PI / 3 * bl.R).epsilon(1e-12));
    CHECK_THROWS_AS(band_lens_2d(0.3, 0.8, 1.0, 1.0), Infeasible);
}

TEST_CASE("chain: equal areas against the hand construction") {
    double a = 0.2;
    Chain2D c = chain_2d(a, a, 1.0, 1.0);
    CHECK(c.phi == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(c.w1 == doctest::Approx(0.5).epsilon(1e-10));
    double R = 0.5; // chord w at a 30-degree tangent-chord angle
    double segarea = R * R * (PI / 6 - std::sin(PI / 6) * std::cos(PI / 6));
    double h = (a - 2 * segarea) / (2 * 0.5);
    CHECK(c.h == doctest::Approx(h).epsilon(1e-9));
    CHECK(c.perimeter == doctest::Approx(4 * (R * PI / 3) + 4 * h).epsilon(1e-9));
}

TEST_CASE("chain: unequal areas solve and report consistent geometry") {
    Chain2D c = chain_2d(0.26, 0.2, 1.0, 1.0);
    CHECK(c.w1 + c.w2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.phi > 0); // separators bulge into the smaller bubble
    CHECK(1 / c.R1 - 1 / c.R2 == doctest::Approx(std::sin(c.phi) / c.h).epsilon(1e-8));
    CHECK_THROWS_AS(chain_2d(0.01, 0.01, 1.0, 1.0), Infeasible); // cannot span
    CHECK_THROWS_AS(chain_2d(0.45, 0.45, 1.0, 1.0), Infeasible); // apex too tall
}
