#pragma once

#include <vector>

#include "torb/vec.hpp"

namespace torb {

// Circular arc in a plane (meridian (x,r) or cross-section (x,y)):
// p(t) = center + R (cos t, sin t), traversed from t0 to t1 (either direction).
// straight == true degenerates to the segment p0 -> p1.
struct PlanarArc {
    double cx = 0, cy = 0, R = 0;
    double t0 = 0, t1 = 0;
    bool straight = false;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0; // endpoints (always filled)

    std::vector<std::pair<double, double>> sample(int segments) const;
    double length() const;
};

PlanarArc make_arc(double cx, double cy, double R, double t0, double t1);
PlanarArc make_segment(double x0, double y0, double x1, double y1);

// pi * Int r^2 dx along the arc (for solids of revolution about the x axis,
// assemble region volumes as -sum over a CCW boundary loop).
double revolve_volume_term(const PlanarArc& a);
// Area of the surface of revolution: 2 pi Int |r| ds (unsigned).
double revolve_area(const PlanarArc& a);
// (1/2) Int (x dy - y dx): plane area contribution of a CCW boundary piece.
double plane_area_term(const PlanarArc& a);

// --- standard double bubble, shared tangent-angle family ---------------------
// Two junction points at (0, +-rho); three films through them meeting at 120
// degrees, centers on the x axis. psi parametrizes the family; psi = 0 is the
// equal-volume case with a straight interface. Region 1 is on the left.
struct ThreeFilm {
    double rho = 0;
    double psi = 0;
    PlanarArc left;      // traversed P+ -> P- around the left pole (region 1 CCW)
    PlanarArc interface; // traversed P- -> P+ (region 1 CCW)
    PlanarArc right;     // traversed P- -> P+ around the right pole (region 2 CCW)
    double R0 = 0, R1 = 0, R2 = 0; // interface/left/right radii (R0 = inf if straight)
};
ThreeFilm three_film(double rho, double psi);

struct Sdb3D {
    double area = 0;
    double v1 = 0, v2 = 0;
    double r0 = 0, r1 = 0, r2 = 0; // interface/exterior sphere radii
    double rho = 0;                // triple-circle radius
    bool planar_interface = false;
    ThreeFilm films;               // meridian geometry, scaled
    // half-plane meridian profiles (r >= 0), ready to revolve into cap meshes
    PlanarArc left_meridian;      // junction -> left pole
    PlanarArc right_meridian;     // right pole -> junction
    PlanarArc interface_meridian; // axis -> junction
};
// Closed-form standard double bubble enclosing v1 >= ... any positive volumes.
// Root-solves the family to 1e-12 relative residual, then scales.
Sdb3D sdb_closed_form(double v1, double v2);

struct Sdb2D {
    double perimeter = 0;
    double a1 = 0, a2 = 0;
    double r0 = 0, r1 = 0, r2 = 0;
    bool straight_interface = false;
    ThreeFilm films;
};
Sdb2D sdb_2d(double a1, double a2);

// --- band with lens (2D torus px x py) ---------------------------------------
// Flat band (region 1) with a symmetric two-arc lens (region 2) embedded in
// its upper wall; both lens arcs meet the wall at 120 degrees.
struct BandLens2D {
    double R = 0;          // lens arc radius
    double w = 0;          // lens half-chord
    double band_width = 0; // flat band thickness (wall to wall)
    double perimeter = 0;
};
BandLens2D band_lens_2d(double a_band, double a_lens, double px, double py);

// --- symmetric two-bubble chain (2D torus, chain wrapping along x) -----------
struct Chain2D {
    double w1 = 0, w2 = 0; // bubble widths, w1 + w2 = px
    double h = 0;          // junction half-height
    double phi = 0;        // separator tilt; 0 when a1 == a2
    double R0 = 0, R1 = 0, R2 = 0;
    double perimeter = 0;
};
Chain2D chain_2d(double a1, double a2, double px, double py);

} // namespace torb
