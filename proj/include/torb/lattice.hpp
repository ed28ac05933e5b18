#pragma once

#include <string>
#include <vector>

#include "torb/vec.hpp"

namespace torb {

enum class LatticeKind { Cubic, Rectangular, RhombicPrism };

std::string to_string(LatticeKind k);
LatticeKind lattice_kind_from_string(const std::string& s);

// Flat torus R^3 / (basis * Z^3). Columns of the basis are the period vectors.
// Points live in lattice coordinates u in [0,1)^3; ambient position = basis * u.
struct Lattice {
    Mat3 basis = Mat3::identity();
    Mat3 inv_basis = Mat3::identity();
    LatticeKind kind = LatticeKind::Cubic;
    std::vector<double> params; // cubic: {L}; rectangular: {a,b,c}; rhombic: {s,h}

    double cell_volume() const { return determinant(basis); }
    Vec3 ambient(const Vec3& u) const { return basis * u; }
    Vec3 lattice_coords(const Vec3& x) const { return inv_basis * x; }
    double period_length(int i) const { return norm(basis.col[i]); }
    double shortest_period() const;
    // Area of the flat torus spanned by the two periods other than i.
    double face_area(int i) const;
};

Lattice make_cubic(double L);
Lattice make_rectangular(double a, double b, double c);
// Right prism over a pi/3 rhombus: columns (s,0,0), (s/2, s*sqrt(3)/2, 0), (0,0,h).
Lattice make_rhombic_prism(double s, double h);

struct Canonical {
    Vec3 u;      // in [0,1)^3
    IVec3 shift; // original = u + shift
};

// Half-open convention: a coordinate of exactly 1.0 maps to 0.0 with shift +1.
Canonical canonicalize(const Vec3& u);

// Ambient vector basis*(head - tail + wrap): the unwrapped edge displacement.
Vec3 displacement(const Lattice& lat, const Vec3& tail_u, const Vec3& head_u, const IVec3& wrap);

// Shortest ambient distance between canonical points, over the 27 nearest images.
double min_image_distance(const Lattice& lat, const Vec3& p, const Vec3& q);

} // namespace torb
