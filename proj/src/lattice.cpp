#include "torb/lattice.hpp"

#include <cmath>

#include "torb/errors.hpp"

namespace torb {

std::string to_string(LatticeKind k) {
    switch (k) {
    case LatticeKind::Cubic: return "cubic";
    case LatticeKind::Rectangular: return "rectangular";
    case LatticeKind::RhombicPrism: return "rhombic-prism";
    }
    return "?";
}

LatticeKind lattice_kind_from_string(const std::string& s) {
    if (s == "cubic") return LatticeKind::Cubic;
    if (s == "rectangular") return LatticeKind::Rectangular;
    if (s == "rhombic-prism") return LatticeKind::RhombicPrism;
    throw ParseError("unknown lattice kind '" + s + "'");
}

double Lattice::shortest_period() const {
    return std::min({norm(basis.col[0]), norm(basis.col[1]), norm(basis.col[2])});
}

double Lattice::face_area(int i) const {
    return norm(cross(basis.col[(i + 1) % 3], basis.col[(i + 2) % 3]));
}

static Lattice finish(Lattice lat) {
    lat.inv_basis = inverse(lat.basis);
    return lat;
}

Lattice make_cubic(double L) {
    if (!(L > 0)) throw InvalidParameter("cubic lattice needs L > 0");
    Lattice lat;
    lat.kind = LatticeKind::Cubic;
    lat.params = {L};
    lat.basis = {{Vec3{L, 0, 0}, Vec3{0, L, 0}, Vec3{0, 0, L}}};
    return finish(lat);
}

Lattice make_rectangular(double a, double b, double c) {
    if (!(a > 0 && b > 0 && c > 0)) throw InvalidParameter("rectangular lattice needs a,b,c > 0");
    Lattice lat;
    lat.kind = LatticeKind::Rectangular;
    lat.params = {a, b, c};
    lat.basis = {{Vec3{a, 0, 0}, Vec3{0, b, 0}, Vec3{0, 0, c}}};
    return finish(lat);
}

Lattice make_rhombic_prism(double s, double h) {
    if (!(s > 0 && h > 0)) throw InvalidParameter("rhombic prism lattice needs s,h > 0");
    Lattice lat;
    lat.kind = LatticeKind::RhombicPrism;
    lat.params = {s, h};
    lat.basis = {{Vec3{s, 0, 0}, Vec3{s / 2, s * std::sqrt(3.0) / 2, 0}, Vec3{0, 0, h}}};
    return finish(lat);
}

Canonical canonicalize(const Vec3& u) {
    Canonical c;
    for (int i = 0; i < 3; ++i) {
        double f = std::floor(u[i]);
        double r = u[i] - f;
        if (r >= 1.0) { // rounding can push the remainder to exactly 1
            r -= 1.0;
            f += 1.0;
        }
        c.u[i] = r;
        c.shift[i] = int(f);
    }
    return c;
}

Vec3 displacement(const Lattice& lat, const Vec3& tail_u, const Vec3& head_u, const IVec3& wrap) {
    return lat.basis * (head_u - tail_u + to_vec3(wrap));
}

double min_image_distance(const Lattice& lat, const Vec3& p, const Vec3& q) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = -1; k <= 1; ++k) {
                Vec3 d = lat.basis * (q - p + Vec3{double(i), double(j), double(k)});
                best = std::min(best, norm2(d));
            }
    return std::sqrt(best);
}

} // namespace torb
