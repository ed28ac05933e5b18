#include "torb/geom2d.hpp"

#include <cmath>
#include <limits>

#include "torb/errors.hpp"

namespace torb {

namespace {
constexpr double PI = 3.14159265358979323846;
constexpr double DEG = PI / 180.0;
} // namespace

PlanarArc make_arc(double cx, double cy, double R, double t0, double t1) {
    PlanarArc a;
    a.cx = cx;
    a.cy = cy;
    a.R = R;
    a.t0 = t0;
    a.t1 = t1;
    a.x0 = cx + R * std::cos(t0);
    a.y0 = cy + R * std::sin(t0);
    a.x1 = cx + R * std::cos(t1);
    a.y1 = cy + R * std::sin(t1);
    return a;
}

PlanarArc make_segment(double x0, double y0, double x1, double y1) {
    PlanarArc a;
    a.straight = true;
    a.x0 = x0;
    a.y0 = y0;
    a.x1 = x1;
    a.y1 = y1;
    return a;
}

std::vector<std::pair<double, double>> PlanarArc::sample(int segments) const {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(segments + 1);
    for (int i = 0; i <= segments; ++i) {
        double s = double(i) / segments;
        if (straight)
            pts.push_back({x0 + s * (x1 - x0), y0 + s * (y1 - y0)});
        else {
            double t = t0 + s * (t1 - t0);
            pts.push_back({cx + R * std::cos(t), cy + R * std::sin(t)});
        }
    }
    return pts;
}

double PlanarArc::length() const {
    if (straight) return std::hypot(x1 - x0, y1 - y0);
    return R * std::abs(t1 - t0);
}

double revolve_volume_term(const PlanarArc& a) {
    if (a.straight)
        return PI * (a.x1 - a.x0) * (a.y0 * a.y0 + a.y0 * a.y1 + a.y1 * a.y1) / 3.0;
    auto F = [&](double t) {
        double c = std::cos(t);
        return a.cy * a.cy * (-c) + 2 * a.cy * a.R * (t / 2 - std::sin(2 * t) / 4) +
               a.R * a.R * (-c + c * c * c / 3.0);
    };
    return -PI * a.R * (F(a.t1) - F(a.t0));
}

double revolve_area(const PlanarArc& a) {
    if (a.straight) return 2 * PI * 0.5 * std::abs(a.y0 + a.y1) * a.length();
    double val = a.cy * (a.t1 - a.t0) + a.R * (std::cos(a.t0) - std::cos(a.t1));
    return std::abs(2 * PI * a.R * val);
}

double plane_area_term(const PlanarArc& a) {
    if (a.straight) return 0.5 * (a.x0 * a.y1 - a.x1 * a.y0);
    auto F = [&](double t) {
        return 0.5 * a.R * (a.cx * std::sin(t) - a.cy * std::cos(t) + a.R * t);
    };
    return F(a.t1) - F(a.t0);
}

// ---------------------------------------------------------------------------
// three-film family

ThreeFilm three_film(double rho, double psi) {
    ThreeFilm tf;
    tf.rho = rho;
    tf.psi = psi;
    const double thL = 150.0 * DEG + psi;
    const double thR = 30.0 * DEG + psi;
    const double th0 = 270.0 * DEG + psi;

    double cxL = rho * std::tan(thL);
    double cxR = rho * std::tan(thR);
    tf.R1 = rho / std::abs(std::cos(thL));
    tf.R2 = rho / std::abs(std::cos(thR));

    // left film: P+ -> P- counterclockwise around the left pole
    double aL = std::atan2(rho, -cxL);
    tf.left = make_arc(cxL, 0, tf.R1, aL, 2 * PI - aL);
    // right film: P- -> P+ counterclockwise through angle 0 (right pole)
    double aR = std::atan2(rho, -cxR);
    tf.right = make_arc(cxR, 0, tf.R2, -aR, aR);

    if (std::abs(std::cos(th0)) < 1e-12) {
        tf.R0 = std::numeric_limits<double>::infinity();
        tf.interface = make_segment(0, -rho, 0, rho);
    } else {
        double cx0 = rho * std::tan(th0);
        tf.R0 = rho / std::abs(std::cos(th0));
        double a0 = std::atan2(rho, -cx0);
        if (cx0 < 0) // near-chord crossing at angle 0
            tf.interface = make_arc(cx0, 0, tf.R0, -a0, a0);
        else // near-chord crossing at angle pi; traverse the short way
            tf.interface = make_arc(cx0, 0, tf.R0, -a0, a0 - 2 * PI);
    }
    return tf;
}

namespace {

struct FamilyVolumes {
    double v1, v2, area;
};

PlanarArc reversed(PlanarArc a) {
    std::swap(a.x0, a.x1);
    std::swap(a.y0, a.y1);
    std::swap(a.t0, a.t1);
    return a;
}

// Solids of revolution integrate over half-plane loops closed along the axis;
// the full symmetric meridian loops would cancel identically.
struct HalfArcs {
    PlanarArc left;      // P+ -> left pole
    PlanarArc right;     // right pole -> P+
    PlanarArc interface; // axis crossing -> P+ (upward)
};

HalfArcs half_arcs(const ThreeFilm& tf) {
    constexpr double PI_ = 3.14159265358979323846;
    HalfArcs h;
    h.left = make_arc(tf.left.cx, 0, tf.left.R, tf.left.t0, PI_);
    h.right = make_arc(tf.right.cx, 0, tf.right.R, 0, tf.right.t1);
    if (tf.interface.straight)
        h.interface = make_segment(0, 0, 0, tf.rho);
    else {
        double aP = std::atan2(tf.rho, -tf.interface.cx);
        double axis_t = (tf.interface.cx < 0) ? 0.0 : PI_;
        h.interface = make_arc(tf.interface.cx, 0, tf.interface.R, axis_t, aP);
    }
    return h;
}

FamilyVolumes family_volumes_3d(const ThreeFilm& tf) {
    HalfArcs h = half_arcs(tf);
    FamilyVolumes fv;
    // region 1 CCW: axis, interface up, left film out to its pole
    fv.v1 = -(revolve_volume_term(h.interface) + revolve_volume_term(h.left));
    // region 2 CCW: axis, right film up from its pole, interface down
    fv.v2 = -(revolve_volume_term(h.right) + revolve_volume_term(reversed(h.interface)));
    fv.area = revolve_area(h.left) + revolve_area(h.right) + revolve_area(h.interface);
    return fv;
}

FamilyVolumes family_areas_2d(const ThreeFilm& tf) {
    FamilyVolumes fv;
    fv.v1 = plane_area_term(tf.left) + plane_area_term(tf.interface);
    fv.v2 = plane_area_term(reversed(tf.interface)) + plane_area_term(tf.right);
    fv.area = tf.left.length() + tf.right.length() + tf.interface.length();
    return fv;
}

// Bisection for the family parameter hitting a volume ratio (decreasing in psi).
template <typename Fn>
double solve_psi(double target_ratio, Fn ratio_of_psi) {
    double lo = -59.9 * DEG, hi = 59.9 * DEG;
    if (!(ratio_of_psi(lo) > target_ratio && ratio_of_psi(hi) < target_ratio))
        throw Error("double bubble family: volume ratio outside the solvable bracket");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = ratio_of_psi(mid) - target_ratio;
        if (std::abs(fm) < 1e-14 * target_ratio || hi - lo < 1e-16) return mid;
        (fm > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

Sdb3D sdb_closed_form(double v1, double v2) {
    if (!(v1 > 0 && v2 > 0)) throw InvalidParameter("sdb_closed_form wants positive volumes");
    double psi = 0.0;
    if (v1 != v2)
        psi = solve_psi(v1 / v2, [](double p) {
            auto fv = family_volumes_3d(three_film(1.0, p));
            return fv.v1 / fv.v2;
        });
    FamilyVolumes unit = family_volumes_3d(three_film(1.0, psi));
    double scale = std::cbrt(v1 / unit.v1);
    Sdb3D out;
    out.films = three_film(scale, psi);
    FamilyVolumes fs = family_volumes_3d(out.films);
    out.v1 = fs.v1;
    out.v2 = fs.v2;
    out.area = fs.area;
    out.rho = scale;
    out.r1 = out.films.R1;
    out.r2 = out.films.R2;
    out.r0 = out.films.R0;
    out.planar_interface = out.films.interface.straight;
    HalfArcs h = half_arcs(out.films);
    out.left_meridian = h.left;
    out.right_meridian = h.right;
    out.interface_meridian = h.interface;
    return out;
}

Sdb2D sdb_2d(double a1, double a2) {
    if (!(a1 > 0 && a2 > 0)) throw InvalidParameter("sdb_2d wants positive areas");
    double psi = 0.0;
    if (a1 != a2)
        psi = solve_psi(a1 / a2, [](double p) {
            auto fv = family_areas_2d(three_film(1.0, p));
            return fv.v1 / fv.v2;
        });
    FamilyVolumes unit = family_areas_2d(three_film(1.0, psi));
    double scale = std::sqrt(a1 / unit.v1);
    Sdb2D out;
    out.films = three_film(scale, psi);
    FamilyVolumes fs = family_areas_2d(out.films);
    out.a1 = fs.v1;
    out.a2 = fs.v2;
    out.perimeter = fs.area;
    out.r0 = out.films.R0;
    out.r1 = out.films.R1;
    out.r2 = out.films.R2;
    out.straight_interface = out.films.interface.straight;
    return out;
}

// ---------------------------------------------------------------------------
// band with lens

BandLens2D band_lens_2d(double a_band, double a_lens, double px, double py) {
    if (!(a_band > 0 && a_lens > 0)) throw InvalidParameter("band_lens_2d wants positive areas");
    BandLens2D bl;
    const double seg_unit = PI / 3 - std::sqrt(3.0) / 4; // one 120-degree segment at R = 1
    bl.R = std::sqrt(a_lens / (2 * seg_unit));
    bl.w = bl.R * std::sqrt(3.0) / 2;
    bl.band_width = (a_band + a_lens / 2) / px;
    if (2 * bl.w > 0.85 * px)
        throw Infeasible("band lens: lens chord " + std::to_string(2 * bl.w) +
                         " exceeds 0.85 x period " + std::to_string(px));
    if (bl.R / 2 > 0.80 * bl.band_width)
        throw Infeasible("band lens: lens half-depth R/2 exceeds 0.8 x band width");
    if (bl.band_width + bl.R / 2 > 0.90 * py)
        throw Infeasible("band lens: band plus lens cap exceeds 0.9 x transverse period");
    bl.perimeter = 2 * px - 2 * bl.w + (4 * PI / 3) * bl.R;
    return bl;
}

// ---------------------------------------------------------------------------
// symmetric chain

namespace {

double seg_area(double R, double half_angle) { // circular segment over its chord
    return R * R * (half_angle - std::sin(half_angle) * std::cos(half_angle));
}

struct ChainEval {
    double f1, f2, f3;
};

ChainEval chain_residual(double phi, double h, double w1, double px, double a1, double a2) {
    const double th = 30.0 * DEG;
    double w2 = px - w1;
    double R1 = w1 / (2 * std::sin(th + phi));
    double R2 = w2 / (2 * std::sin(th - phi));
    double kappa0 = std::sin(phi) / h;
    ChainEval ce;
    ce.f1 = kappa0 - (1 / R1 - 1 / R2);
    double sep =
        (std::abs(phi) < 1e-300) ? 0.0 : seg_area(h / std::sin(std::abs(phi)), std::abs(phi));
    double s = (phi >= 0) ? 1.0 : -1.0; // phi > 0: separators bulge out of bubble 1
    ce.f2 = 2 * h * w1 + 2 * seg_area(R1, th + phi) + 2 * s * sep - a1;
    ce.f3 = 2 * h * w2 + 2 * seg_area(R2, th - phi) - 2 * s * sep - a2;
    return ce;
}

} // namespace

Chain2D chain_2d(double a1, double a2, double px, double py) {
    if (!(a1 > 0 && a2 > 0)) throw InvalidParameter("chain_2d wants positive areas");
    const double th = 30.0 * DEG;
    double w1 = px * a1 / (a1 + a2);
    double phi = 0;
    double h = (a1 - 2 * seg_area(w1 / (2 * std::sin(th)), th)) / (2 * w1);
    if (!(h > 0))
        throw Infeasible("chain: areas too small to span the period (junction height "
                         "would be negative)");

    for (int it = 0; it < 60; ++it) {
        ChainEval r = chain_residual(phi, h, w1, px, a1, a2);
        if (std::abs(r.f1) + std::abs(r.f2) + std::abs(r.f3) < 1e-13 * (a1 + a2)) break;
        const double dp = 1e-7;
        ChainEval rp = chain_residual(phi + dp, h, w1, px, a1, a2);
        ChainEval rh = chain_residual(phi, h + dp, w1, px, a1, a2);
        ChainEval rw = chain_residual(phi, h, w1 + dp, px, a1, a2);
        double J[3][3] = {{(rp.f1 - r.f1) / dp, (rh.f1 - r.f1) / dp, (rw.f1 - r.f1) / dp},
                          {(rp.f2 - r.f2) / dp, (rh.f2 - r.f2) / dp, (rw.f2 - r.f2) / dp},
                          {(rp.f3 - r.f3) / dp, (rh.f3 - r.f3) / dp, (rw.f3 - r.f3) / dp}};
        double b[3] = {-r.f1, -r.f2, -r.f3};
        int idx[3] = {0, 1, 2};
        for (int c = 0; c < 3; ++c) {
            int piv = c;
            for (int rr = c + 1; rr < 3; ++rr)
                if (std::abs(J[idx[rr]][c]) > std::abs(J[idx[piv]][c])) piv = rr;
            std::swap(idx[c], idx[piv]);
            double d = J[idx[c]][c];
            if (std::abs(d) < 1e-300) throw Infeasible("chain: geometry solve is singular");
            for (int rr = c + 1; rr < 3; ++rr) {
                double f = J[idx[rr]][c] / d;
                for (int cc = c; cc < 3; ++cc) J[idx[rr]][cc] -= f * J[idx[c]][cc];
                b[idx[rr]] -= f * b[idx[c]];
            }
        }
        double dx[3];
        for (int c = 2; c >= 0; --c) {
            double s = b[idx[c]];
            for (int cc = c + 1; cc < 3; ++cc) s -= J[idx[c]][cc] * dx[cc];
            dx[c] = s / J[idx[c]][c];
        }
        double lim = 1.0;
        auto clampstep = [&](double cur, double d, double lo, double hi) {
            if (d < 0 && cur + d < lo) lim = std::min(lim, (lo - cur) / d);
            if (d > 0 && cur + d > hi) lim = std::min(lim, (hi - cur) / d);
        };
        clampstep(phi, dx[0], -th * 0.98, th * 0.98);
        clampstep(h, dx[1], 1e-6 * py, 10 * py);
        clampstep(w1, dx[2], 0.01 * px, 0.99 * px);
        phi += lim * dx[0];
        h += lim * dx[1];
        w1 += lim * dx[2];
    }
    ChainEval r = chain_residual(phi, h, w1, px, a1, a2);
    if (std::abs(r.f1) + std::abs(r.f2) + std::abs(r.f3) > 1e-9 * (a1 + a2))
        throw Infeasible("chain: geometry solve did not converge for these areas");

    Chain2D out;
    out.phi = phi;
    out.h = h;
    out.w1 = w1;
    out.w2 = px - w1;
    out.R1 = w1 / (2 * std::sin(th + phi));
    out.R2 = out.w2 / (2 * std::sin(th - phi));
    out.R0 = (std::abs(phi) < 1e-14) ? std::numeric_limits<double>::infinity()
                                     : h / std::sin(std::abs(phi));
    double apex1 = h + out.R1 * (1 - std::cos(th + phi));
    double apex2 = h + out.R2 * (1 - std::cos(th - phi));
    if (std::max(apex1, apex2) > 0.45 * py)
        throw Infeasible("chain: bubble apex height " + std::to_string(std::max(apex1, apex2)) +
                         " exceeds 0.45 x transverse period");
    double sep_len = std::isinf(out.R0) ? 2 * h : out.R0 * 2 * std::abs(phi);
    out.perimeter = 2 * out.R1 * 2 * (th + phi) + 2 * out.R2 * 2 * (th - phi) + 2 * sep_len;
    return out;
}

} // namespace torb
