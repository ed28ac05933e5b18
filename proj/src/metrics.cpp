#include "torb/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "torb/errors.hpp"

namespace torb {

namespace {

// Cut offsets for the torus flux formula; irrational-ish constants keep the
// cut planes away from the rational levels candidate constructions sit on.
constexpr double K1 = 0.41421356237309515; // frac(sqrt 2)
constexpr double K2 = 0.73205080756887720; // frac(sqrt 3)
constexpr double K3 = 0.23606797749978967; // frac(sqrt 5)

double fracd(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f -= 1.0;
    return f;
}

struct PolyPt {
    double x, y, h;
};

// Sutherland-Hodgman against h >= tau (keep_ge) or h <= tau.
template <bool KeepGe>
int clip_poly(const PolyPt* in, int n, double tau, PolyPt* out) {
    int m = 0;
    for (int i = 0; i < n; ++i) {
        const PolyPt& p = in[i];
        const PolyPt& q = in[(i + 1) % n];
        bool pin = KeepGe ? (p.h >= tau) : (p.h <= tau);
        bool qin = KeepGe ? (q.h >= tau) : (q.h <= tau);
        if (pin) out[m++] = p;
        if (pin != qin) {
            double t = (tau - p.h) / (q.h - p.h);
            out[m++] = {p.x + t * (q.x - p.x), p.y + t * (q.y - p.y), tau};
        }
    }
    return m;
}

double poly_signed_area(const PolyPt* p, int n) {
    double a = 0;
    for (int i = 1; i + 1 < n; ++i) {
        double x1 = p[i].x - p[0].x, y1 = p[i].y - p[0].y;
        double x2 = p[i + 1].x - p[0].x, y2 = p[i + 1].y - p[0].y;
        a += 0.5 * (x1 * y2 - x2 * y1);
    }
    return a;
}

double poly_integral_h(const PolyPt* p, int n) { // signed integral of h dA
    double a = 0;
    for (int i = 1; i + 1 < n; ++i) {
        double x1 = p[i].x - p[0].x, y1 = p[i].y - p[0].y;
        double x2 = p[i + 1].x - p[0].x, y2 = p[i + 1].y - p[0].y;
        a += 0.5 * (x1 * y2 - x2 * y1) * (p[0].h + p[i].h + p[i + 1].h) / 3.0;
    }
    return a;
}

// Contribution of one cut segment, oriented P -> Q:
//   -Int_seg frac(y - K2) dx   plus point terms  sign(dy) * frac(x - K1)
// at crossings of y - K2 through integers.
double segment_flux(double px, double py, double qx, double qy) {
    double y0 = py - K2, y1 = qy - K2;
    double res = 0;
    int mlo = int(std::floor(std::min(y0, y1)));
    int mhi = int(std::floor(std::max(y0, y1)));
    // parameter breakpoints at integer crossings of y'
    double ts[8];
    int nt = 0;
    ts[nt++] = 0.0;
    if (y1 != y0) {
        for (int mm = mlo + 1; mm <= mhi; ++mm) {
            double t = (double(mm) - y0) / (y1 - y0);
            if (t > 0.0 && t < 1.0 && nt < 7) ts[nt++] = t;
        }
        if (y1 < y0) std::reverse(ts + 1, ts + nt);
    }
    ts[nt++] = 1.0;
    for (int i = 0; i + 1 < nt; ++i) {
        double ta = ts[i], tb = ts[i + 1];
        double ya = y0 + ta * (y1 - y0), yb = y0 + tb * (y1 - y0);
        double xa = px + ta * (qx - px), xb = px + tb * (qx - px);
        double ymid = 0.5 * (ya + yb);
        res -= (ymid - std::floor(ymid)) * (xb - xa);
    }
    double dir = (y1 > y0) ? 1.0 : -1.0;
    if (y1 != y0)
        for (int mm = mlo + 1; mm <= mhi; ++mm) {
            double t = (double(mm) - y0) / (y1 - y0);
            double x = px + t * (qx - px);
            res += dir * fracd(x - K1);
        }
    return res;
}

// Torus flux of one oriented lifted triangle (u-space): the facet's
// contribution to the volume on its back side, modulo 1. Odd under
// orientation flip.
double tri_flux_u(const Vec3& A, const Vec3& B, const Vec3& C) {
    double res = 0;
    PolyPt tri[3] = {{A.x, A.y, A.z - K3}, {B.x, B.y, B.z - K3}, {C.x, C.y, C.z - K3}};
    double hmin = std::min({tri[0].h, tri[1].h, tri[2].h});
    double hmax = std::max({tri[0].h, tri[1].h, tri[2].h});
    int jlo = int(std::floor(hmin));
    int jhi = int(std::floor(hmax));

    if (jlo == jhi) {
        double a12 = poly_signed_area(tri, 3);
        res += poly_integral_h(tri, 3) - double(jlo) * a12;
    } else {
        PolyPt buf1[8], buf2[8];
        for (int j = jlo; j <= jhi; ++j) {
            int n1 = clip_poly<true>(tri, 3, double(j), buf1);
            if (n1 < 3) continue;
            int n2 = clip_poly<false>(buf1, n1, double(j) + 1.0, buf2);
            if (n2 < 3) continue;
            res += poly_integral_h(buf2, n2) - double(j) * poly_signed_area(buf2, n2);
        }
    }

    // cut segments at integer levels of h'
    if (jhi > jlo) {
        Vec3 n = cross(B - A, C - A);
        double tx = -n.y, ty = n.x;
        if (std::abs(tx) + std::abs(ty) > 1e-14) {
            for (int j = jlo + 1; j <= jhi; ++j) {
                double tau = double(j);
                double xs[2], ys[2];
                int np = 0;
                const PolyPt* v[3] = {&tri[0], &tri[1], &tri[2]};
                for (int e = 0; e < 3 && np < 2; ++e) {
                    const PolyPt& p = *v[e];
                    const PolyPt& q = *v[(e + 1) % 3];
                    if ((p.h >= tau) == (q.h >= tau)) continue;
                    double t = (tau - p.h) / (q.h - p.h);
                    xs[np] = p.x + t * (q.x - p.x);
                    ys[np] = p.y + t * (q.y - p.y);
                    ++np;
                }
                if (np != 2) continue;
                // orient along (-ny, nx)
                double d = (xs[1] - xs[0]) * tx + (ys[1] - ys[0]) * ty;
                if (d >= 0)
                    res += segment_flux(xs[0], ys[0], xs[1], ys[1]);
                else
                    res += segment_flux(xs[1], ys[1], xs[0], ys[0]);
            }
        }
    }
    return res;
}

} // namespace

double total_area(const Mesh& m) {
    double a = 0;
    for (int f = 0; f < m.n_facets(); ++f)
        if (m.facet_alive(f)) a += m.facet_area(f);
    return a;
}

GradientField area_gradient(const Mesh& m) {
    GradientField g;
    g.g.assign(m.n_vertices(), Vec3{});
    for (int fid = 0; fid < m.n_facets(); ++fid) {
        if (!m.facet_alive(fid)) continue;
        auto p = m.facet_lift_ambient(fid);
        Vec3 n = cross(p[1] - p[0], p[2] - p[0]);
        double ln = norm(n);
        if (ln < 1e-300) continue;
        Vec3 nh = n / ln;
        auto vs = m.facet_vertices(fid);
        g[vs[0]] += cross(p[1] - p[2], nh) * 0.5;
        g[vs[1]] += cross(p[2] - p[0], nh) * 0.5;
        g[vs[2]] += cross(p[0] - p[1], nh) * 0.5;
    }
    return g;
}

std::array<double, 3> raw_region_volumes(const Mesh& m) {
    std::array<double, 3> acc{0, 0, 0};
    for (int fid = 0; fid < m.n_facets(); ++fid) {
        if (!m.facet_alive(fid)) continue;
        auto lu = m.facet_lift_u(fid);
        double flux = tri_flux_u(lu[0], lu[1], lu[2]);
        const Facet& f = m.facet(fid);
        acc[f.back] += flux;  // stored normal is outward for the back region
        acc[f.front] -= flux;
    }
    const double det = m.lattice.cell_volume();
    return {acc[0] * det, acc[1] * det, acc[2] * det};
}

VolumeReading body_volume(const Mesh& m, int region) {
    if (region != 1 && region != 2) throw InvalidParameter("body_volume wants region 1 or 2");
    const double det = m.lattice.cell_volume();
    VolumeReading r;
    r.raw = raw_region_volumes(m)[region];
    r.k = m.body(region).vol_const;
    r.value = r.raw + double(r.k) * det;
    if (!(r.value > 0 && r.value < det))
        throw AnchorError("anchored volume of region " + std::to_string(region) + " is " +
                          std::to_string(r.value) + ", outside (0, det): stale volume constant");
    return r;
}

GradientField volume_gradient(const Mesh& m, int region) {
    if (region != 1 && region != 2) throw InvalidParameter("volume_gradient wants region 1 or 2");
    GradientField g;
    g.g.assign(m.n_vertices(), Vec3{});
    for (int fid = 0; fid < m.n_facets(); ++fid) {
        if (!m.facet_alive(fid)) continue;
        const Facet& f = m.facet(fid);
        double eps = (f.back == region) ? 1.0 : (f.front == region) ? -1.0 : 0.0;
        if (eps == 0) continue;
        Vec3 av = m.facet_area_vec(fid) * (eps / 3.0);
        for (int v : m.facet_vertices(fid)) g[v] += av;
    }
    return g;
}

void reanchor_body(Mesh& m, int region, double previous_value) {
    const double det = m.lattice.cell_volume();
    double raw = raw_region_volumes(m)[region];
    m.body(region).vol_const = std::llround((previous_value - raw) / det);
}

double anchored_volume_near(const Mesh& m, int region, double reference) {
    const double det = m.lattice.cell_volume();
    double raw = raw_region_volumes(m)[region];
    return raw + double(std::llround((reference - raw) / det)) * det;
}

// ---------------------------------------------------------------------------
// point classification by ray casting

namespace {
// fixed irrational ambient ray direction (1, phi, phi^2), normalized in u-space
const double PHI = 0.5 * (1.0 + std::sqrt(5.0));
} // namespace

RegionLocator::RegionLocator(const Mesh& m) : mesh_(m) {
    for (int fid = 0; fid < m.n_facets(); ++fid) {
        if (!m.facet_alive(fid)) continue;
        auto lu = m.facet_lift_u(fid);
        Vec3 lo{std::min({lu[0].x, lu[1].x, lu[2].x}), std::min({lu[0].y, lu[1].y, lu[2].y}),
                std::min({lu[0].z, lu[1].z, lu[2].z})};
        Vec3 hi{std::max({lu[0].x, lu[1].x, lu[2].x}), std::max({lu[0].y, lu[1].y, lu[2].y}),
                std::max({lu[0].z, lu[1].z, lu[2].z})};
        for (int tx = int(std::ceil(-hi.x - 1e-9)); tx <= int(std::floor(1 - lo.x + 1e-9)); ++tx)
            for (int ty = int(std::ceil(-hi.y - 1e-9)); ty <= int(std::floor(1 - lo.y + 1e-9)); ++ty)
                for (int tz = int(std::ceil(-hi.z - 1e-9)); tz <= int(std::floor(1 - lo.z + 1e-9));
                     ++tz) {
                    Vec3 t{double(tx), double(ty), double(tz)};
                    tris_.push_back({lu[0] + t, lu[1] - lu[0], lu[2] - lu[0], fid});
                }
    }
    grid_n_ = std::clamp(int(std::cbrt(double(tris_.size()) * 0.5)) + 1, 2, 48);
    cells_.assign(size_t(grid_n_) * grid_n_ * grid_n_, {});
    auto cell_range = [&](double lo, double hi, int& a, int& b) {
        a = std::clamp(int(std::floor(lo * grid_n_)), 0, grid_n_ - 1);
        b = std::clamp(int(std::floor(hi * grid_n_)), 0, grid_n_ - 1);
    };
    for (size_t i = 0; i < tris_.size(); ++i) {
        const Tri& t = tris_[i];
        Vec3 p1 = t.a + t.e1, p2 = t.a + t.e2;
        int ax, bx, ay, by, az, bz;
        cell_range(std::min({t.a.x, p1.x, p2.x}) - 1e-9, std::max({t.a.x, p1.x, p2.x}) + 1e-9, ax, bx);
        cell_range(std::min({t.a.y, p1.y, p2.y}) - 1e-9, std::max({t.a.y, p1.y, p2.y}) + 1e-9, ay, by);
        cell_range(std::min({t.a.z, p1.z, p2.z}) - 1e-9, std::max({t.a.z, p1.z, p2.z}) + 1e-9, az, bz);
        for (int cx = ax; cx <= bx; ++cx)
            for (int cy = ay; cy <= by; ++cy)
                for (int cz = az; cz <= bz; ++cz)
                    cells_[(size_t(cx) * grid_n_ + cy) * grid_n_ + cz].push_back(int(i));
    }
    det_scale_ = std::cbrt(m.lattice.cell_volume());
}

int RegionLocator::locate_once(const Vec3& u0) const {
    const Vec3 d_amb = normalized(Vec3{1.0, PHI, PHI * PHI});
    Vec3 d = normalized(mesh_.lattice.inv_basis * d_amb);

    Vec3 p = canonicalize(u0).u;
    const int max_passes = 12;
    for (int pass = 0; pass < max_passes; ++pass) {
        // exit parameter of the unit box along d from p
        double t_exit = 1e30;
        for (int ax = 0; ax < 3; ++ax) {
            if (d[ax] > 1e-30)
                t_exit = std::min(t_exit, (1.0 - p[ax]) / d[ax]);
            else if (d[ax] < -1e-30)
                t_exit = std::min(t_exit, (0.0 - p[ax]) / d[ax]);
        }
        // DDA through grid cells
        double best_t = 1e30;
        int best_tri = -1;
        bool ambiguous = false;
        int ci[3];
        for (int ax = 0; ax < 3; ++ax)
            ci[ax] = std::clamp(int(std::floor(p[ax] * grid_n_)), 0, grid_n_ - 1);
        double t_max[3], t_delta[3];
        int step[3];
        for (int ax = 0; ax < 3; ++ax) {
            if (d[ax] > 1e-30) {
                step[ax] = 1;
                t_max[ax] = ((ci[ax] + 1.0) / grid_n_ - p[ax]) / d[ax];
                t_delta[ax] = 1.0 / (grid_n_ * d[ax]);
            } else if (d[ax] < -1e-30) {
                step[ax] = -1;
                t_max[ax] = (double(ci[ax]) / grid_n_ - p[ax]) / d[ax];
                t_delta[ax] = -1.0 / (grid_n_ * d[ax]);
            } else {
                step[ax] = 0;
                t_max[ax] = 1e30;
                t_delta[ax] = 1e30;
            }
        }
        double t_cell_entry = 0;
        while (t_cell_entry <= t_exit + 1e-12 && t_cell_entry < best_t) {
            for (int idx : cells_[(size_t(ci[0]) * grid_n_ + ci[1]) * grid_n_ + ci[2]]) {
                const Tri& tr = tris_[idx];
                // Moller-Trumbore in u-space
                Vec3 pv = cross(d, tr.e2);
                double det = dot(tr.e1, pv);
                if (std::abs(det) < 1e-14) continue;
                Vec3 tv = p - tr.a;
                double bu = dot(tv, pv) / det;
                if (bu < -1e-12 || bu > 1 + 1e-12) continue;
                Vec3 qv = cross(tv, tr.e1);
                double bv = dot(d, qv) / det;
                if (bv < -1e-12 || bu + bv > 1 + 1e-12) continue;
                double t = dot(tr.e2, qv) / det;
                if (t < 1e-12 || t >= best_t) continue;
                bool grazing = bu < 1e-9 || bv < 1e-9 || bu + bv > 1 - 1e-9;
                if (grazing) {
                    if (t < best_t) {
                        best_t = t;
                        best_tri = -2; // force retry if a grazing hit is the nearest
                    }
                    continue;
                }
                best_t = t;
                best_tri = idx;
            }
            // advance to next cell
            int ax = 0;
            if (t_max[1] < t_max[ax]) ax = 1;
            if (t_max[2] < t_max[ax]) ax = 2;
            t_cell_entry = t_max[ax];
            ci[ax] += step[ax];
            t_max[ax] += t_delta[ax];
            if (ci[ax] < 0 || ci[ax] >= grid_n_) break;
        }
        if (best_tri == -2) return -1; // ambiguous
        if (best_tri >= 0 && best_t <= t_exit + 1e-12) {
            const Tri& tr = tris_[best_tri];
            Vec3 n = cross(tr.e1, tr.e2);
            double s = dot(d, n);
            if (std::abs(s) < 1e-13 * norm(d) * norm(n)) return -1;
            (void)ambiguous;
            const Facet& f = mesh_.facet(tr.facet);
            return s > 0 ? f.back : f.front;
        }
        // no hit in this pass: wrap and continue
        p = canonicalize(p + d * (t_exit + 1e-12)).u;
    }
    return -1;
}

int RegionLocator::locate(const Vec3& u) const {
    static const Vec3 jitter{0.9501e-7, 0.2311e-7, 0.6068e-7};
    for (int retry = 0; retry <= 8; ++retry) {
        Vec3 probe = u + jitter * double(retry * retry);
        int r = locate_once(probe);
        if (r >= 0) return r;
    }
    throw ClassificationError("point classification ambiguous after 8 perturbed retries");
}

int point_region(const Mesh& m, const Vec3& u) {
    RegionLocator loc(m);
    return loc.locate(u);
}

// ---------------------------------------------------------------------------
// Monte Carlo volume oracle

namespace {
struct SplitMix64 {
    uint64_t s;
    explicit SplitMix64(uint64_t seed) : s(seed) {}
    uint64_t next() {
        s += 0x9E3779B97F4A7C15ull;
        uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double u01() { return double(next() >> 11) * 0x1.0p-53; }
};
} // namespace

MonteCarloVolumes monte_carlo_volumes(const Mesh& m, long long n, uint64_t seed) {
    if (n < 1) throw InvalidParameter("monte_carlo_volumes needs n >= 1");
    RegionLocator loc(m);
    SplitMix64 rng(seed);
    std::array<long long, 3> counts{0, 0, 0};
    long long failures = 0;
    const long long max_failures = std::max<long long>(1, n / 1000);
    for (long long i = 0; i < n; ++i) {
        Vec3 u{rng.u01(), rng.u01(), rng.u01()};
        try {
            counts[loc.locate(u)]++;
        } catch (const ClassificationError&) {
            if (++failures > max_failures)
                throw ClassificationError(
                    "Monte Carlo oracle unreliable: classification failure rate above 0.1%");
        }
    }
    MonteCarloVolumes out;
    out.samples = n;
    const double det = m.lattice.cell_volume();
    long long ok = n - failures;
    for (int r = 0; r < 3; ++r) {
        double p = ok > 0 ? double(counts[r]) / double(ok) : 0.0;
        out.value[r] = det * p;
        out.stderr_[r] = det * std::sqrt(std::max(0.0, p * (1 - p) / double(std::max<long long>(ok, 1))));
    }
    return out;
}

} // namespace torb
