#include "torb/relax.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "torb/errors.hpp"
#include "torb/metrics.hpp"

namespace torb {

using json = nlohmann::json;

std::string to_string(StageOp op) {
    switch (op) {
    case StageOp::None: return "none";
    case StageOp::Refine: return "refine";
    case StageOp::Equiangulate: return "equiangulate";
    case StageOp::Average: return "average";
    case StageOp::EquiangulateAverage: return "equiangulate+average";
    }
    return "?";
}

StageOp stage_op_from_string(const std::string& s) {
    if (s == "none") return StageOp::None;
    if (s == "refine") return StageOp::Refine;
    if (s == "equiangulate") return StageOp::Equiangulate;
    if (s == "average") return StageOp::Average;
    if (s == "equiangulate+average" || s == "equiavg") return StageOp::EquiangulateAverage;
    throw InvalidParameter("unknown stage op '" + s + "'");
}

RelaxConfig RelaxConfig::defaults() {
    RelaxConfig c;
    c.schedule = {{300, StageOp::Refine},
                  {300, StageOp::Refine},
                  {300, StageOp::EquiangulateAverage},
                  {1000, StageOp::None}};
    return c;
}

void RelaxConfig::check() const {
    if (schedule.empty()) throw InvalidParameter("relax schedule is empty");
    for (const Stage& s : schedule)
        if (s.descent_steps < 1) throw InvalidParameter("descent_steps must be >= 1");
    if (!(area_tol > 0 && volume_tol_rel > 0 && max_step_rel > 0 && armijo_c > 0 &&
          backtrack > 0 && backtrack < 1 && window >= 2))
        throw InvalidParameter("relax tolerances must be positive (backtrack in (0,1))");
}

namespace {

struct GramSolve {
    double l1 = 0, l2 = 0;
};

// Solve [g11 g12; g12 g22] x = rhs, guarding conditioning.
GramSolve solve_gram(double g11, double g12, double g22, double r1, double r2) {
    double tr = g11 + g22;
    double det = g11 * g22 - g12 * g12;
    double disc = std::sqrt(std::max(0.0, tr * tr - 4 * det));
    double lmax = 0.5 * (tr + disc), lmin = 0.5 * (tr - disc);
    if (!(lmin > 0) || lmax / lmin > 1e12)
        throw DegenerateConstraint(
            "volume-constraint Gram matrix singular or ill-conditioned (condition > 1e12): "
            "the two volume gradients are linearly dependent");
    GramSolve s;
    s.l1 = (r1 * g22 - r2 * g12) / det;
    s.l2 = (r2 * g11 - r1 * g12) / det;
    return s;
}

double max_disp_inf(const std::vector<Vec3>& dx, const Mesh& m) {
    double d = 0;
    for (int v = 0; v < m.n_vertices(); ++v)
        if (m.vertex_alive(v)) d = std::max(d, norm_inf(dx[v]));
    return d;
}

void apply_ambient_displacement(Mesh& m, const std::vector<Vec3>& dx, double scale) {
    std::vector<Vec3> du(m.n_vertices());
    for (int v = 0; v < m.n_vertices(); ++v)
        if (m.vertex_alive(v)) du[v] = m.lattice.inv_basis * (dx[v] * scale);
    m.move_vertices_u(du);
}

} // namespace

int project_volumes(Mesh& m, const RelaxConfig& cfg) {
    const double tol = cfg.volume_tol(m.lattice);
    const double step_cap = cfg.max_step(m.lattice);
    const double t1 = m.body(1).target, t2 = m.body(2).target;
    for (int it = 0; it <= cfg.max_projection_iters; ++it) {
        double e1 = anchored_volume_near(m, 1, t1) - t1;
        double e2 = anchored_volume_near(m, 2, t2) - t2;
        if (std::abs(e1) <= tol && std::abs(e2) <= tol) {
            reanchor_body(m, 1, t1);
            reanchor_body(m, 2, t2);
            return it;
        }
        if (it == cfg.max_projection_iters) break;
        GradientField n1 = volume_gradient(m, 1), n2 = volume_gradient(m, 2);
        double g11 = 0, g12 = 0, g22 = 0;
        for (int v = 0; v < m.n_vertices(); ++v) {
            if (!m.vertex_alive(v)) continue;
            g11 += dot(n1[v], n1[v]);
            g12 += dot(n1[v], n2[v]);
            g22 += dot(n2[v], n2[v]);
        }
        GramSolve s = solve_gram(g11, g12, g22, -e1, -e2);
        std::vector<Vec3> dx(m.n_vertices());
        for (int v = 0; v < m.n_vertices(); ++v)
            if (m.vertex_alive(v)) dx[v] = n1[v] * s.l1 + n2[v] * s.l2;
        double d = max_disp_inf(dx, m);
        double scale = d > step_cap ? step_cap / d : 1.0;
        apply_ambient_displacement(m, dx, scale);
    }
    throw ProjectionFailure("volume projection did not converge in " +
                            std::to_string(cfg.max_projection_iters) + " iterations");
}

StepStat descent_step(Mesh& m, const RelaxConfig& cfg, double t_hint) {
    const double tol = cfg.volume_tol(m.lattice);
    const double step_cap = cfg.max_step(m.lattice);
    StepStat stat;
    {
        double e1 = anchored_volume_near(m, 1, m.body(1).target) - m.body(1).target;
        double e2 = anchored_volume_near(m, 2, m.body(2).target) - m.body(2).target;
        if (std::abs(e1) > 4 * tol || std::abs(e2) > 4 * tol)
            throw InvalidParameter("descent_step precondition: volumes not within tolerance");
    }

    GradientField g = area_gradient(m);
    GradientField n1 = volume_gradient(m, 1), n2 = volume_gradient(m, 2);
    double g11 = 0, g12 = 0, g22 = 0, r1 = 0, r2 = 0;
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (!m.vertex_alive(v)) continue;
        g11 += dot(n1[v], n1[v]);
        g12 += dot(n1[v], n2[v]);
        g22 += dot(n2[v], n2[v]);
        r1 += dot(n1[v], g[v]);
        r2 += dot(n2[v], g[v]);
    }
    GramSolve s = solve_gram(g11, g12, g22, r1, r2);
    std::vector<Vec3> motion(m.n_vertices());
    double slope = 0, mmax = 0;
    for (int v = 0; v < m.n_vertices(); ++v) {
        if (!m.vertex_alive(v)) continue;
        motion[v] = -(g[v] - n1[v] * s.l1 - n2[v] * s.l2);
        slope += dot(motion[v], motion[v]);
        mmax = std::max(mmax, norm_inf(motion[v]));
    }
    double area0 = total_area(m);
    stat.area = area0;
    stat.v1_err = anchored_volume_near(m, 1, m.body(1).target) - m.body(1).target;
    stat.v2_err = anchored_volume_near(m, 2, m.body(2).target) - m.body(2).target;
    if (mmax < 1e-14 * m.lattice.shortest_period()) return stat; // critical point

    double t = step_cap / mmax;
    if (t_hint > 0) t = std::min(t, t_hint);
    for (int k = 0; k < cfg.max_backtracks; ++k, t *= cfg.backtrack) {
        Mesh trial = m;
        apply_ambient_displacement(trial, motion, t);
        try {
            project_volumes(trial, cfg);
        } catch (const Error&) {
            continue; // off-constraint trial; shrink
        }
        double area1 = total_area(trial);
        if (area1 <= area0 - cfg.armijo_c * t * slope) {
            m = std::move(trial);
            stat.area = area1;
            stat.v1_err = anchored_volume_near(m, 1, m.body(1).target) - m.body(1).target;
            stat.v2_err = anchored_volume_near(m, 2, m.body(2).target) - m.body(2).target;
            stat.max_disp = t * mmax;
            stat.accepted_t = t;
            return stat;
        }
    }
    stat.stalled = true;
    return stat;
}

// ---------------------------------------------------------------------------
// refine

void refine(Mesh& m) {
    double prev1 = anchored_volume_near(m, 1, m.body(1).target);
    double prev2 = anchored_volume_near(m, 2, m.body(2).target);

    struct SplitEdge {
        int mid = -1;
        int half1 = -1; // tail -> mid
        int half2 = -1; // mid -> head
    };
    const int ne0 = m.n_edges(), nf0 = m.n_facets();
    std::vector<SplitEdge> split(ne0);
    for (int e = 0; e < ne0; ++e) {
        if (!m.edge_alive(e)) continue;
        const Edge ed = m.edge(e);
        Vec3 d = m.edge_disp_u(e);
        Canonical c = canonicalize(m.vertex(ed.tail).u + d * 0.5);
        SplitEdge se;
        se.mid = m.add_vertex(c.u);
        se.half1 = m.add_edge(ed.tail, se.mid, c.shift);
        se.half2 = m.add_edge(se.mid, ed.head, ed.wrap - c.shift);
        split[e] = se;
    }

    auto iround = [](double x) { return int(std::lround(x)); };
    for (int f = 0; f < nf0; ++f) {
        if (!m.facet_alive(f)) continue;
        const Facet fc = m.facet(f);
        auto lift = m.facet_lift_u(f);
        // lifted midpoints and their integer offsets from the midpoints'
        // canonical representatives
        std::array<IVec3, 3> mo;
        std::array<int, 3> mid;
        for (int s = 0; s < 3; ++s) {
            Vec3 ml = (lift[s] + lift[(s + 1) % 3]) * 0.5;
            const SplitEdge& se = split[fc.edge[s]];
            mid[s] = se.mid;
            Vec3 off = ml - m.vertex(se.mid).u;
            mo[s] = IVec3{iround(off.x), iround(off.y), iround(off.z)};
        }
        auto halves = [&](int s) {
            const SplitEdge& se = split[fc.edge[s]];
            if (fc.sign[s] > 0)
                return std::array<std::pair<int, int8_t>, 2>{
                    std::make_pair(se.half1, int8_t(1)), std::make_pair(se.half2, int8_t(1))};
            return std::array<std::pair<int, int8_t>, 2>{std::make_pair(se.half2, int8_t(-1)),
                                                         std::make_pair(se.half1, int8_t(-1))};
        };
        std::array<int, 3> inner; // mid[s] -> mid[(s+1)%3]
        for (int s = 0; s < 3; ++s) {
            IVec3 w = mo[(s + 1) % 3] - mo[s];
            for (int c = 0; c < 3; ++c)
                if (std::abs(w[c]) > 1)
                    throw Error("refine: facet spans more than half the torus; mesh too coarse");
            inner[s] = m.add_edge(mid[s], mid[(s + 1) % 3], w);
        }
        // corner triangles (v_s, mid_s, mid_{s-1}) keep the parent winding
        for (int s = 0; s < 3; ++s) {
            int sp = (s + 2) % 3;
            auto h_out = halves(s)[0]; // v_s -> mid_s
            auto h_in = halves(sp)[1]; // mid_{sp} -> v_s
            m.add_facet({h_out.first, inner[sp], h_in.first},
                        {h_out.second, int8_t(-1), h_in.second}, fc.front, fc.back);
        }
        m.add_facet({inner[0], inner[1], inner[2]}, {1, 1, 1}, fc.front, fc.back);
        m.remove_facet(f);
    }
    for (int e = 0; e < ne0; ++e)
        if (m.edge_alive(e)) m.remove_edge(e);

    m.recompute_triple_flags();
    reanchor_body(m, 1, prev1);
    reanchor_body(m, 2, prev2);
}

// ---------------------------------------------------------------------------
// equiangulate

namespace {

double tri_min_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
    double la = norm(b - c), lb = norm(c - a), lc = norm(a - b);
    if (la <= 0 || lb <= 0 || lc <= 0) return 0;
    auto ang = [](double opp, double s1, double s2) {
        double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2 * s1 * s2);
        return std::acos(std::clamp(cosv, -1.0, 1.0));
    };
    return std::min({ang(la, lb, lc), ang(lb, lc, la), ang(lc, la, lb)});
}

} // namespace

int equiangulate(Mesh& m) {
    const double coplanar_cos = std::cos(20.0 * M_PI / 180.0);
    int total_flips = 0;
    for (int sweep = 0; sweep < 50; ++sweep) {
        auto uses = m.edge_uses();
        std::vector<char> stale(m.n_facets(), 0);
        int flips = 0;
        const int ne = m.n_edges();
        for (int e = 0; e < ne; ++e) {
            if (!m.edge_alive(e) || uses[e].size() != 2) continue;
            EdgeUse uf = uses[e][0], ug = uses[e][1];
            if (uf.sign == ug.sign) continue;
            if (uf.sign < 0) std::swap(uf, ug);
            if (stale[uf.facet] || stale[ug.facet]) continue;
            if (!m.facet_alive(uf.facet) || !m.facet_alive(ug.facet)) continue;
            const Facet f = m.facet(uf.facet);
            const Facet g = m.facet(ug.facet);
            if (f.front != g.front || f.back != g.back) continue;

            // quad corners in f's lift frame: f = (P -> Q -> C), g = (Q -> P -> D)
            auto liftf = m.facet_lift_u(uf.facet);
            auto liftg = m.facet_lift_u(ug.facet);
            int sf = uf.slot, sg = ug.slot;
            Vec3 P = liftf[sf], Q = liftf[(sf + 1) % 3], C = liftf[(sf + 2) % 3];
            Vec3 offs = Q - liftg[sg];
            Vec3 D = liftg[(sg + 2) % 3] + offs;
            const Mat3& B = m.lattice.basis;
            Vec3 Pa = B * P, Qa = B * Q, Ca = B * C, Da = B * D;

            Vec3 nf = cross(Qa - Pa, Ca - Pa), ng = cross(Pa - Qa, Da - Qa);
            double nfl = norm(nf), ngl = norm(ng);
            if (nfl < 1e-300 || ngl < 1e-300) continue;
            if (dot(nf, ng) / (nfl * ngl) < coplanar_cos) continue;

            double before = std::min(tri_min_angle(Pa, Qa, Ca), tri_min_angle(Qa, Pa, Da));
            double after = std::min(tri_min_angle(Pa, Da, Ca), tri_min_angle(Da, Qa, Ca));
            if (!(after > before + 1e-12)) continue;
            Vec3 nn1 = cross(Da - Pa, Ca - Pa), nn2 = cross(Qa - Da, Ca - Da);
            if (dot(nn1, nf) <= 0 || dot(nn2, nf) <= 0) continue; // would fold over

            int vC = m.slot_start(f, (sf + 2) % 3);
            int vD = m.slot_start(g, (sg + 2) % 3);
            Vec3 wv = (D - C) - (m.vertex(vD).u - m.vertex(vC).u);
            IVec3 w{int(std::lround(wv.x)), int(std::lround(wv.y)), int(std::lround(wv.z))};
            if (std::abs(w.x) > 1 || std::abs(w.y) > 1 || std::abs(w.z) > 1) continue;
            if (vC == vD && w.is_zero()) continue;
            int eCD = m.add_edge(vC, vD, w);

            auto fQC = std::make_pair(f.edge[(sf + 1) % 3], f.sign[(sf + 1) % 3]);
            auto fCP = std::make_pair(f.edge[(sf + 2) % 3], f.sign[(sf + 2) % 3]);
            auto gPD = std::make_pair(g.edge[(sg + 1) % 3], g.sign[(sg + 1) % 3]);
            auto gDQ = std::make_pair(g.edge[(sg + 2) % 3], g.sign[(sg + 2) % 3]);
            // replacements (P, D, C) and (D, Q, C)
            m.add_facet({gPD.first, eCD, fCP.first},
                        {int8_t(gPD.second), int8_t(-1), int8_t(fCP.second)}, f.front, f.back);
            m.add_facet({gDQ.first, fQC.first, eCD},
                        {int8_t(gDQ.second), int8_t(fQC.second), int8_t(1)}, f.front, f.back);
            stale[uf.facet] = stale[ug.facet] = 1;
            m.remove_facet(uf.facet);
            m.remove_facet(ug.facet);
            m.remove_edge(e);
            ++flips;
        }
        total_flips += flips;
        if (flips == 0) break;
    }
    if (total_flips > 0) m.recompute_triple_flags();
    return total_flips;
}

// ---------------------------------------------------------------------------
// vertex averaging

void vertex_average(Mesh& m, const RelaxConfig& cfg) {
    auto uses = m.edge_uses();
    auto vf = m.vertex_facets();
    const Mat3& B = m.lattice.basis;
    std::vector<Vec3> du(m.n_vertices());

    std::vector<std::vector<int>> triple_edges(m.n_vertices());
    for (int e = 0; e < m.n_edges(); ++e) {
        if (!m.edge_alive(e) || uses[e].size() != 3) continue;
        triple_edges[m.edge(e).tail].push_back(e);
        triple_edges[m.edge(e).head].push_back(e);
    }

    for (int v = 0; v < m.n_vertices(); ++v) {
        if (!m.vertex_alive(v)) continue;
        Vec3 xv = B * m.vertex(v).u;
        if (!m.vertex(v).on_triple_curve) {
            double wsum = 0;
            Vec3 centroid{}, nsum{};
            for (int fid : vf[v]) {
                auto lu = m.facet_lift_u(fid);
                auto fvs = m.facet_vertices(fid);
                int slot = (fvs[0] == v) ? 0 : (fvs[1] == v) ? 1 : 2;
                Vec3 shift = lu[slot] - m.vertex(v).u; // integer lift offset
                Vec3 ca = B * ((lu[0] + lu[1] + lu[2]) * (1.0 / 3.0) - shift);
                Vec3 av = cross(B * (lu[1] - lu[0]), B * (lu[2] - lu[0])) * 0.5;
                double a = norm(av);
                centroid += ca * a;
                nsum += av;
                wsum += a;
            }
            if (wsum <= 0) continue;
            centroid = centroid / wsum;
            double nl = norm(nsum);
            Vec3 d = centroid - xv;
            if (nl > 1e-300) {
                Vec3 nh = nsum / nl;
                d -= nh * dot(d, nh); // tangential motion only
            }
            du[v] = m.lattice.inv_basis * d;
        } else if (triple_edges[v].size() == 2) {
            Vec3 nbr[2];
            for (int i = 0; i < 2; ++i) {
                const Edge& ed = m.edge(triple_edges[v][i]);
                Vec3 dsp = m.edge_disp_u(triple_edges[v][i]);
                nbr[i] = (ed.tail == v) ? B * (m.vertex(v).u + dsp) : B * (m.vertex(v).u - dsp);
            }
            Vec3 t = nbr[1] - nbr[0];
            double tl = norm(t);
            if (tl < 1e-300) continue;
            t = t / tl;
            Vec3 mid = (nbr[0] + nbr[1]) * 0.5;
            du[v] = m.lattice.inv_basis * (t * dot(mid - xv, t));
        }
        // vertices where four triple curves meet stay put
    }
    m.move_vertices_u(du);
    project_volumes(m, cfg);
}

// ---------------------------------------------------------------------------
// orchestration

RelaxReport relax(Mesh& m, const RelaxConfig& cfg) {
    cfg.check();
    auto rep0 = m.validate();
    if (!rep0.ok()) throw Error("relax: invalid input mesh: " + rep0.summary());

    RelaxReport rep;
    const double tol = cfg.volume_tol(m.lattice);
    project_volumes(m, cfg);
    double t_hint = -1;
    bool stalled_out = false;

    for (size_t si = 0; si < cfg.schedule.size(); ++si) {
        const Stage& stage = cfg.schedule[si];
        rep.stage_reached = int(si) + 1;
        StageReport sr;
        sr.op = to_string(stage.then);
        for (int i = 0; i < stage.descent_steps; ++i) {
            StepStat st = descent_step(m, cfg, t_hint);
            if (st.accepted_t > 0) t_hint = st.accepted_t * 4;
            if (!sr.steps.empty()) {
                double prev = sr.steps.back().area;
                if (st.area > prev + 10 * 2.220446049250313e-16 * prev)
                    throw Error("relax: area increased within a descent stage");
            }
            sr.steps.push_back(st);
            if (st.stalled || (st.accepted_t == 0 && st.max_disp == 0)) {
                stalled_out = st.stalled;
                break;
            }
            if (si + 1 == cfg.schedule.size() && int(sr.steps.size()) >= cfg.window) {
                double a0 = sr.steps[sr.steps.size() - cfg.window].area;
                double a1 = sr.steps.back().area;
                if (std::abs(a0 - a1) < cfg.area_tol * a1) break;
            }
        }
        switch (stage.then) {
        case StageOp::None: break;
        case StageOp::Refine:
            refine(m);
            project_volumes(m, cfg);
            break;
        case StageOp::Equiangulate:
            equiangulate(m);
            project_volumes(m, cfg);
            break;
        case StageOp::Average: vertex_average(m, cfg); break;
        case StageOp::EquiangulateAverage:
            equiangulate(m);
            vertex_average(m, cfg);
            break;
        }
        rep.stages.push_back(std::move(sr));
    }

    rep.final_area = total_area(m);
    rep.final_v1_err = anchored_volume_near(m, 1, m.body(1).target) - m.body(1).target;
    rep.final_v2_err = anchored_volume_near(m, 2, m.body(2).target) - m.body(2).target;

    const StageReport& last = rep.stages.back();
    bool window_ok = false;
    if (!last.steps.empty()) {
        size_t nwin = std::min<size_t>(cfg.window, last.steps.size());
        double a0 = last.steps[last.steps.size() - nwin].area;
        double a1 = last.steps.back().area;
        window_ok = std::abs(a0 - a1) < cfg.area_tol * std::max(a1, 1e-300);
    }
    rep.converged =
        window_ok && std::abs(rep.final_v1_err) <= tol && std::abs(rep.final_v2_err) <= tol;
    (void)stalled_out; // a stall with a flat window still counts as converged
    return rep;
}

std::string RelaxReport::to_json_string() const {
    json j;
    j["converged"] = converged;
    j["stage_reached"] = stage_reached;
    j["final_area"] = final_area;
    j["final_volume_errors"] = {final_v1_err, final_v2_err};
    json stages_j = json::array();
    for (const StageReport& s : stages) {
        json sj;
        sj["op"] = s.op;
        json steps = json::array();
        for (const StepStat& st : s.steps)
            steps.push_back({{"area", st.area},
                             {"v1_err", st.v1_err},
                             {"v2_err", st.v2_err},
                             {"max_disp", st.max_disp},
                             {"stalled", st.stalled}});
        sj["steps"] = std::move(steps);
        stages_j.push_back(std::move(sj));
    }
    j["stages"] = std::move(stages_j);
    return j.dump(1);
}

} // namespace torb
