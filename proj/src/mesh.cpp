#include "torb/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "torb/errors.hpp"
#include "torb/metrics.hpp"

namespace torb {

using json = nlohmann::json;

std::string ValidationReport::summary(size_t max_lines) const {
    std::ostringstream os;
    os << violations.size() << " violation(s)";
    for (size_t i = 0; i < violations.size() && i < max_lines; ++i)
        os << "\n  " << violations[i].element << " " << violations[i].id << ": "
           << violations[i].message;
    if (violations.size() > max_lines) os << "\n  ...";
    return os.str();
}

int Mesh::add_vertex(const Vec3& u) {
    verts_.push_back(Vertex{u, false});
    v_alive_.push_back(1);
    ++live_v_;
    return int(verts_.size()) - 1;
}

int Mesh::add_edge(int tail, int head, const IVec3& wrap) {
    edges_.push_back(Edge{tail, head, wrap});
    e_alive_.push_back(1);
    ++live_e_;
    return int(edges_.size()) - 1;
}

int Mesh::add_facet(const std::array<int, 3>& edges, const std::array<int8_t, 3>& signs,
                    int front, int back) {
    Facet f;
    f.edge = edges;
    f.sign = signs;
    f.front = front;
    f.back = back;
    facets_.push_back(f);
    f_alive_.push_back(1);
    ++live_f_;
    return int(facets_.size()) - 1;
}

void Mesh::remove_edge(int id) {
    if (e_alive_[id]) {
        e_alive_[id] = 0;
        --live_e_;
    }
}

void Mesh::remove_facet(int id) {
    if (f_alive_[id]) {
        f_alive_[id] = 0;
        --live_f_;
    }
}

std::array<int, 3> Mesh::facet_vertices(int fid) const {
    const Facet& f = facets_[fid];
    return {slot_start(f, 0), slot_start(f, 1), slot_start(f, 2)};
}

std::array<Vec3, 3> Mesh::facet_lift_u(int fid) const {
    const Facet& f = facets_[fid];
    Vec3 a = verts_[slot_start(f, 0)].u;
    Vec3 b = a + slot_disp_u(f, 0);
    Vec3 c = b + slot_disp_u(f, 1);
    return {a, b, c};
}

std::array<Vec3, 3> Mesh::facet_lift_ambient(int fid) const {
    auto lu = facet_lift_u(fid);
    return {lattice.basis * lu[0], lattice.basis * lu[1], lattice.basis * lu[2]};
}

Vec3 Mesh::facet_area_vec(int fid) const {
    auto p = facet_lift_ambient(fid);
    return cross(p[1] - p[0], p[2] - p[0]) * 0.5;
}

double Mesh::facet_area(int fid) const { return norm(facet_area_vec(fid)); }

std::vector<std::vector<EdgeUse>> Mesh::edge_uses() const {
    std::vector<std::vector<EdgeUse>> uses(edges_.size());
    for (int fid = 0; fid < n_facets(); ++fid) {
        if (!f_alive_[fid]) continue;
        const Facet& f = facets_[fid];
        for (int s = 0; s < 3; ++s) uses[f.edge[s]].push_back({fid, s, f.sign[s]});
    }
    return uses;
}

std::vector<std::vector<int>> Mesh::vertex_facets() const {
    std::vector<std::vector<int>> vf(verts_.size());
    for (int fid = 0; fid < n_facets(); ++fid) {
        if (!f_alive_[fid]) continue;
        for (int v : facet_vertices(fid)) vf[v].push_back(fid);
    }
    return vf;
}

void Mesh::move_vertices_u(const std::vector<Vec3>& du) {
    std::vector<IVec3> shift(verts_.size());
    for (int v = 0; v < n_vertices(); ++v) {
        if (!v_alive_[v]) continue;
        Canonical c = canonicalize(verts_[v].u + du[v]);
        verts_[v].u = c.u;
        shift[v] = c.shift;
    }
    for (int e = 0; e < n_edges(); ++e) {
        if (!e_alive_[e]) continue;
        Edge& ed = edges_[e];
        // displacement continuity: w' = w + shift(head) - shift(tail)
        ed.wrap = ed.wrap + shift[ed.head] - shift[ed.tail];
    }
}

void Mesh::translate(const Vec3& c_u) {
    std::vector<Vec3> du(verts_.size(), c_u);
    move_vertices_u(du);
}

void Mesh::recompute_triple_flags() {
    auto uses = edge_uses();
    for (int v = 0; v < n_vertices(); ++v)
        if (v_alive_[v]) verts_[v].on_triple_curve = false;
    for (int e = 0; e < n_edges(); ++e) {
        if (!e_alive_[e] || uses[e].size() != 3) continue;
        verts_[edges_[e].tail].on_triple_curve = true;
        verts_[edges_[e].head].on_triple_curve = true;
    }
}

Body& Mesh::body(int region) {
    for (Body& b : bodies)
        if (b.region == region) return b;
    throw Error("no body for region " + std::to_string(region));
}

const Body& Mesh::body(int region) const {
    for (const Body& b : bodies)
        if (b.region == region) return b;
    throw Error("no body for region " + std::to_string(region));
}

// ---------------------------------------------------------------------------
// validation

ValidationReport Mesh::validate() const {
    ValidationReport rep;
    auto bad = [&](const std::string& el, int id, const std::string& msg) {
        rep.violations.push_back({el, id, msg});
    };

    if (!(determinant(lattice.basis) > 0)) bad("mesh", -1, "lattice determinant not positive");

    for (int v = 0; v < n_vertices(); ++v) {
        if (!v_alive_[v]) continue;
        const Vec3& u = verts_[v].u;
        for (int i = 0; i < 3; ++i) {
            if (!std::isfinite(u[i])) {
                bad("vertex", v, "non-finite coordinate");
                break;
            }
            if (u[i] < 0 || u[i] >= 1) {
                bad("vertex", v, "coordinate not canonical (outside [0,1))");
                break;
            }
        }
    }

    for (int e = 0; e < n_edges(); ++e) {
        if (!e_alive_[e]) continue;
        const Edge& ed = edges_[e];
        if (ed.tail < 0 || ed.tail >= n_vertices() || !v_alive_[ed.tail] || ed.head < 0 ||
            ed.head >= n_vertices() || !v_alive_[ed.head]) {
            bad("edge", e, "endpoint not a live vertex");
            continue;
        }
        if (ed.tail == ed.head && ed.wrap.is_zero()) bad("edge", e, "degenerate loop edge");
        for (int i = 0; i < 3; ++i)
            if (std::abs(ed.wrap[i]) > 1) {
                bad("edge", e, "wrap component exceeds 1");
                break;
            }
    }

    for (int fid = 0; fid < n_facets(); ++fid) {
        if (!f_alive_[fid]) continue;
        const Facet& f = facets_[fid];
        bool refs_ok = true;
        for (int s = 0; s < 3; ++s)
            if (f.edge[s] < 0 || f.edge[s] >= n_edges() || !e_alive_[f.edge[s]]) refs_ok = false;
        if (!refs_ok) {
            bad("facet", fid, "references a dead edge");
            continue;
        }
        if (f.edge[0] == f.edge[1] || f.edge[1] == f.edge[2] || f.edge[0] == f.edge[2])
            bad("facet", fid, "repeated edge");
        if (f.front == f.back) bad("facet", fid, "front and back regions equal");
        if (f.front < 0 || f.front > 2 || f.back < 0 || f.back > 2)
            bad("facet", fid, "region id outside {0,1,2}");
        for (int s = 0; s < 3; ++s)
            if (slot_end(f, s) != slot_start(f, (s + 1) % 3)) {
                bad("facet", fid, "edge chain not connected");
                break;
            }
        IVec3 wsum;
        for (int s = 0; s < 3; ++s) {
            IVec3 w = edges_[f.edge[s]].wrap;
            wsum = f.sign[s] > 0 ? wsum + w : wsum - w;
        }
        if (!wsum.is_zero()) bad("facet", fid, "wrap loop sum nonzero");
        Vec3 dsum = slot_disp_u(f, 0) + slot_disp_u(f, 1) + slot_disp_u(f, 2);
        if (norm_inf(dsum) > 1e-9) bad("facet", fid, "ambient loop closure violated");
    }
    if (!rep.ok()) return rep; // structural damage; later checks assume sane references

    auto uses = edge_uses();
    for (int e = 0; e < n_edges(); ++e) {
        if (!e_alive_[e]) continue;
        size_t val = uses[e].size();
        if (val != 2 && val != 3) {
            bad("edge", e, "valence " + std::to_string(val) + " (want 2 or 3)");
            continue;
        }
        auto pair_of = [&](const EdgeUse& u) {
            const Facet& f = facets_[u.facet];
            return std::make_pair(std::min(f.front, f.back), std::max(f.front, f.back));
        };
        if (val == 2) {
            if (pair_of(uses[e][0]) != pair_of(uses[e][1]))
                bad("edge", e, "valence-2 edge between different region pairs");
        } else {
            std::vector<std::pair<int, int>> ps = {pair_of(uses[e][0]), pair_of(uses[e][1]),
                                                   pair_of(uses[e][2])};
            std::sort(ps.begin(), ps.end());
            if (ps != std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}})
                bad("edge", e, "triple edge walls do not carry pairs {01,02,12}");
        }
    }

    // each region's boundary must be a cycle: signed edge traversals cancel
    for (int r = 0; r < 3; ++r) {
        std::map<int, int> count;
        for (int fid = 0; fid < n_facets(); ++fid) {
            if (!f_alive_[fid]) continue;
            const Facet& f = facets_[fid];
            int orient = 0;
            if (f.back == r) orient = 1;   // normal (back->front) points out of r
            if (f.front == r) orient = -1;
            if (orient == 0) continue;
            for (int s = 0; s < 3; ++s) count[f.edge[s]] += orient * f.sign[s];
        }
        for (auto& [e, c] : count)
            if (c != 0)
                bad("edge", e, "region " + std::to_string(r) + " boundary not closed at edge");
    }

    // cached triple-curve classification must match recomputed valences
    {
        std::vector<char> want(verts_.size(), 0);
        for (int e = 0; e < n_edges(); ++e) {
            if (!e_alive_[e] || uses[e].size() != 3) continue;
            want[edges_[e].tail] = 1;
            want[edges_[e].head] = 1;
        }
        for (int v = 0; v < n_vertices(); ++v)
            if (v_alive_[v] && verts_[v].on_triple_curve != bool(want[v]))
                bad("vertex", v, "stale triple-curve flag");
    }

    // bodies and volume partition
    {
        std::vector<int> regions;
        for (const Body& b : bodies) regions.push_back(b.region);
        std::sort(regions.begin(), regions.end());
        if (regions != std::vector<int>{1, 2}) {
            bad("mesh", -1, "bodies must cover exactly regions {1,2}");
        } else {
            const double det = lattice.cell_volume();
            for (const Body& b : bodies)
                if (!(b.target > 0 && b.target < det))
                    bad("body", b.region, "target volume outside (0, det)");
            auto raw = raw_region_volumes(*this);
            double v1 = raw[1] + double(body(1).vol_const) * det;
            double v2 = raw[2] + double(body(2).vol_const) * det;
            double v0 = det - v1 - v2;
            long long k0 = std::llround((v0 - raw[0]) / det);
            if (!(v1 > 0 && v1 < det)) bad("body", 1, "anchored volume outside (0, det)");
            if (!(v2 > 0 && v2 < det)) bad("body", 2, "anchored volume outside (0, det)");
            if (std::abs(raw[0] + double(k0) * det - v0) > 1e-9 * det)
                bad("mesh", -1, "volume partition v1+v2+v0 != det");
        }
    }

    // live edges must be referenced (orphans break counting diagnostics)
    for (int e = 0; e < n_edges(); ++e)
        if (e_alive_[e] && uses[e].empty()) bad("edge", e, "orphan edge");

    return rep;
}

// ---------------------------------------------------------------------------
// topology signature

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

// Hermite normal form (row style) of the integer span of the given vectors.
std::vector<IVec3> hnf_basis(std::vector<IVec3> rows) {
    std::vector<IVec3> basis;
    for (int col = 0; col < 3; ++col) {
        // eliminate column `col` across remaining rows by gcd reduction
        while (true) {
            int pivot = -1;
            for (size_t i = 0; i < rows.size(); ++i)
                if (rows[i][col] != 0 &&
                    (pivot < 0 || std::abs(rows[i][col]) < std::abs(rows[pivot][col])))
                    pivot = int(i);
            if (pivot < 0) break;
            bool reduced = true;
            for (size_t i = 0; i < rows.size(); ++i) {
                if (int(i) == pivot || rows[i][col] == 0) continue;
                int q = rows[i][col] / rows[pivot][col];
                for (int c = 0; c < 3; ++c) rows[i][c] -= q * rows[pivot][c];
                if (rows[i][col] != 0) reduced = false;
            }
            if (reduced) {
                IVec3 p = rows[pivot];
                if (p[col] < 0) p = -p;
                basis.push_back(p);
                rows.erase(rows.begin() + pivot);
                // drop rows now zero in all remaining columns handled next loop
                break;
            }
        }
    }
    // reduce entries above each pivot
    for (size_t i = 0; i + 1 < basis.size(); ++i)
        for (size_t j = i + 1; j < basis.size(); ++j) {
            int pc = 0;
            while (pc < 3 && basis[j][pc] == 0) ++pc;
            if (pc == 3 || basis[j][pc] == 0) continue;
            int q = basis[i][pc] >= 0 ? basis[i][pc] / basis[j][pc]
                                      : -((-basis[i][pc] + basis[j][pc] - 1) / basis[j][pc]);
            for (int c = 0; c < 3; ++c) basis[i][c] -= q * basis[j][c];
        }
    return basis;
}

} // namespace

TopologySignature Mesh::topology_signature() const {
    ValidationReport rep = validate();
    if (!rep.ok()) throw Error("topology_signature refused: invalid mesh: " + rep.summary());

    TopologySignature sig;
    auto uses = edge_uses();
    const std::array<std::pair<int, int>, 3> all_pairs = {
        std::make_pair(0, 1), std::make_pair(0, 2), std::make_pair(1, 2)};

    for (auto pr : all_pairs) {
        std::vector<int> pair_facets;
        for (int fid = 0; fid < n_facets(); ++fid) {
            if (!f_alive_[fid]) continue;
            const Facet& f = facets_[fid];
            if (std::minmax(f.front, f.back) == std::minmax(pr.first, pr.second))
                pair_facets.push_back(fid);
        }
        PairSignature ps;
        ps.facet_count = int(pair_facets.size());
        if (pair_facets.empty()) {
            sig.pairs[pr] = ps;
            continue;
        }
        std::map<int, int> findex;
        for (size_t i = 0; i < pair_facets.size(); ++i) findex[pair_facets[i]] = int(i);
        UnionFind uf(int(pair_facets.size()));
        for (int e = 0; e < n_edges(); ++e) {
            if (!e_alive_[e] || uses[e].size() != 2) continue;
            auto itA = findex.find(uses[e][0].facet);
            auto itB = findex.find(uses[e][1].facet);
            if (itA != findex.end() && itB != findex.end()) uf.unite(itA->second, itB->second);
        }
        std::map<int, std::vector<int>> comps; // root -> facet list
        for (size_t i = 0; i < pair_facets.size(); ++i)
            comps[uf.find(int(i))].push_back(pair_facets[i]);

        for (auto& [root, flist] : comps) {
            ComponentSignature cs;
            cs.facet_count = int(flist.size());
            std::map<int, int> vset; // vertex id -> local index
            std::map<int, std::pair<int, int>> eset; // edge id -> (tail local, head local)
            for (int fid : flist) {
                auto vs = facet_vertices(fid);
                for (int v : vs)
                    if (!vset.count(v)) {
                        int n = int(vset.size());
                        vset[v] = n;
                    }
                const Facet& f = facets_[fid];
                for (int s = 0; s < 3; ++s) {
                    const Edge& ed = edges_[f.edge[s]];
                    eset[f.edge[s]] = {vset.at(ed.tail), vset.at(ed.head)};
                }
            }
            cs.euler_characteristic = int(vset.size()) - int(eset.size()) + int(flist.size());

            // cycle wraps: BFS spanning tree accumulates wrap-sums from the root;
            // each non-tree edge closes a cycle with class vshift[t] + w - vshift[h]
            std::vector<std::pair<int, std::pair<int, int>>> ev(eset.begin(), eset.end());
            std::vector<std::vector<int>> adj(vset.size());
            for (size_t i = 0; i < ev.size(); ++i) {
                adj[ev[i].second.first].push_back(int(i));
                adj[ev[i].second.second].push_back(int(i));
            }
            std::vector<IVec3> vshift(vset.size());
            std::vector<char> rooted(vset.size(), 0), tree_edge(ev.size(), 0);
            for (size_t seed = 0; seed < vset.size(); ++seed) {
                if (rooted[seed]) continue;
                rooted[seed] = 1;
                std::vector<int> queue = {int(seed)};
                for (size_t qi = 0; qi < queue.size(); ++qi) {
                    int v = queue[qi];
                    for (int ei : adj[v]) {
                        auto [t, h] = ev[ei].second;
                        int other = (t == v) ? h : t;
                        if (rooted[other]) continue;
                        IVec3 w = edges_[ev[ei].first].wrap;
                        vshift[other] = (t == v) ? vshift[v] + w : vshift[v] - w;
                        rooted[other] = 1;
                        tree_edge[ei] = 1;
                        queue.push_back(other);
                    }
                }
            }
            std::vector<IVec3> cycles;
            for (size_t i = 0; i < ev.size(); ++i) {
                if (tree_edge[i]) continue;
                auto [t, h] = ev[i].second;
                IVec3 w = edges_[ev[i].first].wrap;
                IVec3 c = vshift[t] + w - vshift[h];
                if (!c.is_zero()) cycles.push_back(c);
            }
            cs.wrap_basis = hnf_basis(cycles);
            ps.components.push_back(cs);
        }
        std::sort(ps.components.begin(), ps.components.end(),
                  [](const ComponentSignature& a, const ComponentSignature& b) {
                      auto key = [](const ComponentSignature& c) {
                          return std::make_tuple(c.euler_characteristic, c.wrap_basis.size(),
                                                 c.facet_count);
                      };
                      if (key(a) != key(b)) return key(a) < key(b);
                      for (size_t i = 0; i < a.wrap_basis.size(); ++i)
                          for (int k = 0; k < 3; ++k)
                              if (a.wrap_basis[i][k] != b.wrap_basis[i][k])
                                  return a.wrap_basis[i][k] < b.wrap_basis[i][k];
                      return false;
                  });
        sig.pairs[pr] = ps;
    }
    return sig;
}

// ---------------------------------------------------------------------------
// JSON

std::string Mesh::to_json_string() const {
    json j;
    j["format"] = 1;
    json basis = json::array();
    for (int r = 0; r < 3; ++r)
        basis.push_back({lattice.basis.col[0][r], lattice.basis.col[1][r], lattice.basis.col[2][r]});
    j["lattice"] = {{"kind", to_string(lattice.kind)}, {"params", lattice.params}, {"basis", basis}};

    // compact live elements; ids become dense positions in order
    std::vector<int> vmap(verts_.size(), -1), emap(edges_.size(), -1);
    json verts = json::array();
    for (int v = 0; v < n_vertices(); ++v) {
        if (!v_alive_[v]) continue;
        vmap[v] = int(verts.size());
        verts.push_back({verts_[v].u.x, verts_[v].u.y, verts_[v].u.z});
    }
    json edges = json::array();
    for (int e = 0; e < n_edges(); ++e) {
        if (!e_alive_[e]) continue;
        emap[e] = int(edges.size());
        const Edge& ed = edges_[e];
        edges.push_back({vmap[ed.tail], vmap[ed.head], ed.wrap.x, ed.wrap.y, ed.wrap.z});
    }
    json facets = json::array();
    for (int f = 0; f < n_facets(); ++f) {
        if (!f_alive_[f]) continue;
        const Facet& fc = facets_[f];
        json row = json::array();
        for (int s = 0; s < 3; ++s) row.push_back(fc.sign[s] * (emap[fc.edge[s]] + 1));
        row.push_back(fc.front);
        row.push_back(fc.back);
        facets.push_back(row);
    }
    json bods = json::array();
    for (const Body& b : bodies)
        bods.push_back({{"region", b.region}, {"target", b.target}, {"k", b.vol_const}});
    j["vertices"] = verts;
    j["edges"] = edges;
    j["facets"] = facets;
    j["bodies"] = bods;
    return j.dump(1);
}

void Mesh::save_json(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << to_json_string() << "\n";
    if (!out) throw Error("write failed for '" + path + "'");
}

Mesh Mesh::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("mesh JSON parse error: ") + e.what());
    }
    auto need = [&](const json& o, const char* field) -> const json& {
        if (!o.contains(field)) throw ParseError(std::string("missing field '") + field + "'");
        return o.at(field);
    };
    Mesh m;
    try {
        if (need(j, "format").get<int>() != 1) throw ParseError("unsupported format version");
        const json& jl = need(j, "lattice");
        std::string kind = need(jl, "kind").get<std::string>();
        std::vector<double> params = need(jl, "params").get<std::vector<double>>();
        LatticeKind k = lattice_kind_from_string(kind);
        if (k == LatticeKind::Cubic) {
            if (params.size() != 1) throw ParseError("field 'lattice.params': cubic wants 1 value");
            m.lattice = make_cubic(params[0]);
        } else if (k == LatticeKind::Rectangular) {
            if (params.size() != 3)
                throw ParseError("field 'lattice.params': rectangular wants 3 values");
            m.lattice = make_rectangular(params[0], params[1], params[2]);
        } else {
            if (params.size() != 2)
                throw ParseError("field 'lattice.params': rhombic-prism wants 2 values");
            m.lattice = make_rhombic_prism(params[0], params[1]);
        }
        // basis is carried for readers; verify it matches the kind/params
        const json& jb = need(jl, "basis");
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                if (std::abs(double(jb.at(r).at(c)) - m.lattice.basis.col[c][r]) > 1e-12)
                    throw ParseError("field 'lattice.basis' inconsistent with kind/params");

        int vi = 0;
        for (const json& row : need(j, "vertices")) {
            if (row.size() != 3)
                throw ParseError("field 'vertices[" + std::to_string(vi) + "]': want 3 coords");
            Vec3 u{row.at(0).get<double>(), row.at(1).get<double>(), row.at(2).get<double>()};
            for (int c = 0; c < 3; ++c)
                if (!(u[c] >= 0 && u[c] < 1))
                    throw ParseError("field 'vertices[" + std::to_string(vi) +
                                     "]': coordinate not in [0,1)");
            m.add_vertex(u);
            ++vi;
        }
        int ei = 0;
        for (const json& row : need(j, "edges")) {
            if (row.size() != 5)
                throw ParseError("field 'edges[" + std::to_string(ei) + "]': want [t,h,w1,w2,w3]");
            int t = row.at(0).get<int>(), h = row.at(1).get<int>();
            IVec3 w{row.at(2).get<int>(), row.at(3).get<int>(), row.at(4).get<int>()};
            if (t < 0 || t >= m.n_vertices() || h < 0 || h >= m.n_vertices())
                throw ParseError("field 'edges[" + std::to_string(ei) + "]': vertex out of range");
            for (int c = 0; c < 3; ++c)
                if (std::abs(w[c]) > 1)
                    throw ParseError("field 'edges[" + std::to_string(ei) +
                                     "]': wrap component exceeds 1");
            m.add_edge(t, h, w);
            ++ei;
        }
        int fi = 0;
        for (const json& row : need(j, "facets")) {
            if (row.size() != 5)
                throw ParseError("field 'facets[" + std::to_string(fi) +
                                 "]': want [e1,e2,e3,front,back]");
            std::array<int, 3> es;
            std::array<int8_t, 3> sg;
            for (int s = 0; s < 3; ++s) {
                int code = row.at(s).get<int>();
                if (code == 0) throw ParseError("field 'facets[" + std::to_string(fi) +
                                                "]': signed edge id cannot be 0");
                sg[s] = code > 0 ? int8_t(1) : int8_t(-1);
                es[s] = std::abs(code) - 1;
                if (es[s] >= m.n_edges())
                    throw ParseError("field 'facets[" + std::to_string(fi) +
                                     "]': edge id out of range");
            }
            m.add_facet(es, sg, row.at(3).get<int>(), row.at(4).get<int>());
            ++fi;
        }
        for (const json& jb2 : need(j, "bodies")) {
            Body b;
            b.region = need(jb2, "region").get<int>();
            b.target = need(jb2, "target").get<double>();
            b.vol_const = need(jb2, "k").get<long long>();
            m.bodies.push_back(b);
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("mesh JSON structure error: ") + e.what());
    }
    m.recompute_triple_flags();
    return m;
}

Mesh Mesh::load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

// ---------------------------------------------------------------------------
// Surface Evolver datafile export (torus model)

std::string Mesh::to_fe_string() const {
    char buf[96];
    std::ostringstream os;
    auto num = [&](double x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    os << "// torus-model datafile\n";
    os << "torus\n";
    os << "periods\n";
    for (int c = 0; c < 3; ++c) {
        os << num(lattice.basis.col[c][0]) << " " << num(lattice.basis.col[c][1]) << " "
           << num(lattice.basis.col[c][2]) << "\n";
    }
    std::vector<int> vmap(verts_.size(), -1), emap(edges_.size(), -1), fmap(facets_.size(), -1);
    os << "\nvertices\n";
    int vn = 0;
    for (int v = 0; v < n_vertices(); ++v) {
        if (!v_alive_[v]) continue;
        vmap[v] = ++vn;
        Vec3 x = lattice.basis * verts_[v].u;
        os << vn << "  " << num(x.x) << " " << num(x.y) << " " << num(x.z) << "\n";
    }
    os << "\nedges\n";
    int en = 0;
    for (int e = 0; e < n_edges(); ++e) {
        if (!e_alive_[e]) continue;
        emap[e] = ++en;
        const Edge& ed = edges_[e];
        os << en << "  " << vmap[ed.tail] << " " << vmap[ed.head] << "  ";
        for (int c = 0; c < 3; ++c)
            os << (ed.wrap[c] > 0 ? '+' : ed.wrap[c] < 0 ? '-' : '*') << (c < 2 ? " " : "");
        os << "\n";
    }
    os << "\nfaces\n";
    int fn = 0;
    for (int f = 0; f < n_facets(); ++f) {
        if (!f_alive_[f]) continue;
        fmap[f] = ++fn;
        const Facet& fc = facets_[f];
        os << fn << " ";
        for (int s = 0; s < 3; ++s) os << " " << fc.sign[s] * emap[fc.edge[s]];
        os << "\n";
    }
    os << "\nbodies\n";
    int bn = 0;
    const double det = lattice.cell_volume();
    for (const Body& b : bodies) {
        os << ++bn << " ";
        for (int f = 0; f < n_facets(); ++f) {
            if (!f_alive_[f]) continue;
            const Facet& fc = facets_[f];
            if (fc.back == b.region)
                os << " " << fmap[f];
            else if (fc.front == b.region)
                os << " " << -fmap[f];
        }
        os << "  volume " << num(b.target) << " volconst " << num(double(b.vol_const) * det)
           << "\n";
    }
    return os.str();
}

void Mesh::export_fe(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << to_fe_string();
    if (!out) throw Error("write failed for '" + path + "'");
}

bool Mesh::operator==(const Mesh& o) const {
    auto basis_eq = [&] {
        for (int c = 0; c < 3; ++c)
            if (!(lattice.basis.col[c] == o.lattice.basis.col[c])) return false;
        return true;
    };
    if (lattice.kind != o.lattice.kind || !basis_eq()) return false;
    if (n_vertices() != o.n_vertices() || n_edges() != o.n_edges() || n_facets() != o.n_facets())
        return false;
    for (int v = 0; v < n_vertices(); ++v) {
        if (v_alive_[v] != o.v_alive_[v]) return false;
        if (v_alive_[v] && !(verts_[v].u == o.verts_[v].u)) return false;
    }
    for (int e = 0; e < n_edges(); ++e) {
        if (e_alive_[e] != o.e_alive_[e]) return false;
        if (e_alive_[e] && !(edges_[e].tail == o.edges_[e].tail &&
                             edges_[e].head == o.edges_[e].head && edges_[e].wrap == o.edges_[e].wrap))
            return false;
    }
    for (int f = 0; f < n_facets(); ++f) {
        if (f_alive_[f] != o.f_alive_[f]) return false;
        if (f_alive_[f] && !(facets_[f].edge == o.facets_[f].edge &&
                             facets_[f].sign == o.facets_[f].sign &&
                             facets_[f].front == o.facets_[f].front &&
                             facets_[f].back == o.facets_[f].back))
            return false;
    }
    if (bodies.size() != o.bodies.size()) return false;
    for (size_t i = 0; i < bodies.size(); ++i)
        if (bodies[i].region != o.bodies[i].region || bodies[i].target != o.bodies[i].target ||
            bodies[i].vol_const != o.bodies[i].vol_const)
            return false;
    return true;
}

} // namespace torb
