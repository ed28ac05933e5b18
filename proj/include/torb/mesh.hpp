#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "torb/lattice.hpp"
#include "torb/vec.hpp"

namespace torb {

struct Vertex {
    Vec3 u;                      // canonical lattice coordinates in [0,1)^3
    bool on_triple_curve = false;
};

// Directed edge with wrap counts: unwrapped displacement = head - tail + wrap.
struct Edge {
    int tail = -1;
    int head = -1;
    IVec3 wrap;
};

// Oriented triangle; slot i traverses edge[i] forward (sign +1) or reversed (-1).
// The facet normal points from back_region to front_region.
struct Facet {
    std::array<int, 3> edge{-1, -1, -1};
    std::array<int8_t, 3> sign{1, 1, 1};
    int front = -1;
    int back = -1;
};

struct Body {
    int region = 0;          // 1 or 2; the complement (region 0) carries no body
    double target = 0;       // target volume
    long long vol_const = 0; // anchored volume = raw + vol_const * det(basis)
};

struct Violation {
    std::string element; // "vertex", "edge", "facet", "body", "mesh"
    int id = -1;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string summary(size_t max_lines = 12) const;
};

struct EdgeUse {
    int facet = -1;
    int slot = 0;
    int sign = 1;
};

// Per-interface-component topology data. wrap_basis is the Hermite-normal-form
// basis of the subgroup of Z^3 spanned by the component's cycle wraps.
struct ComponentSignature {
    int facet_count = 0;
    int euler_characteristic = 0;
    std::vector<IVec3> wrap_basis;
    bool operator==(const ComponentSignature&) const = default;
};

struct PairSignature {
    int facet_count = 0;
    std::vector<ComponentSignature> components; // canonically sorted
    bool operator==(const PairSignature&) const = default;
};

struct TopologySignature {
    // keyed by region pair (lo,hi) in {(0,1),(0,2),(1,2)}
    std::map<std::pair<int, int>, PairSignature> pairs;
    bool operator==(const TopologySignature&) const = default;
};

// Triangulated two-complex separating regions 1, 2 and the complement 0 in a
// flat torus. Indexed arenas with tombstones; ids are never reused in-session.
class Mesh {
public:
    Lattice lattice;
    std::vector<Body> bodies;

    // --- element access -----------------------------------------------------
    int n_vertices() const { return int(verts_.size()); }
    int n_edges() const { return int(edges_.size()); }
    int n_facets() const { return int(facets_.size()); }
    int live_vertex_count() const { return live_v_; }
    int live_edge_count() const { return live_e_; }
    int live_facet_count() const { return live_f_; }

    bool vertex_alive(int id) const { return v_alive_[id]; }
    bool edge_alive(int id) const { return e_alive_[id]; }
    bool facet_alive(int id) const { return f_alive_[id]; }

    Vertex& vertex(int id) { return verts_[id]; }
    const Vertex& vertex(int id) const { return verts_[id]; }
    Edge& edge(int id) { return edges_[id]; }
    const Edge& edge(int id) const { return edges_[id]; }
    Facet& facet(int id) { return facets_[id]; }
    const Facet& facet(int id) const { return facets_[id]; }

    int add_vertex(const Vec3& canonical_u);
    int add_edge(int tail, int head, const IVec3& wrap);
    int add_facet(const std::array<int, 3>& edges, const std::array<int8_t, 3>& signs,
                  int front, int back);
    void remove_edge(int id);
    void remove_facet(int id);

    // --- geometry helpers ---------------------------------------------------
    Vec3 edge_disp_u(const Edge& e) const {
        return verts_[e.head].u - verts_[e.tail].u + to_vec3(e.wrap);
    }
    Vec3 edge_disp_u(int id) const { return edge_disp_u(edges_[id]); }

    // Traversal start/end vertex of a facet slot.
    int slot_start(const Facet& f, int slot) const {
        const Edge& e = edges_[f.edge[slot]];
        return f.sign[slot] > 0 ? e.tail : e.head;
    }
    int slot_end(const Facet& f, int slot) const {
        const Edge& e = edges_[f.edge[slot]];
        return f.sign[slot] > 0 ? e.head : e.tail;
    }
    Vec3 slot_disp_u(const Facet& f, int slot) const {
        Vec3 d = edge_disp_u(f.edge[slot]);
        return f.sign[slot] > 0 ? d : -d;
    }

    // Traversal vertex ids (v0, v1, v2), v0 = start of the first slot.
    std::array<int, 3> facet_vertices(int fid) const;
    // Lifted u-space positions: a = canonical rep of v0, b = a + d0, c = b + d1.
    std::array<Vec3, 3> facet_lift_u(int fid) const;
    std::array<Vec3, 3> facet_lift_ambient(int fid) const;
    // Ambient vector area (1/2)(b-a)x(c-a), oriented back -> front.
    Vec3 facet_area_vec(int fid) const;
    double facet_area(int fid) const;

    // --- incidence ----------------------------------------------------------
    std::vector<std::vector<EdgeUse>> edge_uses() const; // indexed by edge id
    std::vector<std::vector<int>> vertex_facets() const; // indexed by vertex id

    // --- bulk mutation ------------------------------------------------------
    // Displace live vertices by du (lattice coords, indexed by vertex id),
    // re-canonicalize and fix incident edge wraps.
    void move_vertices_u(const std::vector<Vec3>& du);
    // Translate everything by c (lattice coords), recomputing wraps.
    void translate(const Vec3& c_u);
    void recompute_triple_flags();
    Body& body(int region);
    const Body& body(int region) const;

    // --- whole-mesh operations ----------------------------------------------
    ValidationReport validate() const;
    TopologySignature topology_signature() const; // throws Error on invalid mesh

    void save_json(const std::string& path) const;
    std::string to_json_string() const;
    static Mesh load_json(const std::string& path);
    static Mesh from_json_string(const std::string& text);

    void export_fe(const std::string& path) const;
    std::string to_fe_string() const;

    bool operator==(const Mesh& o) const;

private:
    std::vector<Vertex> verts_;
    std::vector<Edge> edges_;
    std::vector<Facet> facets_;
    std::vector<char> v_alive_, e_alive_, f_alive_;
    int live_v_ = 0, live_e_ = 0, live_f_ = 0;
};

} // namespace torb
