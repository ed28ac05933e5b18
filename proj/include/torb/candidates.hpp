#pragma once

#include <optional>
#include <string>

#include "torb/mesh.hpp"

namespace torb {

enum class CandidateKind {
    StandardDoubleBubble, // sdb
    DelaunayChain,        // dc
    CylinderLens,         // cl
    CylinderCross,        // cc
    DoubleCylinder,       // 2c
    SlabLens,             // sl
    CenterBubble,         // cb
    CylinderString,       // cs
    SlabCylinder,         // sc
    DoubleSlab,           // 2s
    HexagonalHoneycomb,   // hh
};

inline constexpr CandidateKind all_candidate_kinds[] = {
    CandidateKind::StandardDoubleBubble, CandidateKind::DelaunayChain,
    CandidateKind::CylinderLens,         CandidateKind::CylinderCross,
    CandidateKind::DoubleCylinder,       CandidateKind::SlabLens,
    CandidateKind::CenterBubble,         CandidateKind::CylinderString,
    CandidateKind::SlabCylinder,         CandidateKind::DoubleSlab,
    CandidateKind::HexagonalHoneycomb,
};

// Short legend codes: sdb, dc, cl, cc, 2c, sl, cb, cs, sc, 2s, hh.
std::string candidate_code(CandidateKind k);
std::string candidate_name(CandidateKind k);
CandidateKind candidate_from_code(const std::string& code);

struct CandidateSpec {
    CandidateKind kind;
    Lattice lattice;
    double v1 = 0;
    double v2 = 0;
    void check() const; // throws InvalidParameter
};

struct AnalyticArea {
    bool available = false;
    double value = 0;
    std::string provenance; // which closed form produced the value
};

// Build the initial mesh for a candidate: valid topology, volumes projected
// onto the targets. Throws Infeasible with the violated bound named.
Mesh build(const CandidateSpec& spec);

// Closed-form area where the geometry permits one (flat candidates, products
// of 2D closed forms with a period, the standard double bubble).
AnalyticArea analytic_area(const CandidateSpec& spec);

// Best single-bubble enclosure among {sphere, tube, slab} for volume v.
struct SingleBubbleRef {
    double area = 0;
    std::string kind; // "sphere" | "cylinder" | "slab"
};
SingleBubbleRef single_bubble_reference(const Lattice& lat, double v);

// Expected interface topology per kind: for each region pair, the sorted list
// of (euler characteristic, wrap rank) of its components.
struct ExpectedTopology {
    std::vector<std::pair<int, int>> pair01, pair02, pair12;
};
ExpectedTopology expected_topology(CandidateKind k);

} // namespace torb
