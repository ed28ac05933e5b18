#pragma once

#include <string>
#include <vector>

#include "torb/mesh.hpp"

namespace torb {

enum class StageOp { None, Refine, Equiangulate, Average, EquiangulateAverage };

std::string to_string(StageOp op);
StageOp stage_op_from_string(const std::string& s);

struct Stage {
    int descent_steps = 0;
    StageOp then = StageOp::None;
};

struct RelaxConfig {
    std::vector<Stage> schedule;
    double area_tol = 1e-7;        // relative area change over the trailing window
    int window = 10;
    double volume_tol_rel = 1e-9;  // x det(basis)
    double max_step_rel = 0.05;    // x shortest lattice period
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int max_backtracks = 40;
    int max_projection_iters = 20;

    static RelaxConfig defaults();
    double volume_tol(const Lattice& lat) const { return volume_tol_rel * lat.cell_volume(); }
    double max_step(const Lattice& lat) const { return max_step_rel * lat.shortest_period(); }
    void check() const; // throws InvalidParameter
};

struct StepStat {
    double area = 0;
    double v1_err = 0;
    double v2_err = 0;
    double max_disp = 0;
    double accepted_t = 0;
    bool stalled = false;
};

struct StageReport {
    std::string op;
    std::vector<StepStat> steps;
};

struct RelaxReport {
    std::vector<StageReport> stages;
    bool converged = false;
    int stage_reached = 0;
    double final_area = 0;
    double final_v1_err = 0;
    double final_v2_err = 0;
    std::string to_json_string() const;
};

// Newton projection onto the two volume constraints along span{grad V1, grad V2}.
// Returns the number of iterations used. Throws DegenerateConstraint /
// ProjectionFailure.
int project_volumes(Mesh& m, const RelaxConfig& cfg = RelaxConfig::defaults());

// One volume-projected steepest-descent step with Armijo backtracking; the
// line search evaluates area after re-projection. `t_hint` < 0 starts at the
// step cap. Never increases area; a stalled search returns a zero step.
StepStat descent_step(Mesh& m, const RelaxConfig& cfg = RelaxConfig::defaults(),
                      double t_hint = -1);

// 4-to-1 subdivision; flat surfaces keep their area exactly, volumes are
// re-anchored.
void refine(Mesh& m);

// Min-angle-improving edge flips within nearly coplanar same-wall pairs.
// Returns the number of flips performed.
int equiangulate(Mesh& m);

// Area-weighted tangential smoothing; triple-curve vertices move only along
// their curve; volumes re-projected afterwards.
void vertex_average(Mesh& m, const RelaxConfig& cfg = RelaxConfig::defaults());

RelaxReport relax(Mesh& m, const RelaxConfig& cfg = RelaxConfig::defaults());

} // namespace torb
