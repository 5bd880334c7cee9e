#pragma once

#include <functional>
#include <vector>

#include "anchor/core.hpp"
#include "anchor/reachability.hpp"

namespace anchor {

struct AlignmentObjectiveConfig {
    double w_a = 1.0;
    double w_s = 2.0;
    double w_c = 2.0;
    double alpha = 10.0;
    double chassis_radius = 0.35;
    double chassis_margin = 0.05;
    double softplus_beta = 10.0;

    void validate() const;
};

/// Disk footprint of the chassis, in the base frame.
struct ChassisModel {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.35;
};

struct PsoStage {
    int particles = 64;
    int iterations = 40;
    double inertia = 0.72;
    double cognitive = 1.49;
    double social = 1.49;
};

struct PsoConfig {
    PsoStage coarse{64, 40, 0.72, 1.49, 1.49};
    PsoStage fine{32, 30, 0.72, 1.49, 1.49};
    double r_min = 0.25;
    double r_max = 1.2;
    double fine_stage_shrink = 0.25;

    void validate() const;
};

struct AlignmentTerms {
    double j_align = 0.0;
    double j_shell = 0.0;
    double j_chassis = 0.0;
    double objective = 0.0;
    bool feasible = false;
};

struct AlignmentResult {
    BasePose pose;
    double objective = 0.0;
    AlignmentTerms terms;
    bool feasible = false;
    /// Global-best objective after each PSO iteration, both stages.
    std::vector<double> best_history;
};

inline constexpr double kInfeasiblePenalty = 10.0;

double logistic(double u);
double softplus(double u, double beta);

double j_align(const BasePose& base, const EEPose& ee_target);
double j_shell(const BasePose& base, const DualEllipsoidShell& shell, const PointCloud& cloud,
               const AlignmentObjectiveConfig& cfg);
double j_chassis(const BasePose& base, const ChassisModel& chassis, const PointCloud& cloud,
                 const AlignmentObjectiveConfig& cfg);

/// True if the target position lies in the shell seen from `base`.
bool target_in_shell(const BasePose& base, const EEPose& ee_target, const DualEllipsoidShell& shell);

AlignmentTerms objective(const BasePose& base, const EEPose& ee_target, const DualEllipsoidShell& shell,
                         const PointCloud& cloud, const ChassisModel& chassis, const AlignmentObjectiveConfig& cfg);

/// Extra feasibility test supplied by the caller (collision, path existence).
using PoseAdmissible = std::function<bool(const BasePose&)>;

/// Two-stage PSO over base poses around the target. Penalized value is the
/// objective plus kInfeasiblePenalty when the target is outside the shell or
/// `admissible` rejects the pose.
AlignmentResult refine_base_pose(const EEPose& ee_target, const DualEllipsoidShell& shell, const PointCloud& cloud,
                                 const ChassisModel& chassis, const AlignmentObjectiveConfig& cfg,
                                 const PsoConfig& pso, RngSeed seed, const PoseAdmissible& admissible = {});

}  // namespace anchor
