#pragma once

// Independent reference computations for the tests. Nothing here calls the
// code it checks, except where a function is the thing being searched over
// (the brute-force grid evaluates the library objective on purpose).

#include <optional>
#include <string>
#include <vector>

#include "anchor/alignment.hpp"
#include "anchor/anchors.hpp"
#include "anchor/planner.hpp"
#include "anchor/reachability.hpp"

namespace oracle {

std::string source_dir();
std::string fixture(const std::string& name);

/// n points spread evenly over a sphere (golden-angle spiral).
std::vector<anchor::Point3> sphere_points(const anchor::Point3& center, double radius, int n);

/// Synthetic reachability samples: a thick shell of high-mu points out to
/// `outer_r`, and a low-mu void of radius `void_r` centered at `void_center`.
/// A ring of low-mu points beyond the outer radius stands in for the
/// unreachable far field.
std::vector<anchor::ReachabilitySample> spherical_shell_samples(double outer_r, double void_r,
                                                                const anchor::Point3& void_center);

/// Concentric-sphere shell with the given radii.
anchor::DualEllipsoidShell sphere_shell(double outer_r, double inner_r, const anchor::Point3& inner_center = {});

// ---- planning ----

/// Lexicographically-first shortest plan over the fixed domain, found by
/// depth-limited search on bitmask states (a different representation and
/// algorithm from the library planner). Arguments are ordered by their
/// position in `objects`. nullopt when unsolvable within `max_depth`.
std::optional<std::vector<std::string>> reference_plan(const std::vector<std::string>& objects,
                                                       const anchor::SymbolicState& init,
                                                       const anchor::SymbolicState& goal, int max_depth = 14);

/// Replays a plan through the hand-written schema table; true if every step
/// is applicable and the goal holds at the end.
bool plan_reaches_goal(const std::vector<std::string>& objects, const anchor::SymbolicState& init,
                       const anchor::SymbolicState& goal, const std::vector<std::string>& plan);

// ---- alignment ----

struct Scene {
    std::string name;
    anchor::EEPose target;
    anchor::PointCloud cloud;
};

/// The five fixed scenes used for the PSO comparison.
std::vector<Scene> pso_scenes();

/// Objective plus the infeasibility penalty, recomputed term by term.
double penalized(const anchor::BasePose& pose, const Scene& scene, const anchor::DualEllipsoidShell& shell,
                 const anchor::AlignmentObjectiveConfig& cfg);

/// Minimum of the penalized objective on a grid over the search annulus
/// (step metres in x/y, step_deg degrees in heading).
double grid_minimum(const Scene& scene, const anchor::DualEllipsoidShell& shell,
                    const anchor::AlignmentObjectiveConfig& cfg, const anchor::PsoConfig& pso, double step,
                    double step_deg);

// ---- traces ----

struct Recount {
    int l1_detected = 0;
    int l1_recovered = 0;
    int l2_detected = 0;
    int l2_recovered = 0;
};

/// Re-derives anomaly events from trace text: a recovery line on a key with
/// no open event opens one; a later successful dispatch of that key, or a
/// successful trial, recovers it.
Recount recount_trace(const std::string& text);

}  // namespace oracle
