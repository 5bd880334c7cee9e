#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anchor/alignment.hpp"
#include "anchor/anchors.hpp"
#include "anchor/core.hpp"
#include "anchor/grasping.hpp"
#include "anchor/planner.hpp"
#include "anchor/reachability.hpp"
#include "anchor/recovery.hpp"

namespace anchor {

inline constexpr double kCellSize = 0.10;

struct SensorModel {
    double fov_radius = 3.0;
    double fov_halfangle = 60.0 * kPi / 180.0;
    double p_detect = 0.95;
    double position_noise_sigma = 0.02;
    double height = 1.0;
    /// Everything this close is in view regardless of heading.
    double near_field = 0.5;

    void validate() const;
};

struct OutcomeModel {
    double p_g = 0.9;
    double p_g_misaligned = 0.3;
    double p_slip = 0.0;
    /// Chance that a failed misaligned grasp knocks the target out of the scene.
    double p_knock = 0.25;
    double place_sigma_aligned = 0.01;
    double place_sigma_misaligned = 0.07;
    double place_clearance = 0.05;

    void validate() const;
};

struct SimObject {
    std::string id;
    Point3 true_pose;
    double sx = 0.08, sy = 0.08, sz = 0.08;
    bool graspable = true;
    bool container = false;
    bool present = true;
    int occluded_ticks = 0;

    PlanarBox footprint() const { return PlanarBox::centered(true_pose.x, true_pose.y, sx, sy); }
};

struct Region {
    std::string id;
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    double prior = 0.0;

    bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

enum class TriggerKind { Cycle, Before, After };
enum class EffectKind { Displace, Occlude, Remove, Slip };

struct Disturbance {
    TriggerKind trigger = TriggerKind::Cycle;
    /// Executive cycle for Cycle triggers, otherwise the 1-based dispatch count of `action`.
    int count = 0;
    ActionName action = ActionName::ObjFind;
    EffectKind effect = EffectKind::Displace;
    std::string object;
    double dx = 0.0, dy = 0.0;
    int duration = 0;

    std::string str() const;
};

struct Scenario {
    std::string name;
    int level = 1;
    int width = 0;
    int height = 0;
    std::vector<double> cell_height;
    std::vector<char> known;
    std::vector<Region> regions;
    std::vector<SimObject> objects;
    BasePose robot;
    TaskSpec task;
    SensorModel sensor;
    OutcomeModel outcomes;
    std::vector<Disturbance> disturbances;
    int max_cycles = 100;
    std::string shell_path;
};

/// Throws std::runtime_error("<origin>:<line>: ...") on invalid input.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<scenario>");
Scenario load_scenario(const std::string& path);

struct SimConfig {
    PredicateConfig predicates;
    AlignmentObjectiveConfig alignment;
    PsoConfig pso;
    GraspScoreConfig grasp;
    /// False reproduces the alignment ablation: stop where obj_find left off.
    bool refine_alignment = true;
    double lambda_travel = 0.01;
    /// Extra margin in d-value required of the target during alignment.
    double shell_margin = 0.15;
    double standoff = 0.85;
};

class World {
public:
    World(const Scenario& scenario, const DualEllipsoidShell& shell, const SimConfig& cfg, RngSeed seed);

    const Scenario& scenario() const { return scenario_; }
    const DualEllipsoidShell& shell() const { return shell_; }
    const SimConfig& config() const { return cfg_; }

    int width() const { return scenario_.width; }
    int height() const { return scenario_.height; }
    int cell_of(double x, double y) const;
    bool in_bounds(int cx, int cy) const { return cx >= 0 && cy >= 0 && cx < width() && cy < height(); }
    Point3 cell_center(int idx) const;
    double cell_height(int idx) const { return scenario_.cell_height[static_cast<std::size_t>(idx)]; }
    bool known(int idx) const { return known_[static_cast<std::size_t>(idx)] != 0; }
    /// Known and clear of the inflated occupancy at the cell center.
    bool passable(int idx) const;
    /// Robot disk at this pose overlaps no occupied cell and sits on a known cell.
    bool pose_clear(double x, double y) const;

    /// A* (8-connected) cost in cells, or nullopt if no path.
    std::optional<double> path_cost(int from, int to) const;
    /// Dijkstra costs from `from` over passable cells; unreachable cells are infinite.
    std::vector<double> cost_map(int from) const;

    const BasePose& robot() const { return robot_; }
    SimObject* object(const std::string& id);
    const SimObject* object(const std::string& id) const;
    const std::vector<SimObject>& objects() const { return objects_; }
    const std::optional<std::string>& held() const { return held_; }

    AnchorStore& anchors() { return anchors_; }
    const AnchorStore& anchors() const { return anchors_; }
    SymbolicState state() const;

    int tick() const { return tick_; }
    Rng& rng() { return rng_; }
    RngSeed next_pso_seed();

    /// Perception tick: sensing, anchor update, map update.
    void perceive();
    void face(const Point3& p);
    /// Teleports along an A* path to `goal`; nullopt if unreachable. While
    /// holding, a slip check runs per leg; a slip drops the object and is
    /// reported through `slipped`.
    bool navigate(const BasePose& goal, bool& slipped);

    void set_gripper_holding(const std::string& id);
    void release_gripper();
    void drop_held_at(const Point3& p);
    void knock_out(const std::string& id);
    /// Height of the support surface under (x, y): container tops, then the grid.
    double support_height(double x, double y, const std::string& exclude) const;
    bool true_in(const std::string& obj, const std::string& container) const;
    /// True target position inside the shell from the true robot pose.
    bool physically_aligned(const std::string& id) const;

    /// Fires disturbances matching the trigger; returns their descriptions.
    std::vector<std::string> fire(TriggerKind kind, int cycle_or_count, ActionName action = ActionName::ObjFind);
    int dispatch_count(ActionName a) const;
    void count_dispatch(ActionName a);

    /// Region belief for `target`: prior of each region not yet fully known
    /// and not already holding the target's anchor, renormalized.
    std::map<std::string, double> region_belief(const std::string& target) const;
    bool region_fully_known(const Region& r) const;

    std::vector<Point3> local_cloud(const Point3& center, double radius) const;

private:
    bool visible(const Point3& from, const Point3& to) const;
    bool in_fov(const Point3& p) const;
    void track_held();

    Scenario scenario_;
    DualEllipsoidShell shell_;
    SimConfig cfg_;
    std::vector<char> known_;
    std::vector<double> clearance_;
    std::vector<SimObject> objects_;
    BasePose robot_;
    std::optional<std::string> held_;
    bool gripper_closed_ = false;
    bool pending_slip_ = false;
    AnchorStore anchors_;
    int tick_ = 0;
    Rng rng_;
    RngSeed seed_;
    int pso_calls_ = 0;
    std::vector<char> fired_;
    std::map<ActionName, int> dispatches_;
};

struct PrimitiveOutcome {
    bool success = false;
    std::optional<AnomalyKind> anomaly;
    std::string detail;
    std::vector<std::string> events;
};

PrimitiveOutcome primitive_obj_find(World& w, const std::string& target);
PrimitiveOutcome primitive_align(World& w, const std::string& target);
PrimitiveOutcome primitive_grasp(World& w, const std::string& target);
PrimitiveOutcome primitive_place(World& w, const std::string& obj, const std::string& container);

PrimitiveOutcome dispatch(World& w, const Action& a);

}  // namespace anchor
