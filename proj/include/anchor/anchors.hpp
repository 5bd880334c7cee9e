#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "anchor/core.hpp"
#include "anchor/reachability.hpp"

namespace anchor {

/// Axis-aligned planar box.
struct PlanarBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double area() const;
    static PlanarBox of(const PointCloud& cloud);
    static PlanarBox centered(double cx, double cy, double sx, double sy);

    friend bool operator==(const PlanarBox&, const PlanarBox&) = default;
};

/// area(obj & container) / area(obj). Throws std::domain_error for a zero-area object box.
double overlap_ratio(const PlanarBox& obj, const PlanarBox& container);

struct RobotAnchor {
    BasePose chassis_pose;
    bool gripper_closed = false;
    double gripper_current = 0.0;
    bool gripper_roi_object_visible = false;
    /// Object in the gripper's region of interest; names holding()'s argument.
    std::string roi_object_id;
};

struct ObjectAnchor {
    std::string id;
    Point3 expected_position;
    PointCloud cloud;
    PlanarBox footprint_xy;
    bool stable_segmented = false;
    std::optional<int> last_observed_cycle;
    /// Perception tick of the observation before last_observed_cycle.
    std::optional<int> previous_observed_cycle;
    int fused_count = 0;
};

struct AnchorStore {
    RobotAnchor robot;
    std::map<std::string, ObjectAnchor> objects;
    int cycle = 0;

    const ObjectAnchor* find(const std::string& id) const;
};

inline constexpr double kStableDrift = 0.03;
inline constexpr double kFuseGate = 0.10;

/// Folds one detection at perception tick `tick` into the anchor. The position
/// is a running mean while detections stay within kFuseGate of it; a jump
/// restarts the mean. Stable means seen on this tick and the previous one with
/// the fused position moving less than kStableDrift.
void record_observation(ObjectAnchor& anchor, const Point3& measured, const PointCloud& cloud, int tick);

/// Called for anchors not detected on a tick.
void record_miss(ObjectAnchor& anchor);

enum class Pred { Found, Near, Aligned, Holding, In };

const char* pred_name(Pred p);
std::optional<Pred> pred_from_name(const std::string& name);

/// Ground predicate; the robot argument is implicit. `b` is used only by In.
struct Atom {
    Pred pred = Pred::Found;
    std::string a;
    std::string b;

    std::string str() const;
    friend auto operator<=>(const Atom&, const Atom&) = default;
};

using SymbolicState = std::set<Atom>;

std::string state_string(const SymbolicState& s);

struct PredicateConfig {
    double eps_near = 1.0;
    double eps_in = 0.6;
    double load_threshold = 0.3;
    /// When false, aligned() drops the shell test (alignment ablation).
    bool shell_check = true;

    void validate() const;
};

SymbolicState derive_state(const AnchorStore& store, const PredicateConfig& cfg, const DualEllipsoidShell& shell);

/// One snapshot record, multi-line, terminated by "end".
void write_snapshot(std::ostream& out, const AnchorStore& store);
/// Reads the next snapshot; nullopt at end of input. Throws std::runtime_error on malformed text.
std::optional<AnchorStore> read_snapshot(std::istream& in);

}  // namespace anchor
