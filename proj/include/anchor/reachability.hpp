#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "anchor/core.hpp"

namespace anchor {

struct JointLimits {
    double min = -kPi;
    double max = kPi;
};

/// Parametric 4-DOF arm: base yaw followed by three pitch joints. Pitch is
/// measured upward from horizontal; all quantities are in the robot base frame.
struct ArmModel {
    std::array<double, 3> link_lengths{0.30, 0.25, 0.15};
    /// base_yaw, shoulder_pitch, elbow_pitch, wrist_pitch
    std::array<JointLimits, 4> joint_limits{{{-1.75, 1.75}, {-1.5708, 1.5708}, {-2.6, 2.6}, {-2.0, 2.0}}};
    Point3 mount_offset{0.10, 0.0, 0.35};
    double self_collision_radius = 0.04;

    /// Throws std::invalid_argument if a link length or limit pair is invalid.
    void validate() const;
    double reach() const { return link_lengths[0] + link_lengths[1] + link_lengths[2]; }
};

using JointVector = std::array<double, 4>;

struct ArmFk {
    /// shoulder, elbow, wrist, tool tip
    std::array<Point3, 4> frames;
    Point3 approach;

    const Point3& tip() const { return frames[3]; }
};

ArmFk forward_kinematics(const ArmModel& arm, const JointVector& q);

struct IkOptions {
    double damping = 0.05;
    int max_iterations = 200;
    double position_tolerance = 0.005;
    double angle_tolerance = 5.0 * kPi / 180.0;
};

/// Damped least-squares IK with random restarts inside the joint limits.
/// Returns the first converged joint vector, or nullopt if every restart fails.
std::optional<JointVector> solve_ik(const ArmModel& arm, const EEPose& target, RngSeed seed, int restarts,
                                    const IkOptions& options = {});

/// True if the configuration clears every obstacle point (base frame) by the
/// arm's self_collision_radius and keeps every link above the ground plane.
bool configuration_clear(const ArmModel& arm, const JointVector& q, const PointCloud& obstacles);

struct ShellFitConfig {
    double mu_threshold = 0.5;
    int ik_trials_per_pose = 20;
    double sample_grid_resolution = 0.05;
    double mvee_tolerance = 1e-5;

    void validate() const;
};

struct ReachabilitySample {
    EEPose pose;
    double mu = 0.0;
    int trials = 1;
    int successes = 0;
};

/// Seed used for IK trial `trial` of a scoring call made with `seed`.
RngSeed ik_trial_seed(RngSeed seed, int trial);

/// Fraction of single-restart IK trials that converge collision-free.
ReachabilitySample manipulability_score(const ArmModel& arm, const EEPose& pose, const PointCloud& obstacles,
                                        const ShellFitConfig& cfg, RngSeed seed);

/// Approach tilts (below horizontal) cycled across trials during sampling.
inline constexpr std::array<double, 3> kSamplingTilts{0.0, kPi / 6.0, kPi / 3.0};

/// Cells per axis of the sampling grid for this arm and resolution.
int workspace_cells_per_axis(const ArmModel& arm, double resolution);

/// Scores one pose per cell of a regular grid spanning the arm's reach ball.
/// Output order is by cell index (x fastest), independent of thread count.
std::vector<ReachabilitySample> sample_workspace(const ArmModel& arm, const ShellFitConfig& cfg, RngSeed seed,
                                                 unsigned threads = 0);

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Ellipsoid {
    Point3 center;
    Eigen::Matrix3d shape = Eigen::Matrix3d::Identity();

    /// (p - c)^T E (p - c)
    double distance(const Point3& p) const;
    /// Semi-axis lengths, ascending.
    Eigen::Vector3d semi_axes() const;
    bool valid() const;
};

/// Minimum-volume enclosing ellipsoid by Khachiyan's iteration with
/// Todd-Yildirim away steps, scaled afterwards so every input point satisfies
/// distance <= 1. Throws FitError for affinely degenerate input.
Ellipsoid minimum_volume_ellipsoid(const std::vector<Point3>& points, double tolerance);

struct DualEllipsoidShell {
    Ellipsoid outer;
    Ellipsoid inner;

    double d_out(const Point3& p) const { return outer.distance(p); }
    double d_in(const Point3& p) const { return inner.distance(p); }
    bool contains(const Point3& p) const { return d_out(p) <= 1.0 && d_in(p) >= 1.0; }
    Point3 offset() const { return inner.center - outer.center; }
    bool valid() const;
};

/// Fits the outer MVEE to high-mu positions and the inner MVEE to the interior
/// dead zone (low-mu positions inside the outer ellipsoid and the high-mu hull).
/// `mount` anchors the fallback inner sphere.
DualEllipsoidShell fit_shell(const std::vector<ReachabilitySample>& samples, const ShellFitConfig& cfg,
                             const Point3& mount = {});

/// True if `p` lies in the convex hull of `hull_points` (Gilbert distance test).
bool inside_convex_hull(const std::vector<Point3>& hull_points, const Point3& p, double tolerance = 1e-4);

void write_shell(std::ostream& out, const DualEllipsoidShell& shell);
/// Throws std::runtime_error on malformed text or a non-SPD shape matrix.
DualEllipsoidShell read_shell(std::istream& in);
void save_shell(const std::string& path, const DualEllipsoidShell& shell);
DualEllipsoidShell load_shell(const std::string& path);

struct ShellFitJob {
    ArmModel arm;
    ShellFitConfig fit;
    RngSeed seed{2026};
};

/// Arm parameter text: one "key values..." per line, '#' comments.
/// Keys: links, limit <joint 0-3> <min> <max>, mount, collision_radius,
/// mu_threshold, trials, resolution, tolerance, seed.
/// Throws std::runtime_error naming the offending line.
ShellFitJob parse_arm_params(const std::string& text);

/// Shell fitted once per process from the default ArmModel at a coarse grid.
const DualEllipsoidShell& default_shell();

}  // namespace anchor
