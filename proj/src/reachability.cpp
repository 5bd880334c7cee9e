#include "anchor/reachability.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace anchor {

void ArmModel::validate() const {
    for (double l : link_lengths) {
        if (!(l > 0.0)) {
            throw std::invalid_argument("ArmModel: link lengths must be positive");
        }
    }
    for (const JointLimits& lim : joint_limits) {
        if (!(lim.min < lim.max)) {
            throw std::invalid_argument("ArmModel: joint limit min must be below max");
        }
    }
    if (!(self_collision_radius >= 0.0)) {
        throw std::invalid_argument("ArmModel: negative self-collision radius");
    }
}

void ShellFitConfig::validate() const {
    if (!(mu_threshold > 0.0 && mu_threshold < 1.0)) {
        throw std::invalid_argument("ShellFitConfig: mu_threshold must lie in (0, 1)");
    }
    if (ik_trials_per_pose < 1) {
        throw std::invalid_argument("ShellFitConfig: ik_trials_per_pose must be >= 1");
    }
    if (!(sample_grid_resolution > 0.0)) {
        throw std::invalid_argument("ShellFitConfig: grid resolution must be positive");
    }
    if (!(mvee_tolerance > 0.0)) {
        throw std::invalid_argument("ShellFitConfig: mvee_tolerance must be positive");
    }
}

namespace {

Eigen::Vector3d to_eigen(const Point3& p) { return {p.x, p.y, p.z}; }
Point3 from_eigen(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

struct JointAxes {
    std::array<Eigen::Vector3d, 4> axis;
    std::array<Eigen::Vector3d, 4> origin;
};

JointAxes joint_axes(const ArmFk& fk, double yaw) {
    JointAxes ax;
    const Eigen::Vector3d pitch_axis(std::sin(yaw), -std::cos(yaw), 0.0);
    ax.axis = {Eigen::Vector3d::UnitZ(), pitch_axis, pitch_axis, pitch_axis};
    ax.origin = {to_eigen(fk.frames[0]), to_eigen(fk.frames[0]), to_eigen(fk.frames[1]), to_eigen(fk.frames[2])};
    return ax;
}

double angle_between(const Point3& a, const Point3& b) {
    return std::atan2(cross(a, b).norm(), dot(a, b));
}

double point_segment_distance(const Point3& p, const Point3& a, const Point3& b) {
    const Point3 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

// Pitch joints start uniformly inside their limits; yaw starts near the
// target azimuth so restarts explore the arm plane rather than the heading.
JointVector random_configuration(const ArmModel& arm, const Point3& target, Rng& rng) {
    JointVector q{};
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = rng.uniform(arm.joint_limits[i].min, arm.joint_limits[i].max);
    }
    const Point3 rel = target - arm.mount_offset;
    const double azimuth = rel.planar_norm() > 1e-9 ? std::atan2(rel.y, rel.x) : 0.0;
    q[0] = std::clamp(azimuth + rng.uniform(-0.5, 0.5), arm.joint_limits[0].min, arm.joint_limits[0].max);
    return q;
}

void clamp_to_limits(const ArmModel& arm, JointVector& q) {
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = std::clamp(q[i], arm.joint_limits[i].min, arm.joint_limits[i].max);
    }
}

// Weight (m/rad) applied to the approach-direction residual.
constexpr double kOrientationWeight = 0.3;
constexpr double kMaxStep = 0.5;

std::optional<JointVector> descend(const ArmModel& arm, const EEPose& target, JointVector q,
                                   const IkOptions& opt) {
    const Eigen::Vector3d goal = to_eigen(target.position());
    const Eigen::Vector3d goal_dir = to_eigen(target.approach_dir());
    const double lambda2 = opt.damping * opt.damping;
    for (int it = 0; it < opt.max_iterations; ++it) {
        const ArmFk fk = forward_kinematics(arm, q);
        const Eigen::Vector3d tip = to_eigen(fk.tip());
        const Eigen::Vector3d dir = to_eigen(fk.approach);
        const Eigen::Vector3d pos_err = goal - tip;
        const Eigen::Vector3d rot_err = dir.cross(goal_dir);
        const double ang = std::atan2(rot_err.norm(), dir.dot(goal_dir));
        if (pos_err.norm() < 0.1 * opt.position_tolerance && ang < 0.1 * opt.angle_tolerance) {
            break;
        }
        const JointAxes ax = joint_axes(fk, q[0]);
        Eigen::Matrix<double, 6, 4> jac;
        for (int j = 0; j < 4; ++j) {
            jac.block<3, 1>(0, j) = ax.axis[j].cross(tip - ax.origin[j]);
            jac.block<3, 1>(3, j) = kOrientationWeight * ax.axis[j];
        }
        Eigen::Matrix<double, 6, 1> err;
        err << pos_err, kOrientationWeight * rot_err;
        const Eigen::Matrix4d normal = jac.transpose() * jac + lambda2 * Eigen::Matrix4d::Identity();
        Eigen::Vector4d dq = normal.ldlt().solve(jac.transpose() * err);
        const double step = dq.norm();
        if (step > kMaxStep) {
            dq *= kMaxStep / step;
        }
        for (int j = 0; j < 4; ++j) {
            q[j] += dq[j];
        }
        clamp_to_limits(arm, q);
    }
    const ArmFk fk = forward_kinematics(arm, q);
    if ((fk.tip() - target.position()).norm() <= opt.position_tolerance &&
        angle_between(fk.approach, target.approach_dir()) <= opt.angle_tolerance) {
        return q;
    }
    return std::nullopt;
}

}  // namespace

ArmFk forward_kinematics(const ArmModel& arm, const JointVector& q) {
    const Point3 radial{std::cos(q[0]), std::sin(q[0]), 0.0};
    const Point3 up{0.0, 0.0, 1.0};
    ArmFk fk;
    fk.frames[0] = arm.mount_offset;
    double pitch = 0.0;
    for (int i = 0; i < 3; ++i) {
        pitch += q[i + 1];
        const Point3 dir = std::cos(pitch) * radial + std::sin(pitch) * up;
        fk.frames[i + 1] = fk.frames[i] + arm.link_lengths[i] * dir;
        fk.approach = dir;
    }
    return fk;
}

std::optional<JointVector> solve_ik(const ArmModel& arm, const EEPose& target, RngSeed seed, int restarts,
                                    const IkOptions& options) {
    if (restarts < 1) {
        throw std::invalid_argument("solve_ik: restarts must be >= 1");
    }
    if ((target.position() - arm.mount_offset).norm() > arm.reach() + options.position_tolerance) {
        return std::nullopt;
    }
    Rng rng(seed);
    for (int r = 0; r < restarts; ++r) {
        if (auto q = descend(arm, target, random_configuration(arm, target.position(), rng), options)) {
            return q;
        }
    }
    return std::nullopt;
}

bool configuration_clear(const ArmModel& arm, const JointVector& q, const PointCloud& obstacles) {
    const ArmFk fk = forward_kinematics(arm, q);
    for (int i = 1; i < 4; ++i) {
        if (fk.frames[i].z < 0.0) {
            return false;
        }
    }
    const double r = arm.self_collision_radius;
    for (const Point3& p : obstacles.points) {
        for (int i = 0; i < 3; ++i) {
            if (point_segment_distance(p, fk.frames[i], fk.frames[i + 1]) < r) {
                return false;
            }
        }
    }
    return true;
}

RngSeed ik_trial_seed(RngSeed seed, int trial) { return derive_seed(seed, static_cast<std::uint64_t>(trial)); }

namespace {

ReachabilitySample score_with_approaches(const ArmModel& arm, const Point3& position,
                                         const std::vector<EEPose>& approaches, const PointCloud& obstacles,
                                         const ShellFitConfig& cfg, RngSeed seed) {
    ReachabilitySample sample;
    sample.pose = approaches.front();
    sample.trials = cfg.ik_trials_per_pose;
    // The reach ball is a hard bound even though IK accepts a few millimetres of error.
    if ((position - arm.mount_offset).norm() <= arm.reach()) {
        for (int t = 0; t < cfg.ik_trials_per_pose; ++t) {
            const EEPose& target = approaches[static_cast<std::size_t>(t) % approaches.size()];
            const auto q = solve_ik(arm, target, ik_trial_seed(seed, t), 1);
            if (q && configuration_clear(arm, *q, obstacles)) {
                ++sample.successes;
            }
        }
    }
    sample.mu = static_cast<double>(sample.successes) / static_cast<double>(sample.trials);
    return sample;
}

}  // namespace

ReachabilitySample manipulability_score(const ArmModel& arm, const EEPose& pose, const PointCloud& obstacles,
                                        const ShellFitConfig& cfg, RngSeed seed) {
    if (cfg.ik_trials_per_pose < 1) {
        throw std::invalid_argument("manipulability_score: ik_trials_per_pose must be >= 1");
    }
    return score_with_approaches(arm, pose.position(), {pose}, obstacles, cfg, seed);
}

int workspace_cells_per_axis(const ArmModel& arm, double resolution) {
    if (!(resolution > 0.0)) {
        throw std::invalid_argument("workspace grid resolution must be positive");
    }
    // The small slack keeps exact multiples (e.g. extent == resolution) from rounding up.
    return std::max(1, static_cast<int>(std::ceil(2.0 * arm.reach() / resolution - 1e-9)));
}

std::vector<ReachabilitySample> sample_workspace(const ArmModel& arm, const ShellFitConfig& cfg, RngSeed seed,
                                                 unsigned threads) {
    arm.validate();
    cfg.validate();
    const int n = workspace_cells_per_axis(arm, cfg.sample_grid_resolution);
    const double res = cfg.sample_grid_resolution;
    const double r = arm.reach();
    const Point3 origin = arm.mount_offset - Point3{r, r, r};
    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    std::vector<ReachabilitySample> out(total);
    const PointCloud no_obstacles{{}, Frame::Base};

    auto score_cell = [&](std::size_t idx) {
        const int ix = static_cast<int>(idx % n);
        const int iy = static_cast<int>((idx / n) % n);
        const int iz = static_cast<int>(idx / (static_cast<std::size_t>(n) * n));
        const Point3 p = origin + Point3{(ix + 0.5) * res, (iy + 0.5) * res, (iz + 0.5) * res};
        const Point3 rel = p - arm.mount_offset;
        const double azimuth = rel.planar_norm() > 1e-9 ? std::atan2(rel.y, rel.x) : 0.0;
        std::vector<EEPose> approaches;
        for (double tilt : kSamplingTilts) {
            approaches.push_back(EEPose::downward_tilt(p, azimuth, tilt));
        }
        out[idx] = score_with_approaches(arm, p, approaches, no_obstacles, cfg,
                                         derive_seed(seed, static_cast<std::uint64_t>(idx)));
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t idx = t; idx < total; idx += threads) {
                score_cell(idx);
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    return out;
}

double Ellipsoid::distance(const Point3& p) const {
    const Eigen::Vector3d d = to_eigen(p - center);
    return d.dot(shape * d);
}

Eigen::Vector3d Ellipsoid::semi_axes() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(shape);
    Eigen::Vector3d ev = es.eigenvalues();
    Eigen::Vector3d axes;
    for (int i = 0; i < 3; ++i) {
        axes[i] = 1.0 / std::sqrt(ev[2 - i]);
    }
    return axes;
}

bool Ellipsoid::valid() const {
    if (!center.finite() || !shape.allFinite()) {
        return false;
    }
    if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(shape);
    return es.eigenvalues().minCoeff() > 0.0;
}

bool DualEllipsoidShell::valid() const {
    return outer.valid() && inner.valid() && outer.distance(inner.center) < 1.0;
}

namespace {

// Smallest covariance eigenvalue below this (m^2) marks a flat or collapsed set.
constexpr double kDegenerateVariance = 1e-10;

bool affinely_degenerate(const std::vector<Point3>& pts) {
    if (pts.size() < 4) {
        return true;
    }
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const Point3& p : pts) {
        mean += to_eigen(p);
    }
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Point3& p : pts) {
        const Eigen::Vector3d d = to_eigen(p) - mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(pts.size());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
    return es.eigenvalues().minCoeff() < kDegenerateVariance;
}

}  // namespace

Ellipsoid minimum_volume_ellipsoid(const std::vector<Point3>& points, double tolerance) {
    if (affinely_degenerate(points)) {
        throw FitError("degenerate sample set");
    }
    constexpr int d = 3;
    const Eigen::Index n = static_cast<Eigen::Index>(points.size());
    Eigen::Matrix<double, 4, Eigen::Dynamic> q(4, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Point3& p = points[static_cast<std::size_t>(i)];
        q.col(i) << p.x, p.y, p.z, 1.0;
    }
    Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    Eigen::VectorXd m(n);
    const int max_iterations = 200000;
    for (int it = 0; it < max_iterations; ++it) {
        const Eigen::Matrix4d x = q * u.asDiagonal() * q.transpose();
        const Eigen::Matrix4d x_inv = x.inverse();
        m = (q.transpose() * x_inv).cwiseProduct(q.transpose()).rowwise().sum();

        Eigen::Index j = 0;
        const double kappa_plus = m.maxCoeff(&j);
        Eigen::Index k = -1;
        double kappa_minus = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (u[i] > 0.0 && m[i] < kappa_minus) {
                kappa_minus = m[i];
                k = i;
            }
        }
        const double eps_plus = kappa_plus / (d + 1) - 1.0;
        const double eps_minus = 1.0 - kappa_minus / (d + 1);
        if (std::max(eps_plus, eps_minus) <= tolerance) {
            break;
        }
        if (eps_plus > eps_minus) {
            const double beta = (kappa_plus - (d + 1)) / ((d + 1) * (kappa_plus - 1.0));
            u *= (1.0 - beta);
            u[j] += beta;
        } else {
            // Away step: shrink the weight of the most interior support point.
            double beta = ((d + 1) - kappa_minus) / ((d + 1) * (kappa_minus - 1.0));
            beta = std::min(beta, u[k] / (1.0 - u[k]));
            u *= (1.0 + beta);
            u[k] -= beta;
            u[k] = std::max(u[k], 0.0);
        }
    }

    const Eigen::Matrix<double, 3, Eigen::Dynamic> p = q.topRows<3>();
    const Eigen::Vector3d c = p * u;
    const Eigen::Matrix3d scatter = p * u.asDiagonal() * p.transpose() - c * c.transpose();
    Eigen::Matrix3d shape = scatter.inverse() / static_cast<double>(d);
    shape = 0.5 * (shape + shape.transpose());

    Ellipsoid e{from_eigen(c), shape};
    double worst = 0.0;
    for (const Point3& pt : points) {
        worst = std::max(worst, e.distance(pt));
    }
    if (worst > 0.0) {
        e.shape /= worst;
    }
    return e;
}

bool inside_convex_hull(const std::vector<Point3>& hull_points, const Point3& p, double tolerance) {
    if (hull_points.empty()) {
        return false;
    }
    Point3 x = hull_points.front();
    for (int it = 0; it < 256; ++it) {
        const Point3 v = x - p;
        const double dist = v.norm();
        if (dist < tolerance) {
            return true;
        }
        const Point3* best = &hull_points.front();
        double best_proj = std::numeric_limits<double>::infinity();
        for (const Point3& h : hull_points) {
            const double proj = dot(v, h);
            if (proj < best_proj) {
                best_proj = proj;
                best = &h;
            }
        }
        if (dot(v, *best - p) > 0.0) {
            return false;  // separating plane through p with normal v
        }
        const Point3 step = *best - x;
        const double len2 = dot(step, step);
        if (len2 <= 0.0) {
            return false;
        }
        const double t = std::clamp(-dot(v, step) / len2, 0.0, 1.0);
        if (t <= 0.0) {
            return false;
        }
        x = x + t * step;
    }
    return true;
}

namespace {

// Points reachable from the candidate nearest `seed` through hops no longer
// than 1.5x the median nearest-neighbour spacing. Scattered low-mu pockets away
// from the mount are not part of the interior dead zone.
std::vector<Point3> component_nearest(const std::vector<Point3>& pts, const Point3& seed) {
    if (pts.size() < 2) {
        return pts;
    }
    const std::size_t n = pts.size();
    std::vector<double> nn(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) {
                nn[i] = std::min(nn[i], (pts[i] - pts[j]).norm());
            }
        }
    }
    std::vector<double> sorted = nn;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
    const double link = 1.5 * sorted[n / 2];

    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if ((pts[i] - seed).norm() < (pts[start] - seed).norm()) {
            start = i;
        }
    }
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < n; ++j) {
            if (!seen[j] && (pts[i] - pts[j]).norm() <= link) {
                seen[j] = 1;
                stack.push_back(j);
            }
        }
    }
    std::vector<Point3> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i]) {
            out.push_back(pts[i]);
        }
    }
    return out;
}

}  // namespace

DualEllipsoidShell fit_shell(const std::vector<ReachabilitySample>& samples, const ShellFitConfig& cfg,
                             const Point3& mount) {
    cfg.validate();
    std::vector<Point3> high;
    std::vector<Point3> low;
    for (const ReachabilitySample& s : samples) {
        (s.mu >= cfg.mu_threshold ? high : low).push_back(s.pose.position());
    }
    if (high.size() < 10) {
        throw FitError("workspace too constrained");
    }
    // Canonical order so the fit does not depend on the caller's sample order.
    auto by_coords = [](const Point3& a, const Point3& b) {
        return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
    };
    std::sort(high.begin(), high.end(), by_coords);
    std::sort(low.begin(), low.end(), by_coords);

    DualEllipsoidShell shell;
    shell.outer = minimum_volume_ellipsoid(high, cfg.mvee_tolerance);

    std::vector<Point3> candidates;
    for (const Point3& p : low) {
        if (shell.outer.distance(p) < 1.0 && inside_convex_hull(high, p)) {
            candidates.push_back(p);
        }
    }
    const std::vector<Point3> dead_zone = component_nearest(candidates, mount);
    if (!affinely_degenerate(dead_zone)) {
        shell.inner = minimum_volume_ellipsoid(dead_zone, cfg.mvee_tolerance);
    } else {
        const double r = 0.01;
        const Point3 c = shell.outer.distance(mount) < 1.0 ? mount : shell.outer.center;
        shell.inner = Ellipsoid{c, Eigen::Matrix3d::Identity() / (r * r)};
    }
    return shell;
}

void write_shell(std::ostream& out, const DualEllipsoidShell& shell) {
    out << "anchor-shell v1\n";
    for (const Ellipsoid* e : {&shell.outer, &shell.inner}) {
        out << format_double(e->center.x) << '\n'
            << format_double(e->center.y) << '\n'
            << format_double(e->center.z) << '\n';
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                out << format_double(e->shape(r, c)) << '\n';
            }
        }
    }
}

DualEllipsoidShell read_shell(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "anchor-shell v1") {
        throw std::runtime_error("shell file: missing 'anchor-shell v1' header");
    }
    std::array<double, 24> values{};
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::getline(in, line)) {
            throw std::runtime_error("shell file: expected 24 values, got " + std::to_string(i));
        }
        std::size_t used = 0;
        try {
            values[i] = std::stod(line, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || line.find_first_not_of(" \t\r", used) != std::string::npos) {
            throw std::runtime_error("shell file: bad number on line " + std::to_string(i + 2));
        }
    }
    DualEllipsoidShell shell;
    std::size_t k = 0;
    for (Ellipsoid* e : {&shell.outer, &shell.inner}) {
        e->center = {values[k], values[k + 1], values[k + 2]};
        k += 3;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                e->shape(r, c) = values[k++];
            }
        }
        if (!e->valid()) {
            throw std::runtime_error("shell file: shape matrix is not symmetric positive definite");
        }
    }
    return shell;
}

void save_shell(const std::string& path, const DualEllipsoidShell& shell) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write shell file: " + path);
    }
    write_shell(out, shell);
}

DualEllipsoidShell load_shell(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open shell file: " + path);
    }
    return read_shell(in);
}

const DualEllipsoidShell& default_shell() {
    static const DualEllipsoidShell shell = [] {
        const ArmModel arm;
        ShellFitConfig cfg;
        cfg.sample_grid_resolution = 0.07;
        cfg.ik_trials_per_pose = 12;
        return fit_shell(sample_workspace(arm, cfg, RngSeed{2026}), cfg, arm.mount_offset);
    }();
    return shell;
}

}  // namespace anchor
