#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace anchor {

constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi]. Throws std::domain_error on non-finite input.
double normalize_angle(double a);

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Point3 operator+(const Point3& a, const Point3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Point3 operator-(const Point3& a, const Point3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Point3 operator*(double s, const Point3& p) { return {s * p.x, s * p.y, s * p.z}; }
    friend bool operator==(const Point3&, const Point3&) = default;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double planar_norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

double dot(const Point3& a, const Point3& b);
Point3 cross(const Point3& a, const Point3& b);
double planar_distance(const Point3& a, const Point3& b);

/// Planar robot base pose. The heading is kept in (-pi, pi].
class BasePose {
public:
    BasePose() = default;
    BasePose(double x, double y, double theta);

    double x() const { return x_; }
    double y() const { return y_; }
    double theta() const { return theta_; }

    /// this * other (apply other in this frame).
    BasePose compose(const BasePose& other) const;
    BasePose inverse() const;

    friend bool operator==(const BasePose&, const BasePose&) = default;

private:
    double x_ = 0.0;
    double y_ = 0.0;
    double theta_ = 0.0;
};

enum class Frame { World, Base };

struct PointCloud {
    std::vector<Point3> points;
    Frame frame = Frame::World;

    bool empty() const { return points.empty(); }
    std::size_t size() const { return points.size(); }
};

/// End-effector target: position, unit approach direction and roll about it.
class EEPose {
public:
    EEPose() = default;
    /// Normalizes approach_dir; throws std::domain_error if it is zero or non-finite.
    EEPose(const Point3& position, const Point3& approach_dir, double roll = 0.0);

    /// Approach tilted `tilt` radians below horizontal, pointing along heading `azimuth`.
    static EEPose downward_tilt(const Point3& position, double azimuth, double tilt);

    const Point3& position() const { return position_; }
    const Point3& approach_dir() const { return approach_; }
    double roll() const { return roll_; }

private:
    Point3 position_;
    Point3 approach_{1.0, 0.0, 0.0};
    double roll_ = 0.0;
};

/// Applies the planar rigid motion of `pose` to a point; z is unchanged.
Point3 se2_transform(const BasePose& pose, const Point3& p_local);

/// Expresses a world-frame point in the frame of `pose`.
Point3 to_base_frame(const BasePose& pose, const Point3& p_world);

struct RngSeed {
    std::uint64_t value = 0;

    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// Derives an independent child seed for a numbered sub-stream.
RngSeed derive_seed(RngSeed parent, std::uint64_t stream);

/// Deterministic generator over std::mt19937_64. The uniform and normal
/// transforms are written out here rather than taken from <random>
/// distributions, whose output is implementation-defined.
class Rng {
public:
    explicit Rng(RngSeed seed);

    std::uint64_t next_u64();
    /// Uniform in [0, 1).
    double uniform();
    double uniform(double lo, double hi);
    double normal(double mean, double sigma);
    bool bernoulli(double p);
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Shortest-round-trip decimal text for a double ("%.17g").
std::string format_double(double v);

}  // namespace anchor
