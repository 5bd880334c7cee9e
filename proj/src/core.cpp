#include "anchor/core.hpp"

#include <charconv>
#include <stdexcept>

namespace anchor {

double normalize_angle(double a) {
    if (!std::isfinite(a)) {
        throw std::domain_error("normalize_angle: non-finite angle");
    }
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) {
        r += 2.0 * kPi;
    }
    if (r > kPi) {
        r -= 2.0 * kPi;
    }
    return r;
}

double dot(const Point3& a, const Point3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

Point3 cross(const Point3& a, const Point3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

double planar_distance(const Point3& a, const Point3& b) { return std::hypot(a.x - b.x, a.y - b.y); }

BasePose::BasePose(double x, double y, double theta) : x_(x), y_(y), theta_(normalize_angle(theta)) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
        throw std::domain_error("BasePose: non-finite position");
    }
}

BasePose BasePose::compose(const BasePose& other) const {
    const double c = std::cos(theta_);
    const double s = std::sin(theta_);
    return {x_ + c * other.x_ - s * other.y_, y_ + s * other.x_ + c * other.y_, theta_ + other.theta_};
}

BasePose BasePose::inverse() const {
    const double c = std::cos(theta_);
    const double s = std::sin(theta_);
    return {-(c * x_ + s * y_), s * x_ - c * y_, -theta_};
}

EEPose::EEPose(const Point3& position, const Point3& approach_dir, double roll)
    : position_(position), roll_(roll) {
    const double n = approach_dir.norm();
    if (!position.finite() || !approach_dir.finite() || n < 1e-12 || !std::isfinite(roll)) {
        throw std::domain_error("EEPose: invalid position or approach direction");
    }
    approach_ = (1.0 / n) * approach_dir;
}

EEPose EEPose::downward_tilt(const Point3& position, double azimuth, double tilt) {
    const double c = std::cos(tilt);
    return EEPose(position, {c * std::cos(azimuth), c * std::sin(azimuth), -std::sin(tilt)});
}

Point3 se2_transform(const BasePose& pose, const Point3& p) {
    const double c = std::cos(pose.theta());
    const double s = std::sin(pose.theta());
    return {pose.x() + c * p.x - s * p.y, pose.y() + s * p.x + c * p.y, p.z};
}

Point3 to_base_frame(const BasePose& pose, const Point3& p) {
    const double c = std::cos(pose.theta());
    const double s = std::sin(pose.theta());
    const double dx = p.x - pose.x();
    const double dy = p.y - pose.y();
    return {c * dx + s * dy, -s * dx + c * dy, p.z};
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30u)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27u)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31u);
}

}  // namespace

RngSeed derive_seed(RngSeed parent, std::uint64_t stream) {
    std::uint64_t s = parent.value ^ (0xd1b54a32d192ed03ull * (stream + 1));
    splitmix64(s);
    return {splitmix64(s)};
}

Rng::Rng(RngSeed seed) {
    std::uint64_t s = seed.value;
    engine_.seed(splitmix64(s));
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal(double mean, double sigma) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + sigma * spare_;
    }
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return mean + sigma * r * std::cos(2.0 * kPi * u2);
}

bool Rng::bernoulli(double p) { return uniform() < p; }

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) {
        return 0;
    }
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

std::string format_double(double v) {
    // Shortest text that reads back to the same double.
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

}  // namespace anchor
