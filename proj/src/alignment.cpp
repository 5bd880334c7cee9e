#include "anchor/alignment.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <stdexcept>

namespace anchor {

void AlignmentObjectiveConfig::validate() const {
    if (w_a < 0 || w_s < 0 || w_c < 0) {
        throw std::invalid_argument("alignment weights must be non-negative");
    }
    if (!(alpha > 0) || !(chassis_radius > 0) || !(chassis_margin >= 0) || !(softplus_beta > 0)) {
        throw std::invalid_argument("alignment: alpha, r_b and beta must be positive, delta non-negative");
    }
}

void PsoConfig::validate() const {
    for (const PsoStage* s : {&coarse, &fine}) {
        if (s->particles < 4 || s->iterations < 1 || !(s->inertia > 0 && s->inertia < 1)) {
            throw std::invalid_argument("pso: need particles >= 4, iterations >= 1, 0 < inertia < 1");
        }
    }
    if (!(r_min >= 0 && r_min < r_max)) {
        throw std::invalid_argument("pso: search annulus is degenerate");
    }
    if (!(fine_stage_shrink > 0 && fine_stage_shrink <= 1)) {
        throw std::invalid_argument("pso: fine_stage_shrink must be in (0, 1]");
    }
}

double logistic(double u) {
    if (u >= 0) {
        return 1.0 / (1.0 + std::exp(-u));
    }
    const double e = std::exp(u);
    return e / (1.0 + e);
}

double softplus(double u, double beta) {
    const double bu = beta * u;
    // ln(1 + e^x) = max(x, 0) + ln(1 + e^-|x|)
    return (std::max(bu, 0.0) + std::log1p(std::exp(-std::abs(bu)))) / beta;
}

double j_align(const BasePose& base, const EEPose& ee_target) {
    const Point3& d = ee_target.approach_dir();
    const double n = d.planar_norm();
    if (n < 1e-9) {
        return 0.0;
    }
    const double c = std::cos(base.theta()) * d.x / n + std::sin(base.theta()) * d.y / n;
    return std::clamp(1.0 - c, 0.0, 2.0);
}

namespace {

Point3 in_base(const BasePose& base, const PointCloud& cloud, const Point3& p) {
    return cloud.frame == Frame::World ? to_base_frame(base, p) : p;
}

}  // namespace

double j_shell(const BasePose& base, const DualEllipsoidShell& shell, const PointCloud& cloud,
               const AlignmentObjectiveConfig& cfg) {
    if (cloud.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const Point3& w : cloud.points) {
        const Point3 p = in_base(base, cloud, w);
        sum += logistic(cfg.alpha * (1.0 - shell.d_out(p))) * logistic(cfg.alpha * (shell.d_in(p) - 1.0));
    }
    return sum / static_cast<double>(cloud.size());
}

double j_chassis(const BasePose& base, const ChassisModel& chassis, const PointCloud& cloud,
                 const AlignmentObjectiveConfig& cfg) {
    if (cloud.empty()) {
        return 0.0;
    }
    const double reach = chassis.radius + cfg.chassis_margin;
    double sum = 0.0;
    for (const Point3& w : cloud.points) {
        const Point3 p = in_base(base, cloud, w);
        sum += softplus(reach - std::hypot(p.x - chassis.cx, p.y - chassis.cy), cfg.softplus_beta);
    }
    return sum / static_cast<double>(cloud.size());
}

bool target_in_shell(const BasePose& base, const EEPose& ee_target, const DualEllipsoidShell& shell) {
    return shell.contains(to_base_frame(base, ee_target.position()));
}

AlignmentTerms objective(const BasePose& base, const EEPose& ee_target, const DualEllipsoidShell& shell,
                         const PointCloud& cloud, const ChassisModel& chassis, const AlignmentObjectiveConfig& cfg) {
    AlignmentTerms t;
    t.j_align = j_align(base, ee_target);
    t.j_shell = j_shell(base, shell, cloud, cfg);
    t.j_chassis = j_chassis(base, chassis, cloud, cfg);
    t.objective = cfg.w_a * t.j_align + cfg.w_s * t.j_shell + cfg.w_c * t.j_chassis;
    t.feasible = target_in_shell(base, ee_target, shell);
    return t;
}

namespace {

struct Particle {
    std::array<double, 3> x{};
    std::array<double, 3> v{};
    std::array<double, 3> best{};
    double best_value = 0.0;
};

// Search region: annulus around (tx, ty) intersected with a box around a
// center, and a heading window. The coarse stage uses an unbounded box.
struct Region {
    double tx = 0.0, ty = 0.0, r_min = 0.0, r_max = 1.0;
    double cx = 0.0, cy = 0.0, half_xy = 1e9;
    double c_theta = 0.0, half_theta = kPi;

    void project(std::array<double, 3>& x) const {
        x[0] = std::clamp(x[0], cx - half_xy, cx + half_xy);
        x[1] = std::clamp(x[1], cy - half_xy, cy + half_xy);
        double dx = x[0] - tx;
        double dy = x[1] - ty;
        double r = std::hypot(dx, dy);
        if (r < 1e-12) {
            dx = 1.0;
            dy = 0.0;
            r = 1.0;
            x[0] = tx + r_min;
            x[1] = ty;
        }
        if (r < r_min || r > r_max) {
            const double rr = std::clamp(r, r_min, r_max);
            x[0] = tx + dx / r * rr;
            x[1] = ty + dy / r * rr;
        }
        if (half_theta < kPi) {
            const double d = std::clamp(normalize_angle(x[2] - c_theta), -half_theta, half_theta);
            x[2] = c_theta + d;
        }
        x[2] = normalize_angle(x[2]);
    }

    std::array<double, 3> sample(Rng& rng) const {
        std::array<double, 3> x{};
        const double a = rng.uniform(-kPi, kPi);
        const double r = std::sqrt(rng.uniform(r_min * r_min, r_max * r_max));
        if (half_xy >= 1e8) {
            x[0] = tx + r * std::cos(a);
            x[1] = ty + r * std::sin(a);
        } else {
            x[0] = cx + rng.uniform(-half_xy, half_xy);
            x[1] = cy + rng.uniform(-half_xy, half_xy);
        }
        x[2] = c_theta + rng.uniform(-half_theta, half_theta);
        project(x);
        return x;
    }

    std::array<double, 3> vmax() const {
        const double span = std::min(2.0 * half_xy, 2.0 * r_max);
        return {0.5 * span, 0.5 * span, half_theta};
    }
};

}  // namespace

AlignmentResult refine_base_pose(const EEPose& ee_target, const DualEllipsoidShell& shell, const PointCloud& cloud,
                                 const ChassisModel& chassis, const AlignmentObjectiveConfig& cfg,
                                 const PsoConfig& pso, RngSeed seed, const PoseAdmissible& admissible) {
    cfg.validate();
    pso.validate();

    auto penalized = [&](const std::array<double, 3>& x) {
        const BasePose pose(x[0], x[1], x[2]);
        const AlignmentTerms t = objective(pose, ee_target, shell, cloud, chassis, cfg);
        const bool ok = t.feasible && (!admissible || admissible(pose));
        return t.objective + (ok ? 0.0 : kInfeasiblePenalty);
    };

    AlignmentResult result;
    std::array<double, 3> gbest{};
    double gbest_value = std::numeric_limits<double>::infinity();
    Rng rng(seed);

    auto run_stage = [&](const PsoStage& stage, const Region& region, bool keep_best) {
        std::vector<Particle> swarm(static_cast<std::size_t>(stage.particles));
        const std::array<double, 3> vmax = region.vmax();
        for (std::size_t i = 0; i < swarm.size(); ++i) {
            Particle& p = swarm[i];
            p.x = (keep_best && i == 0) ? gbest : region.sample(rng);
            // Odd particles of the coarse stage start facing the target.
            if (!keep_best && i % 2 == 1) {
                p.x[2] = normalize_angle(std::atan2(region.ty - p.x[1], region.tx - p.x[0]) + rng.uniform(-0.3, 0.3));
            }
            for (int d = 0; d < 3; ++d) {
                p.v[d] = rng.uniform(-0.1, 0.1) * vmax[d];
            }
            p.best = p.x;
            p.best_value = penalized(p.x);
            if (p.best_value < gbest_value) {
                gbest_value = p.best_value;
                gbest = p.x;
            }
        }
        // The coarse stage pulls each particle toward the best of its ring
        // neighbours rather than the swarm best, so separate basins survive
        // long enough to be compared. The fine stage uses the swarm best.
        const std::size_t n = swarm.size();
        std::vector<std::array<double, 3>> attractor(n);
        for (int it = 0; it < stage.iterations; ++it) {
            for (std::size_t i = 0; i < n; ++i) {
                if (keep_best) {
                    attractor[i] = gbest;
                    continue;
                }
                std::size_t b = i;
                for (std::size_t j : {(i + n - 1) % n, (i + 1) % n}) {
                    if (swarm[j].best_value < swarm[b].best_value ||
                        (swarm[j].best_value == swarm[b].best_value && j < b)) {
                        b = j;
                    }
                }
                attractor[i] = swarm[b].best;
            }
            for (std::size_t i = 0; i < n; ++i) {
                Particle& p = swarm[i];
                for (int d = 0; d < 3; ++d) {
                    double to_best = p.best[d] - p.x[d];
                    double to_global = attractor[i][d] - p.x[d];
                    if (d == 2) {
                        to_best = normalize_angle(to_best);
                        to_global = normalize_angle(to_global);
                    }
                    p.v[d] = stage.inertia * p.v[d] + stage.cognitive * rng.uniform() * to_best +
                             stage.social * rng.uniform() * to_global;
                    p.v[d] = std::clamp(p.v[d], -vmax[d], vmax[d]);
                    p.x[d] += p.v[d];
                }
                region.project(p.x);
            }
            // Evaluate, then reduce: lowest value, ties to lowest index.
            for (Particle& p : swarm) {
                const double v = penalized(p.x);
                if (v < p.best_value) {
                    p.best_value = v;
                    p.best = p.x;
                }
            }
            for (const Particle& p : swarm) {
                if (p.best_value < gbest_value) {
                    gbest_value = p.best_value;
                    gbest = p.best;
                }
            }
            result.best_history.push_back(gbest_value);
        }
    };

    Region coarse;
    coarse.tx = ee_target.position().x;
    coarse.ty = ee_target.position().y;
    coarse.r_min = pso.r_min;
    coarse.r_max = pso.r_max;
    run_stage(pso.coarse, coarse, false);

    Region fine = coarse;
    fine.cx = gbest[0];
    fine.cy = gbest[1];
    fine.half_xy = pso.fine_stage_shrink * (pso.r_max - pso.r_min);
    fine.c_theta = gbest[2];
    fine.half_theta = pso.fine_stage_shrink * kPi;
    run_stage(pso.fine, fine, true);

    result.pose = BasePose(gbest[0], gbest[1], gbest[2]);
    result.terms = objective(result.pose, ee_target, shell, cloud, chassis, cfg);
    result.objective = result.terms.objective;
    result.feasible = gbest_value < result.objective + 0.5 * kInfeasiblePenalty;
    return result;
}

}  // namespace anchor
