#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "anchor/sim.hpp"

namespace anchor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kFindSteps = 120;
constexpr double kDisplacedGate = 0.15;
constexpr double kGraspGate = 0.10;
constexpr double kApproachTilt = kPi / 6.0;

PrimitiveOutcome fail(AnomalyKind k, std::string detail) {
    PrimitiveOutcome o;
    o.anomaly = k;
    o.detail = std::move(detail);
    return o;
}

PrimitiveOutcome ok(std::string detail = {}) {
    PrimitiveOutcome o;
    o.success = true;
    o.detail = std::move(detail);
    return o;
}

bool seen_now(const World& w, const std::string& id) {
    const ObjectAnchor* a = w.anchors().find(id);
    return a && a->last_observed_cycle == w.tick();
}

// Perceives up to `ticks` times, stopping once the anchor is stable.
bool settle(World& w, const std::string& id, int ticks = 3) {
    bool any = false;
    for (int i = 0; i < ticks; ++i) {
        w.perceive();
        any = any || seen_now(w, id);
        const ObjectAnchor* a = w.anchors().find(id);
        if (a && a->stable_segmented) {
            return true;
        }
    }
    return any;
}

// Moves to the reachable free cell whose distance to `p` is closest to the
// standoff, facing `p`.
bool approach(World& w, const Point3& p, bool& slipped) {
    slipped = false;
    const SimConfig& cfg = w.config();
    const std::vector<double> cost = w.cost_map(w.cell_of(w.robot().x(), w.robot().y()));
    int best = -1;
    double best_key = kInf;
    for (int idx = 0; idx < w.width() * w.height(); ++idx) {
        if (cost[static_cast<std::size_t>(idx)] == kInf) {
            continue;
        }
        const Point3 c = w.cell_center(idx);
        const double d = planar_distance(c, p);
        if (d < 0.45 || d > 0.95 * cfg.predicates.eps_near || !w.pose_clear(c.x, c.y)) {
            continue;
        }
        const double key = std::abs(d - cfg.standoff) + 1e-3 * cost[static_cast<std::size_t>(idx)];
        if (key < best_key) {
            best_key = key;
            best = idx;
        }
    }
    if (best < 0) {
        return false;
    }
    const Point3 c = w.cell_center(best);
    return w.navigate(BasePose(c.x, c.y, std::atan2(p.y - c.y, p.x - c.x)), slipped);
}

bool in_view_cone(const World& w, const Point3& p) {
    const double dx = p.x - w.robot().x();
    const double dy = p.y - w.robot().y();
    return std::abs(normalize_angle(std::atan2(dy, dx) - w.robot().theta())) <=
           w.scenario().sensor.fov_halfangle;
}

// Three perception ticks at headings 120 degrees apart; stops when the target shows.
bool look_around(World& w, const std::string& target, double first_heading) {
    for (int k = 0; k < 3; ++k) {
        w.face({w.robot().x() + std::cos(first_heading + k * 2.0 * kPi / 3.0),
                w.robot().y() + std::sin(first_heading + k * 2.0 * kPi / 3.0), 0.0});
        w.perceive();
        if (seen_now(w, target)) {
            return true;
        }
    }
    return false;
}

Point3 region_center(const Region& r) { return {0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1), 0.0}; }

}  // namespace

PrimitiveOutcome primitive_obj_find(World& w, const std::string& target) {
    const SimConfig& cfg = w.config();
    std::set<int> visited;
    bool swept = false;
    int stale_misses = 0;
    int unstable_looks = 0;
    PrimitiveOutcome out;
    bool slipped = false;
    auto slip_out = [&]() {
        PrimitiveOutcome s = fail(AnomalyKind::GripperSlip, "object slipped during navigation");
        return s;
    };

    for (int step = 0; step < kFindSteps; ++step) {
        w.perceive();
        const ObjectAnchor* a = w.anchors().find(target);
        if (a && a->last_observed_cycle) {
            const Point3 p = a->expected_position;
            const double d = planar_distance({w.robot().x(), w.robot().y(), 0}, p);
            if (seen_now(w, target)) {
                stale_misses = 0;
                if (a->stable_segmented && d <= cfg.predicates.eps_near) {
                    return ok("found at " + format_double(p.x) + " " + format_double(p.y));
                }
                if (d > cfg.predicates.eps_near) {
                    if (!approach(w, p, slipped)) {
                        return fail(AnomalyKind::SceneChanged, "no free standoff near target");
                    }
                    if (slipped) {
                        return slip_out();
                    }
                } else {
                    w.face(p);
                    if (++unstable_looks > 10) {
                        return fail(AnomalyKind::TargetOccluded, "target anchor never stabilized");
                    }
                }
                continue;
            }
            // Stale anchor: go and look where it was.
            if (d <= cfg.predicates.eps_near && in_view_cone(w, p)) {
                if (++stale_misses >= 2) {
                    w.anchors().objects.erase(target);
                }
                continue;
            }
            if (d > cfg.predicates.eps_near) {
                if (!approach(w, p, slipped)) {
                    w.anchors().objects.erase(target);
                } else if (slipped) {
                    return slip_out();
                }
            } else {
                w.face(p);
            }
            continue;
        }

        // Frontier step.
        const std::map<std::string, double> belief = w.region_belief(target);
        double total = 0;
        for (const auto& [id, b] : belief) {
            total += b;
        }
        const int here = w.cell_of(w.robot().x(), w.robot().y());
        const std::vector<double> cost = w.cost_map(here);
        int best = -1;
        double best_score = -kInf;
        const Region* best_region = nullptr;
        if (total > 0) {
            for (int idx = 0; idx < w.width() * w.height(); ++idx) {
                if (cost[static_cast<std::size_t>(idx)] == kInf || visited.count(idx)) {
                    continue;
                }
                const int cx = idx % w.width();
                const int cy = idx / w.width();
                bool frontier = false;
                double b = 0.0;
                const Region* reg = nullptr;
                auto consider = [&](const Point3& c) {
                    for (const Region& r : w.scenario().regions) {
                        if (r.contains(c.x, c.y) && belief.at(r.id) > b) {
                            b = belief.at(r.id);
                            reg = &r;
                        }
                    }
                };
                consider(w.cell_center(idx));
                static constexpr int dx[4] = {1, -1, 0, 0};
                static constexpr int dy[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    if (w.in_bounds(cx + dx[k], cy + dy[k])) {
                        const int n = (cy + dy[k]) * w.width() + cx + dx[k];
                        if (!w.known(n)) {
                            frontier = true;
                            consider(w.cell_center(n));
                        }
                    }
                }
                if (!frontier) {
                    continue;
                }
                const double score = b - cfg.lambda_travel * cost[static_cast<std::size_t>(idx)];
                if (score > best_score) {
                    best_score = score;
                    best = idx;
                    best_region = reg;
                }
            }
        }
        if (best >= 0) {
            const Point3 c = w.cell_center(best);
            for (int idx = 0; idx < w.width() * w.height(); ++idx) {
                if (planar_distance(w.cell_center(idx), c) <= 0.3) {
                    visited.insert(idx);
                }
            }
            if (!w.pose_clear(c.x, c.y)) {
                continue;
            }
            const Point3 look = best_region ? region_center(*best_region) : c;
            const double heading = planar_distance(look, c) > 1e-6 ? std::atan2(look.y - c.y, look.x - c.x)
                                                                     : w.robot().theta();
            if (!w.navigate(BasePose(c.x, c.y, heading), slipped)) {
                continue;
            }
            if (slipped) {
                return slip_out();
            }
            look_around(w, target, heading);
            continue;
        }
        if (swept) {
            return fail(AnomalyKind::TargetMissing, "all regions explored without detection");
        }
        // Confirmation sweep over region viewpoints before giving up.
        swept = true;
        for (const Region& r : w.scenario().regions) {
            if (r.prior <= 0) {
                continue;
            }
            const Point3 rc = region_center(r);
            const std::vector<double> cm = w.cost_map(w.cell_of(w.robot().x(), w.robot().y()));
            int vp = -1;
            double vd = kInf;
            for (int idx = 0; idx < w.width() * w.height(); ++idx) {
                const Point3 c = w.cell_center(idx);
                if (cm[static_cast<std::size_t>(idx)] == kInf || !w.pose_clear(c.x, c.y)) {
                    continue;
                }
                const double d = planar_distance(c, rc);
                if (d < vd) {
                    vd = d;
                    vp = idx;
                }
            }
            if (vp < 0) {
                continue;
            }
            const Point3 c = w.cell_center(vp);
            const double heading = vd > 1e-6 ? std::atan2(rc.y - c.y, rc.x - c.x) : 0.0;
            if (!w.navigate(BasePose(c.x, c.y, heading), slipped)) {
                continue;
            }
            if (slipped) {
                return slip_out();
            }
            if (look_around(w, target, heading)) {
                break;
            }
        }
    }
    return fail(AnomalyKind::TargetMissing, "search budget exhausted");
}

PrimitiveOutcome primitive_align(World& w, const std::string& target) {
    const SimConfig& cfg = w.config();
    const ObjectAnchor* a = w.anchors().find(target);
    if (!a || !a->last_observed_cycle) {
        return fail(AnomalyKind::SceneChanged, "no anchor for target");
    }
    const Point3 before = a->expected_position;
    bool slipped = false;

    if (cfg.refine_alignment) {
        const double az = std::atan2(before.y - w.robot().y(), before.x - w.robot().x());
        const EEPose ee = EEPose::downward_tilt(before, az, kApproachTilt);
        const PointCloud cloud{w.local_cloud(before, 1.6), Frame::World};
        const std::vector<double> reach = w.cost_map(w.cell_of(w.robot().x(), w.robot().y()));
        const double m = cfg.shell_margin;
        const DualEllipsoidShell& shell = w.shell();
        const SensorModel& sensor = w.scenario().sensor;
        const PoseAdmissible admissible = [&](const BasePose& p) {
            const int idx = w.cell_of(p.x(), p.y());
            if (idx < 0 || reach[static_cast<std::size_t>(idx)] == kInf || !w.pose_clear(p.x(), p.y())) {
                return false;
            }
            const Point3 q = to_base_frame(p, before);
            // The camera has to confirm the result, so keep the target in view.
            const bool in_view = q.planar_norm() <= sensor.near_field ||
                                 std::abs(std::atan2(q.y, q.x)) <= 0.8 * sensor.fov_halfangle;
            return in_view && shell.d_out(q) <= 1.0 - m && shell.d_in(q) >= 1.0 + m;
        };
        const ChassisModel chassis{0.0, 0.0, cfg.alignment.chassis_radius};
        const AlignmentResult r =
            refine_base_pose(ee, shell, cloud, chassis, cfg.alignment, cfg.pso, w.next_pso_seed(), admissible);
        if (!r.feasible) {
            return fail(AnomalyKind::SceneChanged, "no feasible base pose");
        }
        if (!w.navigate(r.pose, slipped)) {
            return fail(AnomalyKind::SceneChanged, "refined pose unreachable");
        }
    } else {
        w.face(before);
    }
    if (slipped) {
        return fail(AnomalyKind::GripperSlip, "object slipped during navigation");
    }
    if (!settle(w, target)) {
        return fail(AnomalyKind::TargetOccluded, "target not visible after alignment");
    }
    const ObjectAnchor* after = w.anchors().find(target);
    if ((after->expected_position - before).norm() > kDisplacedGate) {
        return fail(AnomalyKind::TargetDisplaced, "target moved since it was anchored");
    }
    if (!w.state().count(Atom{Pred::Aligned, target, {}})) {
        return fail(AnomalyKind::SceneChanged, "aligned not confirmed");
    }
    return ok();
}

PrimitiveOutcome primitive_grasp(World& w, const std::string& target) {
    const SimConfig& cfg = w.config();
    const OutcomeModel& om = w.scenario().outcomes;
    const ObjectAnchor* a = w.anchors().find(target);
    const SimObject* o = w.object(target);
    if (w.held()) {
        return fail(AnomalyKind::EmptyGrasp, "gripper already holds an object");
    }
    if (!a || !o || !o->present || planar_distance(a->expected_position, o->true_pose) > kGraspGate) {
        w.perceive();
        return fail(AnomalyKind::EmptyGrasp, "nothing at the anchored position");
    }
    const bool physical = w.physically_aligned(target);
    const bool symbolic = w.state().count(Atom{Pred::Aligned, target, {}}) > 0;

    // Two frames of synthetic candidates on the object top; achievable
    // approach tilt depends on whether the object sits in the shell.
    Rng& rng = w.rng();
    std::vector<GraspCandidate> prev, cur;
    const double tilt_lo = physical ? 0.0 : 20.0 * kPi / 180.0;
    const double tilt_hi = physical ? 20.0 * kPi / 180.0 : 60.0 * kPi / 180.0;
    for (int i = 0; i < 6; ++i) {
        const Point3 pos = o->true_pose + Point3{rng.uniform(-0.02, 0.02), rng.uniform(-0.02, 0.02), 0.5 * o->sz};
        const double tilt = rng.uniform(tilt_lo, tilt_hi);
        const double az = rng.uniform(-kPi, kPi);
        const double conf = rng.uniform(0.6, 1.0);
        const EEPose g = EEPose::downward_tilt(pos, az, kPi / 2.0 - tilt);
        prev.push_back({g, conf, 0});
        const Point3 jitter{rng.normal(0, 0.004), rng.normal(0, 0.004), rng.normal(0, 0.004)};
        cur.push_back({EEPose(pos + jitter, g.approach_dir(), g.roll()), std::min(1.0, conf + rng.uniform(-0.05, 0.05)), 1});
    }
    const std::vector<ScoredPair> ranked = match_and_score(cur, prev, cfg.grasp);
    const bool tilt_ok = !ranked.empty() && tilt_penalty(cur[ranked.front().current], cfg.grasp) >= 0.5;
    const double p = (symbolic && physical && tilt_ok) ? om.p_g : om.p_g_misaligned;
    if (rng.bernoulli(p)) {
        w.set_gripper_holding(target);
        w.perceive();
        return ok();
    }
    if (!physical && rng.bernoulli(om.p_knock)) {
        w.knock_out(target);
        w.perceive();
        return fail(AnomalyKind::EmptyGrasp, "grasp missed and knocked the target out of reach");
    }
    w.perceive();
    return fail(AnomalyKind::EmptyGrasp, ranked.empty() ? "no temporally consistent grasp" : "grasp closed empty");
}

PrimitiveOutcome primitive_place(World& w, const std::string& obj, const std::string& container) {
    const OutcomeModel& om = w.scenario().outcomes;
    if (!w.held() || *w.held() != obj) {
        return fail(AnomalyKind::PlacementMiss, "object not in gripper");
    }
    const ObjectAnchor* c = w.anchors().find(container);
    if (!c || c->cloud.empty()) {
        return fail(AnomalyKind::SceneChanged, "no anchor for container");
    }
    const double cx = 0.5 * (c->footprint_xy.x_min + c->footprint_xy.x_max);
    const double cy = 0.5 * (c->footprint_xy.y_min + c->footprint_xy.y_max);
    double top = -kInf;
    for (const Point3& p : c->cloud.points) {
        top = std::max(top, p.z);
    }
    const double sigma = w.physically_aligned(container) ? om.place_sigma_aligned : om.place_sigma_misaligned;
    Rng& rng = w.rng();
    const Point3 drop{cx + rng.normal(0, sigma), cy + rng.normal(0, sigma), top + om.place_clearance};
    w.drop_held_at(drop);
    settle(w, obj);
    if (!w.state().count(Atom{Pred::In, obj, container})) {
        return fail(AnomalyKind::PlacementMiss, "object landed outside the container");
    }
    return ok();
}

PrimitiveOutcome dispatch(World& w, const Action& a) {
    switch (a.name) {
    case ActionName::ObjFind:
        return primitive_obj_find(w, a.args.at(0));
    case ActionName::Align:
        return primitive_align(w, a.args.at(0));
    case ActionName::Grasp:
        return primitive_grasp(w, a.args.at(0));
    case ActionName::Place:
        return primitive_place(w, a.args.at(0), a.args.at(1));
    }
    return fail(AnomalyKind::SceneChanged, "unknown action");
}

}  // namespace anchor
