#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <tuple>
#include <stdexcept>

#include "anchor/sim.hpp"

namespace anchor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
// Where the held object rides, in the base frame.
constexpr Point3 kCarryOffset{0.35, 0.0, 0.75};
constexpr double kHeldCurrent = 0.6;

double box_distance(double px, double py, double x0, double y0, double x1, double y1) {
    const double dx = std::max({x0 - px, 0.0, px - x1});
    const double dy = std::max({y0 - py, 0.0, py - y1});
    return std::hypot(dx, dy);
}

}  // namespace

World::World(const Scenario& scenario, const DualEllipsoidShell& shell, const SimConfig& cfg, RngSeed seed)
    : scenario_(scenario),
      shell_(shell),
      cfg_(cfg),
      known_(scenario.known),
      objects_(scenario.objects),
      robot_(scenario.robot),
      rng_(derive_seed(seed, 1)),
      seed_(seed),
      fired_(scenario.disturbances.size(), 0) {
    scenario_.sensor.validate();
    scenario_.outcomes.validate();
    cfg_.predicates.validate();
    const double r = cfg_.alignment.chassis_radius;
    const int reach = static_cast<int>(std::ceil(r / kCellSize)) + 2;
    clearance_.assign(static_cast<std::size_t>(width() * height()), kInf);
    for (int cy = 0; cy < height(); ++cy) {
        for (int cx = 0; cx < width(); ++cx) {
            const double px = (cx + 0.5) * kCellSize;
            const double py = (cy + 0.5) * kCellSize;
            double best = kInf;
            for (int oy = std::max(0, cy - reach); oy <= std::min(height() - 1, cy + reach); ++oy) {
                for (int ox = std::max(0, cx - reach); ox <= std::min(width() - 1, cx + reach); ++ox) {
                    if (scenario_.cell_height[static_cast<std::size_t>(oy * width() + ox)] > 0) {
                        best = std::min(best, box_distance(px, py, ox * kCellSize, oy * kCellSize,
                                                           (ox + 1) * kCellSize, (oy + 1) * kCellSize));
                    }
                }
            }
            clearance_[static_cast<std::size_t>(cy * width() + cx)] = best;
        }
    }
    if (!pose_clear(robot_.x(), robot_.y())) {
        throw std::runtime_error("scenario " + scenario_.name + ": robot start pose collides or is off-map");
    }
    anchors_.robot.chassis_pose = robot_;
}

int World::cell_of(double x, double y) const {
    const int cx = static_cast<int>(std::floor(x / kCellSize));
    const int cy = static_cast<int>(std::floor(y / kCellSize));
    return in_bounds(cx, cy) ? cy * width() + cx : -1;
}

Point3 World::cell_center(int idx) const {
    return {(idx % width() + 0.5) * kCellSize, (idx / width() + 0.5) * kCellSize, 0.0};
}

bool World::passable(int idx) const {
    return idx >= 0 && known(idx) && clearance_[static_cast<std::size_t>(idx)] > cfg_.alignment.chassis_radius;
}

bool World::pose_clear(double x, double y) const {
    const int idx = cell_of(x, y);
    if (idx < 0 || !known(idx)) {
        return false;
    }
    const double r = cfg_.alignment.chassis_radius;
    if (x < r || y < r || x > width() * kCellSize - r || y > height() * kCellSize - r) {
        return false;
    }
    const int cx = idx % width();
    const int cy = idx / width();
    const int reach = static_cast<int>(std::ceil(r / kCellSize)) + 1;
    for (int oy = std::max(0, cy - reach); oy <= std::min(height() - 1, cy + reach); ++oy) {
        for (int ox = std::max(0, cx - reach); ox <= std::min(width() - 1, cx + reach); ++ox) {
            if (scenario_.cell_height[static_cast<std::size_t>(oy * width() + ox)] > 0 &&
                box_distance(x, y, ox * kCellSize, oy * kCellSize, (ox + 1) * kCellSize, (oy + 1) * kCellSize) < r) {
                return false;
            }
        }
    }
    return true;
}

std::vector<double> World::cost_map(int from) const {
    std::vector<double> dist(static_cast<std::size_t>(width() * height()), kInf);
    if (from < 0) {
        return dist;
    }
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    dist[static_cast<std::size_t>(from)] = 0;
    open.push({0, from});
    while (!open.empty()) {
        const auto [d, i] = open.top();
        open.pop();
        if (d > dist[static_cast<std::size_t>(i)]) {
            continue;
        }
        const int cx = i % width();
        const int cy = i / width();
        for (int k = 0; k < 8; ++k) {
            const int nx = cx + kDx[k];
            const int ny = cy + kDy[k];
            if (!in_bounds(nx, ny)) {
                continue;
            }
            const int j = ny * width() + nx;
            if (!passable(j)) {
                continue;
            }
            if (k >= 4 && (!passable(cy * width() + nx) || !passable(ny * width() + cx))) {
                continue;
            }
            const double nd = d + (k < 4 ? 1.0 : std::sqrt(2.0));
            if (nd < dist[static_cast<std::size_t>(j)]) {
                dist[static_cast<std::size_t>(j)] = nd;
                open.push({nd, j});
            }
        }
    }
    return dist;
}

std::optional<double> World::path_cost(int from, int to) const {
    if (from < 0 || to < 0) {
        return std::nullopt;
    }
    if (from == to) {
        return 0.0;
    }
    if (!passable(to)) {
        return std::nullopt;
    }
    const Point3 goal = cell_center(to);
    auto h = [&](int i) {
        const Point3 c = cell_center(i);
        const double dx = std::abs(c.x - goal.x) / kCellSize;
        const double dy = std::abs(c.y - goal.y) / kCellSize;
        return std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy);
    };
    std::vector<double> g(static_cast<std::size_t>(width() * height()), kInf);
    using Item = std::tuple<double, double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    g[static_cast<std::size_t>(from)] = 0;
    open.push({h(from), 0.0, from});
    while (!open.empty()) {
        const auto [f, gi, i] = open.top();
        open.pop();
        if (i == to) {
            return gi;
        }
        if (gi > g[static_cast<std::size_t>(i)]) {
            continue;
        }
        const int cx = i % width();
        const int cy = i / width();
        for (int k = 0; k < 8; ++k) {
            const int nx = cx + kDx[k];
            const int ny = cy + kDy[k];
            if (!in_bounds(nx, ny)) {
                continue;
            }
            const int j = ny * width() + nx;
            if (!passable(j) || (k >= 4 && (!passable(cy * width() + nx) || !passable(ny * width() + cx)))) {
                continue;
            }
            const double ng = gi + (k < 4 ? 1.0 : std::sqrt(2.0));
            if (ng < g[static_cast<std::size_t>(j)]) {
                g[static_cast<std::size_t>(j)] = ng;
                open.push({ng + h(j), ng, j});
            }
        }
    }
    return std::nullopt;
}

SimObject* World::object(const std::string& id) {
    for (SimObject& o : objects_) {
        if (o.id == id) {
            return &o;
        }
    }
    return nullptr;
}

const SimObject* World::object(const std::string& id) const {
    return const_cast<World*>(this)->object(id);
}

SymbolicState World::state() const { return derive_state(anchors_, cfg_.predicates, shell_); }

RngSeed World::next_pso_seed() { return derive_seed(seed_, 1000 + static_cast<std::uint64_t>(pso_calls_++)); }

bool World::in_fov(const Point3& p) const {
    const double dx = p.x - robot_.x();
    const double dy = p.y - robot_.y();
    const double d = std::hypot(dx, dy);
    if (d <= scenario_.sensor.near_field) {
        return true;
    }
    if (d > scenario_.sensor.fov_radius) {
        return false;
    }
    return std::abs(normalize_angle(std::atan2(dy, dx) - robot_.theta())) <= scenario_.sensor.fov_halfangle;
}

// 2.5D ray: blocked where a cell's height reaches the ray. The last 5 cm are
// skipped so the target's own support does not hide it.
bool World::visible(const Point3& from, const Point3& to) const {
    const Point3 d = to - from;
    const double len = d.planar_norm();
    const int steps = static_cast<int>(len / 0.05);
    const int end_cell = cell_of(to.x, to.y);
    for (int s = 1; s < steps; ++s) {
        const double t = s * 0.05 / len;
        if (len - s * 0.05 < 0.05) {
            break;
        }
        const Point3 p = from + t * d;
        const int idx = cell_of(p.x, p.y);
        if (idx < 0) {
            return false;
        }
        if (idx != end_cell && cell_height(idx) >= p.z) {
            return false;
        }
    }
    return true;
}

void World::perceive() {
    ++tick_;
    const SensorModel& sensor = scenario_.sensor;
    const Point3 eye{robot_.x(), robot_.y(), sensor.height};

    // Map: cells in the cone whose floor is not hidden behind sensor-height walls.
    const int r = static_cast<int>(std::ceil(sensor.fov_radius / kCellSize)) + 1;
    const int rc = cell_of(robot_.x(), robot_.y());
    const int rcx = rc % width();
    const int rcy = rc / width();
    for (int cy = std::max(0, rcy - r); cy <= std::min(height() - 1, rcy + r); ++cy) {
        for (int cx = std::max(0, rcx - r); cx <= std::min(width() - 1, rcx + r); ++cx) {
            const int idx = cy * width() + cx;
            if (known(idx)) {
                continue;
            }
            Point3 c = cell_center(idx);
            if (!in_fov(c)) {
                continue;
            }
            c.z = sensor.height * 0.999;
            if (visible(eye, c)) {
                known_[static_cast<std::size_t>(idx)] = 1;
            }
        }
    }

    std::set<std::string> seen;
    for (SimObject& o : objects_) {
        if (!o.present || (held_ && *held_ == o.id)) {
            continue;
        }
        if (o.occluded_ticks > 0) {
            --o.occluded_ticks;
            continue;
        }
        if (!in_fov(o.true_pose) || !visible(eye, o.true_pose)) {
            continue;
        }
        if (!rng_.bernoulli(sensor.p_detect)) {
            continue;
        }
        const Point3 noise{rng_.normal(0, sensor.position_noise_sigma), rng_.normal(0, sensor.position_noise_sigma),
                           rng_.normal(0, sensor.position_noise_sigma)};
        const Point3 m = o.true_pose + noise;
        PointCloud cloud;
        for (int i = -1; i <= 1; ++i) {
            for (int j = -1; j <= 1; ++j) {
                cloud.points.push_back({m.x + 0.5 * i * o.sx, m.y + 0.5 * j * o.sy, m.z + 0.5 * o.sz});
            }
        }
        ObjectAnchor& a = anchors_.objects[o.id];
        a.id = o.id;
        record_observation(a, m, cloud, tick_);
        seen.insert(o.id);
    }
    for (auto& [id, a] : anchors_.objects) {
        if (!seen.count(id)) {
            record_miss(a);
        }
    }
    RobotAnchor& ra = anchors_.robot;
    ra.chassis_pose = robot_;
    ra.gripper_closed = gripper_closed_;
    ra.gripper_current = held_ ? kHeldCurrent : 0.0;
    ra.gripper_roi_object_visible = held_.has_value();
    ra.roi_object_id = held_ ? *held_ : std::string{};
}

void World::face(const Point3& p) {
    const double dx = p.x - robot_.x();
    const double dy = p.y - robot_.y();
    if (std::hypot(dx, dy) > 1e-9) {
        robot_ = BasePose(robot_.x(), robot_.y(), std::atan2(dy, dx));
    }
    track_held();
}

void World::track_held() {
    if (held_) {
        if (SimObject* o = object(*held_)) {
            o->true_pose = se2_transform(robot_, kCarryOffset);
        }
    }
}

bool World::navigate(const BasePose& goal, bool& slipped) {
    slipped = false;
    const int from = cell_of(robot_.x(), robot_.y());
    const int to = cell_of(goal.x(), goal.y());
    if (!pose_clear(goal.x(), goal.y())) {
        return false;
    }
    if (from != to && !path_cost(from, to)) {
        return false;
    }
    robot_ = goal;
    track_held();
    if (held_ && (pending_slip_ || rng_.bernoulli(scenario_.outcomes.p_slip))) {
        pending_slip_ = false;
        drop_held_at({robot_.x(), robot_.y(), 0.0});
        slipped = true;
    }
    return true;
}

void World::set_gripper_holding(const std::string& id) {
    held_ = id;
    gripper_closed_ = true;
    track_held();
}

void World::release_gripper() {
    held_.reset();
    gripper_closed_ = false;
}

double World::support_height(double x, double y, const std::string& exclude) const {
    double h = 0.0;
    for (const SimObject& o : objects_) {
        if (o.present && o.container && o.id != exclude && !(held_ && *held_ == o.id) &&
            o.footprint().x_min <= x && x <= o.footprint().x_max && o.footprint().y_min <= y &&
            y <= o.footprint().y_max) {
            h = std::max(h, o.true_pose.z + 0.5 * o.sz);
        }
    }
    const int idx = cell_of(x, y);
    if (idx >= 0) {
        h = std::max(h, cell_height(idx));
    }
    return h;
}

void World::drop_held_at(const Point3& p) {
    if (!held_) {
        return;
    }
    SimObject* o = object(*held_);
    release_gripper();
    if (o) {
        o->true_pose = {p.x, p.y, support_height(p.x, p.y, o->id) + 0.5 * o->sz};
    }
}

void World::knock_out(const std::string& id) {
    if (SimObject* o = object(id)) {
        o->present = false;
    }
}

bool World::true_in(const std::string& obj, const std::string& container) const {
    const SimObject* o = object(obj);
    const SimObject* c = object(container);
    if (!o || !c || !o->present || !c->present || (held_ && *held_ == obj)) {
        return false;
    }
    return overlap_ratio(o->footprint(), c->footprint()) >= cfg_.predicates.eps_in;
}

bool World::physically_aligned(const std::string& id) const {
    const SimObject* o = object(id);
    return o && o->present && shell_.contains(to_base_frame(robot_, o->true_pose));
}

std::vector<std::string> World::fire(TriggerKind kind, int cycle_or_count, ActionName action) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < scenario_.disturbances.size(); ++i) {
        const Disturbance& d = scenario_.disturbances[i];
        if (fired_[i] || d.trigger != kind || d.count != cycle_or_count ||
            (kind != TriggerKind::Cycle && d.action != action)) {
            continue;
        }
        fired_[i] = 1;
        SimObject* o = d.object.empty() ? nullptr : object(d.object);
        switch (d.effect) {
        case EffectKind::Displace:
            if (o && o->present && !(held_ && *held_ == o->id)) {
                o->true_pose.x += d.dx;
                o->true_pose.y += d.dy;
                o->true_pose.z = support_height(o->true_pose.x, o->true_pose.y, o->id) + 0.5 * o->sz;
            }
            break;
        case EffectKind::Occlude:
            if (o) {
                o->occluded_ticks = d.duration;
            }
            break;
        case EffectKind::Remove:
            if (o) {
                if (held_ && *held_ == o->id) {
                    release_gripper();
                }
                o->present = false;
            }
            break;
        case EffectKind::Slip:
            pending_slip_ = true;
            break;
        }
        out.push_back(d.str());
    }
    return out;
}

int World::dispatch_count(ActionName a) const {
    auto it = dispatches_.find(a);
    return it == dispatches_.end() ? 0 : it->second;
}

void World::count_dispatch(ActionName a) { ++dispatches_[a]; }

bool World::region_fully_known(const Region& r) const {
    bool any = false;
    for (int idx = 0; idx < width() * height(); ++idx) {
        const Point3 c = cell_center(idx);
        if (r.contains(c.x, c.y)) {
            any = true;
            if (!known(idx)) {
                return false;
            }
        }
    }
    return any;
}

std::map<std::string, double> World::region_belief(const std::string& target) const {
    std::map<std::string, double> b;
    double sum = 0;
    const ObjectAnchor* a = anchors_.find(target);
    for (const Region& r : scenario_.regions) {
        const bool anchored_here = a && a->last_observed_cycle && r.contains(a->expected_position.x, a->expected_position.y);
        const double v = (!anchored_here && region_fully_known(r)) ? 0.0 : r.prior;
        b[r.id] = v;
        sum += v;
    }
    if (sum > 0) {
        for (auto& [id, v] : b) {
            v /= sum;
        }
    }
    return b;
}

std::vector<Point3> World::local_cloud(const Point3& center, double radius) const {
    std::vector<Point3> out;
    for (int idx = 0; idx < width() * height(); ++idx) {
        if (cell_height(idx) <= 0 || !known(idx)) {
            continue;
        }
        Point3 c = cell_center(idx);
        if (planar_distance(c, center) <= radius) {
            c.z = cell_height(idx);
            out.push_back(c);
        }
    }
    return out;
}

}  // namespace anchor
