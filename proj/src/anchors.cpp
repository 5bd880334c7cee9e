#include "anchor/anchors.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace anchor {

double PlanarBox::area() const { return std::max(0.0, x_max - x_min) * std::max(0.0, y_max - y_min); }

PlanarBox PlanarBox::of(const PointCloud& cloud) {
    if (cloud.empty()) {
        return {};
    }
    PlanarBox b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Point3& p : cloud.points) {
        b.x_min = std::min(b.x_min, p.x);
        b.y_min = std::min(b.y_min, p.y);
        b.x_max = std::max(b.x_max, p.x);
        b.y_max = std::max(b.y_max, p.y);
    }
    return b;
}

PlanarBox PlanarBox::centered(double cx, double cy, double sx, double sy) {
    return {cx - 0.5 * sx, cy - 0.5 * sy, cx + 0.5 * sx, cy + 0.5 * sy};
}

double overlap_ratio(const PlanarBox& obj, const PlanarBox& container) {
    const double a = obj.area();
    if (!(a > 0.0)) {
        throw std::domain_error("overlap_ratio: object box has zero area");
    }
    const double w = std::min(obj.x_max, container.x_max) - std::max(obj.x_min, container.x_min);
    const double h = std::min(obj.y_max, container.y_max) - std::max(obj.y_min, container.y_min);
    if (w <= 0.0 || h <= 0.0) {
        return 0.0;
    }
    return std::min(1.0, w * h / a);
}

const ObjectAnchor* AnchorStore::find(const std::string& id) const {
    auto it = objects.find(id);
    return it == objects.end() ? nullptr : &it->second;
}

void record_observation(ObjectAnchor& anchor, const Point3& measured, const PointCloud& cloud, int tick) {
    const Point3 before = anchor.expected_position;
    const bool had = anchor.fused_count > 0;
    if (had && (measured - before).norm() <= kFuseGate) {
        const double n = anchor.fused_count;
        anchor.expected_position = (1.0 / (n + 1.0)) * (n * before + measured);
        ++anchor.fused_count;
    } else {
        anchor.expected_position = measured;
        anchor.fused_count = 1;
    }
    anchor.previous_observed_cycle = anchor.last_observed_cycle;
    anchor.last_observed_cycle = tick;
    anchor.cloud = cloud;
    anchor.footprint_xy = PlanarBox::of(cloud);
    anchor.stable_segmented = had && anchor.fused_count > 1 && anchor.previous_observed_cycle == tick - 1 &&
                              (anchor.expected_position - before).norm() < kStableDrift;
}

void record_miss(ObjectAnchor& anchor) { anchor.stable_segmented = false; }

const char* pred_name(Pred p) {
    switch (p) {
    case Pred::Found:
        return "found";
    case Pred::Near:
        return "near";
    case Pred::Aligned:
        return "aligned";
    case Pred::Holding:
        return "holding";
    case Pred::In:
        return "in";
    }
    return "?";
}

std::optional<Pred> pred_from_name(const std::string& name) {
    for (Pred p : {Pred::Found, Pred::Near, Pred::Aligned, Pred::Holding, Pred::In}) {
        if (name == pred_name(p)) {
            return p;
        }
    }
    return std::nullopt;
}

std::string Atom::str() const {
    std::string s = "(";
    s += pred_name(pred);
    s += ' ';
    s += a;
    if (pred == Pred::In) {
        s += ' ';
        s += b;
    }
    return s + ")";
}

std::string state_string(const SymbolicState& s) {
    std::string out;
    for (const Atom& atom : s) {
        if (!out.empty()) {
            out += ' ';
        }
        out += atom.str();
    }
    return out;
}

void PredicateConfig::validate() const {
    if (!(eps_near > 0) || !(eps_in > 0 && eps_in <= 1) || !(load_threshold >= 0)) {
        throw std::invalid_argument("predicate config: need eps_near > 0, eps_in in (0, 1], load >= 0");
    }
}

SymbolicState derive_state(const AnchorStore& store, const PredicateConfig& cfg, const DualEllipsoidShell& shell) {
    SymbolicState s;
    const BasePose& base = store.robot.chassis_pose;
    for (const auto& [id, o] : store.objects) {
        if (!o.last_observed_cycle) {
            continue;
        }
        s.insert({Pred::Found, id, {}});
        const double d = std::hypot(base.x() - o.expected_position.x, base.y() - o.expected_position.y);
        if (d <= cfg.eps_near) {
            s.insert({Pred::Near, id, {}});
            if (o.stable_segmented &&
                (!cfg.shell_check || shell.contains(to_base_frame(base, o.expected_position)))) {
                s.insert({Pred::Aligned, id, {}});
            }
        }
    }
    const RobotAnchor& r = store.robot;
    if (r.gripper_closed && r.gripper_current >= cfg.load_threshold && r.gripper_roi_object_visible &&
        !r.roi_object_id.empty()) {
        s.insert({Pred::Holding, r.roi_object_id, {}});
    }
    for (const auto& [oid, o] : store.objects) {
        if (o.cloud.empty() || !(o.footprint_xy.area() > 0)) {
            continue;
        }
        for (const auto& [cid, c] : store.objects) {
            if (cid == oid || c.cloud.empty()) {
                continue;
            }
            if (overlap_ratio(o.footprint_xy, c.footprint_xy) >= cfg.eps_in) {
                s.insert({Pred::In, oid, cid});
            }
        }
    }
    return s;
}

namespace {

std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : "-"; }

std::optional<int> parse_opt_int(const std::string& s) {
    if (s == "-") {
        return std::nullopt;
    }
    return std::stoi(s);
}

}  // namespace

void write_snapshot(std::ostream& out, const AnchorStore& store) {
    const RobotAnchor& r = store.robot;
    out << "snapshot " << store.cycle << '\n';
    out << "robot " << format_double(r.chassis_pose.x()) << ' ' << format_double(r.chassis_pose.y()) << ' '
        << format_double(r.chassis_pose.theta()) << ' ' << (r.gripper_closed ? 1 : 0) << ' '
        << format_double(r.gripper_current) << ' ' << (r.gripper_roi_object_visible ? 1 : 0) << ' '
        << (r.roi_object_id.empty() ? "-" : r.roi_object_id) << '\n';
    for (const auto& [id, o] : store.objects) {
        out << "object " << id << ' ' << format_double(o.expected_position.x) << ' '
            << format_double(o.expected_position.y) << ' ' << format_double(o.expected_position.z) << ' '
            << (o.stable_segmented ? 1 : 0) << ' ' << opt_int(o.last_observed_cycle) << ' '
            << opt_int(o.previous_observed_cycle) << ' ' << o.fused_count << ' '
            << format_double(o.footprint_xy.x_min) << ' ' << format_double(o.footprint_xy.y_min) << ' '
            << format_double(o.footprint_xy.x_max) << ' ' << format_double(o.footprint_xy.y_max) << ' '
            << o.cloud.size() << '\n';
        for (const Point3& p : o.cloud.points) {
            out << "point " << format_double(p.x) << ' ' << format_double(p.y) << ' ' << format_double(p.z) << '\n';
        }
    }
    out << "end\n";
}

std::optional<AnchorStore> read_snapshot(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("snapshot ", 0) == 0) {
            break;
        }
    }
    if (!in) {
        return std::nullopt;
    }
    auto fail = [](const std::string& why) { return std::runtime_error("snapshot: " + why); };
    AnchorStore store;
    try {
        store.cycle = std::stoi(line.substr(9));
        ObjectAnchor* current = nullptr;
        std::size_t points_left = 0;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string tag;
            ls >> tag;
            if (tag == "end") {
                if (points_left != 0) {
                    throw fail("truncated point list");
                }
                return store;
            }
            if (tag == "robot") {
                double x, y, th, cur;
                int closed, vis;
                std::string roi;
                if (!(ls >> x >> y >> th >> closed >> cur >> vis >> roi)) {
                    throw fail("bad robot line");
                }
                store.robot = RobotAnchor{BasePose(x, y, th), closed != 0, cur, vis != 0, roi == "-" ? "" : roi};
            } else if (tag == "object") {
                if (points_left != 0) {
                    throw fail("truncated point list");
                }
                ObjectAnchor o;
                std::string last, prev;
                int stable;
                std::size_t n;
                if (!(ls >> o.id >> o.expected_position.x >> o.expected_position.y >> o.expected_position.z >> stable >>
                      last >> prev >> o.fused_count >> o.footprint_xy.x_min >> o.footprint_xy.y_min >>
                      o.footprint_xy.x_max >> o.footprint_xy.y_max >> n)) {
                    throw fail("bad object line");
                }
                o.stable_segmented = stable != 0;
                o.last_observed_cycle = parse_opt_int(last);
                o.previous_observed_cycle = parse_opt_int(prev);
                current = &store.objects[o.id];
                *current = std::move(o);
                points_left = n;
            } else if (tag == "point") {
                Point3 p;
                if (current == nullptr || points_left == 0 || !(ls >> p.x >> p.y >> p.z)) {
                    throw fail("unexpected point line");
                }
                current->cloud.points.push_back(p);
                --points_left;
            } else {
                throw fail("unknown record '" + tag + "'");
            }
        }
    } catch (const std::logic_error& e) {
        throw fail(e.what());
    }
    throw fail("missing 'end'");
}

}  // namespace anchor
