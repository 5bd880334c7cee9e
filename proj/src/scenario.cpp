#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <stdexcept>

#include "anchor/sim.hpp"

namespace anchor {

void SensorModel::validate() const {
    if (!(fov_radius > 0) || !(fov_halfangle > 0 && fov_halfangle <= kPi) || !(p_detect >= 0 && p_detect <= 1) ||
        !(position_noise_sigma >= 0) || !(height > 0)) {
        throw std::invalid_argument("sensor: bad parameters");
    }
}

void OutcomeModel::validate() const {
    for (double p : {p_g, p_g_misaligned, p_slip, p_knock}) {
        if (!(p >= 0 && p <= 1)) {
            throw std::invalid_argument("outcomes: probabilities must be in [0, 1]");
        }
    }
    if (!(place_sigma_aligned >= 0) || !(place_sigma_misaligned >= 0) || !(place_clearance >= 0)) {
        throw std::invalid_argument("outcomes: sigmas and clearance must be non-negative");
    }
}

std::string Disturbance::str() const {
    std::string s;
    switch (trigger) {
    case TriggerKind::Cycle:
        s = "cycle " + std::to_string(count);
        break;
    case TriggerKind::Before:
        s = std::string("before ") + action_name(action) + " " + std::to_string(count);
        break;
    case TriggerKind::After:
        s = std::string("after ") + action_name(action) + " " + std::to_string(count);
        break;
    }
    switch (effect) {
    case EffectKind::Displace:
        return s + " displace " + object + " " + format_double(dx) + " " + format_double(dy);
    case EffectKind::Occlude:
        return s + " occlude " + object + " " + std::to_string(duration);
    case EffectKind::Remove:
        return s + " remove " + object;
    case EffectKind::Slip:
        return s + " slip";
    }
    return s;
}

namespace {

class LineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double number(std::istringstream& in, const char* what) {
    std::string tok;
    if (!(in >> tok)) {
        throw LineError(std::string("missing ") + what);
    }
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != tok.size() || !std::isfinite(v)) {
        throw LineError(std::string("bad ") + what + " '" + tok + "'");
    }
    return v;
}

int integer(std::istringstream& in, const char* what) {
    const double v = number(in, what);
    if (v != std::floor(v)) {
        throw LineError(std::string(what) + " must be an integer");
    }
    return static_cast<int>(v);
}

std::string word(std::istringstream& in, const char* what) {
    std::string tok;
    if (!(in >> tok)) {
        throw LineError(std::string("missing ") + what);
    }
    return tok;
}

void no_more(std::istringstream& in) {
    std::string extra;
    if (in >> extra) {
        throw LineError("unexpected '" + extra + "'");
    }
}

// Marks cells whose centers lie in the rectangle.
template <typename F>
void for_cells(const Scenario& s, double x0, double y0, double x1, double y1, F f) {
    for (int cy = 0; cy < s.height; ++cy) {
        for (int cx = 0; cx < s.width; ++cx) {
            const double x = (cx + 0.5) * kCellSize;
            const double y = (cy + 0.5) * kCellSize;
            if (x >= x0 && x <= x1 && y >= y0 && y <= y1) {
                f(cy * s.width + cx);
            }
        }
    }
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    Scenario s;
    bool have_grid = false, have_robot = false, have_task = false;
    std::set<std::string> ids;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    try {
        while (std::getline(lines, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            std::istringstream in(line);
            std::string key;
            if (!(in >> key)) {
                continue;
            }
            if (key != "scenario" && key != "grid" && key != "level" && !have_grid) {
                throw LineError("'" + key + "' before 'grid'");
            }
            if (key == "scenario") {
                s.name = word(in, "name");
            } else if (key == "level") {
                s.level = integer(in, "level");
                if (s.level < 1 || s.level > 3) {
                    throw LineError("level must be 1, 2 or 3");
                }
            } else if (key == "grid") {
                const double w = number(in, "width");
                const double h = number(in, "height");
                if (have_grid || w <= 0 || h <= 0 || w > 100 || h > 100) {
                    throw LineError("grid must appear once with size in (0, 100] m");
                }
                s.width = static_cast<int>(std::ceil(w / kCellSize - 1e-9));
                s.height = static_cast<int>(std::ceil(h / kCellSize - 1e-9));
                s.cell_height.assign(static_cast<std::size_t>(s.width * s.height), 0.0);
                s.known.assign(s.cell_height.size(), 0);
                have_grid = true;
            } else if (key == "occupied") {
                const double x0 = number(in, "x0"), y0 = number(in, "y0"), x1 = number(in, "x1"),
                             y1 = number(in, "y1"), h = number(in, "height");
                if (x1 < x0 || y1 < y0 || h <= 0) {
                    throw LineError("occupied needs x0 <= x1, y0 <= y1 and height > 0");
                }
                for_cells(s, x0, y0, x1, y1, [&](int i) {
                    s.cell_height[static_cast<std::size_t>(i)] = std::max(s.cell_height[static_cast<std::size_t>(i)], h);
                });
            } else if (key == "known") {
                std::string first;
                in >> first;
                if (first == "all") {
                    std::fill(s.known.begin(), s.known.end(), 1);
                } else {
                    std::istringstream rest(first + " " + std::string(std::istreambuf_iterator<char>(in), {}));
                    const double x0 = number(rest, "x0"), y0 = number(rest, "y0"), x1 = number(rest, "x1"),
                                 y1 = number(rest, "y1");
                    no_more(rest);
                    for_cells(s, x0, y0, x1, y1, [&](int i) { s.known[static_cast<std::size_t>(i)] = 1; });
                    continue;
                }
            } else if (key == "region") {
                Region r;
                r.id = word(in, "region id");
                r.x0 = number(in, "x0");
                r.y0 = number(in, "y0");
                r.x1 = number(in, "x1");
                r.y1 = number(in, "y1");
                r.prior = number(in, "prior");
                if (r.x1 < r.x0 || r.y1 < r.y0 || r.prior < 0) {
                    throw LineError("region needs a valid rectangle and prior >= 0");
                }
                for (const Region& o : s.regions) {
                    if (o.id == r.id) {
                        throw LineError("duplicate region '" + r.id + "'");
                    }
                }
                s.regions.push_back(r);
            } else if (key == "object") {
                SimObject o;
                o.id = word(in, "object id");
                o.true_pose.x = number(in, "x");
                o.true_pose.y = number(in, "y");
                o.true_pose.z = number(in, "z");
                o.sx = number(in, "sx");
                o.sy = number(in, "sy");
                o.sz = number(in, "sz");
                const std::string kind = word(in, "kind");
                if (kind == "graspable") {
                    o.graspable = true;
                } else if (kind == "container") {
                    o.graspable = false;
                    o.container = true;
                } else {
                    throw LineError("object kind must be graspable or container");
                }
                if (o.sx <= 0 || o.sy <= 0 || o.sz <= 0) {
                    throw LineError("object size must be positive");
                }
                if (!ids.insert(o.id).second) {
                    throw LineError("duplicate object '" + o.id + "'");
                }
                s.objects.push_back(o);
            } else if (key == "robot") {
                const double x = number(in, "x"), y = number(in, "y"), th = number(in, "theta");
                s.robot = BasePose(x, y, th * kPi / 180.0);
                have_robot = true;
            } else if (key == "task") {
                s.task.task_obj = word(in, "task object");
                s.task.task_container = word(in, "task container");
                std::getline(in, s.task.instruction_text);
                const auto b = s.task.instruction_text.find_first_not_of(' ');
                s.task.instruction_text = b == std::string::npos ? "" : s.task.instruction_text.substr(b);
                have_task = true;
                continue;
            } else if (key == "sensor") {
                s.sensor.fov_radius = number(in, "fov radius");
                s.sensor.fov_halfangle = number(in, "fov half-angle") * kPi / 180.0;
                s.sensor.p_detect = number(in, "p_detect");
                s.sensor.position_noise_sigma = number(in, "noise sigma");
                s.sensor.validate();
            } else if (key == "outcomes") {
                s.outcomes.p_g = number(in, "p_g");
                s.outcomes.p_g_misaligned = number(in, "p_g_misaligned");
                s.outcomes.p_slip = number(in, "p_slip");
                s.outcomes.p_knock = number(in, "p_knock");
                s.outcomes.validate();
            } else if (key == "disturbance") {
                Disturbance d;
                const std::string trig = word(in, "trigger");
                if (trig == "cycle") {
                    d.trigger = TriggerKind::Cycle;
                } else if (trig == "before" || trig == "after") {
                    d.trigger = trig == "before" ? TriggerKind::Before : TriggerKind::After;
                    const std::string a = word(in, "action");
                    const auto act = action_from_name(a);
                    if (!act) {
                        throw LineError("unknown action '" + a + "'");
                    }
                    d.action = *act;
                } else {
                    throw LineError("trigger must be cycle, before or after");
                }
                d.count = integer(in, "trigger count");
                if (d.count < (d.trigger == TriggerKind::Cycle ? 0 : 1)) {
                    throw LineError("trigger count out of range");
                }
                const std::string eff = word(in, "effect");
                if (eff == "displace") {
                    d.effect = EffectKind::Displace;
                    d.object = word(in, "object");
                    d.dx = number(in, "dx");
                    d.dy = number(in, "dy");
                } else if (eff == "occlude") {
                    d.effect = EffectKind::Occlude;
                    d.object = word(in, "object");
                    d.duration = integer(in, "duration");
                    if (d.duration < 1) {
                        throw LineError("occlusion duration must be >= 1");
                    }
                } else if (eff == "remove") {
                    d.effect = EffectKind::Remove;
                    d.object = word(in, "object");
                } else if (eff == "slip") {
                    d.effect = EffectKind::Slip;
                } else {
                    throw LineError("unknown effect '" + eff + "'");
                }
                for (const Disturbance& prev : s.disturbances) {
                    if (prev.trigger == d.trigger && prev.action == d.action && prev.count > d.count) {
                        throw LineError("triggers must be non-decreasing");
                    }
                }
                s.disturbances.push_back(d);
            } else if (key == "max_cycles") {
                s.max_cycles = integer(in, "max_cycles");
                if (s.max_cycles < 1) {
                    throw LineError("max_cycles must be >= 1");
                }
            } else if (key == "shell") {
                s.shell_path = word(in, "shell path");
            } else {
                throw LineError("unknown keyword '" + key + "'");
            }
            no_more(in);
        }
        lineno = 0;
        if (!have_grid || !have_robot || !have_task) {
            throw LineError("scenario needs grid, robot and task lines");
        }
        s.task.validate();
        const SimObject* obj = nullptr;
        const SimObject* cont = nullptr;
        for (const SimObject& o : s.objects) {
            if (o.id == s.task.task_obj) {
                obj = &o;
            }
            if (o.id == s.task.task_container) {
                cont = &o;
            }
        }
        if (!obj || !obj->graspable) {
            throw LineError("task object must be a declared graspable object");
        }
        if (!cont || !cont->container) {
            throw LineError("task container must be a declared container");
        }
        for (const Disturbance& d : s.disturbances) {
            if (d.effect != EffectKind::Slip && !ids.count(d.object)) {
                throw LineError("disturbance names unknown object '" + d.object + "'");
            }
        }
        double prior_sum = 0;
        for (const Region& r : s.regions) {
            prior_sum += r.prior;
        }
        if (prior_sum > 1.0 + 1e-9) {
            throw LineError("region priors sum above 1");
        }
        // The robot always knows the floor it stands on.
        for_cells(s, s.robot.x() - 0.6, s.robot.y() - 0.6, s.robot.x() + 0.6, s.robot.y() + 0.6, [&](int i) {
            s.known[static_cast<std::size_t>(i)] = 1;
        });
    } catch (const LineError& e) {
        throw std::runtime_error(origin + (lineno ? ":" + std::to_string(lineno) : std::string()) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(origin + (lineno ? ":" + std::to_string(lineno) : std::string()) + ": " + e.what());
    } catch (const std::domain_error& e) {
        throw std::runtime_error(origin + (lineno ? ":" + std::to_string(lineno) : std::string()) + ": " + e.what());
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open scenario: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    Scenario s = parse_scenario(buf.str(), path);
    if (!s.shell_path.empty() && std::filesystem::path(s.shell_path).is_relative()) {
        s.shell_path = (std::filesystem::path(path).parent_path() / s.shell_path).string();
    }
    return s;
}

}  // namespace anchor
