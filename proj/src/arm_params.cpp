#include <sstream>
#include <stdexcept>

#include "anchor/reachability.hpp"

namespace anchor {

ShellFitJob parse_arm_params(const std::string& text) {
    ShellFitJob job;
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
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
        auto bad = [&](const std::string& why) {
            return std::runtime_error("arm params:" + std::to_string(lineno) + ": " + why);
        };
        bool ok = true;
        if (key == "links") {
            ok = static_cast<bool>(in >> job.arm.link_lengths[0] >> job.arm.link_lengths[1] >> job.arm.link_lengths[2]);
        } else if (key == "limit") {
            int j = -1;
            ok = static_cast<bool>(in >> j) && j >= 0 && j < 4 &&
                 static_cast<bool>(in >> job.arm.joint_limits[static_cast<std::size_t>(j)].min >>
                                   job.arm.joint_limits[static_cast<std::size_t>(j)].max);
        } else if (key == "mount") {
            ok = static_cast<bool>(in >> job.arm.mount_offset.x >> job.arm.mount_offset.y >> job.arm.mount_offset.z);
        } else if (key == "collision_radius") {
            ok = static_cast<bool>(in >> job.arm.self_collision_radius);
        } else if (key == "mu_threshold") {
            ok = static_cast<bool>(in >> job.fit.mu_threshold);
        } else if (key == "trials") {
            ok = static_cast<bool>(in >> job.fit.ik_trials_per_pose);
        } else if (key == "resolution") {
            ok = static_cast<bool>(in >> job.fit.sample_grid_resolution);
        } else if (key == "tolerance") {
            ok = static_cast<bool>(in >> job.fit.mvee_tolerance);
        } else if (key == "seed") {
            ok = static_cast<bool>(in >> job.seed.value);
        } else {
            throw bad("unknown key '" + key + "'");
        }
        std::string extra;
        if (!ok || (in >> extra)) {
            throw bad("bad values for '" + key + "'");
        }
    }
    try {
        job.arm.validate();
        job.fit.validate();
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("arm params: ") + e.what());
    }
    return job;
}

}  // namespace anchor
