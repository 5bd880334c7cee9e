#include "anchor/grasping.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace anchor {

void GraspScoreConfig::validate() const {
    if (!(tilt_tolerance > 0 && tilt_decay > 0 && match_translation_tol > 0 && match_rotation_tol > 0 &&
          consistency_sigma > 0)) {
        throw std::invalid_argument("grasp score config: all parameters must be positive");
    }
}

double approach_tilt(const EEPose& pose) {
    const Point3& d = pose.approach_dir();
    return std::atan2(d.planar_norm(), -d.z);
}

double tilt_penalty(const GraspCandidate& g, const GraspScoreConfig& cfg) {
    const double delta = approach_tilt(g.pose);
    return delta <= cfg.tilt_tolerance ? 1.0 : std::exp(-cfg.tilt_decay * (delta - cfg.tilt_tolerance));
}

namespace {

double rotation_gap(const EEPose& a, const EEPose& b) {
    const Point3 c = cross(a.approach_dir(), b.approach_dir());
    const double axis = std::atan2(c.norm(), dot(a.approach_dir(), b.approach_dir()));
    return axis + std::abs(normalize_angle(a.roll() - b.roll()));
}

}  // namespace

std::vector<ScoredPair> match_and_score(const std::vector<GraspCandidate>& frame_t,
                                        const std::vector<GraspCandidate>& frame_prev, const GraspScoreConfig& cfg) {
    cfg.validate();
    struct Edge {
        double d;
        std::size_t i;
        std::size_t j;
        double dp;
    };
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < frame_t.size(); ++i) {
        for (std::size_t j = 0; j < frame_prev.size(); ++j) {
            const double dp = (frame_t[i].pose.position() - frame_prev[j].pose.position()).norm();
            const double dr = rotation_gap(frame_t[i].pose, frame_prev[j].pose);
            if (dp > cfg.match_translation_tol || dr > cfg.match_rotation_tol) {
                continue;
            }
            edges.push_back({dp + 0.1 * dr, i, j, dp});
        }
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.d, a.i, a.j) < std::tie(b.d, b.i, b.j); });
    std::vector<char> used_t(frame_t.size(), 0);
    std::vector<char> used_p(frame_prev.size(), 0);
    std::vector<ScoredPair> out;
    for (const Edge& e : edges) {
        if (used_t[e.i] || used_p[e.j]) {
            continue;
        }
        used_t[e.i] = used_p[e.j] = 1;
        const GraspCandidate& g = frame_t[e.i];
        const double r = std::clamp(g.confidence, 0.0, 1.0) * std::exp(-e.dp / cfg.consistency_sigma);
        out.push_back({e.i, e.j, tilt_penalty(g, cfg) * r});
    }
    std::stable_sort(out.begin(), out.end(), [](const ScoredPair& a, const ScoredPair& b) {
        return a.score > b.score || (a.score == b.score && a.current < b.current);
    });
    return out;
}

}  // namespace anchor
