#pragma once

#include <cstddef>
#include <vector>

#include "anchor/core.hpp"

namespace anchor {

struct GraspCandidate {
    EEPose pose;
    double confidence = 1.0;
    int frame_index = 0;
};

struct GraspScoreConfig {
    double tilt_tolerance = 15.0 * kPi / 180.0;
    double tilt_decay = 5.0;
    double match_translation_tol = 0.02;
    double match_rotation_tol = 10.0 * kPi / 180.0;
    double consistency_sigma = 0.02;

    void validate() const;
};

/// Angle between the approach direction and straight down.
double approach_tilt(const EEPose& pose);

/// 1 within the tolerance, exponential decay beyond it.
double tilt_penalty(const GraspCandidate& g, const GraspScoreConfig& cfg);

struct ScoredPair {
    std::size_t current = 0;
    std::size_t previous = 0;
    double score = 0.0;
};

/// Greedy nearest-neighbour matching between frames, then ranking by
/// tilt penalty x confidence x temporal consistency. Ties keep frame-t order.
std::vector<ScoredPair> match_and_score(const std::vector<GraspCandidate>& frame_t,
                                        const std::vector<GraspCandidate>& frame_prev, const GraspScoreConfig& cfg);

}  // namespace anchor
