#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "anchor/grasping.hpp"

using namespace anchor;

namespace {

GraspCandidate cand(const Point3& p, double tilt, double conf, double yaw = 0.0) {
    return {EEPose::downward_tilt(p, yaw, kPi / 2 - tilt), conf, 0};
}

double deg(double d) { return d * kPi / 180.0; }

}  // namespace

TEST_CASE("approach_tilt and tilt_penalty examples") {
    const GraspScoreConfig cfg;
    CHECK(approach_tilt(EEPose({0, 0, 0}, {0, 0, -1})) == doctest::Approx(0.0).scale(1.0));
    CHECK(approach_tilt(EEPose({0, 0, 0}, {1, 0, 0})) == doctest::Approx(kPi / 2));
    CHECK(approach_tilt(cand({0, 0, 0}, deg(30), 1).pose) == doctest::Approx(deg(30)));

    CHECK(tilt_penalty(cand({0, 0, 0}, 0.0, 1), cfg) == 1.0);
    CHECK(tilt_penalty(cand({0, 0, 0}, deg(14.9), 1), cfg) == 1.0);
    // 30 deg is 15 deg past tolerance: exp(-5 * pi / 12)
    CHECK(tilt_penalty(cand({0, 0, 0}, deg(30), 1), cfg) == doctest::Approx(std::exp(-5.0 * kPi / 12.0)));
    CHECK(tilt_penalty(cand({0, 0, 0}, deg(30), 1), cfg) == doctest::Approx(0.2698).epsilon(1e-3));
}

TEST_CASE("match_and_score ranks by tilt x confidence x consistency") {
    const GraspScoreConfig cfg;
    // A: vertical, conf 0.9, moved 1 cm -> 0.9 e^-0.5 = 0.546
    // B: 30 deg tilt, conf 0.5, moved 1 cm -> 0.270 * 0.5 * e^-0.5 = 0.082
    const std::vector<GraspCandidate> t{cand({1.0, 0.5, 0}, deg(30), 0.5), cand({0, 0, 0}, 0.0, 0.9)};
    const std::vector<GraspCandidate> prev{cand({0.01, 0, 0}, 0.0, 0.9), cand({1.0, 0.51, 0}, deg(30), 0.5)};
    const auto out = match_and_score(t, prev, cfg);
    REQUIRE(out.size() == 2);
    CHECK(out[0].current == 1);
    CHECK(out[0].previous == 0);
    CHECK(out[0].score == doctest::Approx(0.9 * std::exp(-0.5)));
    CHECK(out[0].score == doctest::Approx(0.546).epsilon(1e-3));
    CHECK(out[1].current == 0);
    CHECK(out[1].previous == 1);
    CHECK(out[1].score == doctest::Approx(std::exp(-5.0 * kPi / 12.0) * 0.5 * std::exp(-0.5)));
    CHECK(out[1].score == doctest::Approx(0.082).epsilon(1e-2));
}

TEST_CASE("candidates seen in only one frame are dropped") {
    const GraspScoreConfig cfg;
    const std::vector<GraspCandidate> t{cand({0, 0, 0}, 0, 1), cand({2, 0, 0}, 0, 1)};
    const std::vector<GraspCandidate> prev{cand({0.005, 0, 0}, 0, 1)};
    const auto out = match_and_score(t, prev, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].current == 0);
    // a rotated candidate at the same spot does not match either
    const std::vector<GraspCandidate> turned{cand({0, 0, 0}, deg(40), 1, 0.3)};
    CHECK(match_and_score(turned, prev, cfg).empty());
}

TEST_CASE("empty inputs give empty output") {
    const GraspScoreConfig cfg;
    const std::vector<GraspCandidate> some{cand({0, 0, 0}, 0, 1)};
    CHECK(match_and_score({}, some, cfg).empty());
    CHECK(match_and_score(some, {}, cfg).empty());
    CHECK(match_and_score({}, {}, cfg).empty());
}

TEST_CASE("greedy matching uses each previous candidate once") {
    const GraspScoreConfig cfg;
    const std::vector<GraspCandidate> t{cand({0.012, 0, 0}, 0, 1), cand({0.004, 0, 0}, 0, 1)};
    const std::vector<GraspCandidate> prev{cand({0, 0, 0}, 0, 1)};
    const auto out = match_and_score(t, prev, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].current == 1);
}

TEST_CASE("result does not depend on the order of the previous frame") {
    const GraspScoreConfig cfg;
    Rng rng(RngSeed{77});
    for (int k = 0; k < 100; ++k) {
        std::vector<GraspCandidate> t, prev;
        for (int i = 0; i < 6; ++i) {
            const Point3 p{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 0.5};
            const double tilt = rng.uniform(0, deg(40));
            const double yaw = rng.uniform(-kPi, kPi);
            t.push_back(cand(p, tilt, rng.uniform(0.2, 1.0), yaw));
            prev.push_back(cand(p + Point3{rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01), 0}, tilt,
                                rng.uniform(0.2, 1.0), yaw));
        }
        const auto a = match_and_score(t, prev, cfg);
        std::vector<GraspCandidate> rev(prev.rbegin(), prev.rend());
        const auto b = match_and_score(t, rev, cfg);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].current == b[i].current);
            CHECK(b[i].previous == prev.size() - 1 - a[i].previous);
            CHECK(a[i].score == b[i].score);
        }
    }
}

TEST_CASE("grasp config validation") {
    GraspScoreConfig cfg;
    cfg.consistency_sigma = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
