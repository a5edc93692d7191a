#pragma once

#include <array>
#include <optional>

#include "fleet/geometry.hpp"

namespace fleet {

enum class DubinsWord { LSL, LSR, RSL, RSR, RLR, LRL };

/// Shortest curvature-bounded path between two planar poses: minimum over
/// the six canonical words. Lengths are stored per segment in meters.
struct DubinsPath {
    Pose start;
    double turn_radius = 1.0;
    DubinsWord word = DubinsWord::LSL;
    std::array<double, 3> segment_lengths{0.0, 0.0, 0.0};

    double length() const {
        return segment_lengths[0] + segment_lengths[1] + segment_lengths[2];
    }
    /// Pose after traveling arc length s from the start (s clamped to [0, length]).
    Pose sample(double s) const;
    /// Signed curvature at arc length s (+1/rho left, -1/rho right, 0 straight).
    double curvature(double s) const;
};

/// Computes the shortest Dubins path; always succeeds for turn_radius > 0.
DubinsPath dubins_shortest(const Pose& a, const Pose& b, double turn_radius);

/// Length of the shortest Dubins path.
double dubins_length(const Pose& a, const Pose& b, double turn_radius);

}  // namespace fleet
