#pragma once

#include <vector>

#include "fleet/geometry.hpp"

namespace fleet {

enum class FrictionKind { uniform, zoned };

/// Rolling-friction coefficient field over the workspace. Either a single
/// uniform mu or a set of rectangular zones (first match wins) over a
/// default background value.
struct FrictionField {
    FrictionKind kind = FrictionKind::uniform;
    double uniform_mu = 0.02;
    struct Zone {
        Rect rect;
        double mu;
    };
    std::vector<Zone> zones;
    double default_mu = 0.02;

    static FrictionField uniform(double mu) {
        FrictionField f;
        f.kind = FrictionKind::uniform;
        f.uniform_mu = mu;
        f.default_mu = mu;
        return f;
    }

    double mu_at(const Vec2& p) const {
        if (kind == FrictionKind::uniform) return uniform_mu;
        for (const auto& z : zones)
            if (z.rect.contains(p)) return z.mu;
        return default_mu;
    }

    /// Exact straight-line integral of mu along a -> b (units: m, scaled by mu).
    /// Decomposes the segment at zone boundaries.
    double line_integral_mu(const Vec2& a, const Vec2& b) const;

    void validate() const;
};

}  // namespace fleet
