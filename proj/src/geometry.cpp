#include "fleet/geometry.hpp"

#include <algorithm>

namespace fleet {

ClipInterval clip_segment(const Vec2& a, const Vec2& b, const Rect& r) {
    double t0 = 0.0, t1 = 1.0;
    double dx = b.x - a.x, dy = b.y - a.y;

    auto clip = [&](double p, double q) {
        // p*t <= q half-plane
        if (p == 0.0) return q >= 0.0;
        double t = q / p;
        if (p < 0.0) {
            if (t > t1) return false;
            t0 = std::max(t0, t);
        } else {
            if (t < t0) return false;
            t1 = std::min(t1, t);
        }
        return true;
    };

    bool ok = clip(-dx, a.x - r.x) && clip(dx, r.x + r.w - a.x) &&
              clip(-dy, a.y - r.y) && clip(dy, r.y + r.h - a.y);
    if (!ok) return {};
    return {t0, t1};
}

}  // namespace fleet
