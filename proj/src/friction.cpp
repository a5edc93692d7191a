#include "fleet/friction.hpp"

#include <algorithm>
#include <stdexcept>

namespace fleet {

double FrictionField::line_integral_mu(const Vec2& a, const Vec2& b) const {
    double len = distance(a, b);
    if (len == 0.0) return 0.0;
    if (kind == FrictionKind::uniform) return uniform_mu * len;

    // Breakpoints where the segment enters/leaves any zone rectangle.
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& z : zones) {
        ClipInterval c = clip_segment(a, b, z.rect);
        if (!c.empty()) {
            cuts.push_back(c.t0);
            cuts.push_back(c.t1);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double t0 = cuts[i], t1 = cuts[i + 1];
        if (t1 <= t0) continue;
        Vec2 mid = a + (b - a) * (0.5 * (t0 + t1));
        integral += mu_at(mid) * (t1 - t0) * len;
    }
    return integral;
}

void FrictionField::validate() const {
    if (uniform_mu <= 0.0 || default_mu <= 0.0)
        throw std::invalid_argument("friction coefficients must be > 0");
    for (const auto& z : zones)
        if (z.mu <= 0.0) throw std::invalid_argument("zone mu must be > 0");
}

}  // namespace fleet
