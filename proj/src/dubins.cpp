#include "fleet/dubins.hpp"

#include <cmath>
#include <limits>

namespace fleet {

namespace {

constexpr double kCoincidentEps = 1e-12;

enum class Seg { L, S, R };

constexpr std::array<Seg, 3> word_segments(DubinsWord w) {
    switch (w) {
        case DubinsWord::LSL: return {Seg::L, Seg::S, Seg::L};
        case DubinsWord::LSR: return {Seg::L, Seg::S, Seg::R};
        case DubinsWord::RSL: return {Seg::R, Seg::S, Seg::L};
        case DubinsWord::RSR: return {Seg::R, Seg::S, Seg::R};
        case DubinsWord::RLR: return {Seg::R, Seg::L, Seg::R};
        case DubinsWord::LRL: return {Seg::L, Seg::R, Seg::L};
    }
    return {Seg::S, Seg::S, Seg::S};
}

struct Normalized {
    double d;     // distance / rho
    double alpha; // start heading relative to the chord
    double beta;  // goal heading relative to the chord
    double sa, sb, ca, cb, c_ab;
};

// Normalized word solvers; angles are in turn units, the straight part in
// chord units. Returns per-segment normalized lengths, or nothing when the
// word is infeasible for this configuration.
using WordLengths = std::optional<std::array<double, 3>>;

WordLengths solve_lsl(const Normalized& n) {
    double p_sq = 2.0 + n.d * n.d - 2.0 * n.c_ab + 2.0 * n.d * (n.sa - n.sb);
    if (p_sq < 0.0) return std::nullopt;
    double tmp = std::atan2(n.cb - n.ca, n.d + n.sa - n.sb);
    return std::array<double, 3>{mod_two_pi(tmp - n.alpha), std::sqrt(p_sq),
                                 mod_two_pi(n.beta - tmp)};
}

WordLengths solve_rsr(const Normalized& n) {
    double p_sq = 2.0 + n.d * n.d - 2.0 * n.c_ab + 2.0 * n.d * (n.sb - n.sa);
    if (p_sq < 0.0) return std::nullopt;
    double tmp = std::atan2(n.ca - n.cb, n.d - n.sa + n.sb);
    return std::array<double, 3>{mod_two_pi(n.alpha - tmp), std::sqrt(p_sq),
                                 mod_two_pi(tmp - n.beta)};
}

WordLengths solve_lsr(const Normalized& n) {
    double p_sq = -2.0 + n.d * n.d + 2.0 * n.c_ab + 2.0 * n.d * (n.sa + n.sb);
    if (p_sq < 0.0) return std::nullopt;
    double p = std::sqrt(p_sq);
    double tmp = std::atan2(-n.ca - n.cb, n.d + n.sa + n.sb) - std::atan2(-2.0, p);
    return std::array<double, 3>{mod_two_pi(tmp - n.alpha), p, mod_two_pi(tmp - n.beta)};
}

WordLengths solve_rsl(const Normalized& n) {
    double p_sq = -2.0 + n.d * n.d + 2.0 * n.c_ab - 2.0 * n.d * (n.sa + n.sb);
    if (p_sq < 0.0) return std::nullopt;
    double p = std::sqrt(p_sq);
    double tmp = std::atan2(n.ca + n.cb, n.d - n.sa - n.sb) - std::atan2(2.0, p);
    return std::array<double, 3>{mod_two_pi(n.alpha - tmp), p, mod_two_pi(n.beta - tmp)};
}

WordLengths solve_rlr(const Normalized& n) {
    double tmp = (6.0 - n.d * n.d + 2.0 * n.c_ab + 2.0 * n.d * (n.sa - n.sb)) / 8.0;
    if (std::fabs(tmp) > 1.0) return std::nullopt;
    double p = mod_two_pi(2.0 * M_PI - std::acos(tmp));
    double phi = std::atan2(n.ca - n.cb, n.d - n.sa + n.sb);
    double t = mod_two_pi(n.alpha - phi + mod_two_pi(p / 2.0));
    return std::array<double, 3>{t, p, mod_two_pi(n.alpha - n.beta - t + mod_two_pi(p))};
}

WordLengths solve_lrl(const Normalized& n) {
    double tmp = (6.0 - n.d * n.d + 2.0 * n.c_ab + 2.0 * n.d * (n.sb - n.sa)) / 8.0;
    if (std::fabs(tmp) > 1.0) return std::nullopt;
    double p = mod_two_pi(2.0 * M_PI - std::acos(tmp));
    double phi = std::atan2(n.ca - n.cb, n.d + n.sa - n.sb);
    double t = mod_two_pi(mod_two_pi(-n.alpha) - phi + mod_two_pi(p / 2.0));
    return std::array<double, 3>{t, p,
                                 mod_two_pi(mod_two_pi(n.beta) - n.alpha - t + mod_two_pi(p))};
}

}  // namespace

DubinsPath dubins_shortest(const Pose& a, const Pose& b, double turn_radius) {
    DubinsPath best;
    best.start = a;
    best.turn_radius = turn_radius;

    double dist = distance(a.position, b.position);
    double dtheta = mod_two_pi(b.heading - a.heading);
    if (dist < kCoincidentEps &&
        (dtheta < kCoincidentEps || 2.0 * M_PI - dtheta < kCoincidentEps)) {
        return best;  // coincident poses: zero-length path
    }

    Normalized n;
    double phi = std::atan2(b.position.y - a.position.y, b.position.x - a.position.x);
    n.d = dist / turn_radius;
    n.alpha = mod_two_pi(a.heading - phi);
    n.beta = mod_two_pi(b.heading - phi);
    n.sa = std::sin(n.alpha);
    n.sb = std::sin(n.beta);
    n.ca = std::cos(n.alpha);
    n.cb = std::cos(n.beta);
    n.c_ab = std::cos(n.alpha - n.beta);

    struct Candidate {
        DubinsWord word;
        WordLengths lengths;
    };
    const Candidate candidates[] = {
        {DubinsWord::LSL, solve_lsl(n)}, {DubinsWord::RSR, solve_rsr(n)},
        {DubinsWord::LSR, solve_lsr(n)}, {DubinsWord::RSL, solve_rsl(n)},
        {DubinsWord::RLR, solve_rlr(n)}, {DubinsWord::LRL, solve_lrl(n)},
    };

    double best_total = std::numeric_limits<double>::infinity();
    for (const auto& c : candidates) {
        if (!c.lengths) continue;
        const auto& seg = *c.lengths;
        double total = seg[0] + seg[1] + seg[2];
        if (total < best_total) {
            best_total = total;
            best.word = c.word;
            // arcs scale by rho, the straight part is already chord-normalized by rho
            best.segment_lengths = {seg[0] * turn_radius, seg[1] * turn_radius,
                                    seg[2] * turn_radius};
        }
    }
    return best;
}

double dubins_length(const Pose& a, const Pose& b, double turn_radius) {
    return dubins_shortest(a, b, turn_radius).length();
}

Pose DubinsPath::sample(double s) const {
    s = std::max(0.0, std::min(s, length()));
    Pose p = start;
    auto segs = word_segments(word);
    for (int i = 0; i < 3; ++i) {
        double take = std::min(s, segment_lengths[i]);
        if (take > 0.0) {
            switch (segs[i]) {
                case Seg::S:
                    p.position.x += take * std::cos(p.heading);
                    p.position.y += take * std::sin(p.heading);
                    break;
                case Seg::L: {
                    double dpsi = take / turn_radius;
                    p.position.x += turn_radius * (std::sin(p.heading + dpsi) - std::sin(p.heading));
                    p.position.y += turn_radius * (-std::cos(p.heading + dpsi) + std::cos(p.heading));
                    p.heading += dpsi;
                    break;
                }
                case Seg::R: {
                    double dpsi = take / turn_radius;
                    p.position.x += turn_radius * (-std::sin(p.heading - dpsi) + std::sin(p.heading));
                    p.position.y += turn_radius * (std::cos(p.heading - dpsi) - std::cos(p.heading));
                    p.heading -= dpsi;
                    break;
                }
            }
        }
        s -= take;
        if (s <= 0.0) break;
    }
    p.heading = wrap_pi(p.heading);
    return p;
}

double DubinsPath::curvature(double s) const {
    auto segs = word_segments(word);
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        acc += segment_lengths[i];
        if (s <= acc || i == 2) {
            switch (segs[i]) {
                case Seg::S: return 0.0;
                case Seg::L: return 1.0 / turn_radius;
                case Seg::R: return -1.0 / turn_radius;
            }
        }
    }
    return 0.0;
}

}  // namespace fleet
