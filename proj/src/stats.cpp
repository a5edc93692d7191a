#include "fleet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace fleet {

namespace {

// midranks of |values|
std::vector<double> midranks(const std::vector<double>& magnitudes) {
    std::size_t n = magnitudes.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return magnitudes[a] < magnitudes[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
        double avg = 0.5 * (i + j) + 1.0;  // 1-based midrank
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& differences) {
    WilcoxonResult res;
    std::vector<double> d;
    for (double x : differences)
        if (x != 0.0) d.push_back(x);
    res.n_effective = static_cast<int>(d.size());
    if (d.empty()) return res;  // degenerate: all-zero differences
    res.ok = true;

    std::vector<double> mags(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) mags[i] = std::fabs(d[i]);
    std::vector<double> ranks = midranks(mags);

    double w_plus = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i] > 0.0) w_plus += ranks[i];
    res.w_plus = w_plus;

    std::size_t n = d.size();
    if (n <= 20) {
        // exact: enumerate all sign assignments of the observed ranks
        res.exact = true;
        std::uint64_t total = 1ULL << n;
        std::uint64_t le = 0, ge = 0;
        const double eps = 1e-9;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            double w = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1ULL << i)) w += ranks[i];
            if (w <= w_plus + eps) ++le;
            if (w >= w_plus - eps) ++ge;
        }
        double p_le = static_cast<double>(le) / total;
        double p_ge = static_cast<double>(ge) / total;
        res.p_two_sided = std::min(1.0, 2.0 * std::min(p_le, p_ge));
    } else {
        res.exact = false;
        double mu = n * (n + 1) / 4.0;
        double var = n * (n + 1) * (2.0 * n + 1) / 24.0;
        // tie correction
        std::vector<double> sorted = mags;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j = i;
            while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
            double t = static_cast<double>(j - i + 1);
            if (t > 1.0) var -= (t * t * t - t) / 48.0;
            i = j + 1;
        }
        if (var <= 0.0) {
            res.p_two_sided = 1.0;
            return res;
        }
        double z = (w_plus - mu) / std::sqrt(var);
        res.p_two_sided = std::min(1.0, 2.0 * normal_sf(std::fabs(z)));
    }
    return res;
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("wilcoxon: samples must be paired");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return wilcoxon_signed_rank(d);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson: need paired samples, n >= 2");
    double mx = mean(x), my = mean(y);
    double cov = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - mx) * (y[i] - my);
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
    }
    if (vx <= 0.0 || vy <= 0.0) return 0.0;
    return cov / std::sqrt(vx * vy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(midranks(x), midranks(y));
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double sample_stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / (v.size() - 1));
}

}  // namespace fleet
