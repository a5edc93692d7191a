#pragma once

#include <vector>

namespace fleet {

struct WilcoxonResult {
    double w_plus = 0.0;       // sum of positive ranks
    double p_two_sided = 1.0;
    int n_effective = 0;       // non-zero differences
    bool exact = false;        // exact enumeration vs normal approximation
    bool ok = false;           // false when all differences are zero
};

/// Wilcoxon signed-rank test on paired differences. Zero differences are
/// dropped; ties receive midranks. Exact enumeration of the 2^n sign
/// assignments for n <= 20, normal approximation with tie correction beyond.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& differences);

/// Convenience overload for paired samples.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a,
                                    const std::vector<double>& b);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Spearman rank correlation (midranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);
double sample_stddev(const std::vector<double>& v);

}  // namespace fleet
