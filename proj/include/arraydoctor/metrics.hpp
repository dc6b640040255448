#pragma once

#include <arraydoctor/core.hpp>

#include <algorithm>
#include <numeric>
#include <optional>

namespace arraydoctor {

/// ||v - v_hat||^2 / ||v||^2, linear.
inline double nmse(const CVector& v, const CVector& v_hat) {
    require_same_size(v.size(), v_hat.size(), "nmse");
    const double denom = v.squaredNorm();
    if (!(denom > 0.0)) throw UndefinedMetricError("NMSE is undefined for a zero reference vector");
    return (v - v_hat).squaredNorm() / denom;
}

inline double nmse_db(const CVector& v, const CVector& v_hat) { return linear_to_db(nmse(v, v_hat)); }

struct SupportComparison {
    bool exact = true;
    Index false_positives = 0;
    Index false_negatives = 0;

    /// No missed faults; false alarms allowed.
    bool no_misses() const { return false_negatives == 0; }
};

/// Both sets must be sorted.
inline SupportComparison compare_support(const IndexSet& truth, const IndexSet& estimate) {
    SupportComparison out;
    std::size_t i = 0, j = 0;
    while (i < truth.size() || j < estimate.size()) {
        if (j == estimate.size() || (i < truth.size() && truth[i] < estimate[j])) {
            ++out.false_negatives;
            ++i;
        } else if (i == truth.size() || estimate[j] < truth[i]) {
            ++out.false_positives;
            ++j;
        } else {
            ++i;
            ++j;
        }
    }
    out.exact = out.false_positives == 0 && out.false_negatives == 0;
    return out;
}

/// Per-trial outcome. nmse_linear is empty for fault-free trials, which are
/// excluded from NMSE aggregation.
struct TrialOutcome {
    std::optional<double> nmse_linear;
    SupportComparison support;
    bool failed = false;  // the diagnosis raised; scored as v_hat = 0 and no detection
};

inline TrialOutcome success(const IndexSet& truth, const IndexSet& estimate) {
    TrialOutcome t;
    t.support = compare_support(truth, estimate);
    return t;
}

struct Summary {
    Index count = 0;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    double stderr_mean = std::numeric_limits<double>::quiet_NaN();
};

/// Mean, median and standard error of the mean. Deterministic for a given
/// input order; the median sorts a copy.
inline Summary summarize(std::vector<double> values) {
    Summary s;
    s.count = static_cast<Index>(values.size());
    if (values.empty()) return s;
    const double n = static_cast<double>(values.size());
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stderr_mean = std::sqrt(ss / (n - 1.0) / n);
    } else {
        s.stderr_mean = 0.0;
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    return s;
}

struct Proportion {
    Index trials = 0;
    double rate = std::numeric_limits<double>::quiet_NaN();
    double stderr_rate = std::numeric_limits<double>::quiet_NaN();
};

/// Success rate with its binomial standard error.
inline Proportion proportion(Index successes, Index trials) {
    Proportion p;
    p.trials = trials;
    if (trials <= 0) return p;
    p.rate = static_cast<double>(successes) / static_cast<double>(trials);
    p.stderr_rate = std::sqrt(p.rate * (1.0 - p.rate) / static_cast<double>(trials));
    return p;
}

}  // namespace arraydoctor
