#include "sciagent/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace sciagent::metrics {

double rel_l2_error(std::span<const double> y_ref, std::span<const double> y_hat) {
    if (y_ref.size() != y_hat.size())
        throw LengthMismatch("rel_l2_error: lengths " + std::to_string(y_ref.size()) + " vs " +
                             std::to_string(y_hat.size()));
    if (y_ref.empty()) throw LengthMismatch("rel_l2_error: empty input");
    double num = 0, den = 0;
    for (std::size_t i = 0; i < y_ref.size(); ++i) {
        double d = y_hat[i] - y_ref[i];
        num += d * d;
        den += y_ref[i] * y_ref[i];
    }
    if (den == 0) throw ZeroReference("rel_l2_error: reference has zero norm");
    return std::sqrt(num / den);
}

double linf_error(std::span<const double> x_ref, std::span<const double> x_hat) {
    if (x_ref.size() != x_hat.size())
        throw LengthMismatch("linf_error: lengths " + std::to_string(x_ref.size()) + " vs " +
                             std::to_string(x_hat.size()));
    double m = 0;
    for (std::size_t i = 0; i < x_ref.size(); ++i) {
        double d = std::abs(x_hat[i] - x_ref[i]);
        if (std::isnan(d)) return d;
        m = std::max(m, d);
    }
    return m;
}

Completion classify_completion(double error, double threshold) {
    if (std::isnan(error) || std::isinf(error)) return Completion::contains_nan;
    return error < threshold ? Completion::below_threshold : Completion::over_threshold;
}

std::string to_string(Completion c) {
    switch (c) {
        case Completion::contains_nan: return "contains_nan";
        case Completion::over_threshold: return "over_threshold";
        case Completion::below_threshold: return "below_threshold";
    }
    return "?";
}

std::string to_string(ExecutionClass c) {
    switch (c) {
        case ExecutionClass::bug: return "bug";
        case ExecutionClass::nan_result: return "nan";
        case ExecutionClass::success: return "success";
    }
    return "?";
}

double execution_success_rate(std::span<const ExecutionClass> classifications) {
    if (classifications.empty()) throw EmptySample("execution_success_rate: empty sample");
    std::size_t ok = 0;
    for (auto c : classifications)
        if (c == ExecutionClass::success) ++ok;
    return static_cast<double>(ok) / static_cast<double>(classifications.size());
}

double solving_success_rate(std::span<const double> errors, double threshold) {
    if (errors.empty()) throw EmptySample("solving_success_rate: empty sample");
    std::size_t ok = 0;
    for (double e : errors)
        if (!std::isnan(e) && e < threshold) ++ok;
    return static_cast<double>(ok) / static_cast<double>(errors.size());
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw EmptySample("quantile: empty sample");
    double pos = p * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxStats box_stats(std::span<const double> errors) {
    std::vector<double> v;
    v.reserve(errors.size());
    std::size_t dropped = 0;
    for (double e : errors) {
        if (std::isnan(e)) {
            ++dropped;
        } else {
            v.push_back(e);
        }
    }
    if (v.empty()) throw EmptySample("box_stats: no finite entries");
    std::sort(v.begin(), v.end());

    BoxStats s;
    s.n = v.size();
    s.n_nan_excluded = dropped;
    double sum = 0;
    for (double e : v) sum += e;
    s.mean = sum / static_cast<double>(v.size());
    s.q1 = quantile_sorted(v, 0.25);
    s.median = quantile_sorted(v, 0.5);
    s.q3 = quantile_sorted(v, 0.75);
    double iqr = s.q3 - s.q1;
    double lo_fence = s.q1 - 1.5 * iqr;
    double hi_fence = s.q3 + 1.5 * iqr;
    s.whisker_low = v.front();
    s.whisker_high = v.back();
    for (double e : v) {
        if (e >= lo_fence) {
            s.whisker_low = e;
            break;
        }
    }
    for (auto it = v.rbegin(); it != v.rend(); ++it) {
        if (*it <= hi_fence) {
            s.whisker_high = *it;
            break;
        }
    }
    return s;
}

std::vector<double> regrid_1d(std::span<const double> x_from, std::span<const double> v_from,
                              std::span<const double> x_to) {
    if (x_from.size() != v_from.size() || x_from.empty())
        throw LengthMismatch("regrid_1d: bad source field");
    std::vector<double> out;
    out.reserve(x_to.size());
    for (double x : x_to) {
        if (x <= x_from.front()) {
            out.push_back(v_from.front());
            continue;
        }
        if (x >= x_from.back()) {
            out.push_back(v_from.back());
            continue;
        }
        auto it = std::upper_bound(x_from.begin(), x_from.end(), x);
        auto hi = static_cast<std::size_t>(it - x_from.begin());
        std::size_t lo = hi - 1;
        double t = (x - x_from[lo]) / (x_from[hi] - x_from[lo]);
        out.push_back(v_from[lo] + t * (v_from[hi] - v_from[lo]));
    }
    return out;
}

}  // namespace sciagent::metrics
