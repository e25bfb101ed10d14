#pragma once

#include <span>
#include <string>
#include <vector>

#include "sciagent/error.hpp"

namespace sciagent::metrics {

struct LengthMismatch : Error {
    using Error::Error;
};
struct ZeroReference : Error {
    using Error::Error;
};
struct EmptySample : Error {
    using Error::Error;
};

// sqrt( sum_i (y_hat_i - y_ref_i)^2 / sum_i y_ref_i^2 )
double rel_l2_error(std::span<const double> y_ref, std::span<const double> y_hat);

// max_i |x_hat_i - x_ref_i|; NaN entries propagate.
double linf_error(std::span<const double> x_ref, std::span<const double> x_hat);

enum class Completion { contains_nan, over_threshold, below_threshold };
Completion classify_completion(double error, double threshold);
std::string to_string(Completion c);

enum class ExecutionClass { bug, nan_result, success };
std::string to_string(ExecutionClass c);

// Fraction of runs classified success.
double execution_success_rate(std::span<const ExecutionClass> classifications);

// Fraction of errors strictly below threshold; NaN entries never count.
double solving_success_rate(std::span<const double> errors, double threshold);

// Box-plot summary: quartiles by linear interpolation between order
// statistics, whiskers at the most extreme data within 1.5*IQR of the
// quartiles. NaN entries are dropped (and counted) before aggregation.
struct BoxStats {
    double mean = 0;
    double q1 = 0;
    double median = 0;
    double q3 = 0;
    double whisker_low = 0;
    double whisker_high = 0;
    std::size_t n = 0;
    std::size_t n_nan_excluded = 0;
};
BoxStats box_stats(std::span<const double> errors);

// Quantile of a sorted sample by linear interpolation, p in [0,1].
double quantile_sorted(std::span<const double> sorted, double p);

// Regridding policy used before applying the error metric when candidate and
// reference grids differ: linear in 1D, bilinear in 2D, with clamping to the
// candidate hull (nearest-value fallback outside it).
std::vector<double> regrid_1d(std::span<const double> x_from, std::span<const double> v_from,
                              std::span<const double> x_to);

}  // namespace sciagent::metrics
