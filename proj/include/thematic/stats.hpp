#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>

namespace thematic::stats {

// log B(a, b), accurate when one or both arguments are large.
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a, b), via the continued fraction of
// Numerical Recipes evaluated with the modified Lentz method. Throws
// DomainError for a, b <= 0 or x outside [0, 1].
double incomplete_beta(double x, double a, double b);

// Student-t cumulative distribution P(T <= t) with `df` degrees of freedom.
// Throws DomainError for df <= 0 or non-finite df.
double t_cdf(double t, double df);

// Inverse of t_cdf, found by bisection. `prob` must lie in (0, 1).
double t_quantile(double prob, double df);

double mean(std::span<const double> xs);

// Unbiased (n - 1) sample variance; 0 for n < 2.
double sample_variance(std::span<const double> xs);

// Middle element for odd n, mean of the two middle elements for even n.
// Throws ValidationError on an empty sample.
double median(std::span<const double> xs);

enum class Alternative { fake_greater, two_sided };
enum class VarianceMode { welch, pooled };

std::string_view to_string(Alternative alt) noexcept;
std::optional<Alternative> parse_alternative(std::string_view text);
std::string_view to_string(VarianceMode mode) noexcept;
std::optional<VarianceMode> parse_variance_mode(std::string_view text);

struct TTestResult {
  double t = 0;
  double df = 0;
  double p = 0;
  std::size_t n_f = 0;
  std::size_t n_r = 0;
  Alternative alternative = Alternative::fake_greater;
  VarianceMode variance = VarianceMode::welch;
};

// Two-sample t-test of mean(sample_f) against mean(sample_r).
//
// With the default one-tailed alternative, a small p means the first
// sample's mean is significantly greater. Throws ValidationError if either
// sample has fewer than two values or both have zero variance.
TTestResult welch_t_test(std::span<const double> sample_f, std::span<const double> sample_r,
                         Alternative alternative = Alternative::fake_greater,
                         VarianceMode variance = VarianceMode::welch);

// Half-width of the two-sided `level` confidence interval for the mean:
// t_{(1+level)/2, n-1} * s / sqrt(n). Zero when n < 2 or s = 0.
double mean_ci_half_width(std::span<const double> sample, double level = 0.95);

// (lo, hi) confidence interval for the mean. Throws ValidationError for
// n < 2, ConfigError unless 0 < level < 1.
std::pair<double, double> mean_ci(std::span<const double> sample, double level = 0.95);

}  // namespace thematic::stats
