#include "thematic/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "thematic/error.hpp"

namespace thematic::stats {
namespace {

constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;

// lgamma(x) - Stirling's approximation, for x >= 10.
double stirling_correction(double x) {
  // Bernoulli-number series B_{2k} / (2k (2k-1) x^{2k-1}).
  constexpr double c[] = {1.0 / 12.0,          -1.0 / 360.0,     1.0 / 1260.0, -1.0 / 1680.0,
                          1.0 / 1188.0,        -691.0 / 360360.0, 1.0 / 156.0,  -3617.0 / 122400.0};
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double sum = 0;
  double power = inv;
  for (double coef : c) {
    const double term = coef * power;
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    power *= inv2;
  }
  return sum;
}

// Continued fraction for I_x(a, b); converges for x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw DomainError(fmt::format("incomplete beta continued fraction did not converge (x={}, a={}, b={})", x, a, b));
}

// I_x(a, b) with y = 1 - x supplied separately to avoid cancellation.
double incomplete_beta_xy(double x, double y, double a, double b) {
  if (x <= 0) return 0.0;
  if (y <= 0) return 1.0;
  const double log_front = a * std::log(x) + b * std::log(y) - log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(log_front) * beta_continued_fraction(x, a, b) / a;
  return 1.0 - std::exp(log_front) * beta_continued_fraction(y, b, a) / b;
}

void check_df(double df) {
  if (!(df > 0) || !std::isfinite(df))
    throw DomainError(fmt::format("degrees of freedom must be positive and finite (got {})", df));
}

// P(T <= -|t|), computed without subtracting from 1.
double t_lower_tail(double abs_t, double df) {
  const double t2 = abs_t * abs_t;
  const double denom = df + t2;
  return 0.5 * incomplete_beta_xy(df / denom, t2 / denom, 0.5 * df, 0.5);
}

}  // namespace

double log_beta(double a, double b) {
  if (!(a > 0) || !(b > 0)) throw DomainError("log_beta requires positive arguments");
  const double p = std::min(a, b);
  const double q = std::max(a, b);
  if (p >= 10.0) {
    const double corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(p + q);
    return -0.5 * std::log(q) + kLnSqrt2Pi + corr + (p - 0.5) * std::log(p / (p + q)) + q * std::log1p(-p / (p + q));
  }
  if (q >= 10.0) {
    const double corr = stirling_correction(q) - stirling_correction(p + q);
    return std::lgamma(p) + corr + p - p * std::log(p + q) + (q - 0.5) * std::log1p(-p / (p + q));
  }
  return std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
}

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0) || !(b > 0)) throw DomainError("incomplete_beta requires a, b > 0");
  if (!(x >= 0 && x <= 1)) throw DomainError(fmt::format("incomplete_beta requires 0 <= x <= 1 (got {})", x));
  return incomplete_beta_xy(x, 1.0 - x, a, b);
}

double t_cdf(double t, double df) {
  check_df(df);
  if (std::isnan(t)) throw DomainError("t_cdf of NaN");
  if (t == 0) return 0.5;
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = t_lower_tail(std::fabs(t), df);
  return t < 0 ? tail : 1.0 - tail;
}

double t_quantile(double prob, double df) {
  check_df(df);
  if (!(prob > 0 && prob < 1)) throw DomainError(fmt::format("t_quantile requires 0 < p < 1 (got {})", prob));
  if (prob == 0.5) return 0.0;

  // Solve on the lower tail for precision, then reflect.
  const double target = std::min(prob, 1.0 - prob);
  double lo = -1.0;
  while (t_cdf(lo, df) > target) {
    lo *= 2.0;
    if (lo < -1e300) break;
  }
  double hi = 0.0;
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (t_cdf(mid, df) < target) lo = mid;
    else hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, std::fabs(mid))) break;
  }
  const double q = 0.5 * (lo + hi);
  return prob < 0.5 ? q : -q;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw ValidationError("mean of an empty sample");
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0;
  double comp = 0;
  for (double x : xs) {
    ss += (x - m) * (x - m);
    comp += x - m;
  }
  const double n = static_cast<double>(xs.size());
  return std::max(0.0, (ss - comp * comp / n) / (n - 1.0));
}

double median(std::span<const double> xs) {
  if (xs.empty()) throw ValidationError("median of an empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string_view to_string(Alternative alt) noexcept {
  return alt == Alternative::fake_greater ? "fake_greater" : "two_sided";
}

std::optional<Alternative> parse_alternative(std::string_view text) {
  if (text == "fake_greater") return Alternative::fake_greater;
  if (text == "two_sided") return Alternative::two_sided;
  return std::nullopt;
}

std::string_view to_string(VarianceMode mode) noexcept { return mode == VarianceMode::welch ? "welch" : "pooled"; }

std::optional<VarianceMode> parse_variance_mode(std::string_view text) {
  if (text == "welch") return VarianceMode::welch;
  if (text == "pooled") return VarianceMode::pooled;
  return std::nullopt;
}

TTestResult welch_t_test(std::span<const double> sample_f, std::span<const double> sample_r, Alternative alternative,
                         VarianceMode variance) {
  const std::size_t nf = sample_f.size();
  const std::size_t nr = sample_r.size();
  if (nf < 2 || nr < 2)
    throw ValidationError(fmt::format("t-test needs at least 2 values per sample (got {} and {})", nf, nr));

  const double mf = mean(sample_f);
  const double mr = mean(sample_r);
  const double vf = sample_variance(sample_f);
  const double vr = sample_variance(sample_r);
  if (vf == 0 && vr == 0) throw ValidationError("t-test undefined: both samples have zero variance");

  const double n1 = static_cast<double>(nf);
  const double n2 = static_cast<double>(nr);
  TTestResult res;
  res.n_f = nf;
  res.n_r = nr;
  res.alternative = alternative;
  res.variance = variance;
  if (variance == VarianceMode::welch) {
    const double a = vf / n1;
    const double b = vr / n2;
    res.t = (mf - mr) / std::sqrt(a + b);
    res.df = (a + b) * (a + b) / (a * a / (n1 - 1.0) + b * b / (n2 - 1.0));
  } else {
    const double pooled = ((n1 - 1.0) * vf + (n2 - 1.0) * vr) / (n1 + n2 - 2.0);
    res.t = (mf - mr) / std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
    res.df = n1 + n2 - 2.0;
  }

  double p = alternative == Alternative::fake_greater ? t_cdf(-res.t, res.df) : 2.0 * t_cdf(-std::fabs(res.t), res.df);
  // Keep p inside (0, 1) when the tail underflows.
  res.p = std::clamp(p, std::numeric_limits<double>::min(), 1.0);
  return res;
}

double mean_ci_half_width(std::span<const double> sample, double level) {
  if (!(level > 0 && level < 1)) throw ConfigError(fmt::format("confidence level must be in (0, 1) (got {})", level));
  if (sample.size() < 2) return 0.0;
  const double s = std::sqrt(sample_variance(sample));
  if (s == 0) return 0.0;
  const double n = static_cast<double>(sample.size());
  return t_quantile(0.5 * (1.0 + level), n - 1.0) * s / std::sqrt(n);
}

std::pair<double, double> mean_ci(std::span<const double> sample, double level) {
  if (sample.size() < 2)
    throw ValidationError(fmt::format("confidence interval needs at least 2 values (got {})", sample.size()));
  const double m = mean(sample);
  const double h = mean_ci_half_width(sample, level);
  return {m - h, m + h};
}

}  // namespace thematic::stats
