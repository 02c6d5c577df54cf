#include "rareval/studentized_range.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "rareval/error.hpp"

namespace rareval {
namespace {

using boost::math::quadrature::gauss_kronrod;

// Degrees of freedom above which the variance estimate is treated as exact.
constexpr double kLargeDf = 1e6;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// P(range of `groups` iid N(0,1) <= w). The integration variable is the
// largest of the draws.
double range_cdf(double w, int groups) {
  if (w <= 0.0) return 0.0;
  auto integrand = [&](double z) {
    const double inside = normal_cdf(z) - normal_cdf(z - w);
    if (inside <= 0.0) return 0.0;
    return normal_pdf(z) * std::pow(inside, groups - 1);
  };
  const double value = groups * gauss_kronrod<double, 31>::integrate(integrand, -8.5, 8.5, 15, 1e-12);
  return std::min(1.0, std::max(0.0, value));
}

void check_arguments(int groups, double df) {
  if (groups < 2) throw ConfigError("studentized range needs at least 2 groups");
  if (!(df > 0.0)) throw ConfigError("studentized range needs df > 0");
}

}  // namespace

double studentized_range_cdf(double q, int groups, double df) {
  check_arguments(groups, df);
  if (q <= 0.0) return 0.0;
  if (!std::isfinite(df) || df > kLargeDf) return range_cdf(q, groups);

  // s = sqrt(chi2_df / df) scales the range; integrate W(q s) against its
  // density over the range holding all but ~1e-15 of its mass.
  const boost::math::chi_squared chi2(df);
  const double lo = std::sqrt(boost::math::quantile(chi2, 1e-15) / df);
  const double hi = std::sqrt(boost::math::quantile(boost::math::complement(chi2, 1e-15)) / df);
  const double log_norm = std::log(2.0) + 0.5 * df * std::log(0.5 * df) - std::lgamma(0.5 * df);
  auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double log_density = log_norm + (df - 1.0) * std::log(s) - 0.5 * df * s * s;
    return std::exp(log_density) * range_cdf(q * s, groups);
  };
  double value = gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 15, 1e-11);
  // Mass below `lo` contributes at most 1e-15; above `hi` W is ~1.
  value += 1e-15 * range_cdf(q * hi, groups);
  return std::min(1.0, std::max(0.0, value));
}

double studentized_range_quantile(double p, int groups, double df) {
  check_arguments(groups, df);
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile probability must lie in (0, 1)");

  auto f = [&](double q) { return studentized_range_cdf(q, groups, df) - p; };
  double lo = 0.0;
  double hi = 4.0;
  while (f(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw UndefinedError("studentized range quantile did not bracket");
  }
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(40), max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

}  // namespace rareval
