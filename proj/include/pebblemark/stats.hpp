#pragma once

#include <cstdint>
#include <vector>

namespace pebblemark {

struct WilsonInterval {
  double low = 0;
  double high = 0;
};

/// Wilson score interval for a binomial proportion at z standard deviations
/// (default 95%).
WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

/// Pearson statistic against explicit expected counts.
double chi_square_stat(const std::vector<double>& observed, const std::vector<double>& expected);

/// Two-sample homogeneity statistic over aligned histograms; df = cells - 1.
/// Cells empty in both samples are skipped.
struct TwoSampleChiSquare {
  double stat = 0;
  std::uint32_t df = 0;
};
TwoSampleChiSquare two_sample_chi_square(const std::vector<std::uint64_t>& a,
                                         const std::vector<std::uint64_t>& b);

/// Upper critical value of the chi-square distribution at significance 0.01,
/// df in [1, 64].
double chi_square_critical_01(std::uint32_t df);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pebblemark
