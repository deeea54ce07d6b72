#include "pebblemark/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace pebblemark {

WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_interval: trials >= 1");
  double n = static_cast<double>(trials);
  double p = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2 * n)) / denom;
  double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  return WilsonInterval{std::max(0.0, center - half), std::min(1.0, center + half)};
}

double chi_square_stat(const std::vector<double>& observed, const std::vector<double>& expected) {
  if (observed.size() != expected.size()) throw std::invalid_argument("chi_square_stat: size mismatch");
  double stat = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0) throw std::invalid_argument("chi_square_stat: nonpositive expected count");
    double d = observed[i] - expected[i];
    stat += d * d / expected[i];
  }
  return stat;
}

TwoSampleChiSquare two_sample_chi_square(const std::vector<std::uint64_t>& a,
                                         const std::vector<std::uint64_t>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("two_sample_chi_square: size mismatch");
  double total_a = 0, total_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total_a += static_cast<double>(a[i]);
    total_b += static_cast<double>(b[i]);
  }
  if (total_a == 0 || total_b == 0) throw std::invalid_argument("two_sample_chi_square: empty sample");
  double grand = total_a + total_b;
  TwoSampleChiSquare out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double cell = static_cast<double>(a[i] + b[i]);
    if (cell == 0) continue;
    double ea = cell * total_a / grand;
    double eb = cell * total_b / grand;
    double da = a[i] - ea, db = b[i] - eb;
    out.stat += da * da / ea + db * db / eb;
    ++out.df;
  }
  if (out.df > 0) --out.df;
  return out;
}

double chi_square_critical_01(std::uint32_t df) {
  static const double kCritical[64] = {
      6.634897, 9.210340, 11.344867, 13.276704,
      15.086272, 16.811894, 18.475307, 20.090235,
      21.665994, 23.209251, 24.724970, 26.216967,
      27.688250, 29.141238, 30.577914, 31.999927,
      33.408664, 34.805306, 36.190869, 37.566235,
      38.932173, 40.289360, 41.638398, 42.979820,
      44.314105, 45.641683, 46.962942, 48.278236,
      49.587884, 50.892181, 52.191395, 53.485772,
      54.775540, 56.060909, 57.342073, 58.619215,
      59.892500, 61.162087, 62.428121, 63.690740,
      64.950071, 66.206236, 67.459348, 68.709513,
      69.956832, 71.201400, 72.443307, 73.682639,
      74.919474, 76.153891, 77.385962, 78.615756,
      79.843338, 81.068772, 82.292117, 83.513430,
      84.732766, 85.950176, 87.165711, 88.379419,
      89.591344, 90.801532, 92.010024, 93.216860,
  };
  if (df < 1 || df > 64) throw std::out_of_range("chi_square_critical_01: df in [1, 64]");
  return kCritical[df - 1];
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 points");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) throw std::invalid_argument("fit_slope: degenerate x values");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace pebblemark
