#pragma once

// Large-L behaviour of the EP rings: as L grows both rings collapse onto the
// unit circle and the EP anisotropies approach the Lth roots of unity with
// -1 and +1 excluded. This module predicts those limits and measures how
// fast a finite chain approaches them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ep_finder.hpp"

namespace xyep {

// e^{2 pi i j / L} for j = 1..L-1 skipping j = L/2: L-2 predicted limits.
inline std::vector<cplx> roots_of_unity_prediction(int L) {
  if (L < 4 || L % 2 != 0)
    throw std::invalid_argument("prediction defined for even L >= 4");
  std::vector<cplx> out;
  out.reserve(L - 2);
  for (int j = 1; j < L; ++j) {
    if (j == L / 2) continue;
    const double th = 2.0 * pi * j / L;
    out.emplace_back(std::cos(th), std::sin(th));
  }
  return out;
}

struct RingConvergenceReport {
  int L = 0;
  double inner_max_dev = 0.0;  // max |lambda_EP - nearest prediction|, inner ring
  double outer_max_dev = 0.0;
  double inner_radial_dev = 0.0;  // max | |lambda_EP| - 1 | per ring
  double outer_radial_dev = 0.0;
  bool inner_all_inside = true;   // every inner-ring EP strictly inside |lambda| = 1
  bool outer_all_outside = true;  // every outer-ring EP strictly outside
  std::vector<double> predicted_angles;  // 2 pi j / L, j = 1..L-1, j != L/2
  std::vector<double> angle_errors;      // per record, wrapped angular distance
  std::vector<std::uint8_t> matched;     // angle error within pi/L
  std::vector<EpRecord> records;         // census underlying the report
};

namespace detail {

inline double wrap_angle_abs(double a) {
  a = std::fmod(std::fabs(a), 2.0 * pi);
  return a > pi ? 2.0 * pi - a : a;
}

}  // namespace detail

// Match every EP of the census to the angularly nearest predicted root of
// unity and record the flat distances. A record whose angular error exceeds
// pi / L is flagged unmatched but still contributes to the deviation.
inline RingConvergenceReport convergence_report(int L, int threads = 0) {
  RingConvergenceReport rep;
  rep.L = L;
  EpFinderOptions opt;
  opt.threads = threads;
  rep.records = find_eps(L, opt);
  const std::vector<cplx> predicted = roots_of_unity_prediction(L);
  rep.predicted_angles.reserve(predicted.size());
  for (const cplx& z : predicted) {
    double a = std::arg(z);
    if (a < 0.0) a += 2.0 * pi;
    rep.predicted_angles.push_back(a);
  }
  rep.angle_errors.reserve(rep.records.size());
  rep.matched.reserve(rep.records.size());
  for (const EpRecord& r : rep.records) {
    double best_angle = std::numeric_limits<double>::infinity();
    double best_dev = std::numeric_limits<double>::infinity();
    for (const cplx& z : predicted) {
      const double da = detail::wrap_angle_abs(std::arg(r.lambda_ep) - std::arg(z));
      if (da < best_angle) {
        best_angle = da;
        best_dev = std::abs(r.lambda_ep - z);
      }
    }
    rep.angle_errors.push_back(best_angle);
    rep.matched.push_back(best_angle <= pi / L ? 1 : 0);
    double& dev = r.ring == Ring::inner ? rep.inner_max_dev : rep.outer_max_dev;
    dev = std::max(dev, best_dev);
    const double radius = std::abs(r.lambda_ep);
    if (r.ring == Ring::inner) {
      rep.inner_radial_dev = std::max(rep.inner_radial_dev, std::fabs(radius - 1.0));
      if (!(radius < 1.0)) rep.inner_all_inside = false;
    } else {
      rep.outer_radial_dev = std::max(rep.outer_radial_dev, std::fabs(radius - 1.0));
      if (!(radius > 1.0)) rep.outer_all_outside = false;
    }
  }
  return rep;
}

struct ConvergenceSeries {
  std::vector<RingConvergenceReport> reports;
  double inner_slope = 0.0;  // least-squares slope of log(max dev) vs log(L)
  double outer_slope = 0.0;
};

inline ConvergenceSeries convergence_series(const std::vector<int>& Ls, int threads = 0) {
  if (Ls.empty()) throw std::invalid_argument("at least one chain length required");
  ConvergenceSeries s;
  s.reports.reserve(Ls.size());
  for (int L : Ls) s.reports.push_back(convergence_report(L, threads));
  if (Ls.size() >= 2) {
    auto slope = [&](bool inner) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (const auto& r : s.reports) {
        const double dev = inner ? r.inner_max_dev : r.outer_max_dev;
        const double x = std::log(double(r.L)), y = std::log(std::max(dev, 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double n = double(s.reports.size());
      return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    s.inner_slope = slope(true);
    s.outer_slope = slope(false);
  }
  return s;
}

}  // namespace xyep
