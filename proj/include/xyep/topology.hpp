#pragma once

// Winding-number phase diagram. The open-chain EP rings shadow the
// topological transition of the periodic symbol h(k) = e^{ik} + lambda
// e^{-ik}: its winding around the origin as k sweeps [0, 2pi) is +1 inside
// the unit disc of lambda and -1 outside, flipping exactly on |lambda| = 1
// where h passes through zero.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ep_finder.hpp"
#include "parallel.hpp"
#include "types.hpp"

namespace xyep {

inline cplx bloch_symbol(double k, cplx lambda) {
  return std::exp(cplx(0.0, k)) + lambda * std::exp(cplx(0.0, -k));
}

struct PhaseSample {
  cplx lambda{0.0, 0.0};
  int w = 0;              // winding number; 0 only for indeterminate boundary samples
  int samples_used = 0;   // symbol evaluations including adaptive refinement
  bool boundary = false;  // ||lambda| - 1| within the boundary band, or winding failed
};

namespace detail {

// phase increment between two symbol values, bisecting whenever the jump is
// too large to unwrap safely
inline double phase_step(cplx h0, cplx h1, double k0, double k1, cplx lambda, int depth,
                         int& evals) {
  const double zero_tol = 1e-12 * (1.0 + std::abs(lambda));
  if (std::abs(h0) < zero_tol || std::abs(h1) < zero_tol)
    throw numerical_error("symbol vanishes on the contour; winding undefined at |lambda| = 1");
  const double d = std::arg(h1 / h0);
  if (std::abs(d) <= pi / 2.0) return d;
  if (depth >= 48)
    throw numerical_error("winding refinement exceeded depth limit near lambda = " +
                          std::to_string(lambda.real()) + "+" + std::to_string(lambda.imag()) +
                          "i");
  const double km = 0.5 * (k0 + k1);
  const cplx hm = bloch_symbol(km, lambda);
  ++evals;
  return phase_step(h0, hm, k0, km, lambda, depth + 1, evals) +
         phase_step(hm, h1, km, k1, lambda, depth + 1, evals);
}

}  // namespace detail

inline PhaseSample winding_number(cplx lambda, int n_k = 256) {
  if (n_k < 64) throw std::invalid_argument("winding contour needs at least 64 samples");
  PhaseSample out;
  out.lambda = lambda;
  out.boundary = std::abs(std::abs(lambda) - 1.0) <= 1e-3;
  std::vector<cplx> h(n_k);
  for (int i = 0; i < n_k; ++i) h[i] = bloch_symbol(2.0 * pi * i / n_k, lambda);
  int evals = n_k;
  double total = 0.0;
  for (int i = 0; i < n_k; ++i) {
    const double k0 = 2.0 * pi * i / n_k;
    const double k1 = 2.0 * pi * (i + 1) / n_k;
    total += detail::phase_step(h[i], h[(i + 1) % n_k], k0, k1, lambda, 0, evals);
  }
  const double turns = total / (2.0 * pi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) >= 0.01)
    throw numerical_error("winding number failed to quantize: residual " +
                          std::to_string(std::abs(turns - rounded)));
  out.w = static_cast<int>(rounded);
  out.samples_used = evals;
  return out;
}

// Winding over a complex-lambda grid, row-major iy * nx + ix. Samples where
// the contour hits a zero of the symbol come back with w = 0 and the
// boundary flag set instead of failing the whole sweep.
inline std::vector<PhaseSample> phase_diagram(const GridSpec& grid, int n_k = 256,
                                              int threads = 0) {
  grid.validate();
  if (n_k < 64) throw std::invalid_argument("winding contour needs at least 64 samples");
  const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
  std::vector<PhaseSample> out(n);
  parallel_for(n, threads, [&](std::size_t cell) {
    const int ix = static_cast<int>(cell) % grid.nx;
    const int iy = static_cast<int>(cell) / grid.nx;
    const cplx lambda(grid.re_at(ix), grid.im_at(iy));
    try {
      out[cell] = winding_number(lambda, n_k);
    } catch (const numerical_error&) {
      out[cell].lambda = lambda;
      out[cell].w = 0;
      out[cell].samples_used = 0;
      out[cell].boundary = true;
    }
  });
  return out;
}

}  // namespace xyep
