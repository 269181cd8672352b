#pragma once

// Independent reference implementations for tests only. Each one reaches a
// quantity the library computes, by a different route: polynomial
// companion-matrix roots instead of Newton searches, bitwise Pauli action
// instead of explicit Kronecker blocks, plain high-resolution phase sums
// instead of adaptive contour refinement.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "xyep/quasimomentum.hpp"
#include "xyep/topology.hpp"
#include "xyep/types.hpp"

namespace oracle {

using xyep::cplx;

// roots of c[0] + c[1] z + ... + c[n] z^n via the companion matrix
inline std::vector<cplx> poly_roots(std::vector<cplx> c) {
  while (!c.empty() && std::abs(c.back()) == 0.0) c.pop_back();
  if (c.size() < 2) throw std::invalid_argument("polynomial must have degree >= 1");
  const std::size_t n = c.size() - 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) m(i + 1, i) = 1.0;
  for (std::size_t i = 0; i < n; ++i) m(i, n - 1) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  std::vector<cplx> roots(n);
  for (std::size_t i = 0; i < n; ++i) roots[i] = es.eigenvalues()(i);
  return roots;
}

// Dense Hamiltonian of -sum_j (sx_j sx_{j+1} + lambda sy_j sy_{j+1}) acting
// on bit strings: both bond terms flip the two bits, the sy sy term with a
// sign depending on whether the bits agreed.
inline Eigen::MatrixXcd ed_matrix(int L, cplx lambda) {
  if (L < 2 || L > 14) throw std::invalid_argument("oracle ED limited to 2 <= L <= 14");
  const std::size_t dim = std::size_t(1) << L;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t s = 0; s < dim; ++s)
    for (int j = 0; j + 1 < L; ++j) {
      const std::size_t t = s ^ ((std::size_t(1) << j) | (std::size_t(1) << (j + 1)));
      const bool differ = (((s >> j) ^ (s >> (j + 1))) & 1) != 0;
      h(t, s) += -1.0;                                    // sx sx
      h(t, s) += -lambda * (differ ? 1.0 : -1.0);         // sy sy
    }
  return h;
}

inline std::vector<cplx> ed_spectrum(int L, cplx lambda) {
  const Eigen::MatrixXcd h = ed_matrix(L, lambda);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h, false);
  std::vector<cplx> e(es.eigenvalues().data(), es.eigenvalues().data() + h.rows());
  std::sort(e.begin(), e.end(), xyep::complex_less);
  return e;
}

// All 2L nontrivial roots of the quasi-momentum condition for one branch,
// as quasi-energies: v^{2L+4} + s (v^{2L+2} - v^2) - 1 = 0 with s the
// branch coupling, each of the L/2 orbits {v, -v, 1/v, -1/v} contributing
// its eps value four times.
inline std::vector<cplx> branch_eps_multiset(int L, cplx lambda, xyep::Branch b) {
  const cplx s = xyep::branch_lambda(lambda, b);
  std::vector<cplx> c(2 * L + 5, cplx(0.0));
  c[2 * L + 4] = 1.0;
  c[2 * L + 2] = s;
  c[2] = -s;
  c[0] = -1.0;
  std::vector<cplx> eps;
  for (const cplx& v : poly_roots(c)) {
    if (std::abs(v - 1.0) < 1e-6 || std::abs(v + 1.0) < 1e-6 || std::abs(v - cplx(0, 1)) < 1e-6 ||
        std::abs(v + cplx(0, 1)) < 1e-6)
      continue;  // the four roots present for every lambda
    const cplx k = -cplx(0, 1) * std::log(v);
    eps.push_back(xyep::eps_lambda_from_k(k, lambda));
  }
  if (eps.size() != std::size_t(2 * L))
    throw std::runtime_error("oracle root count off; lambda too close to a trivial point");
  std::sort(eps.begin(), eps.end(), xyep::complex_less);
  return eps;
}

// Exceptional anisotropies of the plus branch from the elimination
// polynomial z^{2N} - N z^{N+1} + N z^{N-1} - 1, N = L+1, z = e^{2ik};
// z = +-1 are triple roots and map to the trivial points.
inline std::vector<cplx> ep_lambdas_plus(int L) {
  const int N = L + 1;
  std::vector<cplx> c(2 * N + 1, cplx(0.0));
  c[2 * N] = 1.0;
  c[N + 1] = -double(N);
  c[N - 1] = double(N);
  c[0] = -1.0;
  std::vector<cplx> lambdas;
  for (const cplx& z : poly_roots(c)) {
    if (std::abs(z - 1.0) < 1e-3 || std::abs(z + 1.0) < 1e-3) continue;
    const cplx k = -cplx(0, 0.5) * std::log(z);
    const cplx lam = -std::sin(double(L + 2) * k) / std::sin(double(L) * k);
    bool dup = false;
    for (const cplx& u : lambdas)
      if (std::abs(u - lam) < 1e-7) {
        dup = true;
        break;
      }
    if (!dup) lambdas.push_back(lam);
  }
  std::sort(lambdas.begin(), lambdas.end(), xyep::complex_less);
  return lambdas;
}

// plain fixed-resolution phase accumulation, no adaptivity
inline int winding_brute(cplx lambda, int n = 16384) {
  double total = 0.0;
  cplx prev = xyep::bloch_symbol(0.0, lambda);
  for (int i = 1; i <= n; ++i) {
    const cplx cur = xyep::bloch_symbol(2.0 * xyep::pi * i / n, lambda);
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * xyep::pi)));
}

}  // namespace oracle
