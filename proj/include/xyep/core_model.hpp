#pragma once

// Model definition and the two independent spectrum pipelines:
//  * free fermions: quasi-energies from the L x L coupling matrix, full
//    spectrum from all 2^L sign combinations;
//  * brute force: dense exact diagonalization of the 2^L x 2^L Hamiltonian
//    built from explicit Pauli tensor products.
// The second exists to keep the first honest.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "types.hpp"

namespace xyep {

// Superdiagonal 1, subdiagonal lambda; quasi-energies are the canonical
// square roots of the eigenvalues of C^T C.
inline Eigen::MatrixXcd build_c_matrix(const ModelParams& p) {
  p.validate();
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(p.L, p.L);
  for (int j = 0; j + 1 < p.L; ++j) {
    c(j, j + 1) = 1.0;
    c(j + 1, j) = p.lambda;
  }
  return c;
}

struct SublatticeBlocks {
  Eigen::MatrixXcd odd;   // 1-based sites 1,3,5,...
  Eigen::MatrixXcd even;  // 1-based sites 2,4,6,...
};

// C^T C couples site a only to a+-2, so it decouples over the sublattices:
// (C^T C)_aa = [a>=2] + lambda^2 [a<=L-1], (C^T C)_{a,a+2} = lambda (1-based).
inline SublatticeBlocks sublattice_blocks(const ModelParams& p) {
  p.validate();
  const int m_odd = (p.L + 1) / 2;
  const int m_even = p.L / 2;
  const cplx l2 = p.lambda * p.lambda;
  SublatticeBlocks b{Eigen::MatrixXcd::Zero(m_odd, m_odd),
                     Eigen::MatrixXcd::Zero(m_even, m_even)};
  auto fill = [&](Eigen::MatrixXcd& blk, int first) {
    const int m = static_cast<int>(blk.rows());
    for (int i = 0; i < m; ++i) {
      const int a = first + 2 * i;
      blk(i, i) = (a >= 2 ? cplx(1.0) : cplx(0.0)) + (a <= p.L - 1 ? l2 : cplx(0.0));
      if (i + 1 < m) {
        blk(i, i + 1) = p.lambda;
        blk(i + 1, i) = p.lambda;
      }
    }
  };
  fill(b.odd, 1);
  fill(b.even, 2);
  return b;
}

inline Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eigensolve_dense(
    const Eigen::MatrixXcd& m, bool with_vectors, const ModelParams& p, const char* what) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, with_vectors);
  if (es.info() != Eigen::Success)
    throw numerical_error(std::string("eigensolver did not converge on ") + what +
                          " at L=" + std::to_string(p.L) + ", lambda=(" +
                          std::to_string(p.lambda.real()) + "," +
                          std::to_string(p.lambda.imag()) + ")");
  return es;
}

// Quasi-energies from the matrix route. Note the plain transpose: C^T C is
// complex symmetric, not Hermitian, and that is essential — the adjoint
// would force real a_j and erase every exceptional point.
inline QuasiEnergySet quasi_energies_matrix(const ModelParams& p) {
  p.validate();
  const Eigen::MatrixXcd c = build_c_matrix(p);
  const Eigen::MatrixXcd m = c.transpose() * c;
  const auto es = eigensolve_dense(m, true, p, "C^T C");

  const int L = p.L;
  QuasiEnergySet q;
  q.L = L;
  q.source = EpsSource::matrix;
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j)
      if (std::abs(es.eigenvalues()(i) - es.eigenvalues()(j)) < 1e-10) q.near_degenerate = true;

  // Sector from the eigenvector's sublattice support; the blocks decouple,
  // so away from degeneracies the support sits entirely on one parity.
  struct Mode {
    cplx eps;
    int label;  // 0 even, 1 odd, -1 ambiguous
  };
  std::vector<Mode> modes(L);
  int n_even = 0, n_odd = 0;
  for (int j = 0; j < L; ++j) {
    modes[j].eps = canonical_sqrt(es.eigenvalues()(j));
    double s_even = 0.0, s_all = 0.0;
    for (int i = 0; i < L; ++i) {
      const double w = std::norm(es.eigenvectors()(i, j));
      s_all += w;
      if (i % 2 == 1) s_even += w;  // 0-based row i is 1-based site i+1
    }
    const double frac = s_all > 0.0 ? s_even / s_all : 0.5;
    modes[j].label = frac > 0.75 ? 0 : (frac < 0.25 ? 1 : -1);
    if (modes[j].label == 0) ++n_even;
    if (modes[j].label == 1) ++n_odd;
  }

  const int m_even = L / 2, m_odd = (L + 1) / 2;
  const bool ambiguous = n_even + n_odd < L || n_even != m_even || n_odd != m_odd;
  if (ambiguous) {
    // Degenerate eigenvectors can mix the sectors. Fall back to pairing the
    // sorted full-matrix values against the sorted per-block values, whose
    // sector is known by construction; this also pins the L/2 + L/2 split.
    const SublatticeBlocks blocks = sublattice_blocks(p);
    std::vector<std::pair<cplx, int>> pool;
    pool.reserve(L);
    const auto es_even = eigensolve_dense(blocks.even, false, p, "even sublattice block");
    for (Eigen::Index j = 0; j < es_even.eigenvalues().size(); ++j)
      pool.emplace_back(canonical_sqrt(es_even.eigenvalues()(j)), 0);
    const auto es_odd = eigensolve_dense(blocks.odd, false, p, "odd sublattice block");
    for (Eigen::Index j = 0; j < es_odd.eigenvalues().size(); ++j)
      pool.emplace_back(canonical_sqrt(es_odd.eigenvalues()(j)), 1);
    std::sort(pool.begin(), pool.end(),
              [](const auto& x, const auto& y) { return complex_less(x.first, y.first); });
    std::sort(modes.begin(), modes.end(),
              [](const Mode& x, const Mode& y) { return complex_less(x.eps, y.eps); });
    for (int j = 0; j < L; ++j) modes[j].label = pool[j].second;
  }

  std::sort(modes.begin(), modes.end(),
            [](const Mode& x, const Mode& y) { return complex_less(x.eps, y.eps); });
  q.epsilons.reserve(L);
  q.sector_labels.reserve(L);
  for (const Mode& mo : modes) {
    q.epsilons.push_back(mo.eps);
    q.sector_labels.push_back(mo.label == 0 ? Sector::even : Sector::odd);
  }
  return q;
}

// All 2^L sign combinations sum_j (+-eps_j).
inline SpectrumMultiset assemble_spectrum(const QuasiEnergySet& q) {
  const int L = q.L;
  if (static_cast<int>(q.epsilons.size()) != L)
    throw std::invalid_argument("quasi-energy set has wrong length");
  if (L > 20) throw capacity_error("spectrum assembly limited to L <= 20 (2^L energies)");
  const std::size_t n = std::size_t{1} << L;
  SpectrumMultiset s;
  s.origin = SpectrumOrigin::free_fermion;
  s.energies.resize(n);
  cplx all_minus(0.0, 0.0);
  for (const cplx& e : q.epsilons) all_minus -= e;
  for (std::size_t mask = 0; mask < n; ++mask) {
    cplx e = all_minus;
    for (int j = 0; j < L; ++j)
      if (mask >> j & 1u) e += 2.0 * q.epsilons[j];
    s.energies[mask] = e;
  }
  std::sort(s.energies.begin(), s.energies.end(), complex_less);
  return s;
}

// The all-minus combination. For complex lambda this is a labelling
// convention, not a spectral extremum: "ground state" inherits its meaning
// from the Hermitian limit.
inline cplx ground_state_energy(const QuasiEnergySet& q) {
  cplx e0(0.0, 0.0);
  for (const cplx& e : q.epsilons) e0 -= e;
  return e0;
}

namespace detail {

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace detail

// Dense 2^L x 2^L Hamiltonian from explicit Pauli tensor products,
// -sum_j (sx_j sx_{j+1} + lambda sy_j sy_{j+1}), open ends, no symmetry
// reduction. Site 1 is the most significant qubit.
inline Eigen::MatrixXcd build_hamiltonian_dense(const ModelParams& p) {
  p.validate();
  if (p.L > 14) throw capacity_error("exact diagonalization limited to L <= 14");
  const cplx im(0.0, 1.0);
  Eigen::MatrixXcd sx(2, 2), sy(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -im, im, 0;
  const Eigen::MatrixXcd bond = detail::kron(sx, sx) + p.lambda * detail::kron(sy, sy);

  const std::size_t dim = std::size_t{1} << p.L;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int j = 0; j + 1 < p.L; ++j) {
    // accumulate I_{2^j} (x) bond (x) I_{2^(L-j-2)} without materializing it
    const std::size_t m = std::size_t{1} << j;
    const std::size_t k = std::size_t{1} << (p.L - j - 2);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        const cplx w = bond(r, c);
        if (w == cplx(0.0, 0.0)) continue;
        for (std::size_t blk = 0; blk < m; ++blk)
          h.block((blk * 4 + r) * k, (blk * 4 + c) * k, k, k).diagonal().array() -= w;
      }
  }
  return h;
}

inline SpectrumMultiset exact_diagonalization(const ModelParams& p) {
  const Eigen::MatrixXcd h = build_hamiltonian_dense(p);
  SpectrumMultiset s;
  s.origin = SpectrumOrigin::exact_diag;
  if (p.L <= 6) {
    // at defective couplings a double-precision eigensolve perturbs the
    // coalescing pair by ~sqrt(machine eps) ~ 4e-8, which is above the 1e-8
    // agreement bound; extended precision keeps small chains well below it
    using cplxl = std::complex<long double>;
    using mat_l = Eigen::Matrix<cplxl, Eigen::Dynamic, Eigen::Dynamic>;
    const mat_l hl = h.cast<cplxl>();
    Eigen::ComplexEigenSolver<mat_l> es(hl, false);
    if (es.info() != Eigen::Success)
      throw numerical_error("dense eigensolver failed to converge");
    s.energies.reserve(static_cast<std::size_t>(hl.rows()));
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      s.energies.emplace_back(static_cast<double>(es.eigenvalues()(i).real()),
                              static_cast<double>(es.eigenvalues()(i).imag()));
  } else {
    const auto es = eigensolve_dense(h, false, p, "dense Hamiltonian");
    s.energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  }
  std::sort(s.energies.begin(), s.energies.end(), complex_less);
  return s;
}

namespace detail {

// Hopcroft-Karp maximum matching; adj maps left index -> right candidates.
inline bool has_perfect_matching(const std::vector<std::vector<int>>& adj, int n) {
  constexpr int inf = std::numeric_limits<int>::max();
  std::vector<int> match_l(n, -1), match_r(n, -1), dist(n, inf);
  auto bfs = [&]() {
    std::queue<int> qu;
    bool reachable_free = false;
    for (int u = 0; u < n; ++u) {
      dist[u] = match_l[u] < 0 ? 0 : inf;
      if (match_l[u] < 0) qu.push(u);
    }
    while (!qu.empty()) {
      const int u = qu.front();
      qu.pop();
      for (const int v : adj[u]) {
        const int w = match_r[v];
        if (w < 0)
          reachable_free = true;
        else if (dist[w] == inf) {
          dist[w] = dist[u] + 1;
          qu.push(w);
        }
      }
    }
    return reachable_free;
  };
  std::function<bool(int)> dfs = [&](int u) {
    for (const int v : adj[u]) {
      const int w = match_r[v];
      if (w < 0 || (dist[w] == dist[u] + 1 && dfs(w))) {
        match_l[u] = v;
        match_r[v] = u;
        return true;
      }
    }
    dist[u] = inf;
    return false;
  };
  int matched = 0;
  while (bfs())
    for (int u = 0; u < n; ++u)
      if (match_l[u] < 0 && dfs(u)) ++matched;
  return matched == n;
}

// Smallest t such that a perfect pairing exists with every pair within t
// (exact bottleneck assignment via bisection over the candidate distances).
inline double bottleneck_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const int n = static_cast<int>(a.size());
  std::vector<double> cand;
  cand.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cand.push_back(std::abs(a[i] - b[j]));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  auto feasible = [&](double t) {
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (std::abs(a[i] - b[j]) <= t) adj[i].push_back(j);
    return has_perfect_matching(adj, n);
  };
  std::size_t lo = 0, hi = cand.size() - 1;  // complete graph at the top is always feasible
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(cand[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return cand[lo];
}

// Bottleneck-improving pair swaps on top of the sorted pairing; approximate,
// used only beyond the exact-matching size cutoff.
inline double two_opt_pairing(const std::vector<cplx>& a, std::vector<cplx> b) {
  const int n = static_cast<int>(a.size());
  auto pair_dist = [&](int i) { return std::abs(a[i] - b[i]); };
  for (int pass = 0; pass < 4 * n; ++pass) {
    int worst = 0;
    for (int i = 1; i < n; ++i)
      if (pair_dist(i) > pair_dist(worst)) worst = i;
    const double d_worst = pair_dist(worst);
    bool improved = false;
    for (int j = 0; j < n && !improved; ++j) {
      if (j == worst) continue;
      const double after = std::max(std::abs(a[worst] - b[j]), std::abs(a[j] - b[worst]));
      if (after < std::max(d_worst, pair_dist(j)) - 1e-300 && after < d_worst) {
        std::swap(b[worst], b[j]);
        improved = true;
      }
    }
    if (!improved) return d_worst;
  }
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, pair_dist(i));
  return worst;
}

}  // namespace detail

// Multiset comparison of two spectra: minimal bottleneck pairing, true iff
// every matched pair is within tol. Exact up to 2048 values, 2-opt refined
// greedy beyond that.
inline MatchReport spectra_match(const SpectrumMultiset& sa, const SpectrumMultiset& sb, double tol) {
  if (sa.energies.size() != sb.energies.size())
    throw std::invalid_argument("spectra differ in cardinality");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (sa.energies.empty()) return {true, 0.0};

  std::vector<cplx> a = sa.energies, b = sb.energies;
  std::sort(a.begin(), a.end(), complex_less);
  std::sort(b.begin(), b.end(), complex_less);

  double positional = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    positional = std::max(positional, std::abs(a[i] - b[i]));
  if (positional <= tol) return {true, positional};

  // Sorted order can cross-pair near-equal real parts with opposite
  // imaginary parts, so a failed positional pass is not conclusive.
  const double d = a.size() <= 2048 ? detail::bottleneck_distance(a, b)
                                    : detail::two_opt_pairing(a, std::move(b));
  return {d <= tol, d};
}

}  // namespace xyep
