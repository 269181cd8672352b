#pragma once

// Locating exceptional points: a repeated root of the quasi-momentum
// condition needs both the residual and its k-derivative to vanish, and
// eliminating lambda leaves one equation in k alone,
//     (L+2) sin(Lk) cos((L+2)k) - L sin((L+2)k) cos(Lk) = 0,
// equivalently sin(2(L+1)k) = (L+1) sin(2k). Each nontrivial solution maps
// to a reciprocal pair of anisotropies lambda^{+-1} = -sin((L+2)k)/sin(Lk),
// one EP per branch. k = 0 and k = pi/2 are excluded: they correspond to
// lambda^{+-1} = -+(L+2)/L where the eigenvectors stay distinct.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parallel.hpp"
#include "quasimomentum.hpp"

namespace xyep {

struct EpRecord {
  cplx k_ep{0.0, 0.0};
  cplx lambda_ep{0.0, 0.0};
  Branch branch = Branch::plus;
  Ring ring = Ring::inner;
  double quasi_gap = 0.0;    // folded distance of the coalescing mode pair
  double lr_overlap = 0.0;   // normalized self-overlap |v^T v| / (v^dag v) of that pair
  bool trivial = false;      // always false for stored records
  bool on_axis = false;      // |Re lambda| below the axis tolerance
};

inline cplx ep_k_residual(cplx k, int L) {
  return double(L + 2) * std::sin(double(L) * k) * std::cos(double(L + 2) * k) -
         double(L) * std::sin(double(L + 2) * k) * std::cos(double(L) * k);
}

// d/dk of the above collapses to a product: -4(L+1) sin(Lk) sin((L+2)k).
inline cplx ep_k_residual_derivative(cplx k, int L) {
  return -4.0 * double(L + 1) * std::sin(double(L) * k) * std::sin(double(L + 2) * k);
}

struct EpFinderOptions {
  int threads = 0;
  double axis_tol = 1e-7;   // |Re lambda| threshold for the on-axis flag
  bool allow_odd = false;   // odd L: search runs but the 2L-4 census is not enforced
};

namespace detail {

// One polish step family: Newton on the pair (residual, derivative) in the
// joint variables (k, lambda). The k-only equation above can be shallow near
// its trivial triple roots; the two-variable system is quadratically clean.
struct EpPolishOut {
  cplx k, lambda;
  bool ok = false;
};

inline EpPolishOut polish_ep(cplx k, cplx lambda, int L) {
  for (int it = 0; it < 60; ++it) {
    const double dl = L, dl2 = L + 2;
    const cplx sL = std::sin(dl * k), cL = std::cos(dl * k);
    const cplx sL2 = std::sin(dl2 * k), cL2 = std::cos(dl2 * k);
    const cplx f1 = sL2 + lambda * sL;
    const cplx f2 = dl2 * cL2 + lambda * dl * cL;
    const double scale = std::abs(sL2) + std::abs(lambda) * std::abs(sL) + dl2;
    if (std::abs(f1) + std::abs(f2) / dl2 <= 1e-14 * scale) return {k, lambda, true};
    // Jacobian rows: d(f1,f2)/d(k,lambda)
    const cplx a = dl2 * cL2 + lambda * dl * cL;
    const cplx b = sL;
    const cplx c = -dl2 * dl2 * sL2 - lambda * dl * dl * sL;
    const cplx d = dl * cL;
    const cplx det = a * d - b * c;
    if (std::abs(det) < 1e-300) return {k, lambda, false};
    const cplx dk = (f1 * d - b * f2) / det;
    const cplx dlam = (a * f2 - f1 * c) / det;
    k -= dk;
    lambda -= dlam;
    if (!(std::abs(k) < 50.0) || !(std::abs(lambda) < 1e6)) return {k, lambda, false};
  }
  // the Jacobian is singular only at the trivial repeated roots, where the
  // iteration stalls; genuine EPs converge quadratically well within budget
  return {k, lambda, false};
}

inline std::optional<cplx> newton_ep_k(cplx k, int L) {
  for (int it = 0; it < 100; ++it) {
    const cplx f = ep_k_residual(k, L);
    const cplx df = ep_k_residual_derivative(k, L);
    const double local = (L + 2.0) * (std::abs(std::sin(double(L) * k)) + 1.0) *
                         (std::abs(std::sin(double(L + 2) * k)) + 1.0);
    if (std::abs(f) <= 1e-13 * local) return k;
    if (std::abs(df) < 1e-280) return std::nullopt;
    const cplx step = f / df;
    k -= step;
    if (std::abs(k.imag()) > 2.0 || k.real() < -2.0 * pi || k.real() > 3.0 * pi)
      return std::nullopt;
  }
  return std::nullopt;
}

// Matrix-level coalescence metrics at a given lambda: eigen-decompose the two
// sublattice blocks separately (a full-matrix solve can mix eigenvectors of
// an accidental cross-sector degeneracy and fake a small self-overlap),
// take the globally closest mode pair under the folded metric.
struct PairMetrics {
  double gap = 0.0;
  double overlap = 0.0;  // max normalized self-overlap of the two eigenvectors
  bool same_sector = false;
};

inline PairMetrics closest_mode_pair(const ModelParams& p) {
  const SublatticeBlocks blocks = sublattice_blocks(p);
  struct Mode {
    cplx eps;
    Eigen::VectorXcd vec;
    int block;
  };
  std::vector<Mode> modes;
  modes.reserve(p.L);
  int bi = 0;
  for (const Eigen::MatrixXcd* blk : {&blocks.odd, &blocks.even}) {
    const auto es = eigensolve_dense(*blk, true, p, "sublattice block");
    for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
      modes.push_back({canonical_sqrt(es.eigenvalues()(j)), es.eigenvectors().col(j), bi});
    ++bi;
  }
  auto self_overlap = [](const Eigen::VectorXcd& v) {
    cplx vtv(0.0, 0.0);
    for (Eigen::Index i = 0; i < v.size(); ++i) vtv += v(i) * v(i);
    return std::abs(vtv) / v.squaredNorm();
  };
  PairMetrics out;
  out.gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      const double d = mode_distance(modes[i].eps, modes[j].eps);
      if (d < out.gap) {
        out.gap = d;
        out.same_sector = modes[i].block == modes[j].block;
        out.overlap = std::max(self_overlap(modes[i].vec), self_overlap(modes[j].vec));
      }
    }
  return out;
}

}  // namespace detail

// All exceptional points of a length-L chain: Newton on the k-equation from
// a deterministic seed grid, orbit folding, trivial-root exclusion, joint
// (k, lambda) polish, census check, reciprocal pairing into both branches.
inline std::vector<EpRecord> find_eps(int L, const EpFinderOptions& opt = {}) {
  if (L < 4 || L > 64)
    throw std::invalid_argument("EP search supports 4 <= L <= 64");
  if (L % 2 != 0 && !opt.allow_odd)
    throw std::invalid_argument("odd L rejected; pass the odd-length override to proceed");
  const bool enforce_census = L % 2 == 0;
  const int expected_k = L - 2;

  int n_re = 8 * (L + 1), n_im = 8;
  for (int escalation = 0;; ++escalation) {
    // geometric ladder of seed heights; every nontrivial root sits off the
    // real axis and |Im k| shrinks roughly like 1/L
    std::vector<double> im_levels(n_im);
    for (int i = 0; i < n_im; ++i)
      im_levels[i] = 0.45 * std::pow(0.004 / 0.45, double(n_im - 1 - i) / (n_im - 1));

    const std::size_t n_seeds = static_cast<std::size_t>(n_re) * n_im;
    std::vector<std::optional<cplx>> hits(n_seeds);
    parallel_for(n_seeds, opt.threads, [&](std::size_t s) {
      const int ire = static_cast<int>(s) % n_re;
      const int iim = static_cast<int>(s) / n_re;
      const cplx seed(pi * (ire + 0.5) / n_re, im_levels[iim]);
      hits[s] = detail::newton_ep_k(seed, L);
    });

    std::vector<cplx> ks;
    for (const auto& h : hits) {
      if (!h) continue;
      const cplx k = detail::fold_quasimomentum(*h);
      if (k.imag() < 1e-8) continue;  // real roots are the trivial family
      // Newton stalls in a cloud of cube-root-of-tolerance radius (~1e-5)
      // around the trivial triple roots; the nearest genuine root sits at
      // distance O(1/L), so a 1e-3 pre-polish moat is safe for L <= 64
      if (detail::orbit_distance(k, cplx(0.0, 0.0)) < 1e-3 ||
          detail::orbit_distance(k, cplx(pi / 2.0, 0.0)) < 1e-3)
        continue;
      bool dup = false;
      for (const cplx& u : ks)
        if (detail::orbit_distance(k, u) < 1e-8) {
          dup = true;
          break;
        }
      if (!dup) ks.push_back(k);
    }

    // joint polish; lambda comes along for free
    std::vector<std::pair<cplx, cplx>> polished;  // (k, lambda_plus)
    for (const cplx& k0 : ks) {
      const cplx s2 = std::sin(double(L + 2) * k0), s0 = std::sin(double(L) * k0);
      if (std::abs(s0) < 1e-12) continue;
      const auto got = detail::polish_ep(k0, -s2 / s0, L);
      if (!got.ok) continue;
      const cplx k = detail::fold_quasimomentum(got.k);
      if (k.imag() < 1e-8) continue;
      if (detail::orbit_distance(k, cplx(0.0, 0.0)) < 1e-6 ||
          detail::orbit_distance(k, cplx(pi / 2.0, 0.0)) < 1e-6)
        continue;
      bool dup = false;
      for (const auto& [u, ul] : polished)
        if (detail::orbit_distance(k, u) < 1e-8) {
          dup = true;
          break;
        }
      if (!dup) polished.emplace_back(k, got.lambda);
    }

    if (!enforce_census || static_cast<int>(polished.size()) == expected_k) {
      std::vector<EpRecord> records;
      records.reserve(2 * polished.size());
      for (const auto& [k, lam] : polished) {
        for (const Branch b : {Branch::plus, Branch::minus}) {
          EpRecord rec;
          rec.k_ep = k;
          rec.lambda_ep = b == Branch::plus ? lam : cplx(1.0) / lam;
          rec.branch = b;
          rec.ring = std::abs(rec.lambda_ep) < 1.0 ? Ring::inner : Ring::outer;
          rec.trivial = false;
          rec.on_axis = std::abs(rec.lambda_ep.real()) < opt.axis_tol;
          const detail::PairMetrics pm =
              detail::closest_mode_pair(ModelParams{L, rec.lambda_ep, opt.allow_odd});
          rec.quasi_gap = pm.gap;
          rec.lr_overlap = pm.overlap;
          records.push_back(rec);
        }
      }
      std::sort(records.begin(), records.end(), [](const EpRecord& a, const EpRecord& b) {
        return complex_less(a.lambda_ep, b.lambda_ep);
      });
      return records;
    }

    if (escalation >= 3) {
      std::vector<cplx> found;
      for (const auto& [k, lam] : polished) found.push_back(lam);
      throw root_count_error("EP census mismatch: found " + std::to_string(polished.size()) +
                                 " of " + std::to_string(expected_k) +
                                 " quasi-momentum solutions at L=" + std::to_string(L),
                             std::move(found));
    }
    n_re *= 2;
    n_im *= 2;
  }
}

// Full verification report for one EP candidate.
struct EpVerification {
  double quasi_gap = 0.0;
  double lr_overlap = 0.0;
  bool same_sector = false;
  bool matrix_pass = false;
  bool ham_checked = false;
  double ham_gap = 0.0;
  double ham_overlap = 0.0;
  int ham_coalescing_pairs = 0;  // disjoint ED eigenvalue pairs closer than 1e-6
  bool ham_pass = false;
  double tol = 0.0;
};

// Matrix-level check at lambda_ep for any L; optional Hamiltonian-level
// check (dense ED with eigenvectors) for L <= 10. Failures are reported in
// the measured numbers, not thrown.
inline EpVerification verify_ep(const EpRecord& rec, int L, double tol = 1e-6,
                                bool hamiltonian_level = false) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  EpVerification out;
  out.tol = tol;
  const ModelParams p{L, rec.lambda_ep, /*allow_odd=*/true};
  const detail::PairMetrics pm = detail::closest_mode_pair(p);
  out.quasi_gap = pm.gap;
  out.lr_overlap = pm.overlap;
  out.same_sector = pm.same_sector;
  out.matrix_pass = pm.gap < tol && pm.overlap < tol;

  if (hamiltonian_level) {
    if (L > 10)
      throw capacity_error("Hamiltonian-level EP verification limited to L <= 10");
    const Eigen::MatrixXcd h = build_hamiltonian_dense(p);
    const auto es = eigensolve_dense(h, true, p, "dense Hamiltonian");
    const Eigen::Index n = es.eigenvalues().size();
    auto self_overlap = [&](Eigen::Index j) {
      cplx vtv(0.0, 0.0);
      const auto v = es.eigenvectors().col(j);
      for (Eigen::Index i = 0; i < n; ++i) vtv += v(i) * v(i);
      return std::abs(vtv) / v.squaredNorm();
    };
    struct Pair {
      double gap;
      Eigen::Index i, j;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        pairs.push_back({std::abs(es.eigenvalues()(i) - es.eigenvalues()(j)), i, j});
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& a, const Pair& b) { return a.gap < b.gap; });
    out.ham_checked = true;
    out.ham_gap = pairs.empty() ? 0.0 : pairs.front().gap;
    out.ham_overlap = pairs.empty()
                          ? 0.0
                          : std::max(self_overlap(pairs.front().i), self_overlap(pairs.front().j));
    std::vector<bool> taken(n, false);
    for (const Pair& pr : pairs) {
      if (pr.gap >= 1e-6) break;
      if (taken[pr.i] || taken[pr.j]) continue;
      taken[pr.i] = taken[pr.j] = true;
      ++out.ham_coalescing_pairs;
    }
    out.ham_pass = out.ham_gap < tol && out.ham_overlap < tol;
  }
  return out;
}

// The non-EP degeneracies: at lambda^{+-1} = -+(L+2)/L the quasi-momentum
// condition has a repeated root at k = 0 or k = pi/2 shared between the two
// sector conditions (all sines vanish there for even L), yet the closest
// quasi-energy eigenvectors stay far from self-orthogonal.
struct TrivialPointReport {
  cplx lambda{0.0, 0.0};
  cplx k{0.0, 0.0};
  Branch branch = Branch::plus;
  double residual = 0.0;
  double residual_derivative = 0.0;
  bool repeated_root = false;
  double pair_gap = 0.0;      // folded distance of the two closest quasi-energies
  double pair_overlap = 0.0;  // their normalized self-overlap; order one here
  bool is_ep = false;         // expected false
};

inline TrivialPointReport verify_trivial_point(int L, int sign, Branch b = Branch::plus) {
  if (L < 2 || L % 2 != 0) throw std::invalid_argument("trivial points defined for even L >= 2");
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +-1");
  TrivialPointReport out;
  out.branch = b;
  out.k = sign > 0 ? cplx(pi / 2.0, 0.0) : cplx(0.0, 0.0);
  const cplx lam_pow = cplx(double(sign) * (L + 2) / L, 0.0);  // value of lambda^{+-1}
  out.lambda = b == Branch::plus ? lam_pow : cplx(1.0) / lam_pow;
  const ModelParams p{L, out.lambda};
  out.residual = std::abs(k_residual(out.k, p, b));
  out.residual_derivative = std::abs(k_residual_derivative(out.k, p, b));
  const double dscale = (L + 2) + std::abs(branch_lambda(p.lambda, b)) * L;
  out.repeated_root = out.residual < 1e-10 * dscale && out.residual_derivative < 1e-8 * dscale;
  const detail::PairMetrics pm = detail::closest_mode_pair(p);
  out.pair_gap = pm.gap;
  out.pair_overlap = pm.overlap;
  out.is_ep = pm.gap < 1e-6 && pm.overlap < 1e-6;
  return out;
}

// Minimal folded quasi-energy distance over a complex-lambda grid; the
// independent landscape whose funnels mark the EPs.
struct GridSpec {
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;
  int nx = 0, ny = 0;

  void validate() const {
    if (nx < 1 || ny < 1) throw std::invalid_argument("grid resolution must be >= 1");
    if (static_cast<long long>(nx) * ny > 2048LL * 2048LL)
      throw capacity_error("grid resolution limited to 2048x2048");
    if (!(re_min <= re_max) || !(im_min <= im_max))
      throw std::invalid_argument("grid bounds must be ordered");
  }
  double re_at(int ix) const { return nx == 1 ? re_min : re_min + (re_max - re_min) * ix / (nx - 1); }
  double im_at(int iy) const { return ny == 1 ? im_min : im_min + (im_max - im_min) * iy / (ny - 1); }
};

struct GapGrid {
  int L = 0;
  GridSpec grid;
  std::vector<double> gap;     // row-major, iy * nx + ix
  std::vector<std::uint8_t> ok;
};

inline GapGrid gap_landscape(int L, const GridSpec& grid, int threads = 0) {
  grid.validate();
  ModelParams probe{L, cplx(0.0, 0.0), /*allow_odd=*/true};
  probe.validate();
  GapGrid out;
  out.L = L;
  out.grid = grid;
  const std::size_t n = static_cast<std::size_t>(grid.nx) * grid.ny;
  out.gap.assign(n, 0.0);
  out.ok.assign(n, 1);
  parallel_for(n, threads, [&](std::size_t cell) {
    const int ix = static_cast<int>(cell) % grid.nx;
    const int iy = static_cast<int>(cell) / grid.nx;
    const ModelParams p{L, cplx(grid.re_at(ix), grid.im_at(iy)), /*allow_odd=*/true};
    try {
      const SublatticeBlocks blocks = sublattice_blocks(p);
      std::vector<cplx> eps;
      eps.reserve(L);
      for (const Eigen::MatrixXcd* blk : {&blocks.odd, &blocks.even}) {
        const auto es = eigensolve_dense(*blk, false, p, "sublattice block");
        for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j)
          eps.push_back(canonical_sqrt(es.eigenvalues()(j)));
      }
      double g = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < eps.size(); ++i)
        for (std::size_t j = i + 1; j < eps.size(); ++j)
          g = std::min(g, mode_distance(eps[i], eps[j]));
      out.gap[cell] = g;
    } catch (const std::exception&) {
      out.ok[cell] = 0;
    }
  });
  return out;
}

}  // namespace xyep
