#pragma once

// Quasi-momentum route to the quasi-energies: solve
//     sin((L+2)k) + lambda^{+-1} sin(Lk) = 0
// per branch, convert through the dispersion, and cross-check against the
// matrix route. The polynomial residual above (rather than the sine ratio)
// avoids the poles at sin(Lk) = 0, at the price of fixed spurious zeros:
// k = 0 and k = pi always, and k = pi/2 for even L (all three sines vanish).
// Those become genuine double roots exactly at lambda^{+-1} = -+(L+2)/L.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "core_model.hpp"
#include "types.hpp"

namespace xyep {

struct QuasiMomentum {
  cplx k{0.0, 0.0};
  Branch branch = Branch::plus;
};

inline cplx branch_lambda(cplx lambda, Branch b) {
  if (b == Branch::plus) return lambda;
  if (lambda == cplx(0.0, 0.0))
    throw std::invalid_argument("minus branch undefined at lambda = 0");
  return cplx(1.0) / lambda;
}

inline cplx k_residual(cplx k, const ModelParams& p, Branch b) {
  const cplx ls = branch_lambda(p.lambda, b);
  return std::sin(double(p.L + 2) * k) + ls * std::sin(double(p.L) * k);
}

inline cplx k_residual_derivative(cplx k, const ModelParams& p, Branch b) {
  const cplx ls = branch_lambda(p.lambda, b);
  return double(p.L + 2) * std::cos(double(p.L + 2) * k) +
         ls * double(p.L) * std::cos(double(p.L) * k);
}

// Dispersion in the unscaled (gamma) convention; multiply by (1 + lambda)
// to land in the H_lambda normalization used everywhere else.
inline cplx eps_from_k(cplx k, const GammaParams& g) {
  g.validate();
  const cplx s = std::sin(k);
  return canonical_sqrt(cplx(1.0) - (cplx(1.0) - g.gamma * g.gamma) * s * s);
}

// Same dispersion expressed directly at the H_lambda scale,
// eps(k)^2 = 1 + lambda^2 + 2 lambda cos 2k.
inline cplx eps_lambda_from_k(cplx k, cplx lambda) {
  return canonical_sqrt(cplx(1.0) + lambda * lambda + 2.0 * lambda * std::cos(2.0 * k));
}

namespace detail {

// The residual is invariant under k -> k + pi (even L) and odd under
// k -> -k, and the dispersion under both, so each physical mode is an orbit
// {+-k + n pi}. Canonical representative: Re in [0, pi), Im > 0; real
// orbits tie-break to Re <= pi/2.
inline cplx fold_quasimomentum(cplx k) {
  double re = std::fmod(k.real(), pi);
  if (re < 0.0) re += pi;
  double im = k.imag();
  constexpr double real_band = 1e-11;
  if (im < -real_band) {
    re = re == 0.0 ? 0.0 : pi - re;
    im = -im;
  } else if (std::abs(im) <= real_band && re > pi / 2.0 + real_band) {
    re = pi - re;
    im = -im;
  }
  return {re, im};
}

// Distance between orbits, minimized over the residual symmetry images.
inline double orbit_distance(cplx k1, cplx k2) {
  const cplx refl(pi - k2.real(), -k2.imag());
  double best = std::abs(k1 - k2);
  for (const double shift : {-pi, 0.0, pi}) {
    best = std::min(best, std::abs(k1 - (k2 + cplx(shift, 0.0))));
    best = std::min(best, std::abs(k1 - (refl + cplx(shift, 0.0))));
  }
  return best;
}

struct KNewtonOut {
  cplx k;
  bool ok = false;
};

inline KNewtonOut newton_quasimomentum(cplx k, const ModelParams& p, Branch b, double im_box) {
  for (int it = 0; it < 80; ++it) {
    const cplx r = k_residual(k, p, b);
    const cplx dr = k_residual_derivative(k, p, b);
    const double local = std::abs(std::sin(double(p.L + 2) * k)) +
                         std::abs(branch_lambda(p.lambda, b)) * std::abs(std::sin(double(p.L) * k)) + 1.0;
    if (std::abs(r) <= 1e-14 * local) return {k, true};
    if (std::abs(dr) < 1e-300) return {k, false};
    const cplx step = r / dr;
    k -= step;
    if (std::abs(k.imag()) > 2.0 * im_box + 1.0 || k.real() < -2.0 * pi || k.real() > 3.0 * pi)
      return {k, false};
    if (std::abs(step) <= 1e-15 * (std::abs(k) + 1.0) && std::abs(k_residual(k, p, b)) <= 1e-10 * local)
      return {k, true};
  }
  return {k, false};
}

}  // namespace detail

// All quasi-momenta of one branch: L/2 canonical orbit representatives for
// even L, double roots repeated (they carry multiplicity at an EP). Newton
// from a deterministic seed grid, folded, deduplicated, count-checked.
inline std::vector<QuasiMomentum> solve_quasimomenta(const ModelParams& p, Branch b) {
  p.validate();
  if (p.L % 2 != 0)
    throw std::invalid_argument("quasi-momentum route requires even L");
  if (p.lambda == cplx(0.0, 0.0))
    throw std::invalid_argument("quasi-momentum condition degenerates at lambda = 0");

  const cplx ls = branch_lambda(p.lambda, b);
  const int expected = p.L / 2;
  // roots drift off the real axis like ln|lambda^{+-1}| / L
  double im_box = 1.0 + std::abs(std::log(std::abs(ls))) / p.L;
  im_box = std::min(im_box, 600.0 / (p.L + 2));  // keep sin((L+2)k) inside double range
  const double dscale = (p.L + 2) + std::abs(ls) * p.L;  // derivative magnitude on the real axis
  const double loose_deriv = 1e-3 * dscale;
  const double strict_deriv = 1e-8 * dscale;

  struct Root {
    cplx k;
    double abs_res, abs_deriv;
    int mult = 1;
  };

  int n_re = 8 * p.L, n_im = 16;
  for (int escalation = 0;; ++escalation) {
    std::vector<Root> roots;
    std::vector<std::pair<cplx, double>> dropped_spurious;  // (point, |r'|)

    for (int ire = 0; ire < n_re; ++ire) {
      const double re = pi * (ire + 0.5) / n_re;
      for (int iim = 0; iim < n_im; ++iim) {
        const double im = -im_box + 2.0 * im_box * (iim + 0.5) / n_im;
        const auto got = detail::newton_quasimomentum(cplx(re, im), p, b, im_box);
        if (!got.ok) continue;
        const cplx k = detail::fold_quasimomentum(got.k);
        bool dup = false;
        for (const Root& r : roots)
          if (detail::orbit_distance(k, r.k) < 1e-8) {
            dup = true;
            break;
          }
        if (!dup)
          roots.push_back({k, std::abs(k_residual(k, p, b)),
                           std::abs(k_residual_derivative(k, p, b))});
      }
    }

    // Merge the sqrt-of-tolerance Newton scatter around (near-)double roots:
    // clusters tighter than 1e-5 whose members all have a small derivative
    // residual are one root; genuinely distinct simple roots keep |r'| large.
    std::vector<Root> merged;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (used[i]) continue;
      Root rep = roots[i];
      for (std::size_t j = i + 1; j < roots.size(); ++j) {
        if (used[j]) continue;
        if (detail::orbit_distance(rep.k, roots[j].k) < 1e-5 &&
            rep.abs_deriv < loose_deriv && roots[j].abs_deriv < loose_deriv) {
          used[j] = true;
          if (roots[j].abs_res < rep.abs_res) rep = roots[j];
        }
      }
      merged.push_back(rep);
    }

    // Fixed spurious zeros of the polynomial form. They are kept as
    // genuine (single) roots only when the derivative also vanishes there,
    // which is exactly the lambda^{+-1} = -+(L+2)/L collision.
    std::vector<Root> kept;
    for (const Root& r : merged) {
      bool is_spur = false;
      for (const double s : {0.0, pi / 2.0}) {
        if (detail::orbit_distance(r.k, cplx(s, 0.0)) < 1e-6) {
          const double dv = std::abs(k_residual_derivative(cplx(s, 0.0), p, b));
          if (dv < strict_deriv) {
            kept.push_back({cplx(s, 0.0), 0.0, dv, 1});
          } else {
            bool seen = false;
            for (const auto& [at, dv_seen] : dropped_spurious)
              if (std::abs(at - cplx(s, 0.0)) < 1e-12) seen = true;
            if (!seen) dropped_spurious.emplace_back(cplx(s, 0.0), dv);
          }
          is_spur = true;
          break;
        }
      }
      if (!is_spur) kept.push_back(r);
    }
    // a spurious point can swallow several Newton copies; dedup the keeps
    std::vector<Root> uniq;
    for (const Root& r : kept) {
      bool dup = false;
      for (const Root& u : uniq)
        if (detail::orbit_distance(r.k, u.k) < 1e-8) dup = true;
      if (!dup) uniq.push_back(r);
    }

    int count = 0;
    for (const Root& r : uniq) count += r.mult;

    if (count < expected) {
      // Count-driven multiplicity: promote the smallest derivative residuals
      // first (double roots), including a spurious point whose derivative is
      // small because a physical root collided with it.
      struct Cand {
        double deriv;
        bool reinstate;
        std::size_t idx;
        cplx at;
      };
      std::vector<Cand> cands;
      for (std::size_t i = 0; i < uniq.size(); ++i)
        if (uniq[i].abs_deriv < loose_deriv && uniq[i].mult == 1)
          cands.push_back({uniq[i].abs_deriv, false, i, uniq[i].k});
      for (const auto& [at, dv] : dropped_spurious)
        if (dv < loose_deriv) cands.push_back({dv, true, 0, at});
      std::sort(cands.begin(), cands.end(),
                [](const Cand& a, const Cand& c) { return a.deriv < c.deriv; });
      for (const Cand& c : cands) {
        if (count >= expected) break;
        if (c.reinstate)
          uniq.push_back({c.at, std::abs(k_residual(c.at, p, b)), c.deriv, 1});
        else
          uniq[c.idx].mult = 2;
        ++count;
      }
    }

    if (count == expected) {
      std::vector<QuasiMomentum> out;
      out.reserve(expected);
      for (const Root& r : uniq)
        for (int c = 0; c < r.mult; ++c) out.push_back({r.k, b});
      std::sort(out.begin(), out.end(), [](const QuasiMomentum& x, const QuasiMomentum& y) {
        return complex_less(x.k, y.k);
      });
      return out;
    }

    if (escalation >= 3) {
      std::vector<cplx> found;
      for (const Root& r : uniq)
        for (int c = 0; c < r.mult; ++c) found.push_back(r.k);
      throw root_count_error(
          "incomplete quasi-momentum root set: found " + std::to_string(count) + " of " +
              std::to_string(expected) + " for branch " + to_string(b) + " at L=" +
              std::to_string(p.L) + ", lambda=(" + std::to_string(p.lambda.real()) + "," +
              std::to_string(p.lambda.imag()) + ")",
          std::move(found));
    }
    n_re *= 2;
    n_im *= 2;
    im_box = std::min(im_box * 1.5, 600.0 / (p.L + 2));
  }
}

struct RouteCrossCheck {
  double max_distance = 0.0;  // bottleneck pairing distance between the routes
  bool pass = false;
  bool near_degenerate = false;
  double tol = 0.0;
};

namespace detail {

// Bottleneck pairing under an arbitrary metric (used with the sign-folded
// mode distance for quasi-energy multisets).
template <class Metric>
double bottleneck_distance_metric(const std::vector<cplx>& a, const std::vector<cplx>& b,
                                  Metric metric) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return 0.0;
  std::vector<double> cand;
  cand.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cand.push_back(metric(a[i], b[j]));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  auto feasible = [&](double t) {
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (metric(a[i], b[j]) <= t) adj[i].push_back(j);
    return has_perfect_matching(adj, n);
  };
  std::size_t lo = 0, hi = cand.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(cand[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return cand[lo];
}

}  // namespace detail

// Quasi-energies via both quasi-momentum branches against the matrix route,
// as multisets under the mode metric. The union of the two branches must
// reproduce all L matrix quasi-energies.
inline RouteCrossCheck crosscheck_routes(const ModelParams& p, double tol = 1e-8) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const QuasiEnergySet qm = quasi_energies_matrix(p);

  std::vector<cplx> route;
  route.reserve(p.L);
  for (const Branch b : {Branch::plus, Branch::minus})
    for (const QuasiMomentum& q : solve_quasimomenta(p, b))
      route.push_back(eps_lambda_from_k(q.k, p.lambda));

  RouteCrossCheck out;
  out.tol = tol;
  out.max_distance = detail::bottleneck_distance_metric(qm.epsilons, route, mode_distance);
  out.pass = out.max_distance <= tol;
  out.near_degenerate = qm.near_degenerate;
  for (std::size_t i = 0; i < route.size() && !out.near_degenerate; ++i)
    for (std::size_t j = i + 1; j < route.size(); ++j)
      if (mode_distance(route[i], route[j]) < 1e-6) {
        out.near_degenerate = true;
        break;
      }
  return out;
}

}  // namespace xyep
