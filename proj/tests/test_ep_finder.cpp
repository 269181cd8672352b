#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "xyep/core_model.hpp"
#include "xyep/ep_finder.hpp"

using namespace xyep;

TEST_CASE("elimination residual collapses to the compact form", "[ep_finder]") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(-0.6, 0.6);
  for (int L : {4, 6, 10}) {
    for (int i = 0; i < 25; ++i) {
      const cplx k(re(rng), im(rng));
      const cplx f = ep_k_residual(k, L);
      const cplx compact = std::sin(2.0 * double(L + 1) * k) - double(L + 1) * std::sin(2.0 * k);
      REQUIRE(std::abs(f - compact) < 1e-9 * (1.0 + std::abs(f)));
      const double h = 1e-6;
      const cplx num = (ep_k_residual(k + h, L) - ep_k_residual(k - h, L)) / (2.0 * h);
      REQUIRE(std::abs(num - ep_k_residual_derivative(k, L)) <
              1e-3 * (1.0 + std::abs(ep_k_residual_derivative(k, L))));
    }
  }
}

TEST_CASE("trivial momenta are repeated roots of the elimination residual", "[ep_finder]") {
  for (int L : {4, 6, 12}) {
    for (const cplx k : {cplx(0.0, 0.0), cplx(pi / 2.0, 0.0)}) {
      REQUIRE(std::abs(ep_k_residual(k, L)) < 1e-10 * L);
      REQUIRE(std::abs(ep_k_residual_derivative(k, L)) < 1e-10 * L * L);
    }
  }
}

TEST_CASE("census counts, rings, and closures", "[ep_finder]") {
  for (int L : {4, 6, 8, 10, 12, 14, 16}) {
    const std::vector<EpRecord> recs = find_eps(L);
    REQUIRE(static_cast<int>(recs.size()) == 2 * L - 4);

    int inner = 0, outer = 0, on_axis = 0;
    for (const EpRecord& r : recs) {
      (r.ring == Ring::inner ? inner : outer)++;
      on_axis += r.on_axis;
      REQUIRE_FALSE(r.trivial);
      REQUIRE(r.quasi_gap < 1e-6);
      REQUIRE(r.lr_overlap < 1e-6);
      REQUIRE(r.k_ep.imag() > 0.0);
    }
    REQUIRE(inner == L - 2);
    REQUIRE(outer == L - 2);
    REQUIRE(on_axis == (L % 4 == 0 ? 4 : 0));

    // sorted output
    REQUIRE(std::is_sorted(recs.begin(), recs.end(), [](const EpRecord& a, const EpRecord& b) {
      return complex_less(a.lambda_ep, b.lambda_ep);
    }));

    // conjugation closure of the lambda multiset
    for (const EpRecord& r : recs) {
      double best = 1e300;
      for (const EpRecord& s : recs)
        best = std::min(best, std::abs(s.lambda_ep - std::conj(r.lambda_ep)));
      REQUIRE(best < 1e-8);
    }

    // reciprocal pairing between the branches at the same quasi-momentum
    for (const EpRecord& r : recs) {
      double best = 1e300;
      for (const EpRecord& s : recs) {
        if (s.branch == r.branch) continue;
        if (detail::orbit_distance(s.k_ep, r.k_ep) > 1e-7) continue;
        best = std::min(best, std::abs(s.lambda_ep - cplx(1.0) / r.lambda_ep));
      }
      REQUIRE(best < 1e-8);
    }
  }
}

TEST_CASE("four-site golden values", "[ep_finder]") {
  const std::vector<EpRecord> recs = find_eps(4);
  REQUIRE(recs.size() == 4);
  const std::vector<cplx> want = {cplx(0, -2), cplx(0, -0.5), cplx(0, 0.5), cplx(0, 2)};
  for (const cplx& w : want) {
    double best = 1e300;
    const EpRecord* hit = nullptr;
    for (const EpRecord& r : recs)
      if (std::abs(r.lambda_ep - w) < best) {
        best = std::abs(r.lambda_ep - w);
        hit = &r;
      }
    REQUIRE(best < 1e-8);
    REQUIRE(hit->ring == (std::abs(w) < 1.0 ? Ring::inner : Ring::outer));
    REQUIRE(hit->branch == (std::abs(w) < 1.0 ? Branch::minus : Branch::plus));
    REQUIRE(hit->on_axis);
  }
}

TEST_CASE("six-site golden values", "[ep_finder]") {
  const std::vector<EpRecord> recs = find_eps(6);
  REQUIRE(recs.size() == 8);
  // one representative per ring; the rest follow by conjugation and sign
  const cplx outer_want(0.77570198038492533, 1.4922176658829287);
  const cplx inner_want(0.27425206525500739, 0.52757861527609018);
  double d_outer = 1e300, d_inner = 1e300;
  for (const EpRecord& r : recs) {
    d_outer = std::min(d_outer, std::abs(r.lambda_ep - outer_want));
    d_inner = std::min(d_inner, std::abs(r.lambda_ep - inner_want));
    REQUIRE_FALSE(r.on_axis);
  }
  REQUIRE(d_outer < 1e-10);
  REQUIRE(d_inner < 1e-10);
}

TEST_CASE("census against the elimination-polynomial oracle", "[ep_finder]") {
  for (int L : {4, 6, 8, 12, 16}) {
    const std::vector<cplx> ref = oracle::ep_lambdas_plus(L);
    REQUIRE(static_cast<int>(ref.size()) == L - 2);
    std::vector<cplx> mine;
    for (const EpRecord& r : find_eps(L))
      if (r.branch == Branch::plus) mine.push_back(r.lambda_ep);
    REQUIRE(mine.size() == ref.size());
    // match by distance, not by sorted position: real parts that agree only
    // to rounding noise would cross-pair conjugate partners
    for (const cplx& m : mine) {
      double best = 1e300;
      for (const cplx& r : ref) best = std::min(best, std::abs(m - r));
      INFO("L=" << L << " mine=" << m);
      REQUIRE(best < 1e-8);
    }
    for (const cplx& r : ref) {
      double best = 1e300;
      for (const cplx& m : mine) best = std::min(best, std::abs(m - r));
      INFO("L=" << L << " ref=" << r);
      REQUIRE(best < 1e-8);
    }
  }
}

TEST_CASE("search bounds and odd lengths", "[ep_finder]") {
  REQUIRE_THROWS_AS(find_eps(2), std::invalid_argument);
  REQUIRE_THROWS_AS(find_eps(66), std::invalid_argument);
  REQUIRE_THROWS_AS(find_eps(5), std::invalid_argument);
  EpFinderOptions opt;
  opt.allow_odd = true;
  const std::vector<EpRecord> recs = find_eps(5, opt);
  // odd lengths have repeated quasi-momentum roots too, but they all turn
  // out diagonalizable: coalescing eigenvalues from different sublattice
  // sectors, with no self-orthogonal eigenvector
  for (const EpRecord& r : recs) {
    REQUIRE(r.quasi_gap < 1e-6);
    REQUIRE(r.lr_overlap > 0.1);
  }
}

TEST_CASE("verification at the four-site exceptional points", "[ep_finder]") {
  for (const EpRecord& r : find_eps(4)) {
    const EpVerification v = verify_ep(r, 4, 1e-6, /*hamiltonian_level=*/true);
    REQUIRE(v.matrix_pass);
    REQUIRE(v.same_sector);
    REQUIRE(v.ham_checked);
    REQUIRE(v.ham_pass);
    REQUIRE(v.ham_coalescing_pairs == 4);
  }
  EpRecord fake;
  fake.lambda_ep = cplx(0.3, 0.1);  // generic coupling: nothing coalesces
  const EpVerification v = verify_ep(fake, 4, 1e-6, true);
  REQUIRE_FALSE(v.matrix_pass);
  REQUIRE_FALSE(v.ham_pass);
  REQUIRE(v.ham_coalescing_pairs == 0);
  REQUIRE_THROWS_AS(verify_ep(fake, 12, 1e-6, true), capacity_error);
  REQUIRE_THROWS_AS(verify_ep(fake, 4, -1.0, false), std::invalid_argument);
}

TEST_CASE("dense spectrum at the outer four-site point", "[ep_finder]") {
  // energies +-1 and +-sqrt(15) i, each twice, at lambda = 2i
  const SpectrumMultiset ed = exact_diagonalization({4, cplx(0.0, 2.0)});
  const double s15 = std::sqrt(15.0);
  for (const cplx want : {cplx(1, 0), cplx(-1, 0), cplx(0, s15), cplx(0, -s15)}) {
    int hits = 0;
    for (const cplx& e : ed.energies)
      if (std::abs(e - want) < 1e-7) ++hits;
    REQUIRE(hits == 2);
  }
}

TEST_CASE("trivial points show repeated roots but distinct eigenvectors", "[ep_finder]") {
  const double want_gap4 = 0.081138830084189761;  // (sqrt(10) - 3) / 2
  const double want_gap6 = 0.019441005571397163;
  for (int L : {4, 6}) {
    for (int sign : {1, -1}) {
      const TrivialPointReport t = verify_trivial_point(L, sign);
      REQUIRE(t.repeated_root);
      REQUIRE_FALSE(t.is_ep);
      REQUIRE(t.pair_overlap > 0.1);
      const double want = L == 4 ? want_gap4 : want_gap6;
      REQUIRE(std::abs(t.pair_gap - want) < 1e-9);
      REQUIRE(std::abs(t.lambda - cplx(double(sign) * (L + 2) / L, 0.0)) < 1e-14);
    }
    // the minus branch hits the same structure at the reciprocal coupling
    const TrivialPointReport tm = verify_trivial_point(L, 1, Branch::minus);
    REQUIRE(tm.repeated_root);
    REQUIRE_FALSE(tm.is_ep);
    REQUIRE(std::abs(tm.lambda - cplx(double(L) / (L + 2), 0.0)) < 1e-14);
  }
  REQUIRE_THROWS_AS(verify_trivial_point(5, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(verify_trivial_point(4, 2), std::invalid_argument);
}

TEST_CASE("exceptional points are not reachable on the real axis", "[ep_finder]") {
  for (const EpRecord& r : find_eps(8)) REQUIRE(std::abs(r.lambda_ep.imag()) > 1e-6);
}

TEST_CASE("gap landscape funnels at the known point", "[ep_finder]") {
  GridSpec g{-0.3, 0.3, 1.7, 2.3, 13, 13};
  const GapGrid gg = gap_landscape(4, g, 2);
  REQUIRE(gg.gap.size() == 169);
  double min_gap = 1e300;
  std::size_t min_cell = 0;
  for (std::size_t i = 0; i < gg.gap.size(); ++i) {
    REQUIRE(gg.ok[i] == 1);
    if (gg.gap[i] < min_gap) {
      min_gap = gg.gap[i];
      min_cell = i;
    }
  }
  // the center cell carries lambda = 2i exactly
  REQUIRE(min_cell == std::size_t(6) * 13 + 6);
  REQUIRE(min_gap < 1e-8);
  // mirror symmetry lambda -> -conj(lambda) of the folded gap
  for (int iy = 0; iy < 13; ++iy)
    for (int ix = 0; ix < 13; ++ix)
      REQUIRE(gg.gap[std::size_t(iy) * 13 + ix] ==
              Catch::Approx(gg.gap[std::size_t(iy) * 13 + (12 - ix)]).margin(1e-10));
}

TEST_CASE("grid validation", "[ep_finder]") {
  GridSpec bad{0.0, 1.0, 0.0, 1.0, 0, 4};
  REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
  GridSpec huge{0.0, 1.0, 0.0, 1.0, 4096, 2048};
  REQUIRE_THROWS_AS(huge.validate(), capacity_error);
  GridSpec inverted{1.0, 0.0, 0.0, 1.0, 4, 4};
  REQUIRE_THROWS_AS(inverted.validate(), std::invalid_argument);
  GridSpec single{0.5, 0.5, -0.5, -0.5, 1, 1};
  REQUIRE_NOTHROW(single.validate());
  REQUIRE(single.re_at(0) == 0.5);
}
