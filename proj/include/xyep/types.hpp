#pragma once

// Shared vocabulary types for the open-chain non-Hermitian XY solver.
// Everything downstream (quasi-momentum solver, EP finder, CLI) speaks in
// these terms. All energies are in the H_lambda normalization
//   H = -sum_j (sx_j sx_{j+1} + lambda * sy_j sy_{j+1}).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace xyep {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Sublattice parity (1-based site index) of the eigenvector support.
// The staggered coupling matrix decouples into these two sectors.
enum class Sector { even, odd };

// Which route produced a quasi-energy set.
enum class EpsSource { matrix, quasimomentum };

enum class SpectrumOrigin { free_fermion, exact_diag };

// Exponent branch of lambda^{+1} / lambda^{-1} in the quasi-momentum
// condition sin((L+2)k) / sin(Lk) = -lambda^{±1}.
enum class Branch { plus, minus };

enum class Ring { inner, outer };

inline const char* to_string(Sector s) { return s == Sector::even ? "even" : "odd"; }
inline const char* to_string(EpsSource s) { return s == EpsSource::matrix ? "matrix" : "quasimomentum"; }
inline const char* to_string(SpectrumOrigin o) { return o == SpectrumOrigin::free_fermion ? "free_fermion" : "exact_diag"; }
inline const char* to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }
inline const char* to_string(Ring r) { return r == Ring::inner ? "inner" : "outer"; }

// ---------------------------------------------------------------------------
// errors

// Resource guard tripped (chain too long for dense assembly / ED).
struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerical routine failed to deliver (eigensolver, root count, census).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Root search ended with the wrong number of solutions; carries what was found.
struct root_count_error : numerical_error {
  std::vector<cplx> found;
  root_count_error(const std::string& msg, std::vector<cplx> got)
      : numerical_error(msg), found(std::move(got)) {}
};

// ---------------------------------------------------------------------------
// model parameters

struct ModelParams {
  int L = 0;
  cplx lambda{0.0, 0.0};
  bool allow_odd = false;  // odd chain lengths only with explicit override

  void validate() const {
    if (L < 2) throw std::invalid_argument("chain length L must be >= 2");
    if (L % 2 != 0 && !allow_odd)
      throw std::invalid_argument("odd L rejected; pass the odd-length override to proceed");
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
      throw std::invalid_argument("lambda must be finite");
  }
};

// Anisotropy of the unscaled Hamiltonian
//   H_gamma = -(1/2) sum_j [ (1+gamma)/2 sx sx + (1-gamma)/2 sy sy ].
// Related by lambda = (1-gamma)/(1+gamma), H_lambda = 4/(1+gamma) H_gamma.
struct GammaParams {
  cplx gamma{0.0, 0.0};

  void validate() const {
    if (gamma == cplx(-1.0, 0.0))
      throw std::invalid_argument("gamma = -1 is a pole of the lambda map");
    if (!std::isfinite(gamma.real()) || !std::isfinite(gamma.imag()))
      throw std::invalid_argument("gamma must be finite");
  }
};

inline cplx lambda_from_gamma(const GammaParams& g) {
  g.validate();
  return (cplx(1.0) - g.gamma) / (cplx(1.0) + g.gamma);
}

inline GammaParams gamma_from_lambda(cplx lambda) {
  if (lambda == cplx(-1.0, 0.0))
    throw std::invalid_argument("lambda = -1 has no finite gamma");
  return GammaParams{(cplx(1.0) - lambda) / (cplx(1.0) + lambda)};
}

// ---------------------------------------------------------------------------
// canonical branch conventions

// Fold into the principal half-plane Re > 0, or Re == 0 with Im >= 0.
// Both signs of every quasi-energy enter the spectrum, so the choice is
// free; fixing it makes set comparisons deterministic.
inline cplx canonical_half_plane(cplx e) {
  if (e.real() < 0.0 || (e.real() == 0.0 && e.imag() < 0.0)) return -e;
  return e;
}

inline cplx canonical_sqrt(cplx a) { return canonical_half_plane(std::sqrt(a)); }

// Distance between quasi-energies modulo the free overall sign. Needed
// because the canonical fold can split a coalescing pair across the
// branch cut (e.g. +i and -i are the same mode).
inline double mode_distance(cplx a, cplx b) {
  return std::min(std::abs(a - b), std::abs(a + b));
}

inline bool complex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// ---------------------------------------------------------------------------
// spectra

struct QuasiEnergySet {
  int L = 0;
  std::vector<cplx> epsilons;         // length L, sorted by (Re, Im)
  std::vector<Sector> sector_labels;  // parallel to epsilons
  EpsSource source = EpsSource::matrix;
  bool near_degenerate = false;  // two a_j = eps_j^2 closer than 1e-10
};

struct SpectrumMultiset {
  std::vector<cplx> energies;  // 2^L values, sorted by (Re, Im)
  SpectrumOrigin origin = SpectrumOrigin::free_fermion;
};

// Result of matching two spectra as multisets.
struct MatchReport {
  bool matched = false;
  double max_pair_distance = 0.0;  // bottleneck distance of the best pairing
};

}  // namespace xyep
