#pragma once

// PT structure on the imaginary anisotropy axis: for purely imaginary
// lambda the many-body spectrum is closed under complex conjugation, so
// energies are either real or come in conjugate pairs. More generally the
// reflection lambda -> -conj(lambda) conjugates the whole spectrum.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "core_model.hpp"
#include "ep_finder.hpp"

namespace xyep {

struct PtReport {
  cplx lambda{0.0, 0.0};
  double conjugation_defect = 0.0;  // distance of the spectrum from its conjugate
  int real_count = 0;               // energies with |Im E| below tolerance
  int conjugate_pair_count = 0;     // matched pairs (E, conj E) among the rest
  double tol = 0.0;
};

namespace detail {

// Bottleneck distance between the multiset and its conjugate: zero to
// machine precision when the symmetry holds, order one when broken. Needs
// the full matcher — sorting alone cross-pairs conjugate partners whose
// real parts agree only to rounding error.
inline double conjugation_defect(const std::vector<cplx>& a) {
  SpectrumMultiset sa;
  sa.energies = a;
  SpectrumMultiset sb;
  sb.energies.reserve(a.size());
  for (const cplx& z : a) sb.energies.push_back(std::conj(z));
  return spectra_match(sa, sb, 1e-9).max_pair_distance;
}

}  // namespace detail

// Conjugation closure of the full free-fermion spectrum at pure imaginary
// lambda. Capacity follows the spectrum assembly bound (L <= 20).
inline PtReport pt_spectrum_check(const ModelParams& p, double tol = 1e-9) {
  if (std::abs(p.lambda.real()) > 1e-14)
    throw std::invalid_argument("PT check expects purely imaginary lambda");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  PtReport rep;
  rep.lambda = p.lambda;
  rep.tol = tol;
  const SpectrumMultiset spec = assemble_spectrum(quasi_energies_matrix(p));
  rep.conjugation_defect = detail::conjugation_defect(spec.energies);

  std::vector<cplx> rest;
  for (const cplx& e : spec.energies) {
    if (std::abs(e.imag()) < tol)
      ++rep.real_count;
    else
      rest.push_back(e);
  }
  // pair each upper-half energy with an unused conjugate partner
  std::vector<cplx> upper, lower;
  for (const cplx& e : rest) (e.imag() > 0.0 ? upper : lower).push_back(e);
  std::vector<bool> used(lower.size(), false);
  for (const cplx& e : upper) {
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(lower[j] - std::conj(e)) < tol) {
        used[j] = true;
        ++rep.conjugate_pair_count;
        break;
      }
    }
  }
  return rep;
}

// Spectral image of the reflection lambda -> -conj(lambda): the spectrum at
// the reflected coupling should be the conjugate of the original one.
// Returns the bottleneck-style positional defect; zero means the identity
// holds to machine precision.
inline double pt_reflection_defect(const ModelParams& p) {
  const SpectrumMultiset a = assemble_spectrum(quasi_energies_matrix(p));
  const ModelParams q{p.L, -std::conj(p.lambda), p.allow_odd};
  const SpectrumMultiset b = assemble_spectrum(quasi_energies_matrix(q));
  SpectrumMultiset ac;
  ac.energies.reserve(a.energies.size());
  for (const cplx& z : a.energies) ac.energies.push_back(std::conj(z));
  return spectra_match(ac, b, 1e-9).max_pair_distance;
}

// EPs sitting on the imaginary axis, where the PT transition happens.
// Their count is 4 when L is a multiple of 4 and 0 otherwise.
inline std::vector<EpRecord> on_axis_eps(int L, double axis_tol = 1e-7, int threads = 0) {
  EpFinderOptions opt;
  opt.threads = threads;
  opt.axis_tol = axis_tol;
  std::vector<EpRecord> all = find_eps(L, opt);
  std::vector<EpRecord> out;
  for (const EpRecord& r : all)
    if (r.on_axis) out.push_back(r);
  return out;
}

}  // namespace xyep
