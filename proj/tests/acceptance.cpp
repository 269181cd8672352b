// Acceptance gate: one check per release criterion, each reported as a
// single [PASS]/[FAIL] line. Exit status is the number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "xyep/xyep.hpp"

namespace {

using namespace xyep;
using nlohmann::json;

std::string g_note;  // failure detail for the current criterion

struct cli_result {
  int code = -1;
  std::string out;
};

cli_result run_cli(const std::string& args) {
  const char* exe = std::getenv("XYEP_CLI");
  cli_result r;
  if (!exe) {
    g_note = "XYEP_CLI not set";
    return r;
  }
  const std::string cmd = std::string(exe) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    g_note = "popen failed";
    return r;
  }
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  return r;
}

bool require(bool cond, const std::string& note) {
  if (!cond && g_note.empty()) g_note = note;
  return cond;
}

double min_dist(const std::vector<cplx>& set, cplx z) {
  double best = 1e300;
  for (const cplx& s : set) best = std::min(best, std::abs(s - z));
  return best;
}

// 1. the four-site census through the CLI: exactly {+-i/2, +-2i} to 1e-8
bool criterion_cli_quartet() {
  const cli_result r = run_cli("eps --L 4");
  if (!require(r.code == 0, "exit code " + std::to_string(r.code))) return false;
  json j;
  try {
    j = json::parse(r.out);
  } catch (const std::exception& e) {
    g_note = std::string("bad json: ") + e.what();
    return false;
  }
  std::vector<cplx> found;
  for (const json& rec : j["records"])
    found.emplace_back(rec["lambda"]["re"].get<double>(), rec["lambda"]["im"].get<double>());
  bool ok = require(found.size() == 4, "census size " + std::to_string(found.size()));
  for (const cplx want : {cplx(0, 0.5), cplx(0, -0.5), cplx(0, 2), cplx(0, -2)})
    ok &= require(min_dist(found, want) < 1e-8, "missing lambda near requested quartet");
  return ok;
}

// 2. census size 2L-4 with L-2 per ring, conjugation and reciprocity closed
bool criterion_census() {
  for (int L : {4, 6, 8, 10, 12, 14, 16}) {
    const std::vector<EpRecord> recs = find_eps(L);
    std::vector<cplx> lams;
    int inner = 0;
    for (const EpRecord& r : recs) {
      lams.push_back(r.lambda_ep);
      inner += r.ring == Ring::inner;
    }
    if (!require(static_cast<int>(recs.size()) == 2 * L - 4,
                 "L=" + std::to_string(L) + " count " + std::to_string(recs.size())))
      return false;
    if (!require(inner == L - 2 && static_cast<int>(recs.size()) - inner == L - 2,
                 "L=" + std::to_string(L) + " ring split"))
      return false;
    for (const cplx& lam : lams) {
      if (!require(min_dist(lams, std::conj(lam)) < 1e-8,
                   "L=" + std::to_string(L) + " not conjugation closed"))
        return false;
      if (!require(min_dist(lams, cplx(1.0) / lam) < 1e-8,
                   "L=" + std::to_string(L) + " not reciprocity closed"))
        return false;
    }
  }
  return true;
}

// 3. dense spectrum at L=4, lambda=2i carries +-1 and +-sqrt(15) i, and the
//    coalescing pair is self-orthogonal at both matrix and dense level
bool criterion_outer_point_spectrum() {
  const cplx lam(0.0, 2.0);
  const SpectrumMultiset ed = exact_diagonalization({4, lam});
  bool ok = true;
  const double s15 = std::sqrt(15.0);
  for (const cplx want : {cplx(1, 0), cplx(-1, 0), cplx(0, s15), cplx(0, -s15)})
    ok &= require(min_dist(ed.energies, want) < 1e-8, "expected dense eigenvalue missing");
  EpRecord rec;
  rec.lambda_ep = lam;
  const EpVerification v = verify_ep(rec, 4, 1e-6, /*hamiltonian_level=*/true);
  ok &= require(v.matrix_pass, "matrix-level coalescence failed");
  ok &= require(v.lr_overlap < 1e-6, "matrix-level overlap too large");
  ok &= require(v.ham_checked && v.ham_pass, "dense-level coalescence failed");
  ok &= require(v.ham_overlap < 1e-6, "dense-level overlap too large");
  return ok;
}

// 4. free-fermion assembly reproduces dense diagonalization
bool criterion_assembly_vs_dense() {
  std::mt19937 rng(12021);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int L : {2, 4, 6, 8}) {
    for (int i = 0; i < 20; ++i) {
      const cplx lam = std::polar(3.0 * std::sqrt(u(rng)), 2.0 * pi * u(rng));
      const ModelParams p{L, lam};
      const SpectrumMultiset ff = assemble_spectrum(quasi_energies_matrix(p));
      const SpectrumMultiset ed = exact_diagonalization(p);
      const MatchReport mr = spectra_match(ff, ed, 1e-8);
      if (!require(mr.matched, "L=" + std::to_string(L) + " distance " +
                                   std::to_string(mr.max_pair_distance)))
        return false;
    }
  }
  return true;
}

// 5. root route and matrix route agree on the quasi-energies
bool criterion_route_crosscheck() {
  std::mt19937 rng(40499);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int L : {4, 6, 8}) {
    for (int i = 0; i < 10; ++i) {
      const cplx lam = std::polar(0.1 + 2.9 * u(rng), 2.0 * pi * u(rng));
      const RouteCrossCheck cc = crosscheck_routes({L, lam}, 1e-8);
      if (!require(cc.pass, "L=" + std::to_string(L) + " distance " +
                                std::to_string(cc.max_distance)))
        return false;
    }
  }
  return true;
}

// 6. the repeated-root couplings +-(L+2)/L are not exceptional points
bool criterion_trivial_points() {
  bool ok = true;
  for (int L : {4, 6})
    for (int sign : {1, -1}) {
      const TrivialPointReport t = verify_trivial_point(L, sign);
      ok &= require(t.repeated_root, "repeated root not detected");
      ok &= require(!t.is_ep, "trivial point misclassified as EP");
      ok &= require(t.pair_overlap > 0.1, "eigenvectors unexpectedly parallel");
    }
  return ok;
}

// 7. both EP rings approach |lambda| = 1 monotonically and from their sides
bool criterion_ring_convergence() {
  double prev_in = 1e300, prev_out = 1e300;
  for (int L : {8, 16, 32}) {
    const RingConvergenceReport rep = convergence_report(L);
    bool ok = true;
    ok &= require(rep.inner_all_inside, "L=" + std::to_string(L) + " inner ring leaks outside");
    ok &= require(rep.outer_all_outside, "L=" + std::to_string(L) + " outer ring leaks inside");
    ok &= require(rep.inner_radial_dev < prev_in,
                  "L=" + std::to_string(L) + " inner radial deviation not decreasing");
    ok &= require(rep.outer_radial_dev < prev_out,
                  "L=" + std::to_string(L) + " outer radial deviation not decreasing");
    if (!ok) return false;
    prev_in = rep.inner_radial_dev;
    prev_out = rep.outer_radial_dev;
  }
  return true;
}

// 8. conjugation closure on the imaginary axis and the on-axis EP count rule
bool criterion_pt() {
  for (int L : {4, 6, 8})
    for (double li : {0.3, 0.7, 1.5, 2.5}) {
      const PtReport rep = pt_spectrum_check({L, cplx(0.0, li)});
      if (!require(rep.conjugation_defect < 1e-9,
                   "L=" + std::to_string(L) + " Im=" + std::to_string(li) + " defect " +
                       std::to_string(rep.conjugation_defect)))
        return false;
    }
  for (int L : {4, 8, 12})
    if (!require(on_axis_eps(L).size() == 4, "L=" + std::to_string(L) + " on-axis count"))
      return false;
  for (int L : {6, 10})
    if (!require(on_axis_eps(L).empty(), "L=" + std::to_string(L) + " spurious on-axis EPs"))
      return false;
  return true;
}

// 9. winding number +1 inside, -1 outside, boundary flag only near |lambda|=1
bool criterion_winding() {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const cplx lam = std::polar(0.1 + 0.85 * u(rng), 2.0 * pi * u(rng));
    const PhaseSample s = winding_number(lam, 256);
    if (!require(s.w == 1 && !s.boundary, "inside sample misclassified")) return false;
  }
  for (int i = 0; i < 200; ++i) {
    const cplx lam = std::polar(1.05 + 1.95 * u(rng), 2.0 * pi * u(rng));
    const PhaseSample s = winding_number(lam, 256);
    if (!require(s.w == -1 && !s.boundary, "outside sample misclassified")) return false;
  }
  bool ok = true;
  ok &= require(winding_number(std::polar(1.0004, 0.7), 256).boundary,
                "band sample not flagged");
  ok &= require(winding_number(std::polar(0.9996, 2.2), 256).boundary,
                "band sample not flagged");
  return ok;
}

// 10. every subcommand emits byte-identical output on repeat
bool criterion_determinism() {
  const std::vector<std::string> cmds = {
      "quasi --L 6 --lambda 0.4,0.3",
      "quasi --L 4 --lambda 0,2 --format csv",
      "spectrum --L 4 --lambda 0,2 --compare-ed",
      "spectrum --L 10 --lambda 0.9,0.1 --format csv",
      "eps --L 8",
      "eps --L 10 --threads 3",
      "eps --L 6 --format csv",
      "eps --L 4 --format svg",
      "rings --L 8,16",
      "rings --L 8 --format csv",
      "gap --L 4 --grid -0.5,0.5,1.5,2.5 --res 9",
      "gap --L 4 --grid -0.5,0.5,1.5,2.5 --res 9 --format csv",
      "gap --L 4 --grid -0.5,0.5,1.5,2.5 --res 9 --format svg",
      "pt --L 6 --sweep 0.1:3:7",
      "pt --L 4 --lambda 0,2 --format csv",
      "phase --grid -1.5,1.5,-1.5,1.5 --res 12 --nk 128",
      "phase --grid -1.5,1.5,-1.5,1.5 --res 12 --nk 128 --format csv",
      "phase --grid -1.5,1.5,-1.5,1.5 --res 12 --nk 128 --format svg",
      "verify --L 4 --lambda 0,2 --ham",
      "verify --L 6 --trivial -1 --branch minus",
  };
  for (const std::string& cmd : cmds) {
    const cli_result a = run_cli(cmd);
    const cli_result b = run_cli(cmd);
    if (!require(a.code == 0 && b.code == 0, cmd + ": nonzero exit")) return false;
    if (!require(!a.out.empty(), cmd + ": empty output")) return false;
    if (!require(a.out == b.out, cmd + ": output differs between runs")) return false;
  }
  return true;
}

struct criterion {
  const char* name;
  double time_limit_s;  // 0 = no stated limit
  std::function<bool()> run;
};

}  // namespace

int main() {
  const std::vector<criterion> criteria = {
      {"four-site census via the CLI equals {+-i/2, +-2i}", 1.0, criterion_cli_quartet},
      {"census size, ring split, conjugation and reciprocity closure up to L=16", 30.0,
       criterion_census},
      {"dense spectrum and self-orthogonal pair at lambda=2i, L=4", 0.0,
       criterion_outer_point_spectrum},
      {"free-fermion assembly matches dense diagonalization", 60.0, criterion_assembly_vs_dense},
      {"root route agrees with matrix route", 0.0, criterion_route_crosscheck},
      {"repeated-root couplings are not exceptional points", 0.0, criterion_trivial_points},
      {"EP rings close in on the unit circle from both sides", 300.0,
       criterion_ring_convergence},
      {"conjugation closure on the imaginary axis and on-axis EP counts", 0.0, criterion_pt},
      {"winding number phase assignment with tight boundary band", 60.0, criterion_winding},
      {"byte-identical reruns for every subcommand", 0.0, criterion_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    g_note.clear();
    bool ok = false;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      ok = criteria[i].run();
    } catch (const std::exception& e) {
      g_note = std::string("exception: ") + e.what();
      ok = false;
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (ok && criteria[i].time_limit_s > 0.0 && dt > criteria[i].time_limit_s) {
      ok = false;
      g_note = "time limit exceeded";
    }
    char line[512];
    if (ok)
      std::snprintf(line, sizeof line, "[PASS] %zu. %s (%.2fs)", i + 1, criteria[i].name, dt);
    else
      std::snprintf(line, sizeof line, "[FAIL] %zu. %s (%.2fs)%s%s", i + 1, criteria[i].name, dt,
                    g_note.empty() ? "" : " -- ", g_note.c_str());
    std::cout << line << std::endl;
    failures += !ok;
  }
  return failures;
}
