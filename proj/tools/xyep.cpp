// xyep: spectra, exceptional points, and phases of the open non-Hermitian
// XY chain at complex anisotropy. Every subcommand emits a deterministic
// machine-readable report (json, csv, or svg) with its config embedded.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xyep/xyep.hpp"

namespace {

using namespace xyep;

cplx parse_complex(const std::string& s, const char* what) {
  double re = 0.0, im = 0.0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%lf,%lf%c", &re, &im, &tail) == 2) return {re, im};
  if (std::sscanf(s.c_str(), "%lf%c", &re, &tail) == 1) return {re, 0.0};
  throw std::invalid_argument(std::string(what) + " expects 're' or 're,im', got '" + s + "'");
}

// --lambda and --gamma are alternative ways to fix the coupling
cplx resolve_lambda(const std::string& lambda_s, const std::string& gamma_s,
                    const std::string& fallback) {
  if (!lambda_s.empty() && !gamma_s.empty())
    throw std::invalid_argument("--lambda and --gamma are mutually exclusive");
  if (!gamma_s.empty()) return lambda_from_gamma(GammaParams{parse_complex(gamma_s, "--gamma")});
  if (!lambda_s.empty()) return parse_complex(lambda_s, "--lambda");
  if (!fallback.empty()) return parse_complex(fallback, "--lambda default");
  throw std::invalid_argument("one of --lambda or --gamma is required");
}

void require_format(const std::string& format, std::initializer_list<const char*> allowed,
                    const char* cmd) {
  for (const char* a : allowed)
    if (format == a) return;
  throw std::invalid_argument(std::string(cmd) + " does not support --format " + format);
}

struct GridArgs {
  std::string bounds;         // "re_min,re_max,im_min,im_max"
  std::string res = "64";     // "n" or "nx,ny"
  GridSpec parse() const {
    GridSpec g;
    char tail = 0;
    if (std::sscanf(bounds.c_str(), "%lf,%lf,%lf,%lf%c", &g.re_min, &g.re_max, &g.im_min,
                    &g.im_max, &tail) != 4)
      throw std::invalid_argument("--grid expects 're_min,re_max,im_min,im_max'");
    if (std::sscanf(res.c_str(), "%d,%d%c", &g.nx, &g.ny, &tail) != 2) {
      if (std::sscanf(res.c_str(), "%d%c", &g.nx, &tail) != 1)
        throw std::invalid_argument("--res expects 'n' or 'nx,ny'");
      g.ny = g.nx;
    }
    g.validate();
    return g;
  }
};

json::value grid_config(const GridSpec& g) {
  return json::value::object()
      .set("re_min", json::value::num(g.re_min))
      .set("re_max", json::value::num(g.re_max))
      .set("im_min", json::value::num(g.im_min))
      .set("im_max", json::value::num(g.im_max))
      .set("nx", json::value::integer(g.nx))
      .set("ny", json::value::integer(g.ny));
}

std::string bool_cell(bool b) { return b ? "1" : "0"; }

// ---------------------------------------------------------------- quasi ---

std::string run_quasi(int L, cplx lambda, int threads, const std::string& format) {
  require_format(format, {"json", "csv"}, "quasi");
  const ModelParams p{L, lambda};
  p.validate();
  std::vector<QuasiMomentum> roots;
  for (const Branch b : {Branch::plus, Branch::minus})
    for (const QuasiMomentum& q : solve_quasimomenta(p, b)) roots.push_back(q);
  const RouteCrossCheck cc = crosscheck_routes(p);
  const QuasiEnergySet qs = quasi_energies_matrix(p);

  if (format == "csv") {
    std::ostringstream os;
    csv_writer w(os);
    w.comment("schema 1");
    w.comment("command quasi");
    w.comment("L " + std::to_string(L));
    w.comment("lambda " + format_g17(lambda.real()) + " " + format_g17(lambda.imag()));
    w.comment("threads " + std::to_string(threads));
    w.header({"branch", "k_re", "k_im", "residual", "eps_re", "eps_im"});
    for (const QuasiMomentum& q : roots) {
      const cplx eps = eps_lambda_from_k(q.k, lambda);
      w.row({to_string(q.branch), format_g17(q.k.real()), format_g17(q.k.imag()),
             format_g17(std::abs(k_residual(q.k, p, q.branch))), format_g17(eps.real()),
             format_g17(eps.imag())});
    }
    return os.str();
  }

  json::value root = json::envelope("quasi");
  root.set("config", json::value::object()
                         .set("L", json::value::integer(L))
                         .set("lambda", json::complex_value(lambda))
                         .set("threads", json::value::integer(threads))
                         .set("format", json::value::str(format)));
  json::value arr = json::value::array();
  for (const QuasiMomentum& q : roots) {
    arr.push(json::value::object()
                 .set("branch", json::value::str(to_string(q.branch)))
                 .set("k", json::complex_value(q.k))
                 .set("eps", json::complex_value(eps_lambda_from_k(q.k, lambda)))
                 .set("residual", json::value::num(std::abs(k_residual(q.k, p, q.branch)))));
  }
  root.set("roots", std::move(arr));
  json::value eps_arr = json::value::array();
  for (const cplx& e : qs.epsilons) eps_arr.push(json::complex_value(e));
  root.set("matrix_eps", std::move(eps_arr));
  root.set("crosscheck", json::value::object()
                             .set("max_distance", json::value::num(cc.max_distance))
                             .set("pass", json::value::boolean(cc.pass))
                             .set("near_degenerate", json::value::boolean(cc.near_degenerate))
                             .set("tol", json::value::num(cc.tol)));
  return root.dump();
}

// ------------------------------------------------------------- spectrum ---

std::string run_spectrum(int L, cplx lambda, bool compare_ed, bool full, int threads,
                         const std::string& format) {
  require_format(format, {"json", "csv"}, "spectrum");
  const ModelParams p{L, lambda};
  const QuasiEnergySet qs = quasi_energies_matrix(p);
  const cplx e0 = ground_state_energy(qs);
  const bool with_energies = full || L <= 12;

  if (format == "csv") {
    std::ostringstream os;
    csv_writer w(os);
    w.comment("schema 1");
    w.comment("command spectrum");
    w.comment("L " + std::to_string(L));
    w.comment("lambda " + format_g17(lambda.real()) + " " + format_g17(lambda.imag()));
    w.comment("threads " + std::to_string(threads));
    w.comment("ground_state_energy " + format_g17(e0.real()) + " " + format_g17(e0.imag()));
    w.header({"eps_re", "eps_im", "sector"});
    for (std::size_t i = 0; i < qs.epsilons.size(); ++i)
      w.row({format_g17(qs.epsilons[i].real()), format_g17(qs.epsilons[i].imag()),
             to_string(qs.sector_labels[i])});
    return os.str();
  }

  json::value root = json::envelope("spectrum");
  root.set("config", json::value::object()
                         .set("L", json::value::integer(L))
                         .set("lambda", json::complex_value(lambda))
                         .set("compare_ed", json::value::boolean(compare_ed))
                         .set("full", json::value::boolean(full))
                         .set("threads", json::value::integer(threads))
                         .set("format", json::value::str(format)));
  json::value eps_arr = json::value::array();
  json::value sect_arr = json::value::array();
  for (std::size_t i = 0; i < qs.epsilons.size(); ++i) {
    eps_arr.push(json::complex_value(qs.epsilons[i]));
    sect_arr.push(json::value::str(to_string(qs.sector_labels[i])));
  }
  root.set("epsilons", std::move(eps_arr));
  root.set("sectors", std::move(sect_arr));
  root.set("near_degenerate", json::value::boolean(qs.near_degenerate));
  root.set("ground_state_energy", json::complex_value(e0));
  if (with_energies) {
    const SpectrumMultiset sp = assemble_spectrum(qs);
    json::value en = json::value::array();
    for (const cplx& e : sp.energies) en.push(json::complex_value(e));
    root.set("energies", std::move(en));
  } else {
    root.set("energies_omitted", json::value::boolean(true));
  }
  if (compare_ed) {
    const SpectrumMultiset ff = assemble_spectrum(qs);
    const SpectrumMultiset ed = exact_diagonalization(p);
    const MatchReport mr = spectra_match(ff, ed, 1e-8);
    root.set("compare", json::value::object()
                            .set("matched", json::value::boolean(mr.matched))
                            .set("max_pair_distance", json::value::num(mr.max_pair_distance))
                            .set("tol", json::value::num(1e-8)));
  }
  return root.dump();
}

// ------------------------------------------------------------------ eps ---

std::string run_eps(int L, bool allow_odd, int threads, const std::string& format) {
  require_format(format, {"json", "csv", "svg"}, "eps");
  EpFinderOptions opt;
  opt.threads = threads;
  opt.allow_odd = allow_odd;
  const std::vector<EpRecord> records = find_eps(L, opt);

  if (format == "svg") {
    std::vector<svg::scatter_point> pts;
    double r_max = 1.0;
    for (const EpRecord& r : records) r_max = std::max(r_max, std::abs(r.lambda_ep));
    for (const EpRecord& r : records)
      pts.push_back({r.lambda_ep.real(), r.lambda_ep.imag(),
                     r.ring == Ring::inner ? "#1f77b4" : "#d62728"});
    const double b = 1.1 * r_max;
    return svg::scatter(pts, -b, b, -b, b,
                        "exceptional points, L=" + std::to_string(L) +
                            " (blue inner, red outer)");
  }

  if (format == "csv") {
    std::ostringstream os;
    csv_writer w(os);
    w.comment("schema 1");
    w.comment("command eps");
    w.comment("L " + std::to_string(L));
    w.comment("threads " + std::to_string(threads));
    w.header({"lambda_re", "lambda_im", "k_re", "k_im", "branch", "ring", "quasi_gap",
              "lr_overlap", "on_axis"});
    for (const EpRecord& r : records)
      w.row({format_g17(r.lambda_ep.real()), format_g17(r.lambda_ep.imag()),
             format_g17(r.k_ep.real()), format_g17(r.k_ep.imag()), to_string(r.branch),
             to_string(r.ring), format_g17(r.quasi_gap), format_g17(r.lr_overlap),
             bool_cell(r.on_axis)});
    return os.str();
  }

  json::value root = json::envelope("eps");
  root.set("config", json::value::object()
                         .set("L", json::value::integer(L))
                         .set("allow_odd", json::value::boolean(allow_odd))
                         .set("threads", json::value::integer(threads))
                         .set("format", json::value::str(format)));
  root.set("count", json::value::integer(static_cast<long long>(records.size())));
  json::value arr = json::value::array();
  for (const EpRecord& r : records)
    arr.push(json::value::object()
                 .set("lambda", json::complex_value(r.lambda_ep))
                 .set("k", json::complex_value(r.k_ep))
                 .set("branch", json::value::str(to_string(r.branch)))
                 .set("ring", json::value::str(to_string(r.ring)))
                 .set("quasi_gap", json::value::num(r.quasi_gap))
                 .set("lr_overlap", json::value::num(r.lr_overlap))
                 .set("on_axis", json::value::boolean(r.on_axis))
                 .set("trivial", json::value::boolean(r.trivial)));
  root.set("records", std::move(arr));
  return root.dump();
}

// ---------------------------------------------------------------- rings ---

std::string run_rings(const std::string& L_list, int threads, const std::string& format) {
  require_format(format, {"json", "csv"}, "rings");
  std::vector<int> Ls;
  std::stringstream ss(L_list);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) Ls.push_back(std::stoi(tok));
  if (Ls.empty()) throw std::invalid_argument("--L expects a comma-separated list of lengths");
  const ConvergenceSeries series = convergence_series(Ls, threads);

  if (format == "csv") {
    std::ostringstream os;
    csv_writer w(os);
    w.comment("schema 1");
    w.comment("command rings");
    w.comment("L " + L_list);
    w.comment("threads " + std::to_string(threads));
    w.comment("inner_slope " + format_g17(series.inner_slope));
    w.comment("outer_slope " + format_g17(series.outer_slope));
    w.header({"L", "inner_max_dev", "outer_max_dev", "inner_radial_dev", "outer_radial_dev",
              "inner_all_inside", "outer_all_outside"});
    for (const RingConvergenceReport& r : series.reports)
      w.row({std::to_string(r.L), format_g17(r.inner_max_dev), format_g17(r.outer_max_dev),
             format_g17(r.inner_radial_dev), format_g17(r.outer_radial_dev),
             bool_cell(r.inner_all_inside), bool_cell(r.outer_all_outside)});
    return os.str();
  }

  json::value root = json::envelope("rings");
  json::value ls = json::value::array();
  for (int L : Ls) ls.push(json::value::integer(L));
  root.set("config", json::value::object()
                         .set("L", std::move(ls))
                         .set("threads", json::value::integer(threads))
                         .set("format", json::value::str(format)));
  json::value reps = json::value::array();
  for (const RingConvergenceReport& r : series.reports) {
    json::value angles = json::value::array();
    for (double a : r.predicted_angles) angles.push(json::value::num(a));
    json::value errs = json::value::array();
    for (double a : r.angle_errors) errs.push(json::value::num(a));
    json::value matched = json::value::array();
    for (auto m : r.matched) matched.push(json::value::boolean(m != 0));
    reps.push(json::value::object()
                  .set("L", json::value::integer(r.L))
                  .set("inner_max_dev", json::value::num(r.inner_max_dev))
                  .set("outer_max_dev", json::value::num(r.outer_max_dev))
                  .set("inner_radial_dev", json::value::num(r.inner_radial_dev))
                  .set("outer_radial_dev", json::value::num(r.outer_radial_dev))
                  .set("inner_all_inside", json::value::boolean(r.inner_all_inside))
                  .set("outer_all_outside", json::value::boolean(r.outer_all_outside))
                  .set("predicted_angles", std::move(angles))
                  .set("angle_errors", std::move(errs))
                  .set("matched", std::move(matched)));
  }
  root.set("reports", std::move(reps));
  root.set("slopes", json::value::object()
                         .set("inner", json::value::num(series.inner_slope))
                         .set("outer", json::value::num(series.outer_slope)));
  return root.dump();
}

// ------------------------------------------------------------------ gap ---

std::string run_gap(int L, const GridArgs& grid_args, int threads, const std::string& format) {
  require_format(format, {"json", "csv", "svg"}, "gap");
  const GridSpec g = grid_args.parse();
  const GapGrid gg = gap_landscape(L, g, threads);

  if (format == "svg") {
    // grayscale on log10 of the gap; dark funnels mark candidate EPs
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < gg.gap.size(); ++i)
      if (gg.ok[i] && gg.gap[i] > 0.0) {
        lo = std::min(lo, std::log10(gg.gap[i]));
        hi = std::max(hi, std::log10(gg.gap[i]));
      }
    if (!(hi > lo)) {
      lo = -1.0;
      hi = 0.0;
    }
    return svg::heatmap(
        g.nx, g.ny,
        [&](int ix, int iy) {
          const std::size_t cell = static_cast<std::size_t>(iy) * g.nx + ix;
          if (!gg.ok[cell]) return std::string("#ff00ff");
          const double t = (std::log10(std::max(gg.gap[cell], 1e-300)) - lo) / (hi - lo);
          return svg::gray(t);
        },
        "min quasi-energy gap (log gray), L=" + std::to_string(L));
  }

  if (format == "csv") {
    std::ostringstream os;
    csv_writer w(os);
    w.comment("schema 1");
    w.comment("command gap");
    w.comment("L " + std::to_string(L));
    w.comment("grid " + format_g17(g.re_min) + " " + format_g17(g.re_max) + " " +
              format_g17(g.im_min) + " " + format_g17(g.im_max));
    w.comment("res " + std::to_string(g.nx) + " " + std::to_string(g.ny));
    w.comment("threads " + std::to_string(threads));
    w.header({"lambda_re", "lambda_im", "gap", "ok"});
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const std::size_t cell = static_cast<std::size_t>(iy) * g.nx + ix;
        w.row({format_g17(g.re_at(ix)), format_g17(g.im_at(iy)), format_g17(gg.gap[cell]),
               bool_cell(gg.ok[cell] != 0)});
      }
    return os.str();
  }

  json::value root = json::envelope("gap");
  root.set("config", json::value::object()
                         .set("L", json::value::integer(L))
                         .set("grid", grid_config(g))
                         .set("threads", json::value::integer(threads))
                         .set("format", json::value::str(format)));
  json::value gaps = json::value::array();
  json::value oks = json::value::array();
  for (std::size_t i = 0; i < gg.gap.size(); ++i) {
    gaps.push(json::value::num(gg.gap[i]));
    oks.push(json::value::boolean(gg.ok[i] != 0));
  }
  root.set("gap", std::move(gaps));
  root.set("ok", std::move(oks));
  return root.dump();
}

// ------------------------------------------------------------------- pt ---

std::string run_pt(int L, const std::string& lambda_s, const std::string& sweep, double tol,
                   int threads, const std::string& format) {
  require_format(format, {"json", "csv"}, "pt");
  (void)threads;
  std::vector<cplx> lambdas;
  if (!sweep.empty()) {
    double a = 0.0, b = 0.0;
    int n = 0;
    char tail = 0;
    if (std::sscanf(sweep.c_str(), "%lf:%lf:%d%c", &a, &b, &n, &tail) != 3 || n < 1)
      throw std::invalid_argument("--sweep expects 'start:stop:count' over Im(lambda)");
    for (int i = 0; i < n; ++i)
      lambdas.emplace_back(0.0, n == 1 ? a : a + (b - a) * i / (n - 1));
  } else if (!lambda_s.empty()) {
    lambdas.push_back(parse_complex(lambda_s, "--lambda"));
  } else {
    throw std::invalid_argument("pt needs --lambda or --sweep");
  }

  std::vector<PtReport> reports;
  reports.reserve(lambdas.size());
  for (const cplx& lam : lambdas) reports.push_back(pt_spectrum_check(ModelParams{L, lam}, tol));

  if (format == "csv") {
    std::ostringstream os;
    csv_writer w(os);
    w.comment("schema 1");
    w.comment("command pt");
    w.comment("L " + std::to_string(L));
    w.comment("tol " + format_g17(tol));
    w.header({"lambda_im", "conjugation_defect", "real_count", "conjugate_pair_count"});
    for (const PtReport& r : reports)
      w.row({format_g17(r.lambda.imag()), format_g17(r.conjugation_defect),
             std::to_string(r.real_count), std::to_string(r.conjugate_pair_count)});
    return os.str();
  }

  json::value root = json::envelope("pt");
  json::value cfg = json::value::object().set("L", json::value::integer(L));
  if (!sweep.empty()) cfg.set("sweep", json::value::str(sweep));
  if (!lambda_s.empty()) cfg.set("lambda", json::complex_value(lambdas.front()));
  cfg.set("tol", json::value::num(tol)).set("format", json::value::str(format));
  root.set("config", std::move(cfg));
  json::value arr = json::value::array();
  for (const PtReport& r : reports)
    arr.push(json::value::object()
                 .set("lambda", json::complex_value(r.lambda))
                 .set("conjugation_defect", json::value::num(r.conjugation_defect))
                 .set("real_count", json::value::integer(r.real_count))
                 .set("conjugate_pair_count", json::value::integer(r.conjugate_pair_count)));
  root.set("reports", std::move(arr));
  return root.dump();
}

// ---------------------------------------------------------------- phase ---

std::string run_phase(const GridArgs& grid_args, int n_k, int threads,
                      const std::string& format) {
  require_format(format, {"json", "csv", "svg"}, "phase");
  const GridSpec g = grid_args.parse();
  const std::vector<PhaseSample> samples = phase_diagram(g, n_k, threads);

  if (format == "svg") {
    return svg::heatmap(
        g.nx, g.ny,
        [&](int ix, int iy) {
          const PhaseSample& s = samples[static_cast<std::size_t>(iy) * g.nx + ix];
          if (s.boundary || s.w == 0) return std::string("#bbbbbb");
          return std::string(s.w > 0 ? "#4f81bd" : "#c0504d");
        },
        "winding number (blue +1, red -1, gray boundary)");
  }

  if (format == "csv") {
    std::ostringstream os;
    csv_writer w(os);
    w.comment("schema 1");
    w.comment("command phase");
    w.comment("grid " + format_g17(g.re_min) + " " + format_g17(g.re_max) + " " +
              format_g17(g.im_min) + " " + format_g17(g.im_max));
    w.comment("res " + std::to_string(g.nx) + " " + std::to_string(g.ny));
    w.comment("nk " + std::to_string(n_k));
    w.comment("threads " + std::to_string(threads));
    w.header({"lambda_re", "lambda_im", "w", "samples_used", "boundary"});
    for (int iy = 0; iy < g.ny; ++iy)
      for (int ix = 0; ix < g.nx; ++ix) {
        const PhaseSample& s = samples[static_cast<std::size_t>(iy) * g.nx + ix];
        w.row({format_g17(s.lambda.real()), format_g17(s.lambda.imag()), std::to_string(s.w),
               std::to_string(s.samples_used), bool_cell(s.boundary)});
      }
    return os.str();
  }

  json::value root = json::envelope("phase");
  root.set("config", json::value::object()
                         .set("grid", grid_config(g))
                         .set("nk", json::value::integer(n_k))
                         .set("threads", json::value::integer(threads))
                         .set("format", json::value::str(format)));
  json::value arr = json::value::array();
  for (const PhaseSample& s : samples)
    arr.push(json::value::object()
                 .set("lambda", json::complex_value(s.lambda))
                 .set("w", json::value::integer(s.w))
                 .set("samples_used", json::value::integer(s.samples_used))
                 .set("boundary", json::value::boolean(s.boundary)));
  root.set("samples", std::move(arr));
  return root.dump();
}

// --------------------------------------------------------------- verify ---

std::string run_verify(int L, const std::string& lambda_s, int trivial_sign,
                       const std::string& branch_s, bool ham, double tol,
                       const std::string& format) {
  require_format(format, {"json"}, "verify");
  json::value root = json::envelope("verify");
  if (trivial_sign != 0) {
    const Branch b = branch_s == "minus" ? Branch::minus : Branch::plus;
    const TrivialPointReport r = verify_trivial_point(L, trivial_sign, b);
    root.set("config", json::value::object()
                           .set("L", json::value::integer(L))
                           .set("trivial_sign", json::value::integer(trivial_sign))
                           .set("branch", json::value::str(to_string(b)))
                           .set("format", json::value::str(format)));
    root.set("trivial_point", json::value::object()
                                  .set("lambda", json::complex_value(r.lambda))
                                  .set("k", json::complex_value(r.k))
                                  .set("residual", json::value::num(r.residual))
                                  .set("residual_derivative",
                                       json::value::num(r.residual_derivative))
                                  .set("repeated_root", json::value::boolean(r.repeated_root))
                                  .set("pair_gap", json::value::num(r.pair_gap))
                                  .set("pair_overlap", json::value::num(r.pair_overlap))
                                  .set("is_ep", json::value::boolean(r.is_ep)));
    return root.dump();
  }
  if (lambda_s.empty()) throw std::invalid_argument("verify needs --lambda or --trivial");
  const cplx lambda = parse_complex(lambda_s, "--lambda");
  EpRecord rec;
  rec.lambda_ep = lambda;
  const EpVerification v = verify_ep(rec, L, tol, ham);
  root.set("config", json::value::object()
                         .set("L", json::value::integer(L))
                         .set("lambda", json::complex_value(lambda))
                         .set("hamiltonian_level", json::value::boolean(ham))
                         .set("tol", json::value::num(tol))
                         .set("format", json::value::str(format)));
  json::value rep = json::value::object()
                        .set("quasi_gap", json::value::num(v.quasi_gap))
                        .set("lr_overlap", json::value::num(v.lr_overlap))
                        .set("same_sector", json::value::boolean(v.same_sector))
                        .set("matrix_pass", json::value::boolean(v.matrix_pass));
  if (v.ham_checked)
    rep.set("ham_gap", json::value::num(v.ham_gap))
        .set("ham_overlap", json::value::num(v.ham_overlap))
        .set("ham_coalescing_pairs", json::value::integer(v.ham_coalescing_pairs))
        .set("ham_pass", json::value::boolean(v.ham_pass));
  root.set("verification", std::move(rep));
  return root.dump();
}

void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty() || out_path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file: " + out_path);
  f << payload;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"open-chain non-Hermitian XY model: spectra, exceptional points, phases"};
  app.require_subcommand(1);

  int L = 0, threads = 0, n_k = 256, trivial_sign = 0;
  std::string lambda_s, gamma_s, out_path, format = "json", L_list, sweep, branch_s = "plus";
  double tol = 1e-6, pt_tol = 1e-9;
  bool compare_ed = false, full = false, allow_odd = false, ham = false;
  GridArgs grid_args;

  auto add_common = [&](CLI::App* cmd, bool with_lambda) {
    cmd->add_option("--threads", threads, "worker threads (0 = XYEP_THREADS env or hardware)");
    cmd->add_option("--out", out_path, "output file (default stdout)");
    cmd->add_option("--format", format, "json, csv, or svg where supported")
        ->check(CLI::IsMember({"json", "csv", "svg"}));
    if (with_lambda) {
      cmd->add_option("--lambda", lambda_s, "complex anisotropy as 're,im' or 're'");
      cmd->add_option("--gamma", gamma_s, "alternative coupling 're,im'; lambda = (1-g)/(1+g)");
    }
  };

  CLI::App* c_quasi = app.add_subcommand("quasi", "quasi-momenta and quasi-energies");
  c_quasi->add_option("--L", L, "chain length")->required();
  add_common(c_quasi, true);

  CLI::App* c_spec = app.add_subcommand("spectrum", "quasi-energies and many-body spectrum");
  c_spec->add_option("--L", L, "chain length")->required();
  c_spec->add_flag("--compare-ed", compare_ed, "cross-check against dense diagonalization");
  c_spec->add_flag("--full", full, "include all 2^L energies regardless of size");
  add_common(c_spec, true);

  CLI::App* c_eps = app.add_subcommand("eps", "exceptional point census");
  c_eps->add_option("--L", L, "chain length")->required();
  c_eps->add_flag("--allow-odd", allow_odd, "search odd lengths without the census check");
  add_common(c_eps, false);

  CLI::App* c_rings = app.add_subcommand("rings", "EP ring convergence to the unit circle");
  c_rings->add_option("--L", L_list, "comma-separated chain lengths")->required();
  add_common(c_rings, false);

  CLI::App* c_gap = app.add_subcommand("gap", "minimal quasi-energy gap landscape");
  c_gap->add_option("--L", L, "chain length")->required();
  c_gap->add_option("--grid", grid_args.bounds, "re_min,re_max,im_min,im_max")->required();
  c_gap->add_option("--res", grid_args.res, "grid resolution 'n' or 'nx,ny'");
  add_common(c_gap, false);

  CLI::App* c_pt = app.add_subcommand("pt", "PT conjugation checks on the imaginary axis");
  c_pt->add_option("--L", L, "chain length")->required();
  c_pt->add_option("--sweep", sweep, "Im(lambda) sweep 'start:stop:count'");
  c_pt->add_option("--tol", pt_tol, "real/pair classification tolerance");
  add_common(c_pt, true);

  CLI::App* c_phase = app.add_subcommand("phase", "winding-number phase diagram");
  c_phase->add_option("--grid", grid_args.bounds, "re_min,re_max,im_min,im_max")->required();
  c_phase->add_option("--res", grid_args.res, "grid resolution 'n' or 'nx,ny'");
  c_phase->add_option("--nk", n_k, "contour samples (>= 64)");
  add_common(c_phase, false);

  CLI::App* c_verify = app.add_subcommand("verify", "EP / trivial-point verification report");
  c_verify->add_option("--L", L, "chain length")->required();
  c_verify->add_option("--trivial", trivial_sign, "verify the built-in trivial point (+1 or -1)");
  c_verify->add_option("--branch", branch_s, "plus or minus (trivial point only)")
      ->check(CLI::IsMember({"plus", "minus"}));
  c_verify->add_flag("--ham", ham, "also verify at the dense-Hamiltonian level (L <= 10)");
  c_verify->add_option("--tol", tol, "coalescence tolerance");
  add_common(c_verify, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::string payload;
    if (app.got_subcommand(c_quasi))
      payload = run_quasi(L, resolve_lambda(lambda_s, gamma_s, ""), threads, format);
    else if (app.got_subcommand(c_spec))
      payload = run_spectrum(L, resolve_lambda(lambda_s, gamma_s, "1,0"), compare_ed, full,
                             threads, format);
    else if (app.got_subcommand(c_eps))
      payload = run_eps(L, allow_odd, threads, format);
    else if (app.got_subcommand(c_rings))
      payload = run_rings(L_list, threads, format);
    else if (app.got_subcommand(c_gap))
      payload = run_gap(L, grid_args, threads, format);
    else if (app.got_subcommand(c_pt))
      payload = run_pt(L, lambda_s, sweep, pt_tol, threads, format);
    else if (app.got_subcommand(c_phase))
      payload = run_phase(grid_args, n_k, threads, format);
    else if (app.got_subcommand(c_verify))
      payload = run_verify(L, lambda_s, trivial_sign, branch_s, ham, tol, format);
    emit(out_path, payload);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
