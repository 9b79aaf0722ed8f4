// Command-line front end.  Every computation goes through the public C
// API; this file only parses flags, shuttles tables to CSV, and maps
// outcomes to exit codes (0 = pass, 1 = tolerance/compute failure,
// 2 = usage error).
#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ptasep.h"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void die(int code, const std::string& message) {
  throw CliError{code, message};
}

void check_status(ptasep_status st) {
  if (st == PTASEP_OK) return;
  const std::string detail = std::string(ptasep_strerror(st)) + ": " +
                             ptasep_last_error();
  switch (st) {
    case PTASEP_ERR_INVALID:
    case PTASEP_ERR_DEGENERATE_Z:
    case PTASEP_ERR_SHAPE:
    case PTASEP_ERR_NEGATIVE_TIME:
    case PTASEP_ERR_SCALE:
    case PTASEP_ERR_GRID:
      die(kExitUsage, detail);
    default:
      die(kExitFail, detail);
  }
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Streams a curve as CSV to `path`, or to standard output when empty.
// `text_column` optionally maps one numeric column to labels.
void write_curve(const ptasep_curve* c, const std::string& path,
                 int text_column = -1,
                 const std::vector<std::string>& labels = {}) {
  std::ostringstream body;
  body << ptasep_curve_header(c) << "\n";
  const int64_t rows = ptasep_curve_rows(c);
  const int32_t cols = ptasep_curve_cols(c);
  for (int64_t r = 0; r < rows; ++r) {
    for (int32_t col = 0; col < cols; ++col) {
      if (col) body << ",";
      const double v = ptasep_curve_get(c, r, col);
      if (col == text_column) {
        body << labels.at(static_cast<size_t>(v));
      } else {
        body << format_value(v);
      }
    }
    body << "\n";
  }
  if (path.empty()) {
    std::cout << body.str();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) die(kExitUsage, "cannot open output file: " + path);
  out << body.str();
  if (!out.good()) die(kExitFail, "failed writing output file: " + path);
}

struct Curve {
  ptasep_curve* handle = nullptr;
  ~Curve() { ptasep_curve_free(handle); }
  ptasep_curve** slot() { return &handle; }
};

// Reads the first two columns (grid, value) of a headed CSV file.
void read_curve_csv(const std::string& path, std::vector<double>& grid,
                    std::vector<double>& value) {
  std::ifstream in(path);
  if (!in) die(kExitUsage, "cannot open curve file: " + path);
  std::string line;
  if (!std::getline(in, line)) die(kExitUsage, "empty curve file: " + path);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    double parsed[2];
    for (int col = 0; col < 2; ++col) {
      if (!std::getline(row, cell, ',')) {
        die(kExitUsage, "short row in curve file: " + path);
      }
      try {
        size_t used = 0;
        parsed[col] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        die(kExitUsage, "non-numeric cell '" + cell + "' in " + path);
      }
    }
    grid.push_back(parsed[0]);
    value.push_back(parsed[1]);
  }
  if (grid.empty()) die(kExitUsage, "no data rows in curve file: " + path);
}

struct ObservableArg {
  int32_t kind = 0;  // 0 tagged, 1 current
  int64_t index = 1;
};

ObservableArg parse_observable(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    die(kExitUsage, "observable must look like tagged:K or current:M");
  }
  const std::string head = text.substr(0, colon);
  ObservableArg obs;
  if (head == "tagged") {
    obs.kind = 0;
  } else if (head == "current") {
    obs.kind = 1;
  } else {
    die(kExitUsage, "observable must start with tagged: or current:");
  }
  try {
    obs.index = std::stoll(text.substr(colon + 1));
  } catch (const std::exception&) {
    die(kExitUsage, "bad observable index in '" + text + "'");
  }
  return obs;
}

int32_t ic_code(const std::string& ic) {
  if (ic == "flat") return 0;
  if (ic == "step") return 1;
  die(kExitUsage, "--ic must be flat or step");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact, asymptotic and sampled one-point distributions of "
               "the periodic totally asymmetric simple exclusion process"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Read defaults from a key=value file (flags win)");
  app.failure_message(CLI::FailureMessage::help);

  int32_t threads = 1;
  app.add_option("--threads", threads, "Worker threads for heavy calls")
      ->envname("PTASEP_THREADS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  // Let global options (--threads, --config) appear after the subcommand.
  app.fallthrough();

  // -- roots ---------------------------------------------------------
  auto* roots = app.add_subcommand(
      "roots", "Bethe root spectrum at a contour parameter zhat");
  int64_t r_l = 6, r_n = 3;
  double r_re = 0.5, r_im = 0.0;
  std::string r_out;
  roots->add_option("--big-l", r_l, "Ring size L")->required();
  roots->add_option("--big-n", r_n, "Particle count N")->required();
  roots->add_option("--zhat-re", r_re, "Re(zhat)")->capture_default_str();
  roots->add_option("--zhat-im", r_im, "Im(zhat)")->capture_default_str();
  roots->add_option("--out", r_out, "Output CSV path (default: stdout)");

  // -- finite-cdf ----------------------------------------------------
  auto* fin = app.add_subcommand(
      "finite-cdf", "Exact tail P(x_k(t) >= a) on a finite ring");
  std::string f_ic = "flat", f_out;
  int64_t f_l = 6, f_n = 3, f_k = 1, f_amin = 0, f_amax = 0;
  double f_t = 1.0;
  int32_t f_nodes = 0;
  double f_radius = 0.0;
  fin->add_option("--ic", f_ic, "Initial condition: flat or step")
      ->required();
  fin->add_option("--big-l", f_l, "Ring size L")->required();
  fin->add_option("--big-n", f_n, "Particle count N")->required();
  fin->add_option("--k", f_k, "Tagged particle index (1-based)")->required();
  fin->add_option("--t", f_t, "Physical time")->required();
  fin->add_option("--a-min", f_amin, "Smallest threshold")->required();
  fin->add_option("--a-max", f_amax, "Largest threshold")->required();
  fin->add_option("--quad-nodes", f_nodes,
                  "Starting contour quadrature points (0 = default)");
  fin->add_option("--radius", f_radius, "Contour radius (0 = default)");
  fin->add_option("--out", f_out, "Output CSV path (default: stdout)");

  // -- limit-cdf -----------------------------------------------------
  auto* lim = app.add_subcommand(
      "limit-cdf", "Crossover distribution of the relaxation scale");
  std::string l_family = "f1", l_ref, l_out;
  double l_tau = 1.0, l_gamma = 0.0, l_xmin = -4.0, l_xmax = 4.0,
         l_xstep = 0.5;
  int32_t l_nodes = 0, l_m = 0;
  double l_radius = 0.0;
  lim->add_option("--family", l_family, "f1 (flat) or f2 (step)")
      ->capture_default_str();
  lim->add_option("--tau", l_tau, "Rescaled time tau > 0")
      ->capture_default_str();
  lim->add_option("--gamma", l_gamma, "Shock phase (f2 only)")
      ->capture_default_str();
  lim->add_option("--x-min", l_xmin, "Grid start")->capture_default_str();
  lim->add_option("--x-max", l_xmax, "Grid end")->capture_default_str();
  lim->add_option("--x-step", l_xstep, "Grid step")->capture_default_str();
  lim->add_option("--quad-nodes", l_nodes,
                  "Starting contour quadrature points (0 = default)");
  lim->add_option("--radius", l_radius, "Contour radius (0 = default)");
  lim->add_option("--node-count", l_m,
                  "Starting kernel truncation size (0 = default)");
  lim->add_option("--emit-reference", l_ref,
                  "Emit a classical curve instead: gaussian, goe or gue");
  lim->add_option("--out", l_out, "Output CSV path (default: stdout)");

  // -- simulate ------------------------------------------------------
  auto* sim = app.add_subcommand(
      "simulate", "Kinetic Monte Carlo tail estimate with Wilson intervals");
  std::string s_ic = "step", s_obs = "tagged:1", s_out;
  int64_t s_l = 8, s_n = 4, s_samples = 1000, s_amin = 0, s_amax = 0;
  double s_t = 1.0;
  uint64_t s_seed = 1;
  sim->add_option("--ic", s_ic, "Initial condition: flat or step")
      ->required();
  sim->add_option("--big-l", s_l, "Ring size L")->required();
  sim->add_option("--big-n", s_n, "Particle count N")->required();
  sim->add_option("--t", s_t, "Physical time")->required();
  sim->add_option("--observable", s_obs,
                  "tagged:K (absolute position of particle K) or current:M "
                  "(crossings of bond M)")
      ->capture_default_str();
  sim->add_option("--samples", s_samples, "Trajectory count (>= 100)")
      ->capture_default_str();
  sim->add_option("--seed", s_seed, "RNG seed")->capture_default_str();
  auto* samin = sim->add_option("--a-min", s_amin,
                                "First threshold (default: observed range)");
  auto* samax = sim->add_option("--a-max", s_amax,
                                "Last threshold (default: observed range)");
  sim->add_option("--out", s_out, "Output CSV path (default: stdout)");

  // -- compare -------------------------------------------------------
  auto* cmp = app.add_subcommand(
      "compare", "Sup-norm comparison of two curves on one grid");
  std::string c_a, c_b, c_out;
  double c_threshold = 0.0;
  cmp->add_option("--a", c_a, "First curve CSV")->required();
  cmp->add_option("--b", c_b, "Second curve CSV")->required();
  cmp->add_option("--threshold", c_threshold, "Pass when KS <= threshold")
      ->required();
  cmp->add_option("--out", c_out, "Report CSV path (default: stdout)");

  // -- sweep ---------------------------------------------------------
  auto* swp = app.add_subcommand(
      "sweep", "Ring-size convergence toward the crossover law");
  std::string w_family = "flat", w_out;
  int64_t w_d = 2;
  double w_rho = 0.5, w_tau = 1.0, w_gamma = 0.0, w_xmin = -2.0,
         w_xmax = 2.0, w_xstep = 0.5, w_threshold = -1.0;
  std::vector<int64_t> w_sizes;
  swp->add_option("--family", w_family, "flat or step")
      ->capture_default_str();
  swp->add_option("--d", w_d, "Flat spacing (family=flat)")
      ->capture_default_str();
  swp->add_option("--rho", w_rho, "Density (family=step)")
      ->capture_default_str();
  swp->add_option("--sizes", w_sizes, "Ring sizes L (repeat or comma list)")
      ->required()
      ->delimiter(',');
  swp->add_option("--tau", w_tau, "Rescaled time")->capture_default_str();
  swp->add_option("--gamma", w_gamma, "Shock phase (family=step)")
      ->capture_default_str();
  swp->add_option("--x-min", w_xmin, "Grid start")->capture_default_str();
  swp->add_option("--x-max", w_xmax, "Grid end")->capture_default_str();
  swp->add_option("--x-step", w_xstep, "Grid step")->capture_default_str();
  swp->add_option("--threshold", w_threshold,
                  "Also require the final sup-distance <= threshold");
  swp->add_option("--out", w_out, "Output CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help/message
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*roots) {
      Curve c;
      check_status(ptasep_roots(r_l, r_n, r_re, r_im, c.slot()));
      write_curve(c.handle, r_out, 0, {"left", "right"});
      return kExitPass;
    }

    if (*fin) {
      ptasep_quad_options quad;
      ptasep_quad_defaults(&quad);
      if (f_nodes > 0) quad.nodes = f_nodes;
      if (f_radius > 0) quad.radius = f_radius;
      quad.threads = threads;
      Curve c;
      check_status(ptasep_finite_cdf(ic_code(f_ic), f_l, f_n, f_k, f_t,
                                     f_amin, f_amax, &quad, c.slot()));
      write_curve(c.handle, f_out);
      return kExitPass;
    }

    if (*lim) {
      if (!l_ref.empty()) {
        const int32_t fam = l_ref == "gaussian" ? 0
                            : l_ref == "goe"    ? 1
                            : l_ref == "gue"    ? 2
                                                : -1;
        if (fam < 0) {
          die(kExitUsage, "--emit-reference must be gaussian, goe or gue");
        }
        Curve c;
        check_status(
            ptasep_reference_curve(fam, l_xmin, l_xmax, l_xstep, c.slot()));
        write_curve(c.handle, l_out);
        return kExitPass;
      }
      const int32_t fam = l_family == "f1" ? 1 : l_family == "f2" ? 2 : -1;
      if (fam < 0) die(kExitUsage, "--family must be f1 or f2");
      ptasep_limit_options opt;
      ptasep_limit_defaults(&opt);
      if (l_nodes > 0) opt.quad.nodes = l_nodes;
      if (l_radius > 0) opt.quad.radius = l_radius;
      if (l_m > 0) opt.node_start = l_m;
      opt.quad.threads = threads;
      Curve c;
      check_status(ptasep_limit_cdf(fam, l_tau, l_gamma, l_xmin, l_xmax,
                                    l_xstep, &opt, c.slot()));
      write_curve(c.handle, l_out);
      return kExitPass;
    }

    if (*sim) {
      const ObservableArg obs = parse_observable(s_obs);
      const bool has_range = samin->count() > 0 || samax->count() > 0;
      if (has_range && (samin->count() == 0 || samax->count() == 0)) {
        die(kExitUsage, "--a-min and --a-max must be given together");
      }
      Curve c;
      check_status(ptasep_simulate(ic_code(s_ic), s_l, s_n, s_t, obs.kind,
                                   obs.index, s_samples, s_seed, threads,
                                   has_range ? 1 : 0, s_amin, s_amax,
                                   c.slot()));
      write_curve(c.handle, s_out);
      return kExitPass;
    }

    if (*cmp) {
      std::vector<double> ga, va, gb, vb;
      read_curve_csv(c_a, ga, va);
      read_curve_csv(c_b, gb, vb);
      double ks = 0, sup = 0;
      int32_t pass = 0;
      check_status(ptasep_compare_curves(ga.data(), va.data(), ga.size(),
                                         gb.data(), vb.data(), gb.size(),
                                         c_threshold, &ks, &sup, &pass));
      std::ostringstream body;
      body << "ks_statistic,sup_pointwise,n_points,pass\n"
           << format_value(ks) << "," << format_value(sup) << ","
           << ga.size() << "," << (pass ? 1 : 0) << "\n";
      if (c_out.empty()) {
        std::cout << body.str();
      } else {
        std::ofstream out(c_out, std::ios::binary | std::ios::trunc);
        if (!out) die(kExitUsage, "cannot open output file: " + c_out);
        out << body.str();
      }
      return pass ? kExitPass : kExitFail;
    }

    if (*swp) {
      const int32_t fam = w_family == "flat" ? 0
                          : w_family == "step" ? 1
                                               : -1;
      if (fam < 0) die(kExitUsage, "--family must be flat or step");
      ptasep_quad_options quad;
      ptasep_quad_defaults(&quad);
      quad.threads = threads;
      ptasep_limit_options opt;
      ptasep_limit_defaults(&opt);
      opt.quad.threads = threads;
      Curve c;
      int32_t monotone = 0;
      check_status(ptasep_sweep(fam, w_d, w_rho, w_sizes.data(),
                                w_sizes.size(), w_tau, w_gamma, w_xmin,
                                w_xmax, w_xstep, &quad, &opt, c.slot(),
                                &monotone));
      write_curve(c.handle, w_out);
      bool ok = monotone != 0;
      if (w_threshold >= 0.0) {
        const int64_t last = ptasep_curve_rows(c.handle) - 1;
        ok = ok && ptasep_curve_get(c.handle, last, 3) <= w_threshold;
      }
      return ok ? kExitPass : kExitFail;
    }
  } catch (const CliError& err) {
    std::cerr << "error: " << err.message << "\n";
    return err.code;
  }
  return kExitUsage;
}
