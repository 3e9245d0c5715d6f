// commands.cpp

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "csv.hpp"
#include "maxent/bell.hpp"
#include "maxent/cli.hpp"
#include "maxent/functional.hpp"
#include "maxent/matrix_io.hpp"
#include "maxent/solver.hpp"

namespace maxent::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("cannot parse " + std::string(what) + " '" + std::string(text) +
                                "'");
  }
  return v;
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.ridge = c.ridge;
  o.verbose = c.verbose;
  return o;
}

// Runs `body` against --out when set, otherwise against `out`.
int with_output(const RunConfig& c, std::ostream& out, std::ostream& err,
                const std::function<int(std::ostream&)>& body) {
  if (c.out.empty()) return body(out);
  std::ofstream file(c.out, std::ios::binary);
  if (!file) {
    err << "error: cannot open output file " << c.out << '\n';
    return kExitUsage;
  }
  const int code = body(file);
  file.close();
  if (!file) {
    err << "error: failed writing " << c.out << '\n';
    return kExitUsage;
  }
  return code;
}

HermitianMatrix load_observable(const std::string& source) {
  if (source == "builtin:chsh") return chsh_observable();
  if (source == "builtin:chsh_sq") return chsh_square();
  if (source.rfind("builtin:", 0) == 0) throw UsageError("unknown builtin observable " + source);
  try {
    return HermitianMatrix(read_matrix_file(source));
  } catch (const HermitianError& e) {
    throw UsageError(source + ": " + e.what());
  }
}

ConstraintSet build_constraints(const RunConfig& c) {
  if (c.b) {
    if (!c.observables.empty()) throw UsageError("--b cannot be combined with --observable");
    return ConstraintSet::normalized(4, {chsh_observable()}, {*c.b});
  }
  if (c.observables.size() != c.targets.size()) {
    throw UsageError(std::to_string(c.observables.size()) + " observables but " +
                     std::to_string(c.targets.size()) + " targets");
  }
  std::vector<HermitianMatrix> obs;
  for (const auto& src : c.observables) obs.push_back(load_observable(src));
  int dim = c.dim;
  if (!obs.empty()) {
    if (dim != 0 && dim != obs.front().dim()) {
      throw UsageError("--dim " + std::to_string(dim) + " disagrees with observable dimension " +
                       std::to_string(obs.front().dim()));
    }
    dim = obs.front().dim();
  }
  if (dim < 1) throw UsageError("no observables given; --dim is required");
  try {
    return ConstraintSet::normalized(dim, std::move(obs), c.targets);
  } catch (const ConstraintError& e) {
    throw UsageError(e.what());
  }
}

EntropicFunctional functional_of(const RunConfig& c) {
  try {
    return parse_functional(c.functional_spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

double min_eigenvalue(const RealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const RealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Wraps a command body with the shared error-to-exit-code mapping.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const MatrixFormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

// Fills options that were not given on the command line from a TOML/INI
// style file. Keys are long option names without dashes; a section header,
// if present, must name the active subcommand.
void apply_config_file(CLI::App& sub, const std::string& path) {
  const CLI::ConfigTOML format;
  for (const CLI::ConfigItem& item : format.from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && item.parents != std::vector<std::string>{sub.get_name()}) {
      throw CLI::ConfigError("section [" + item.parents.front() + "] does not match command " +
                             sub.get_name());
    }
    if (item.name == "config") throw CLI::ConfigError("config files cannot nest");
    CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
    if (opt == nullptr) throw CLI::ConfigError("unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    if (opt->get_expected_min() == 0) {
      opt->add_result(format.to_flag(item));
    } else {
      opt->add_result(item.inputs);
    }
    opt->run_callback();
  }
}

}  // namespace

std::vector<double> GridSpec::points() const {
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(count + 1));
  for (long i = 0; i <= count; ++i) pts.push_back(lo + static_cast<double>(i) * step);
  return pts;
}

GridSpec parse_grid(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    throw std::invalid_argument("grid '" + std::string(text) + "' is not lo:hi:step");
  }
  GridSpec g;
  g.lo = parse_number(text.substr(0, c1), "grid lower bound");
  g.hi = parse_number(text.substr(c1 + 1, c2 - c1 - 1), "grid upper bound");
  g.step = parse_number(text.substr(c2 + 1), "grid step");
  if (!(g.step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (!(g.hi >= g.lo)) throw std::invalid_argument("grid range is empty (hi < lo)");
  return g;
}

int cmd_infer(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const EntropicFunctional fn = functional_of(config);
    const ConstraintSet cs = build_constraints(config);
    SolverOptions opts = solver_options(config);

    std::ofstream trace_file;
    std::optional<CsvWriter> trace_csv;
    if (!config.trace.empty()) {
      trace_file.open(config.trace, std::ios::binary);
      if (!trace_file) throw UsageError("cannot open trace file " + config.trace);
      trace_csv.emplace(trace_file, std::initializer_list<std::string_view>{
                                        "iteration", "dual_value", "residual_norm", "step_length"});
      opts.trace = [&](const IterationRecord& r) {
        trace_csv->field(r.iteration).field(r.dual_value).field(r.residual_norm)
            .field(r.step_length);
        trace_csv->end_row();
      };
    }
    const MaxEntSolution sol = solve(cs, fn, opts);

    return with_output(config, out, err, [&](std::ostream& os) {
      CsvWriter csv(os, {"quantity", "i", "j", "value"});
      csv.field("converged").blank().blank().field(true);
      csv.end_row();
      csv.field("iterations").blank().blank().field(sol.iterations);
      csv.end_row();
      csv.field("entropy").blank().blank().field(sol.entropy);
      csv.end_row();
      csv.field("dual_value").blank().blank().field(sol.dual_value);
      csv.end_row();
      const RealVector& spec = sol.rho.spectrum();
      for (int i = 0; i < spec.size(); ++i) {
        csv.field("eigenvalue").field(i).blank().field(spec(i));
        csv.end_row();
      }
      for (int a = 0; a < sol.lambda.size(); ++a) {
        csv.field("lambda").field(a).blank().field(sol.lambda(a));
        csv.end_row();
      }
      for (int a = 0; a < sol.residuals.size(); ++a) {
        csv.field("residual").field(a).blank().field(sol.residuals(a));
        csv.end_row();
      }
      const RealMatrix& A = sol.curvature.A;
      for (int a = 0; a < A.rows(); ++a) {
        for (int b = 0; b < A.cols(); ++b) {
          csv.field("curvature").field(a).field(b).field(A(a, b));
          csv.end_row();
        }
      }
      return kExitOk;
    });
  });
}

int cmd_bell(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const EntropicFunctional fn = functional_of(config);
    if (!(config.alpha >= 0.0)) throw UsageError("--alpha must be >= 0");
    const std::vector<double> grid = config.b_range.points();
    const bool plain = config.alpha == 1.0;
    for (double b : grid) {
      if (!(std::abs(b) <= 1.0) || (!plain && b < 0.0)) {
        throw UsageError("b = " + format_real(b) + " outside the admissible range");
      }
    }
    const SolverOptions opts = solver_options(config);
    int code = kExitOk;
    const int written = with_output(config, out, err, [&](std::ostream& os) {
      CsvWriter csv(os, {"b", "p_plus", "p_minus", "p_zero", "lambda0", "lambda1", "S_f", "regime",
                         "concurrence", "fake"});
      for (double b : grid) {
        BellReport r;
        try {
          r = plain ? solve_bell(b, fn) : solve_bell_alpha(b, config.alpha, fn, opts);
        } catch (const SolverError& e) {
          err << "error: b = " << format_real(b) << ": " << e.what() << '\n';
          code = kExitNotConverged;
          csv.field(b);
          for (int i = 0; i < 9; ++i) csv.blank();
          csv.end_row();
          continue;
        }
        csv.field(b)
            .field(r.state.p_plus)
            .field(r.state.p_minus)
            .field(r.state.p_zero)
            .field(r.lambda0)
            .field(r.lambda1)
            .field(r.entropy)
            .field(to_string(r.regime))
            .field(r.concurrence)
            .field(r.fake);
        csv.end_row();
      }
      return kExitOk;
    });
    return written != kExitOk ? written : code;
  });
}

int cmd_phase(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (config.family != "tsallis" && config.family != "exponential") {
      throw UsageError("--family must be tsallis or exponential");
    }
    const std::vector<double> grid = config.q_range.points();
    std::vector<EntropicFunctional> fns;
    fns.reserve(grid.size());
    for (double q : grid) {
      try {
        fns.push_back(config.family == "tsallis" ? make_tsallis(q) : make_exponential(q));
      } catch (const FunctionalError& e) {
        throw UsageError("q = " + format_real(q) + ": " + e.what());
      }
    }
    return with_output(config, out, err, [&](std::ostream& os) {
      CsvWriter csv(os, {"q", "b_c", "fake_lo", "fake_hi"});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.field(grid[i]).field(critical_b(fns[i]));
        if (const auto interval = fake_entanglement_interval(fns[i])) {
          csv.field(interval->first).field(interval->second);
        } else {
          csv.blank().blank();
        }
        csv.end_row();
      }
      return kExitOk;
    });
  });
}

int cmd_thermo(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const EntropicFunctional fn = functional_of(config);
    const ConstraintSet cs = build_constraints(config);
    SolverOptions opts = solver_options(config);
    opts.tol = std::min(opts.tol, 1e-12);
    const MaxEntSolution sol = solve(cs, fn, opts);

    constexpr double kEps = 1e-5;
    constexpr double kGradTol = 1e-6;
    constexpr double kCurvTol = 1e-5;
    constexpr double kSensTol = 1e-5;
    constexpr double kSignTol = 1e-10;
    constexpr int kRandomPoints = 5;
    const int m = cs.size();

    struct Check {
      std::string name;
      int index;
      double observed;
      double tolerance;
    };
    std::vector<Check> checks;

    // Gradient at the optimum and at seeded perturbations of it.
    std::vector<RealVector> points{sol.lambda};
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 0.05);
    for (int k = 0; k < kRandomPoints; ++k) {
      RealVector p = sol.lambda;
      for (int a = 0; a < m; ++a) p(a) += normal(rng);
      points.push_back(p);
    }
    double grad_dev = 0.0;
    for (const auto& lam : points) {
      try {
        const DualValue dv = dual_objective(lam, cs, fn);
        for (int a = 0; a < m; ++a) {
          RealVector up = lam;
          RealVector dn = lam;
          up(a) += kEps;
          dn(a) -= kEps;
          const double fd = (dual_objective(up, cs, fn).value - dual_objective(dn, cs, fn).value) /
                            (2.0 * kEps);
          grad_dev = std::max(grad_dev, std::abs(fd - dv.gradient(a)));
        }
      } catch (const FieldRangeError&) {
        // Perturbation left the domain of [f']^{-1}; not a test point.
      }
    }
    checks.push_back({"gradient_fd", -1, grad_dev, kGradTol});

    // Curvature against the Jacobian of the gradient at the optimum.
    double curv_dev = 0.0;
    for (int b = 0; b < m; ++b) {
      RealVector up = sol.lambda;
      RealVector dn = sol.lambda;
      up(b) += kEps;
      dn(b) -= kEps;
      const RealVector jac =
          (dual_objective(up, cs, fn).gradient - dual_objective(dn, cs, fn).gradient) /
          (2.0 * kEps);
      for (int a = 0; a < m; ++a) {
        curv_dev = std::max(curv_dev, std::abs(jac(a) - sol.curvature.A(a, b)));
      }
    }
    checks.push_back({"curvature_fd", -1, curv_dev, kCurvTol});
    checks.push_back({"curvature_psd", -1, std::max(0.0, -min_eigenvalue(sol.curvature.A)),
                      kSignTol});
    const RealMatrix sens = primal_sensitivities(sol);
    checks.push_back({"sensitivity_nsd", -1, std::max(0.0, max_eigenvalue(sens)), kSignTol});

    // lambda_a = dS_f / d<O_a> for every non-normalization constraint.
    for (int a = 1; a < m; ++a) {
      auto entropy_at = [&](double shift) {
        std::vector<double> t(cs.targets().data(), cs.targets().data() + m);
        t[a] += shift;
        const ConstraintSet shifted(cs.observables(), t);
        return solve(shifted, fn, opts).entropy;
      };
      const double fd = (entropy_at(kEps) - entropy_at(-kEps)) / (2.0 * kEps);
      checks.push_back({"lambda_fd", a, std::abs(fd - sol.lambda(a)), kSensTol});
    }

    bool all_pass = true;
    const int written = with_output(config, out, err, [&](std::ostream& os) {
      CsvWriter csv(os, {"check", "i", "j", "observed", "tolerance", "pass"});
      for (const auto& c : checks) {
        const bool pass = c.observed <= c.tolerance;
        all_pass = all_pass && pass;
        csv.field(c.name);
        if (c.index >= 0) {
          csv.field(c.index);
        } else {
          csv.blank();
        }
        csv.blank().field(c.observed).field(c.tolerance).field(pass);
        csv.end_row();
      }
      for (int i = 0; i < sens.rows(); ++i) {
        for (int j = 0; j < sens.cols(); ++j) {
          csv.field("sensitivity").field(i).field(j).field(sens(i, j)).blank().blank();
          csv.end_row();
        }
      }
      return kExitOk;
    });
    if (written != kExitOk) return written;
    if (!all_pass) err << "thermo: one or more checks exceeded tolerance\n";
    return all_pass ? kExitOk : kExitNotConverged;
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maximum generalized-entropy inference of density operators"};
  app.require_subcommand(1);

  RunConfig config;
  std::string config_path;
  std::string b_range;
  std::string q_range;

  auto add_shared = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Key-value config file (flags take precedence)");
    sub->add_option("--functional", config.functional_spec,
                    "shannon | tsallis:q=<v> | exponential:q=<v>, optional ,k=<v>");
    sub->add_option("--tol", config.tol, "Constraint residual tolerance");
    sub->add_option("--max-iter", config.max_iter, "Newton iteration cap");
    sub->add_option("--ridge", config.ridge, "Relative Levenberg floor");
    sub->add_flag("--verbose", config.verbose, "Print solver iterations to stderr");
    sub->add_option("--out", config.out, "Output CSV path (default stdout)");
    sub->add_option("--seed", config.seed, "Seed for randomized checks");
  };
  auto add_problem = [&](CLI::App* sub) {
    sub->add_option("--observable", config.observables,
                    "Observable matrix file, or builtin:chsh / builtin:chsh_sq (repeatable)");
    sub->add_option("--target", config.targets, "Target expectation value (repeatable)");
    sub->add_option("--dim", config.dim, "Hilbert-space dimension when no observable is given");
  };

  auto* infer = app.add_subcommand("infer", "Solve one constrained maximization");
  add_shared(infer);
  add_problem(infer);
  infer->add_option("--trace", config.trace, "Write the solver trace CSV here");

  auto* bell = app.add_subcommand("bell", "Sweep the Bell-CHSH datum b");
  add_shared(bell);
  bell->add_option("--b-range", b_range, "lo:hi:step (default 0:1:0.01)");
  bell->add_option("--alpha", config.alpha, "Weight of |Psi-> in B_alpha (default 1)");

  auto* phase = app.add_subcommand("phase", "Critical field and fake-entanglement interval vs q");
  add_shared(phase);
  phase->add_option("--family", config.family, "tsallis | exponential");
  phase->add_option("--q-range", q_range, "lo:hi:step");

  auto* thermo = app.add_subcommand("thermo", "Finite-difference checks of the dual relations");
  add_shared(thermo);
  add_problem(thermo);
  std::optional<double> thermo_b;
  thermo->add_option("--b", thermo_b, "Use constraints {I, B} with <B> = b");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  if (!config_path.empty()) {
    try {
      apply_config_file(*active, config_path);
    } catch (const CLI::Error& e) {
      err << "error: " << config_path << ": " << e.what() << '\n';
      return kExitUsage;
    }
  }

  try {
    if (!b_range.empty()) config.b_range = parse_grid(b_range);
    if (!q_range.empty()) config.q_range = parse_grid(q_range);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  config.b = thermo_b;

  if (infer->parsed()) return cmd_infer(config, out, err);
  if (bell->parsed()) return cmd_bell(config, out, err);
  if (phase->parsed()) return cmd_phase(config, out, err);
  return cmd_thermo(config, out, err);
}

}  // namespace maxent::cli
