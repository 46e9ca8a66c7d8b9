#include "consensus/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "consensus/errors.hpp"

namespace consensus {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const CliContext& ctx, const std::string& configured, const char* fallback) {
  const fs::path p = configured.empty() ? fs::path(fallback) : fs::path(configured);
  if (p.is_absolute() || ctx.out_dir.empty()) return p;
  return ctx.out_dir / p;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
  if (!os) throw ConfigError("write failed for " + path.string());
}

RunSpec with_seed_override(RunSpec spec, const CliContext& ctx) {
  if (ctx.seed) spec.seed = *ctx.seed;
  return spec;
}

std::string opt_string(const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); }

struct AuditOutcome {
  Json report = Json::object();
  bool violated = false;
};

// Runs the audits enabled in `config` over a trace with recorded
// configurations. Failures land in the report; a SafenessViolation from the
// matrix reconstruction counts as a violation too.
AuditOutcome run_audits(const ScenarioConfig& config, const RunTrace& trace, const CommPattern& pattern,
                        bool force_safeness) {
  AuditOutcome out;
  const RunSpec& spec = config.spec;
  const double alpha = safeness_constant(spec.algorithm.tag, spec.d, spec.n);
  if (trace.configurations.size() < trace.period + 1) {
    out.report["note"] = "trace shorter than one averaging period; nothing to audit";
    return out;
  }
  if (config.audit.safeness || force_safeness) {
    const auto report = audit_safeness(trace, pattern, alpha);
    out.report["safeness"] = safeness_report_to_json(report);
    out.violated |= !report.passed();
  }
  if (config.audit.matrices || config.audit.moreau) {
    try {
      const auto seq = reconstruct_matrices(trace, pattern, alpha);
      double row_err = 0;
      double recon_err = 0;
      for (std::size_t t = 0; t < seq.size(); ++t) {
        const PointSet& before = trace.configurations[seq.rounds[t] - trace.period].positions;
        const PointSet& after = trace.configurations[seq.rounds[t]].positions;
        for (Eigen::Index k = 0; k < spec.d; ++k) {
          const Eigen::MatrixXd& a = seq.matrices[t][static_cast<std::size_t>(k)];
          row_err = std::max(row_err, (a.rowwise().sum().array() - 1.0).abs().maxCoeff());
          const Eigen::VectorXd y = a * before.row(k).transpose();
          recon_err = std::max(recon_err, (y - after.row(k).transpose()).cwiseAbs().maxCoeff());
        }
      }
      if (config.audit.matrices)
        out.report["matrices"] = Json{{"transitions", seq.size()},
                                      {"alpha", alpha},
                                      {"max_row_sum_error", row_err},
                                      {"max_reconstruction_error", recon_err}};
      if (config.audit.moreau) {
        const std::uint64_t window =
            config.audit.moreau_window > 0 ? config.audit.moreau_window : std::max<std::uint64_t>(1, spec.pattern.period);
        const auto report = check_moreau_assumptions(seq, alpha / static_cast<double>(spec.n), window);
        out.report["moreau"] = moreau_report_to_json(report);
        out.violated |= !report.all();
      }
    } catch (const SafenessViolation& e) {
      out.report["matrices"] = Json{{"error", e.what()}};
      out.violated = true;
    }
  }
  return out;
}

}  // namespace

std::size_t resolve_threads(std::optional<std::size_t> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("CONSENSUS_DYN_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

std::vector<RunSpec> expand_sweep(const ScenarioConfig& config) {
  const RunSpec& base = config.spec;
  const auto& axes = config.sweep;
  const std::vector<std::size_t> ns = axes.n.empty() ? std::vector<std::size_t>{base.n} : axes.n;
  const std::vector<int> ds = axes.d.empty() ? std::vector<int>{base.d} : axes.d;
  const std::vector<std::string> algs =
      axes.algorithm.empty() ? std::vector<std::string>{to_string(base.algorithm)} : axes.algorithm;
  const std::vector<std::uint64_t> seeds = axes.seed.empty() ? std::vector<std::uint64_t>{base.seed} : axes.seed;
  std::vector<RunSpec> out;
  for (auto n : ns)
    for (auto d : ds)
      for (const auto& alg : algs)
        for (auto seed : seeds) {
          RunSpec s = base;
          s.n = n;
          s.d = d;
          s.algorithm = parse_algorithm(alg);
          s.seed = seed;
          s.record_configurations = false;
          s.record_margins = true;
          out.push_back(std::move(s));
        }
  return out;
}

std::vector<SweepRow> run_sweep(const std::vector<RunSpec>& specs, std::size_t threads) {
  std::vector<SweepRow> rows(specs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        const RunSpec& s = specs[i];
        const RunTrace trace = run(s);
        SweepRow& r = rows[i];
        r.scenario_id = i;
        r.n = s.n;
        r.d = s.d;
        r.algorithm = to_string(s.algorithm);
        r.seed = s.seed;
        r.t_eps = trace.metrics.t_eps;
        r.bound_t = trace.metrics.bound_t;
        r.empirical_rate = trace.metrics.empirical_rate;
        r.converged = trace.metrics.converged;
        for (const auto& m : trace.margins)
          for (Eigen::Index p = 0; p < m.size(); ++p)
            if (!std::isnan(m(p))) r.worst_alpha = std::isnan(r.worst_alpha) ? m(p) : std::min(r.worst_alpha, m(p));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t count = std::max<std::size_t>(1, std::min(threads, specs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "scenario_id,n,d,algorithm,seed,T_eps,bound_T,worst_alpha,empirical_rate,converged,within_bound\n";
  for (const auto& r : rows) {
    std::string within = "n/a";
    if (r.bound_t) within = (r.t_eps && *r.t_eps <= *r.bound_t) ? "true" : "false";
    os << r.scenario_id << ',' << r.n << ',' << r.d << ',' << r.algorithm << ',' << r.seed << ','
       << opt_string(r.t_eps) << ',' << opt_string(r.bound_t) << ','
       << (std::isnan(r.worst_alpha) ? std::string() : format_double(r.worst_alpha)) << ','
       << format_double(r.empirical_rate) << ',' << (r.converged ? "true" : "false") << ',' << within << '\n';
  }
}

int cmd_run(const ScenarioConfig& config, const CliContext& ctx) {
  RunSpec spec = with_seed_override(config.spec, ctx);
  spec.record_configurations = true;
  spec.record_margins = true;
  validate_spec(spec);
  const RunTrace trace = run(spec);
  const CommPattern pattern = make_pattern(spec.pattern, spec.n, spec.seed);

  ScenarioConfig effective = config;
  effective.spec = spec;
  const bool any_audit = config.audit.safeness || config.audit.matrices || config.audit.moreau;
  AuditOutcome audits;
  if (any_audit) audits = run_audits(effective, trace, pattern, false);

  std::ostringstream trace_csv;
  write_trace_csv(trace_csv, trace);
  write_file(resolve(ctx, config.output.trace, "trace.csv"), trace_csv.str());
  std::ostringstream deltas_csv;
  write_deltas_csv(deltas_csv, trace);
  write_file(resolve(ctx, config.output.deltas, "deltas.csv"), deltas_csv.str());

  Json summary = metrics_to_json(spec, trace);
  if (audits.report.contains("safeness")) summary["worst_alpha"] = audits.report["safeness"]["worst_alpha"];
  if (any_audit) summary["audit_passed"] = !audits.violated;
  summary["warnings"] = config.warnings;
  write_file(resolve(ctx, config.output.summary, "summary.json"), summary.dump(2) + "\n");
  if (any_audit) write_file(resolve(ctx, config.output.report, "report.json"), audits.report.dump(2) + "\n");

  for (const auto& w : config.warnings) *ctx.err << "warning: " << w << '\n';
  *ctx.out << "rounds=" << trace.rounds << " converged=" << (trace.metrics.converged ? "true" : "false")
           << " T_eps=" << (trace.metrics.t_eps ? std::to_string(*trace.metrics.t_eps) : "none")
           << " bound_T=" << (trace.metrics.bound_t ? std::to_string(*trace.metrics.bound_t) : "none") << '\n';
  if (audits.violated) {
    *ctx.err << "audit violation; see " << resolve(ctx, config.output.report, "report.json").string() << '\n';
    return kExitAudit;
  }
  return kExitOk;
}

int cmd_sweep(const ScenarioConfig& config, const CliContext& ctx) {
  if (config.sweep.empty()) throw ConfigError("sweep: no axes given");
  ScenarioConfig cfg = config;
  if (ctx.seed) {
    cfg.spec.seed = *ctx.seed;
    cfg.sweep.seed.clear();
  }
  const auto specs = expand_sweep(cfg);
  for (const auto& s : specs) {
    try {
      validate_spec(s);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("sweep scenario n=" + std::to_string(s.n) + " d=" + std::to_string(s.d) + " " +
                        to_string(s.algorithm) + ": " + e.what());
    }
  }
  const auto rows = run_sweep(specs, ctx.threads);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  const fs::path path = resolve(ctx, config.output.sweep, "sweep.csv");
  write_file(path, csv.str());
  std::size_t outside = 0;
  for (const auto& r : rows)
    if (r.bound_t && !(r.t_eps && *r.t_eps <= *r.bound_t)) ++outside;
  *ctx.out << rows.size() << " scenarios, " << outside << " above their bound, written to " << path.string() << '\n';
  return kExitOk;
}

int cmd_counterexample(const CliContext& ctx, std::uint64_t seed, std::size_t samples) {
  std::ostream& out = *ctx.out;
  bool consistent = true;

  PointSet unit = PointSet::Identity(3, 3);
  const auto hull3 = convex_hull(unit);
  std::vector<Point> received;
  for (Eigen::Index c = 0; c < 3; ++c) received.push_back(unit.col(c));
  const Point mid3 = component_midpoint_update(received);
  const bool outside = !contains(hull3, mid3);
  out << "R^3: inputs (1,0,0) (0,1,0) (0,0,1); component-wise midpoint (" << mid3(0) << ", " << mid3(1) << ", "
      << mid3(2) << ")\n";
  out << "R^3: outside hull: " << (outside ? "true" : "false") << '\n';
  consistent &= outside;

  std::mt19937_64 rng(mix_seed(seed, 0, 0x1e33a));
  std::uniform_real_distribution<double> unitd(0.0, 1.0);
  for (int d : {1, 2}) {
    std::size_t inside = 0;
    for (std::size_t s = 0; s < samples; ++s) {
      const std::size_t m = 3 + static_cast<std::size_t>(rng() % 10);
      std::vector<Point> pts;
      for (std::size_t i = 0; i < m; ++i) {
        Point p(d);
        for (int k = 0; k < d; ++k) p(k) = unitd(rng);
        pts.push_back(p);
      }
      if (contains(convex_hull(pts), component_midpoint_update(pts))) ++inside;
    }
    out << "R^" << d << ": " << inside << "/" << samples << " random point sets contain their component-wise midpoint\n";
    consistent &= inside == samples;
  }
  return consistent ? kExitOk : kExitAudit;
}

int cmd_plotdata(const fs::path& trace_path, const ScenarioConfig* config, const CliContext& ctx) {
  std::ifstream in(trace_path);
  if (!in) throw ConfigError("cannot open trace " + trace_path.string());
  RunTrace trace = read_trace_csv(in);

  std::ostringstream os;
  os << "round,series,value\n";
  for (std::size_t t = 0; t < trace.deltas.size(); ++t)
    for (Eigen::Index k = 0; k < trace.deltas[t].size(); ++k)
      if (trace.deltas[t](k) > kDiameterFloor)
        os << t << ",log10_delta_" << k << ',' << format_double(std::log10(trace.deltas[t](k))) << '\n';

  if (config) {
    const RunSpec spec = with_seed_override(config->spec, ctx);
    if (spec.n != trace.n || spec.d != trace.d) throw ConfigError("plotdata: config does not match the trace shape");
    trace.period = spec.algorithm.period_for(spec.n);
    if (trace.configurations.size() > trace.period) {
      const auto report = audit_safeness(trace, make_pattern(spec.pattern, spec.n, spec.seed), 0.0);
      for (std::size_t i = 0; i < report.rounds.size(); ++i) {
        const Eigen::MatrixXd& m = report.margins[i];
        double worst = std::numeric_limits<double>::quiet_NaN();
        for (Eigen::Index r = 0; r < m.rows(); ++r)
          for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (!std::isnan(m(r, c))) worst = std::isnan(worst) ? m(r, c) : std::min(worst, m(r, c));
        if (!std::isnan(worst)) os << report.rounds[i] << ",alpha_hat," << format_double(worst) << '\n';
      }
    }
  }
  if (ctx.out_dir.empty()) {
    *ctx.out << os.str();
  } else {
    write_file(ctx.out_dir / "plotdata.csv", os.str());
  }
  return kExitOk;
}

int cmd_verify(const ScenarioConfig& config, const fs::path& trace_path, const CliContext& ctx) {
  std::ifstream in(trace_path);
  if (!in) throw ConfigError("cannot open trace " + trace_path.string());
  RunTrace trace = read_trace_csv(in);
  const RunSpec spec = with_seed_override(config.spec, ctx);
  validate_spec(spec);
  if (spec.n != trace.n || spec.d != trace.d)
    throw ConfigError("verify: trace has n=" + std::to_string(trace.n) + " d=" + std::to_string(trace.d) +
                      ", config has n=" + std::to_string(spec.n) + " d=" + std::to_string(spec.d));
  trace.period = spec.algorithm.period_for(spec.n);
  ScenarioConfig effective = config;
  effective.spec = spec;
  const bool any = config.audit.safeness || config.audit.matrices || config.audit.moreau;
  const auto audits = run_audits(effective, trace, make_pattern(spec.pattern, spec.n, spec.seed), !any);
  const fs::path path = resolve(ctx, config.output.report, "report.json");
  write_file(path, audits.report.dump(2) + "\n");
  *ctx.out << (audits.violated ? "audit violation" : "all audits passed") << "; report in " << path.string() << '\n';
  return audits.violated ? kExitAudit : kExitOk;
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator and checker for multi-dimensional asymptotic consensus on dynamic graphs"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  std::string trace_path;
  std::size_t samples = 100;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config_path, "scenario file (JSON)");
    if (needs_config) opt->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (default: $CONSENSUS_DYN_THREADS or all cores)");
    sub->add_option("--seed", seed, "override the run seed");
  };
  auto* run_cmd = app.add_subcommand("run", "run one scenario, write trace CSV and summary JSON");
  add_common(run_cmd, true);
  auto* sweep_cmd = app.add_subcommand("sweep", "run the cartesian product of the sweep axes");
  add_common(sweep_cmd, true);
  auto* counter_cmd = app.add_subcommand("counterexample", "component-wise midpoint validity in R^3 versus R^2");
  add_common(counter_cmd, false);
  counter_cmd->add_option("--samples", samples, "random point sets per dimension");
  auto* plot_cmd = app.add_subcommand("plotdata", "long-format plot data from a trace CSV");
  add_common(plot_cmd, false);
  plot_cmd->add_option("--trace", trace_path, "trace CSV")->required();
  auto* verify_cmd = app.add_subcommand("verify", "re-run audits on a stored trace");
  add_common(verify_cmd, true);
  verify_cmd->add_option("--trace", trace_path, "trace CSV (default: the config's output.trace)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInvalid;
  }

  CliContext ctx;
  ctx.out_dir = out_dir;
  ctx.seed = seed;
  ctx.threads = resolve_threads(threads);
  ctx.out = &out;
  ctx.err = &err;
  try {
    std::optional<ScenarioConfig> config;
    if (!config_path.empty()) config = load_config(config_path);
    if (*run_cmd) return cmd_run(*config, ctx);
    if (*sweep_cmd) return cmd_sweep(*config, ctx);
    if (*counter_cmd) return cmd_counterexample(ctx, seed.value_or(0), samples);
    if (*plot_cmd) return cmd_plotdata(trace_path, config ? &*config : nullptr, ctx);
    if (*verify_cmd) {
      const fs::path tp = trace_path.empty() ? resolve(ctx, config->output.trace, "trace.csv") : fs::path(trace_path);
      return cmd_verify(*config, tp, ctx);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    err << "invalid scenario: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace consensus
