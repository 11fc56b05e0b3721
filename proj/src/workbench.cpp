#include "svarwb/workbench.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <ostream>

#include "svarwb/csv.hpp"
#include "svarwb/identification.hpp"
#include "svarwb/svg.hpp"

namespace svarwb {

namespace {

using json = nlohmann::json;

void emit(RunReport& rep, const RunConfig& cfg, const std::string& name, const std::string& text) {
  write_text(cfg.output / name, text);
  rep.artifacts.push_back(name);
}

std::string coverage_tag(double c) { return std::to_string(static_cast<int>(std::lround(c * 100))); }

RestrictionProgram compile_program(const RunConfig& cfg) {
  return compile(cfg.restrictions, cfg.n, cfg.s, cfg.transform);
}

struct LoadedData {
  Dataset set;
  RegimeData data;
};

LoadedData load_data(const RunConfig& cfg) {
  if (!cfg.data) fail(ErrorCode::ConfigError, "/data: this command needs a data section");
  Dataset ds = load_dataset(*cfg.data);
  if (ds.y.cols() != cfg.n)
    fail(ErrorCode::ConfigError, "/data: found " + std::to_string(ds.y.cols()) + " series for " +
                                     std::to_string(cfg.n) + " variables");
  RegimeData rd(ds.y, ds.break_rows, cfg.l);
  return {std::move(ds), std::move(rd)};
}

void warn_nonstationary(RunReport& rep, const RegimeModel& model, const char* what) {
  for (int p = 0; p < model.dims.s; ++p)
    if (!model.regime(p).is_stationary())
      rep.warnings.push_back(std::string(what) + " regime " + std::to_string(p + 1) + " is not stationary");
}

std::string target_name(const TargetFunctional& t) {
  switch (t.kind) {
    case TargetKind::ImpulseResponse: return "impulse response";
    case TargetKind::LongRunCumulative: return "long-run cumulative response";
    case TargetKind::FevShare: break;
  }
  return "forecast error variance share";
}

}  // namespace

const char* version() { return SVARWB_VERSION; }

const char* to_string(Command c) {
  switch (c) {
    case Command::Identify: return "identify";
    case Command::Estimate: return "estimate";
    case Command::Infer: return "infer";
    case Command::Simulate: break;
  }
  return "simulate";
}

std::optional<Command> parse_command(const std::string& name) {
  for (Command c : {Command::Identify, Command::Estimate, Command::Infer, Command::Simulate})
    if (name == to_string(c)) return c;
  return std::nullopt;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::RankDeficientR:
    case ErrorCode::InadmissibleTransform:
      return 2;
    case ErrorCode::Infeasible:
    case ErrorCode::AllDrawsInadmissible:
      return 3;
    case ErrorCode::SolverBudgetExhausted:
      return 4;
    default:
      return 1;
  }
}

RunReport cmd_identify(const RunConfig& cfg, std::ostream& log) {
  RunReport rep;
  rep.command = "identify";
  const RestrictionProgram prog = compile_program(cfg);
  const int n = prog.n, s = prog.s;
  const OrderCondition oc = order_condition(prog);
  const auto flags = recursive_order_check(prog);
  log << "order condition: f = " << oc.f << ", s*n(n-1)/2 = " << oc.required << (oc.satisfied ? ", holds" : ", fails")
      << "\n";

  json details;
  details["f"] = oc.f;
  details["required"] = oc.required;
  details["order_condition"] = oc.satisfied;
  details["draws_requested"] = cfg.identification_draws;

  std::string verdict = "not identified";
  if (!oc.satisfied) {
    rep.outcome = "order condition fails: f=" + std::to_string(oc.f) + " < s*n(n-1)/2=" + std::to_string(oc.required);
    details["route"] = "none";
    details["draws_used"] = 0;
  } else {
    Rng rng = stream_rng(cfg.seed, 0);
    IdentificationVerdict v;
    std::string route;
    if (recursive_order_holds(prog)) {
      v = sufficient_rank_check(prog, cfg.identification_draws, rng);
      route = "recursive";
    }
    if (route.empty() || v.verdict != Verdict::Identified) {
      v = necessary_sufficient_check(prog, cfg.identification_draws, rng);
      route = "general";
    }
    details["route"] = route;
    details["draws_used"] = v.draws_used;
    details["rank"] = v.rank;
    details["required_rank"] = v.required;
    if (v.verdict == Verdict::Identified) {
      verdict = "identified";
      rep.outcome = "identified (" + route + " route), N=" + std::to_string(v.draws_used);
    } else {
      rep.outcome = "not identified after N=" + std::to_string(v.draws_used);
    }
  }
  details["verdict"] = verdict;

  std::vector<std::string> header{"shock", "position", "f"};
  for (int p = 1; p <= s; ++p) header.push_back("f_regime_" + std::to_string(p));
  header.insert(header.end(), {"recursive_order_ok", "partially_identified"});
  CsvWriter table(header);
  json shocks = json::array();
  for (int j = 0; j < n; ++j) {
    const int k = prog.position[static_cast<std::size_t>(j)];
    const ShockRestrictions& sr = prog.ordered[static_cast<std::size_t>(k)];
    std::vector<int> per(static_cast<std::size_t>(s), 0);
    for (const auto& row : sr.rows)
      for (int p : row.regimes) ++per[static_cast<std::size_t>(p)];
    bool partial = false;
    if (oc.f > 0) {
      Rng rng = stream_rng(cfg.seed, 1 + static_cast<std::uint64_t>(j));
      partial = partial_identification_check(prog, j, cfg.identification_draws, rng).identified;
    }
    table.add(j + 1).add(k + 1).add(sr.f());
    for (int c : per) table.add(c);
    table.add(flags[static_cast<std::size_t>(k)] ? "true" : "false").add(partial ? "true" : "false");
    table.end_row();
    shocks.push_back({{"shock", j + 1},
                      {"position", k + 1},
                      {"f", sr.f()},
                      {"f_per_regime", per},
                      {"recursive_order_ok", static_cast<bool>(flags[static_cast<std::size_t>(k)])},
                      {"partially_identified", partial}});
    log << "shock " << j + 1 << ": f = " << sr.f() << ", recursive order " << (flags[static_cast<std::size_t>(k)] ? "ok" : "fails")
        << ", " << (partial ? "identified" : "not shown identified") << "\n";
  }
  details["shocks"] = shocks;
  rep.details = details;
  emit(rep, cfg, "identify.csv", table.str());
  return rep;
}

RunReport cmd_estimate(const RunConfig& cfg, std::ostream& log) {
  RunReport rep;
  rep.command = "estimate";
  const LoadedData in = load_data(cfg);
  const RegimeModel fit = ols_fit(in.data);
  warn_nonstationary(rep, fit, "estimated");
  const int n = cfg.n, s = fit.dims.s, l = cfg.l;

  CsvWriter coef({"regime", "equation", "term", "value"});
  CsvWriter sigma({"regime", "row", "column", "value"});
  for (int p = 0; p < s; ++p) {
    const Matrix c = fit.regime(p).coefficients();
    for (int i = 0; i < n; ++i)
      for (int m = 0; m < c.cols(); ++m) {
        const std::string term =
            m == 0 ? "const" : "lag" + std::to_string((m - 1) / n + 1) + "_" + in.set.names[static_cast<std::size_t>((m - 1) % n)];
        coef.add(p + 1).add(in.set.names[static_cast<std::size_t>(i)]).add(term).add(c(i, m));
        coef.end_row();
      }
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        sigma.add(p + 1).add(i + 1).add(k + 1).add(fit.regime(p).sigma()(i, k));
        sigma.end_row();
      }
  }
  emit(rep, cfg, "reduced_form.csv", coef.str());
  emit(rep, cfg, "sigma.csv", sigma.str());

  const RestrictionProgram prog = compile_program(cfg);
  Rng rng = stream_rng(cfg.seed, 0);
  RotationSet set = enumerate(prog, fit, cfg.route, cfg.solver, rng);
  sort_solutions(set.solutions);
  rep.details["observations"] = in.data.T();
  rep.details["regimes"] = s;
  rep.details["lags"] = l;
  rep.details["route"] = to_string(set.route);
  rep.details["completeness"] = to_string(set.completeness);
  rep.details["solutions"] = set.size();
  log << "route " << to_string(set.route) << " (" << to_string(set.completeness) << "), " << set.size()
      << " admissible solution(s)\n";
  if (set.empty()) {
    rep.outcome = "no admissible structural parameters";
    fail(ErrorCode::Infeasible, rep.outcome);
  }

  CsvWriter sol({"solution", "regime", "matrix", "row", "column", "value"});
  CsvWriter irf({"solution", "regime", "horizon", "variable", "shock", "value"});
  const auto& horizons = cfg.inference.horizons;
  const int hmax = *std::max_element(horizons.begin(), horizons.end());
  for (std::size_t m = 0; m < set.size(); ++m) {
    const OrthogonalBlock& q = set.solutions[m];
    for (int p = 0; p < s; ++p) {
      const StructuralRegime st = reduced_to_structural(fit.regime(p), q[p]);
      auto dump = [&](const char* name, const Matrix& a) {
        for (int i = 0; i < a.rows(); ++i)
          for (int k = 0; k < a.cols(); ++k) {
            sol.add(static_cast<int>(m + 1)).add(p + 1).add(name).add(i + 1).add(k + 1).add(a(i, k));
            sol.end_row();
          }
      };
      dump("q", q[p]);
      dump("a0", st.a0);
      dump("a_plus", st.a_plus);
      const auto c = vma_coefficients(fit.regime(p), hmax);
      const Matrix impact = fit.regime(p).sigma_chol() * q[p];
      for (int h : horizons) {
        const Matrix resp = c[static_cast<std::size_t>(h)] * impact;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            irf.add(static_cast<int>(m + 1)).add(p + 1).add(h).add(i + 1).add(j + 1).add(resp(i, j));
            irf.end_row();
          }
      }
    }
  }
  emit(rep, cfg, "solutions.csv", sol.str());
  emit(rep, cfg, "irf.csv", irf.str());
  rep.outcome = std::to_string(set.size()) + " admissible solution(s) via the " + to_string(set.route) + " route";
  return rep;
}

RunReport cmd_infer(const RunConfig& cfg, std::ostream& log) {
  RunReport rep;
  rep.command = "infer";
  const LoadedData in = load_data(cfg);
  const RestrictionProgram prog = compile_program(cfg);
  InferenceOptions opt = cfg.inference;
  opt.seed = cfg.seed;
  opt.threads = cfg.threads;
  const InferenceMode mode = resolve_mode(prog, opt.mode);
  const auto records = collect_draws(in.data, prog, opt);

  int admissible = 0, proposals = 0, accepted = 0;
  std::vector<int> status_counts(5, 0);
  CsvWriter draws({"draw", "status", "solutions", "proposals", "log_density"});
  for (const auto& r : records) {
    ++status_counts[static_cast<std::size_t>(r.status)];
    if (r.admissible()) ++admissible;
    proposals += r.proposals;
    accepted += r.solutions;
    draws.add(r.index + 1).add(to_string(r.status)).add(r.solutions).add(r.proposals).add(r.log_density);
    draws.end_row();
  }
  emit(rep, cfg, "draws.csv", draws.str());

  std::vector<double> coverages = default_coverages();
  if (std::find(coverages.begin(), coverages.end(), 0.8) == coverages.end()) coverages.push_back(0.8);
  std::sort(coverages.rbegin(), coverages.rend());
  const BayesPosterior bayes = bayes_posterior(records, opt.horizons, coverages);
  const ProjectionSet proj = projection_confidence_set(records, cfg.alpha, cfg.projection);
  const RobustSummary robust = robust_bayes(records, cfg.alpha);
  const int s = static_cast<int>(bayes.cells.size());
  const std::size_t H = opt.horizons.size();

  std::vector<std::string> header{"regime", "horizon", "mean", "median", "modes", "points"};
  for (double c : coverages) {
    header.push_back("lower_" + coverage_tag(c));
    header.push_back("upper_" + coverage_tag(c));
  }
  for (double c : coverages) {
    header.push_back("smoothed_lower_" + coverage_tag(c));
    header.push_back("smoothed_upper_" + coverage_tag(c));
  }
  CsvWriter bt(header);
  CsvWriter pt({"regime", "horizon", "kind", "interval", "lower", "upper"});
  CsvWriter rt({"regime", "horizon", "mean_lower", "mean_upper", "region_lower", "region_upper", "bayes_mean",
                "covers_band_80"});
  bool multimodal = false, hull = true;
  for (int p = 0; p < s; ++p) {
    FanChart chart;
    chart.title = "Regime " + std::to_string(p + 1) + ": " + target_name(opt.target) + " of " +
                  in.set.names[static_cast<std::size_t>(opt.target.variable)] + " to shock " +
                  std::to_string(opt.target.shock + 1);
    chart.horizons = opt.horizons;
    for (double c : default_coverages()) chart.bands.push_back({c, {}, {}});
    for (std::size_t h = 0; h < H; ++h) {
      const BayesCell& c = bayes.cells[static_cast<std::size_t>(p)][h];
      const int hz = opt.horizons[h];
      multimodal = multimodal || c.modes > 1;
      bt.add(p + 1).add(hz).add(c.mean).add(c.median).add(c.modes).add(static_cast<int>(c.points));
      for (const auto& b : c.raw) bt.add(b.lower).add(b.upper);
      for (const auto& b : c.smoothed) bt.add(b.lower).add(b.upper);
      bt.end_row();
      for (auto& fb : chart.bands)
        for (const auto& b : c.raw)
          if (b.coverage == fb.coverage) {
            fb.lower.push_back(b.lower);
            fb.upper.push_back(b.upper);
          }
      chart.center.push_back(c.mean);

      const ProjectionCell& pc = proj.cells[static_cast<std::size_t>(p)][h];
      for (std::size_t k = 0; k < pc.region.size(); ++k) {
        pt.add(p + 1).add(hz).add("region").add(static_cast<int>(k + 1)).add(pc.region[k].lower).add(pc.region[k].upper);
        pt.end_row();
      }
      for (std::size_t k = 0; k < pc.clusters.size(); ++k) {
        pt.add(p + 1).add(hz).add("cluster").add(static_cast<int>(k + 1)).add(pc.clusters[k].lower).add(pc.clusters[k].upper);
        pt.end_row();
      }

      const RobustCell& rc = robust.cells[static_cast<std::size_t>(p)][h];
      double band_lo = 0.0, band_hi = 0.0;
      for (const auto& b : c.raw)
        if (b.coverage == 0.8) band_lo = b.lower, band_hi = b.upper;
      const double tol = 1e-9 * std::max(1.0, std::abs(band_lo) + std::abs(band_hi));
      const bool covers = rc.region_lower <= band_lo + tol && rc.region_upper >= band_hi - tol;
      hull = hull && covers;
      rt.add(p + 1).add(hz).add(rc.mean_lower).add(rc.mean_upper).add(rc.region_lower).add(rc.region_upper)
          .add(rc.bayes_mean).add(covers ? "true" : "false");
      rt.end_row();
      chart.robust_lower.push_back(rc.region_lower);
      chart.robust_upper.push_back(rc.region_upper);
    }
    emit(rep, cfg, "fan_regime_" + std::to_string(p + 1) + ".svg", fan_chart_svg(chart));
  }
  emit(rep, cfg, "bayes.csv", bt.str());
  emit(rep, cfg, "projection.csv", pt.str());
  emit(rep, cfg, "robust.csv", rt.str());

  const bool set_mode = mode == InferenceMode::SetIdentified;
  rep.details["mode"] = set_mode ? "set_identified" : "locally_identified";
  rep.details["posterior_draws"] = static_cast<int>(records.size());
  rep.details["admissible_draws"] = admissible;
  json counts;
  for (DrawStatus st : {DrawStatus::Ok, DrawStatus::Empty, DrawStatus::NonStationary, DrawStatus::Degenerate,
                        DrawStatus::SolverBudget})
    counts[to_string(st)] = status_counts[static_cast<std::size_t>(st)];
  rep.details["draw_status"] = counts;
  if (set_mode) rep.details["acceptance_rate"] = proposals ? static_cast<double>(accepted) / proposals : 0.0;
  rep.details["alpha"] = cfg.alpha;
  rep.details["projection_retained"] = proj.retained;
  rep.details["robust_draws"] = robust.draws_used;
  rep.details["nonempty_probability"] = robust.nonempty_probability;
  rep.details["multimodal"] = multimodal;
  rep.details["robust_covers_band_80"] = hull;
  if (multimodal) rep.warnings.push_back("posterior of the target is multimodal at some horizon");
  if (admissible < static_cast<int>(records.size()))
    rep.warnings.push_back(std::to_string(static_cast<int>(records.size()) - admissible) +
                           " posterior draw(s) had no admissible rotation");
  rep.outcome = std::to_string(admissible) + " of " + std::to_string(records.size()) + " draws admissible (" +
                (set_mode ? "set identified" : "locally identified") + ")";
  log << rep.outcome << "\n";
  return rep;
}

RunReport cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  RunReport rep;
  rep.command = "simulate";
  if (!cfg.dgp) fail(ErrorCode::ConfigError, "/simulate: this command needs a simulate section");
  const DgpSpec& dgp = *cfg.dgp;
  const RegimeModel model(dgp.regimes, dgp.break_rows);
  warn_nonstationary(rep, model, "simulated");
  for (const auto& w : rep.warnings) log << "warning: " << w << "\n";
  Rng rng = stream_rng(cfg.seed, 0);
  const Matrix y = simulate(model, dgp.break_rows, dgp.T, dgp.burn_in, rng);
  std::vector<std::string> header{"t"};
  header.insert(header.end(), dgp.names.begin(), dgp.names.end());
  CsvWriter out(header);
  for (int t = 0; t < y.rows(); ++t) {
    out.add(t + 1);
    for (int i = 0; i < y.cols(); ++i) out.add(y(t, i));
    out.end_row();
  }
  emit(rep, cfg, "data.csv", out.str());
  rep.details["T"] = dgp.T;
  rep.details["burn_in"] = dgp.burn_in;
  json breaks = json::array();
  for (int b : dgp.break_rows) breaks.push_back(b + 1);
  rep.details["breaks"] = breaks;
  rep.outcome = "simulated " + std::to_string(dgp.T) + " observations";
  log << rep.outcome << "\n";
  return rep;
}

RunReport run_command(Command command, const RunConfig& cfg, std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create output directory " + cfg.output.string() + ": " + ec.message());
  write_text(cfg.output / "config.json", cfg.text);

  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  json error;
  std::exception_ptr failure;
  try {
    switch (command) {
      case Command::Identify: rep = cmd_identify(cfg, log); break;
      case Command::Estimate: rep = cmd_estimate(cfg, log); break;
      case Command::Infer: rep = cmd_infer(cfg, log); break;
      case Command::Simulate: rep = cmd_simulate(cfg, log); break;
    }
  } catch (const Error& e) {
    error = {{"code", to_string(e.code())}, {"message", e.what()}, {"exit_code", exit_code(e.code())}};
    failure = std::current_exception();
  } catch (const std::exception& e) {
    error = {{"code", "Internal"}, {"message", e.what()}, {"exit_code", 1}};
    failure = std::current_exception();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rep.command = to_string(command);
  rep.artifacts.insert(rep.artifacts.begin(), "config.json");
  rep.artifacts.push_back("report.json");

  json out;
  out["command"] = rep.command;
  out["status"] = failure ? "error" : "ok";
  out["outcome"] = rep.outcome;
  out["details"] = rep.details;
  out["warnings"] = rep.warnings;
  out["artifacts"] = rep.artifacts;
  out["seed"] = cfg.seed;
  out["threads"] = cfg.threads;
  out["version"] = version();
  out["seconds"] = seconds;
  if (failure) out["error"] = error;
  write_text(cfg.output / "report.json", out.dump(2) + "\n");
  if (failure) std::rethrow_exception(failure);
  log << rep.command << ": " << rep.outcome << "\n";
  for (const auto& w : rep.warnings) log << "warning: " << w << "\n";
  return rep;
}

}  // namespace svarwb
