// Command-line front end for the homdelay library.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "homdelay/homdelay.hpp"

namespace {

using namespace homdelay;

struct Common {
  std::string example = "ex1";
  std::string config;
  std::string out;
  double step = 0.0;
  double horizon = 0.0;
};

struct Setup {
  SystemModel model;
  bool from_example = true;
  std::string example_id;
  RazumikhinParams lr;
  KrasovskiiParams lk;
  std::optional<double> shared_delta;
  std::optional<HistorySegment> history;
  Json config = Json::object();
};

/// Model and parameters from --example and --config. `preset_name` picks the
/// built-in parameter set for example runs ("" for the estimate preset).
Setup Load(const Common& c, const std::string& preset_name = "") {
  Json cfg = c.config.empty() ? Json::object() : ReadJsonFile(c.config);
  std::optional<SystemModel> model;
  Setup s{build_example(ExampleSpec{}), true, c.example, {}, {}, {}, {}, cfg};
  if (cfg.contains("system")) {
    model = system_from_json(cfg.at("system"));
    s.from_example = false;
  } else {
    ExampleSpec spec;
    spec.id = c.example;
    if (cfg.contains("example")) spec = example_from_json(cfg.at("example"), spec);
    s.example_id = spec.id;
    const Preset p = preset_name.empty() ? estimate_preset(spec.id)
                                         : preset(preset_name);
    // Preset parameters only apply to the example they were made for.
    if (p.example.id == spec.id) {
      s.lr = p.razumikhin;
      s.lk = p.krasovskii;
    }
    model = build_example(spec);
  }
  s.model = *model;
  if (cfg.contains("razumikhin")) {
    s.lr = razumikhin_params_from_json(cfg.at("razumikhin"), s.lr);
  }
  if (cfg.contains("krasovskii")) {
    s.lk = krasovskii_params_from_json(cfg.at("krasovskii"), s.lk);
  }
  if (cfg.contains("delta")) s.shared_delta = cfg.at("delta").get<double>();
  if (cfg.contains("history")) {
    s.history = history_from_json(cfg.at("history"), s.model.rhs.delay());
  }
  return s;
}

HistorySegment DefaultHistory(const Setup& s) {
  if (s.history) return *s.history;
  if (s.from_example) {
    return HistorySegment::Constant(s.model.rhs.delay(),
                                    estimate_preset(s.example_id).phi);
  }
  throw ConfigError("no history given; add a 'history' entry to the config");
}

void WriteKeyValues(const std::string& path, const Json& j,
                    const std::string& prefix = "") {
  std::ofstream out = OpenOutput(path);
  out << "quantity,value\n";
  std::function<void(const Json&, const std::string&)> walk =
      [&](const Json& node, const std::string& pre) {
        for (const auto& [k, v] : node.items()) {
          const std::string name = pre.empty() ? k : pre + "." + k;
          if (v.is_object()) {
            walk(v, name);
          } else if (v.is_number()) {
            out << name << ',' << FormatNumber(v.get<double>()) << '\n';
          } else if (v.is_boolean()) {
            out << name << ',' << (v.get<bool>() ? 1 : 0) << '\n';
          }
        }
      };
  walk(j, prefix);
}

void Emit(const Common& c, const Json& j) {
  std::cout << j.dump(2) << '\n';
  if (!c.out.empty()) WriteKeyValues(c.out, j);
}

int RunConstants(const Common& c, std::size_t samples) {
  const Setup s = Load(c);
  const auto& rhs = s.model.rhs;
  const GrowthConstants sampled = estimate_growth_constants(rhs, samples);
  const GrowthCheck gcheck = check_growth_constants(rhs, s.model.growth, samples);
  const LyapunovValidation v =
      validate_lyapunov(s.model.lyapunov, rhs, samples);
  Json j = {
      {"n", rhs.dimension()},
      {"mu", rhs.mu()},
      {"h", rhs.delay()},
      {"finite_difference_partials", rhs.uses_finite_differences()},
      {"growth", to_json(s.model.growth)},
      {"growth_sampled", to_json(sampled)},
      {"growth_check",
       {{"m_ratio", gcheck.m_ratio},
        {"m1_ratio", gcheck.m1_ratio},
        {"m2_ratio", gcheck.m2_ratio},
        {"passed", gcheck.passed(1e-9)}}},
      {"lyapunov", to_json(s.model.lyapunov.constants())},
      {"lyapunov_violations",
       {{"lower", v.lower},
        {"upper", v.upper},
        {"decay", v.decay},
        {"gradient", v.gradient},
        {"hessian", v.hessian},
        {"passed", v.passed(1e-9)}}},
  };
  Emit(c, j);
  return gcheck.passed(1e-9) && v.passed(1e-9) ? 0 : 1;
}

int RunRegion(const Common& c) {
  const Setup s = Load(c, c.example == "ex2" ? "table3" : "table1");
  Json j;
  try {
    j["razumikhin"] = to_json(razumikhin_certificate(s.model, s.lr));
  } catch (const CertificateError& e) {
    j["razumikhin"] = {{"error", e.what()}};
  }
  try {
    j["krasovskii"] = to_json(krasovskii_certificate(s.model, s.lk));
  } catch (const CertificateError& e) {
    j["krasovskii"] = {{"error", e.what()}};
  }
  Emit(c, j);
  return j["razumikhin"].contains("error") && j["krasovskii"].contains("error");
}

int RunEstimate(const Common& c) {
  Setup s = Load(c);
  if (s.shared_delta) {
    s.lr.delta = *s.shared_delta;
    s.lk.delta = *s.shared_delta;
  }
  const RazumikhinCertificate lr = razumikhin_certificate(s.model, s.lr);
  const KrasovskiiCertificate lk = krasovskii_certificate(s.model, s.lk);
  Json j = {{"razumikhin",
             {{"Delta", lr.Delta}, {"c1", lr.c_tilde_1}, {"c2", lr.c_tilde_2},
              {"certificate", to_json(lr)}}},
            {"krasovskii",
             {{"Delta", lk.Delta}, {"c1", lk.c_hat_1}, {"c2", lk.c_hat_2},
              {"certificate", to_json(lk)}}}};
  Emit(c, j);
  return 0;
}

int RunSimulate(const Common& c, bool log_output) {
  const Setup s = Load(c);
  const HistorySegment phi = DefaultHistory(s);
  const double h = s.model.rhs.delay();
  IntegrationOptions io;
  io.output = log_output ? OutputMode::kLogSpaced : OutputMode::kAll;
  const double step = c.step > 0 ? c.step : default_step(h);
  const double horizon = c.horizon > 0 ? c.horizon : default_horizon(h);
  const Trajectory traj = integrate(s.model.rhs, phi, horizon, step, io);
  if (!c.out.empty()) {
    std::ofstream out = OpenOutput(c.out);
    write_trajectory_csv(out, traj, s.model.lyapunov);
  }
  Json j = {{"step", step},
            {"horizon", traj.horizon()},
            {"phi_norm", phi.sup_norm()},
            {"nodes", traj.size()},
            {"final_norm", traj.norm(traj.size() - 1)}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

int RunCompare(const Common& c, bool figure, bool allow_outside) {
  const Setup s = Load(c);
  const HistorySegment phi = DefaultHistory(s);
  const double delta = s.shared_delta.value_or(
      s.lr.delta.value_or(s.lk.delta.value_or(0.0)));
  if (!(delta > 0.0)) {
    throw ConfigError("compare needs a shared 'delta' in the config");
  }
  const double h = s.model.rhs.delay();
  CompareOptions opt;
  opt.horizon = c.horizon > 0 ? c.horizon : default_horizon(h);
  opt.step = c.step > 0 ? c.step : default_step(h);
  if (figure) {
    RazumikhinParams lrp = s.lr;
    KrasovskiiParams lkp = s.lk;
    lrp.delta = delta;
    lkp.delta = delta;
    const auto lr = razumikhin_certificate(s.model, lrp);
    const auto lk = krasovskii_certificate(s.model, lkp);
    const auto samples = emit_figure_data(s.model, lr, lk, phi, opt.horizon,
                                          opt.step, allow_outside);
    if (c.out.empty()) {
      write_envelope_csv(std::cout, samples);
    } else {
      std::ofstream out = OpenOutput(c.out);
      write_envelope_csv(out, samples);
    }
    return 0;
  }
  const ComparisonReport r = compare(s.model, s.lr, s.lk, delta, phi, opt);
  Json decades = Json::array();
  for (const auto& d : r.decades) {
    decades.push_back({{"t_lo", d.t_lo}, {"t_hi", d.t_hi}, {"tighter", d.tighter}});
  }
  Json j = {{"delta", r.delta},
            {"B", r.B},
            {"B_tilde", r.B_tilde},
            {"k5_over_k1", r.k5_over_k1},
            {"c_over_b", r.c_over_b},
            {"k0_over_k1", r.k0_over_k1},
            {"a1_over_b", r.a1_over_b},
            {"razumikhin_identity_residual", r.razumikhin_identity_residual},
            {"krasovskii_identity_residual", r.krasovskii_identity_residual},
            {"phi_norm", r.phi_norm},
            {"horizon", r.horizon},
            {"step", r.step},
            {"nodes_checked", r.nodes_checked},
            {"inside_razumikhin_region", r.inside_razumikhin_region},
            {"inside_krasovskii_region", r.inside_krasovskii_region},
            {"razumikhin_dominates", r.razumikhin_dominates},
            {"krasovskii_dominates", r.krasovskii_dominates},
            {"razumikhin_worst_ratio", r.razumikhin_worst_ratio},
            {"krasovskii_worst_ratio", r.krasovskii_worst_ratio},
            {"razumikhin_tighter_after_ten_delays",
             r.razumikhin_tighter_after_ten_delays},
            {"decades", decades},
            {"razumikhin", to_json(r.razumikhin)},
            {"krasovskii", to_json(r.krasovskii)}};
  std::cout << j.dump(2) << '\n';
  if (!c.out.empty()) {
    std::ofstream out = OpenOutput(c.out);
    write_envelope_csv(out, r.samples);
  }
  return r.razumikhin_dominates && r.krasovskii_dominates ? 0 : 1;
}

int RunTune(const Common& c, const std::string& method,
            const std::string& target, std::size_t budget, std::uint64_t seed) {
  const Setup s = Load(c);
  Json tj = s.config.value("tuning", Json::object());
  if (!method.empty()) tj["method"] = method;
  if (!target.empty()) tj["target"] = target;
  if (budget > 0) tj["budget"] = budget;
  if (seed > 0) tj["seed"] = seed;
  if (!tj.contains("method")) {
    tj["method"] = scalar_path_applicable(s.model.rhs) ? "krasovskii-scalar"
                                                       : "krasovskii-general";
  }
  const TuningProblem problem = tuning_problem_from_json(tj, s.model);
  const TuningResult r = tune(s.model, problem);
  Emit(c, to_json(r, problem));
  return 0;
}

int RunTables(const Common& c, int table, const std::string& fixture) {
  std::vector<int> tables = table == 0 ? std::vector<int>{1, 2, 3}
                                       : std::vector<int>{table};
  bool all_ok = true;
  std::ofstream csv;
  if (!c.out.empty()) csv = OpenOutput(c.out);
  bool header = true;
  for (int t : tables) {
    const TableReport r =
        reproduce_table(t, fixture.empty() ? default_fixture_path() : fixture);
    std::cout << "Table " << t << ": " << r.title << '\n';
    for (const auto& cell : r.cells) {
      std::cout << "  " << (cell.pass ? "pass" : "FAIL")
                << (cell.flagged ? " [flagged]" : "") << "  " << cell.key
                << "  printed=" << cell.printed
                << "  computed=" << cell.computed
                << "  rel_err=" << cell.rel_error << "  tol=" << cell.tolerance;
      if (!cell.note.empty()) std::cout << "  (" << cell.note << ")";
      std::cout << '\n';
    }
    std::cout << "  => " << (r.ok() ? "OK" : "FAILED") << '\n';
    all_ok = all_ok && r.ok();
    if (csv.is_open()) {
      std::ostringstream buf;
      write_table_csv(buf, r);
      std::string text = buf.str();
      if (!header) text = text.substr(text.find('\n') + 1);
      csv << text;
      header = false;
    }
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability certificates and envelope estimates for "
               "homogeneous time-delay systems"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--example", common.example, "Built-in example (ex1|ex2)")
        ->check(CLI::IsMember({"ex1", "ex2"}));
    sub->add_option("--config", common.config, "JSON configuration file");
    sub->add_option("--out", common.out, "CSV output file");
    sub->add_option("--step", common.step, "Integration step (must divide h)");
    sub->add_option("--horizon", common.horizon, "Simulation horizon T");
  };

  std::size_t samples = kDefaultSampleCount;
  auto* constants = app.add_subcommand("constants", "Growth and Lyapunov constants with sampled validation");
  add_common(constants);
  constants->add_option("--samples", samples, "Sample count")->check(CLI::Range(1000, 100000000));

  auto* region = app.add_subcommand("region", "Attraction-region certificates (both methods)");
  add_common(region);
  auto* estimate = app.add_subcommand("estimate", "Envelope constants (both methods)");
  add_common(estimate);

  bool log_output = false;
  auto* simulate = app.add_subcommand("simulate", "Integrate the system and dump the trajectory");
  add_common(simulate);
  simulate->add_flag("--log-output", log_output, "Thin output to log-spaced nodes");

  bool figure = false, allow_outside = false;
  auto* cmp = app.add_subcommand("compare", "Compare both envelopes against a simulation");
  add_common(cmp);
  cmp->add_flag("--figure", figure, "Only emit figure CSV (t, norm, envelopes)");
  cmp->add_flag("--allow-outside-region", allow_outside,
                "Emit figure data even when the initial function is not inside both regions");

  std::string method, target;
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  auto* tune_cmd = app.add_subcommand("tune", "Tune free parameters of a certificate");
  add_common(tune_cmd);
  tune_cmd->add_option("--method", method, "razumikhin|krasovskii-general|krasovskii-scalar");
  tune_cmd->add_option("--target", target, "maximize-delta|minimize-c1|maximize-c2");
  tune_cmd->add_option("--budget", budget, "Maximum number of evaluations");
  tune_cmd->add_option("--seed", seed, "Seed for the simplex phase");

  int table = 0;
  std::string fixture;
  auto* tables = app.add_subcommand("reproduce-tables", "Recompute the reference tables and compare");
  add_common(tables);
  tables->add_option("--table", table, "Table number (default: all)")->check(CLI::Range(1, 3));
  tables->add_option("--fixture", fixture, "Reference table fixture");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*constants) return RunConstants(common, samples);
    if (*region) return RunRegion(common);
    if (*estimate) return RunEstimate(common);
    if (*simulate) return RunSimulate(common, log_output);
    if (*cmp) return RunCompare(common, figure, allow_outside);
    if (*tune_cmd) return RunTune(common, method, target, budget, seed);
    if (*tables) return RunTables(common, table, fixture);
  } catch (const homdelay::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
