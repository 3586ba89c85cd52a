#include "phimi/cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <random>
#include <sstream>

#include "phimi/asymptotics.hpp"
#include "phimi/config.hpp"
#include "phimi/csv.hpp"
#include "phimi/distributions.hpp"
#include "phimi/error.hpp"
#include "phimi/estimator.hpp"
#include "phimi/model_selection.hpp"
#include "phimi/power_study.hpp"
#include "phimi/testing.hpp"

namespace phimi::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::string csv;
  std::string x = "x";
  std::string y = "y";
  std::string kind;
  std::string divergence = "kl";
  std::optional<double> gamma;
  std::string model;
  std::string route;
  double alpha = 0.05;
  std::size_t b_reps = 1000;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::string format = "text";
  std::string out;
  std::string config;
  // select
  std::size_t folds = 5;
  // bootstrap
  std::string replicates;
  // power
  std::string report;
  std::string plot;
  std::optional<std::size_t> reps;
  // limits
  std::string margins = "normal";
  std::size_t draws = 10000;
  std::size_t moment_draws = 1'000'000;
  std::string levels;
};

std::string text_value(const Json& v) {
  switch (v.type()) {
    case Json::value_t::string: return v.get<std::string>();
    case Json::value_t::boolean: return v.get<bool>() ? "true" : "false";
    case Json::value_t::number_integer: return std::to_string(v.get<std::int64_t>());
    case Json::value_t::number_unsigned: return std::to_string(v.get<std::uint64_t>());
    case Json::value_t::number_float: return format_shortest(v.get<double>());
    case Json::value_t::null: return "none";
    case Json::value_t::array: {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += text_value(v[i]);
      }
      return s;
    }
    default: return v.dump();
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

/// Ordered key/value result, written as text, one-row CSV or JSON.
class Record {
 public:
  Record& add(const std::string& key, Json value) {
    data_[key] = std::move(value);
    return *this;
  }

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json") {
      Json doc;
      doc["phimi-format"] = 1;
      for (const auto& [k, v] : data_.items()) doc[k] = v;
      os << doc.dump(2) << '\n';
      return;
    }
    os << "phimi-format=1\n";
    if (format == "csv") {
      std::string head, row;
      for (const auto& [k, v] : data_.items()) {
        if (!head.empty()) {
          head += ',';
          row += ',';
        }
        head += k;
        row += csv_field(text_value(v));
      }
      os << head << '\n' << row << '\n';
      return;
    }
    for (const auto& [k, v] : data_.items()) os << k << ": " << text_value(v) << '\n';
  }

 private:
  Json data_ = Json::object();
};

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v[k]);
  return a;
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw IoError("cannot open '" + path + "' for writing");
      os_ = &file_;
    }
  }
  std::ostream& stream() { return *os_; }
  void close() {
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw IoError("failed to write output file");
    }
  }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

std::uint64_t resolve_seed(const Options& o, std::ostream& err) {
  if (o.seed) return *o.seed;
  std::random_device rd;
  const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "generated seed " << seed << '\n';
  return seed;
}

Divergence resolve_divergence(const Options& o) {
  return o.gamma ? Divergence(*o.gamma) : Divergence::from_name(o.divergence);
}

ModelSpec resolve_model(const Options& o) {
  if (!o.model.empty()) return ModelSpec::parse(o.model);
  return ModelSpec::parse(o.kind == "categorical" ? "finite" : "expbilinear:x,y");
}

PairedSample load_sample(const Options& o, const ModelSpec& spec) {
  if (o.csv.empty()) throw ConfigError("--csv is required");
  ValueKind kind = spec.family == Family::FiniteDiscrete ? ValueKind::Categorical : ValueKind::Real;
  if (o.kind == "real") kind = ValueKind::Real;
  if (o.kind == "categorical") kind = ValueKind::Categorical;
  return ingest_csv(o.csv, o.x, o.y, kind);
}

void add_context(Record& r, const std::string& command, const ObjectiveContext& ctx) {
  r.add("command", command)
      .add("n", ctx.size())
      .add("divergence", ctx.divergence().name())
      .add("model", ctx.model().descriptor());
}

int cmd_estimate(const Options& o, std::ostream& out) {
  const ModelSpec spec = resolve_model(o);
  const PairedSample sample = load_sample(o, spec);
  const ObjectiveContext ctx(resolve_divergence(o), spec.build(sample), sample);
  const DualEstimate est = estimate(ctx);
  Record r;
  add_context(r, "estimate", ctx);
  r.add("i_hat", est.i_hat)
      .add("theta", vector_json(est.theta_hat))
      .add("converged", est.converged)
      .add("grad_norm", est.grad_norm)
      .add("iterations", est.iterations)
      .add("objective_evals", est.objective_evals);
  Output dst(o.out, out);
  r.write(dst.stream(), o.format);
  dst.close();
  return kOk;
}

Route resolve_route(const Options& o, const ObjectiveContext& ctx) {
  if (!o.route.empty()) return parse_route(o.route);
  if (ctx.model().family() == Family::FiniteDiscrete) return Route::ChiSqExact;
  if (ctx.model().is_exponential() && ctx.divergence().kind() == DivergenceKind::KL) {
    return Route::ZtZ;
  }
  return Route::Bootstrap;
}

int cmd_test(const Options& o, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = resolve_model(o);
  const PairedSample sample = load_sample(o, spec);
  const ObjectiveContext ctx(resolve_divergence(o), spec.build(sample), sample);
  const Route route = resolve_route(o, ctx);
  check_route(ctx, route);
  Calibration cal;
  cal.alpha = o.alpha;
  cal.b_reps = o.b_reps;
  cal.threads = o.threads;
  cal.ztz_draws = o.draws;
  cal.moment_draws = o.moment_draws;
  const bool randomized = route != Route::ChiSqExact;
  if (randomized) cal.seed = resolve_seed(o, err);
  const TestResult res = test_independence(ctx, route, cal);

  Record r;
  add_context(r, "test", ctx);
  r.add("route", std::string(route_name(route)))
      .add("alpha", res.alpha)
      .add("i_hat", res.i_hat)
      .add("statistic", res.statistic)
      .add("critical_value", res.critical_value)
      .add("p_value", res.p_value ? Json(*res.p_value) : Json())
      .add("reject", res.reject)
      .add("converged", res.converged);
  if (route == Route::Bootstrap) r.add("B", o.b_reps);
  if (randomized) r.add("seed", cal.seed);
  Output dst(o.out, out);
  r.write(dst.stream(), o.format);
  dst.close();
  return kOk;
}

int cmd_bootstrap(const Options& o, std::ostream& out, std::ostream& err) {
  const ModelSpec spec = resolve_model(o);
  const PairedSample sample = load_sample(o, spec);
  const ObjectiveContext ctx(resolve_divergence(o), spec.build(sample), sample);
  BootstrapConfig cfg;
  cfg.b_reps = o.b_reps;
  cfg.alpha = o.alpha;
  cfg.seed = resolve_seed(o, err);
  cfg.threads = o.threads;
  const BootstrapResult boot = bootstrap_null(ctx, cfg);
  const auto& s = boot.statistics;

  Record r;
  add_context(r, "bootstrap", ctx);
  r.add("alpha", cfg.alpha)
      .add("B", cfg.b_reps)
      .add("seed", cfg.seed)
      .add("critical_value", boot.critical_value)
      .add("failures", boot.failures)
      .add("replicate_min", *std::min_element(s.begin(), s.end()))
      .add("replicate_median", empirical_quantile(s, 0.5))
      .add("replicate_max", *std::max_element(s.begin(), s.end()));
  Output dst(o.out, out);
  r.write(dst.stream(), o.format);
  dst.close();

  if (!o.replicates.empty()) {
    std::ofstream rep(o.replicates);
    if (!rep) throw IoError("cannot open '" + o.replicates + "' for writing");
    rep << "phimi-format=1\nreplicate,statistic\n";
    for (std::size_t i = 0; i < s.size(); ++i) rep << i << ',' << format_shortest(s[i]) << '\n';
    if (!rep) throw IoError("failed to write replicates");
  }
  return kOk;
}

int cmd_select(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.config.empty()) throw ConfigError("--config with [candidate NAME] sections is required");
  CvConfig cfg;
  cfg.candidates = cv_candidates(Config::load(o.config));
  if (cfg.candidates.empty()) throw ConfigError("configuration lists no [candidate] sections");
  cfg.k = o.folds;
  cfg.divergence = resolve_divergence(o);
  cfg.seed = resolve_seed(o, err);
  cfg.threads = o.threads;
  const PairedSample sample = load_sample(o, cfg.candidates.front().spec);
  const CvReport rep = cross_validate(sample, cfg);

  Output dst(o.out, out);
  std::ostream& os = dst.stream();
  if (o.format == "csv") {
    os << "phimi-format=1\nname,model,dimension,score,qualified,selected\n";
    for (std::size_t c = 0; c < rep.names.size(); ++c) {
      os << csv_field(rep.names[c]) << ',' << csv_field(cfg.candidates[c].spec.descriptor())
         << ',' << rep.dimensions[c] << ',' << format_shortest(rep.scores[c]) << ','
         << (rep.qualified[c] ? "true" : "false") << ','
         << (c == rep.selected ? "true" : "false") << '\n';
    }
  } else {
    Record r;
    r.add("command", "select")
        .add("n", sample.size())
        .add("divergence", cfg.divergence.name())
        .add("k", cfg.k)
        .add("seed", cfg.seed);
    for (std::size_t c = 0; c < rep.names.size(); ++c) {
      Json cand;
      cand["model"] = cfg.candidates[c].spec.descriptor();
      cand["dimension"] = rep.dimensions[c];
      cand["score"] = rep.qualified[c] ? Json(rep.scores[c]) : Json();
      cand["qualified"] = static_cast<bool>(rep.qualified[c]);
      if (o.format == "json") {
        Json folds = Json::array();
        for (const auto& f : rep.folds[c]) {
          folds.push_back({{"theta", vector_json(f.theta)},
                           {"held_out", f.held_out},
                           {"converged", f.converged}});
        }
        cand["folds"] = folds;
        r.add("candidate " + rep.names[c], cand);
      } else {
        r.add("candidate " + rep.names[c],
              cand["model"].get<std::string>() + " dimension=" + text_value(cand["dimension"]) +
                  " score=" + text_value(cand["score"]) +
                  " qualified=" + text_value(cand["qualified"]));
      }
    }
    r.add("selected", rep.names[rep.selected]);
    r.write(os, o.format);
  }
  dst.close();
  return kOk;
}

int cmd_power(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.config.empty()) throw ConfigError("--config is required");
  const Config file = Config::load(o.config);
  PowerStudyConfig cfg = power_study_config(file);
  const Config::Section* study = file.find("study");
  if (o.seed) {
    cfg.seed = *o.seed;
  } else if (!study->get("seed")) {
    cfg.seed = resolve_seed(o, err);
  }
  if (o.threads) cfg.threads = o.threads;
  if (o.reps) cfg.reps = *o.reps;
  const PowerTable table = run_power_study(cfg);

  Output dst(o.out, out);
  if (o.format == "text") {
    write_power_report(table, cfg, dst.stream());
  } else {
    write_power_csv(table, dst.stream());
  }
  dst.close();
  if (!o.report.empty()) {
    std::ofstream rep(o.report);
    if (!rep) throw IoError("cannot open '" + o.report + "' for writing");
    write_power_report(table, cfg, rep);
  }
  if (!o.plot.empty()) {
    std::ofstream plot(o.plot);
    if (!plot) throw IoError("cannot open '" + o.plot + "' for writing");
    write_power_long(table, plot);
  }
  return kOk;
}

int cmd_limits(const Options& o, std::ostream& out, std::ostream& err) {
  ModelSpec spec = resolve_model(o);
  std::optional<PairedSample> sample;
  if (o.margins == "data") sample = load_sample(o, spec);
  if (spec.family == Family::FiniteDiscrete && !spec.levels && !sample) {
    const auto k = parse_doubles(o.levels);
    if (k.size() != 2) throw ConfigError("finite model needs --levels K1,K2 or --margins data");
    spec.levels = Levels::numbered(static_cast<std::size_t>(k[0]), static_cast<std::size_t>(k[1]));
  }
  const RatioModel model = sample ? spec.build(*sample) : spec.build();
  if (!model.is_exponential()) throw RouteMismatch("limit law needs an exponential model");

  std::optional<std::pair<Margin, Margin>> margins;
  if (sample) {
    margins = sample_margins(model, *sample);
  } else if (model.family() == Family::FiniteDiscrete) {
    const Levels& lv = model.levels();
    std::vector<double> cx(lv.k1()), cy(lv.k2());
    for (std::size_t a = 0; a < cx.size(); ++a) cx[a] = static_cast<double>(a);
    for (std::size_t b = 0; b < cy.size(); ++b) cy[b] = static_cast<double>(b);
    margins.emplace(Margin::discrete(cx, std::vector<double>(cx.size(), 1.0)),
                    Margin::discrete(cy, std::vector<double>(cy.size(), 1.0)));
  } else if (o.margins == "normal") {
    margins.emplace(Margin::normal(), Margin::normal());
  } else if (o.margins == "uniform") {
    margins.emplace(Margin::uniform(), Margin::uniform());
  } else {
    throw ConfigError("--margins must be normal, uniform or data");
  }

  const std::uint64_t seed = resolve_seed(o, err);
  const auto cov = AsymptoticCovariances::compute(model, margins->first, margins->second,
                                                  o.moment_draws, derive_seed(seed, 1));
  const double crit = limit_quantile_ztz(cov, o.alpha, o.draws, derive_seed(seed, 2));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.c_matrix, Eigen::EigenvaluesOnly);

  Record r;
  r.add("command", "limits")
      .add("model", model.descriptor())
      .add("margins", sample ? std::string("data") : o.margins)
      .add("alpha", o.alpha)
      .add("draws", o.draws)
      .add("seed", seed)
      .add("critical_value", crit)
      .add("c_eigenvalues", vector_json(es.eigenvalues().cwiseMax(0.0)));
  if (model.family() == Family::FiniteDiscrete) {
    const std::size_t df = chisq_df_finite(model.levels().k1(), model.levels().k2());
    r.add("chisq_df", df).add("chisq_critical_value",
                              chisq_quantile(1.0 - o.alpha, static_cast<double>(df)));
  }
  Output dst(o.out, out);
  r.write(dst.stream(), o.format);
  dst.close();
  return kOk;
}

void data_options(CLI::App* app, Options& o) {
  app->add_option("--csv", o.csv, "Input CSV file with a header row")->required();
  app->add_option("--x", o.x, "Column holding X")->capture_default_str();
  app->add_option("--y", o.y, "Column holding Y")->capture_default_str();
  app->add_option("--kind", o.kind, "Value kind; default follows the model")
      ->check(CLI::IsMember({"real", "categorical"}));
}

void model_options(CLI::App* app, Options& o) {
  auto* div = app->add_option("--divergence", o.divergence,
                              "kl, klm, chisq, chisqm, hellinger or a gamma value")
                  ->capture_default_str();
  app->add_option("--gamma", o.gamma, "Power-divergence index")->excludes(div);
  app->add_option("--model", o.model,
                  "expbilinear:<xi,zeta;...>, gaussian, finite or fgm");
}

void output_options(CLI::App* app, Options& o) {
  app->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"text", "csv", "json"}))
      ->capture_default_str();
  app->add_option("--out", o.out, "Write the result to this file instead of stdout");
}

void run_options(CLI::App* app, Options& o) {
  app->add_option("--seed", o.seed, "Random seed; generated and printed when absent");
  app->add_option("--threads", o.threads, "Worker threads (default: PHIMI_THREADS or all cores)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Dual phi-mutual information estimation and independence tests", "phimi"};
  app.require_subcommand(1);
  app.fallthrough();

  auto* est = app.add_subcommand("estimate", "Estimate phi-MI and the ratio parameter");
  data_options(est, o);
  model_options(est, o);
  output_options(est, o);

  auto* test = app.add_subcommand("test", "Test independence with S_n = 2 n I_hat");
  data_options(test, o);
  model_options(test, o);
  output_options(test, o);
  run_options(test, o);
  test->add_option("--route", o.route, "Calibration: ztz, chisq or bootstrap")
      ->check(CLI::IsMember({"ztz", "chisq", "bootstrap"}));
  test->add_option("--alpha", o.alpha, "Test level")->capture_default_str();
  test->add_option("--B", o.b_reps, "Bootstrap replicates")->capture_default_str();
  test->add_option("--draws", o.draws, "Draws of Z^T Z")->capture_default_str();
  test->add_option("--moment-draws", o.moment_draws, "Product draws for moments")
      ->capture_default_str();

  auto* boot = app.add_subcommand("bootstrap", "Bootstrap critical value under independence");
  data_options(boot, o);
  model_options(boot, o);
  output_options(boot, o);
  run_options(boot, o);
  boot->add_option("--alpha", o.alpha, "Test level")->capture_default_str();
  boot->add_option("--B", o.b_reps, "Bootstrap replicates")->capture_default_str();
  boot->add_option("--replicates", o.replicates, "Write replicate statistics to this file");

  auto* sel = app.add_subcommand("select", "Cross-validated model selection");
  data_options(sel, o);
  output_options(sel, o);
  run_options(sel, o);
  sel->add_option("--config", o.config, "File with [candidate NAME] sections")->required();
  sel->add_option("--k", o.folds, "Number of folds")->capture_default_str();
  auto* sdiv = sel->add_option("--divergence", o.divergence, "Divergence")->capture_default_str();
  sel->add_option("--gamma", o.gamma, "Power-divergence index")->excludes(sdiv);

  auto* power = app.add_subcommand("power", "Monte-Carlo power study from a config file");
  power->add_option("--config", o.config, "Study configuration")->required();
  power->add_option("--reps", o.reps, "Override the replicate count");
  power->add_option("--report", o.report, "Also write the text report to this file");
  power->add_option("--plot", o.plot, "Also write long-format plot data to this file");
  power->add_option("--format", o.format, "Main output: csv or text")
      ->check(CLI::IsMember({"csv", "text"}));
  power->add_option("--out", o.out, "Write the table to this file instead of stdout");
  run_options(power, o);
  o.format = "text";

  auto* lim = app.add_subcommand("limits", "Critical value of the Z^T Z limit law");
  lim->add_option("--model", o.model, "Exponential ratio model")->required();
  lim->add_option("--margins", o.margins, "normal, uniform or data")
      ->check(CLI::IsMember({"normal", "uniform", "data"}))
      ->capture_default_str();
  lim->add_option("--levels", o.levels, "K1,K2 for a finite model without data");
  lim->add_option("--csv", o.csv, "Data for --margins data");
  lim->add_option("--x", o.x, "Column holding X")->capture_default_str();
  lim->add_option("--y", o.y, "Column holding Y")->capture_default_str();
  lim->add_option("--kind", o.kind, "Value kind")->check(CLI::IsMember({"real", "categorical"}));
  lim->add_option("--alpha", o.alpha, "Test level")->capture_default_str();
  lim->add_option("--draws", o.draws, "Draws of Z^T Z")->capture_default_str();
  lim->add_option("--moment-draws", o.moment_draws, "Product draws for moments")
      ->capture_default_str();
  output_options(lim, o);
  run_options(lim, o);

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' &&
      app.get_subcommand_no_throw(args[0]) == nullptr) {
    err << "error: unknown subcommand '" << args[0] << "'\n\n" << app.help();
    return kUsage;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }
  if (power->parsed() && o.format == "text" && !o.out.empty()) o.format = "csv";

  try {
    if (est->parsed()) return cmd_estimate(o, out);
    if (test->parsed()) return cmd_test(o, out, err);
    if (boot->parsed()) return cmd_bootstrap(o, out, err);
    if (sel->parsed()) return cmd_select(o, out, err);
    if (power->parsed()) return cmd_power(o, out, err);
    if (lim->parsed()) return cmd_limits(o, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const RouteMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

}  // namespace phimi::cli
