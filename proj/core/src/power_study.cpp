#include "phimi/power_study.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "phimi/asymptotics.hpp"
#include "phimi/correlation_tests.hpp"
#include "phimi/error.hpp"
#include "phimi/estimator.hpp"
#include "phimi/objective.hpp"
#include "phimi/parallel.hpp"
#include "phimi/samplers.hpp"
#include "phimi/testing.hpp"

namespace phimi {

namespace {

enum : std::uint64_t { kGridStream = 21, kPilot = 22, kPilotBoot = 23, kCalib = 24 };

constexpr std::string_view kFormatLine = "phimi-format=1";
constexpr std::string_view kCsvHeader = "test,param,power,se,reps,n,alpha,rejections";

enum class TestKind { Divergence, Pearson, Spearman, Kendall };

struct PreparedTest {
  std::string name;
  TestKind kind = TestKind::Divergence;
  std::optional<Divergence> divergence;
  Route route = Route::ChiSqExact;
  double critical = 0.0;
};

RatioModel study_model(const PowerStudyConfig& cfg) {
  if (cfg.model) {
    ModelSpec spec = *cfg.model;
    if (spec.family == Family::FiniteDiscrete && !spec.levels) {
      spec.levels = Levels::numbered(cfg.k, cfg.k);
    }
    return spec.build();
  }
  switch (cfg.family) {
    case StudyFamily::Finite: return RatioModel::finite_discrete(Levels::numbered(cfg.k, cfg.k));
    case StudyFamily::Gaussian: return gaussian_model();
    case StudyFamily::Fgm: return RatioModel::copula_fgm();
  }
  throw ConfigError("unknown study family");
}

std::pair<Margin, Margin> study_margins(const PowerStudyConfig& cfg) {
  switch (cfg.family) {
    case StudyFamily::Finite: {
      std::vector<double> codes(cfg.k), probs(cfg.k, 1.0);
      for (std::size_t a = 0; a < cfg.k; ++a) codes[a] = static_cast<double>(a);
      return {Margin::discrete(codes, probs), Margin::discrete(codes, probs)};
    }
    case StudyFamily::Gaussian: return {Margin::normal(), Margin::normal()};
    case StudyFamily::Fgm: return {Margin::uniform(), Margin::uniform()};
  }
  throw ConfigError("unknown study family");
}

Route default_route(const PowerStudyConfig& cfg, const Divergence& div) {
  if (cfg.route) return *cfg.route;
  if (cfg.family == StudyFamily::Finite) return Route::ChiSqExact;
  if (cfg.family == StudyFamily::Gaussian && div.kind() == DivergenceKind::KL) return Route::ZtZ;
  return Route::Bootstrap;
}

void validate(const PowerStudyConfig& cfg) {
  if (cfg.grid.empty()) throw ConfigError("power study grid is empty");
  if (cfg.reps < 100) throw ConfigError("power study needs at least 100 replicates");
  if (cfg.n < 4) throw ConfigError("power study needs n >= 4");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw DomainError("test level", cfg.alpha, "(0, 1)");
  if (cfg.tests.empty()) throw ConfigError("power study lists no tests");
}

}  // namespace

std::string_view study_family_name(StudyFamily family) {
  switch (family) {
    case StudyFamily::Finite: return "finite";
    case StudyFamily::Gaussian: return "gaussian";
    case StudyFamily::Fgm: return "fgm";
  }
  return "?";
}

StudyFamily parse_study_family(std::string_view name) {
  if (name == "finite") return StudyFamily::Finite;
  if (name == "gaussian") return StudyFamily::Gaussian;
  if (name == "fgm") return StudyFamily::Fgm;
  throw ConfigError("unknown study family '" + std::string(name) +
                    "' (expected finite, gaussian or fgm)");
}

const PowerRow* PowerTable::find(std::string_view test, double param) const {
  for (const auto& r : rows) {
    if (r.test == test && r.param == param) return &r;
  }
  return nullptr;
}

PairedSample draw_study_sample(const PowerStudyConfig& cfg, double param, Rng& rng) {
  switch (cfg.family) {
    case StudyFamily::Finite: return sample_finite({cfg.k, param}, cfg.n, rng);
    case StudyFamily::Gaussian: return sample_gaussian({param, 1.0}, cfg.n, rng);
    case StudyFamily::Fgm: return sample_fgm({param}, cfg.n, rng);
  }
  throw ConfigError("unknown study family");
}

PowerTable run_power_study(const PowerStudyConfig& cfg) {
  validate(cfg);
  const RatioModel model = study_model(cfg);
  Rng pilot_rng(derive_seed(cfg.seed, kPilot));
  const PairedSample pilot = draw_study_sample(cfg, 0.0, pilot_rng);

  PowerTable table;
  std::vector<PreparedTest> tests;
  for (const auto& name : cfg.tests) {
    PreparedTest t;
    t.name = name;
    if (name == "pearson" || name == "spearman" || name == "kendall") {
      if (cfg.family == StudyFamily::Finite) {
        throw ConfigError("correlation baselines need a real-valued family");
      }
      t.kind = name == "pearson"    ? TestKind::Pearson
               : name == "spearman" ? TestKind::Spearman
                                    : TestKind::Kendall;
      tests.push_back(std::move(t));
      continue;
    }
    t.divergence = Divergence::from_name(name);
    t.route = default_route(cfg, *t.divergence);
    const ObjectiveContext ctx(*t.divergence, model, pilot);
    Calibration cal;
    cal.alpha = cfg.alpha;
    cal.seed = derive_seed(cfg.seed, kPilotBoot);
    cal.ztz_draws = cfg.ztz_draws;
    cal.b_reps = cfg.b_reps;
    cal.threads = cfg.threads;
    if (t.route == Route::ZtZ) {
      check_route(ctx, t.route);
      const auto [mx, my] = study_margins(cfg);
      cal.covariances = AsymptoticCovariances::compute(model, mx, my, cfg.moment_draws,
                                                       derive_seed(cfg.seed, kCalib));
    }
    t.critical = critical_value(ctx, t.route, cal);
    table.critical_values.push_back({t.name, t.route, t.critical});
    tests.push_back(std::move(t));
  }

  const std::size_t nt = tests.size();
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const double param = cfg.grid[g];
    const std::uint64_t cell_seed = derive_seed(cfg.seed, kGridStream, g);
    // outcome[r * nt + t]: 1 reject, 0 accept, -1 failed
    std::vector<signed char> outcome(cfg.reps * nt, -1);
    parallel_for(cfg.reps, cfg.threads, [&](std::size_t r) {
      Rng rng = Rng::stream(cell_seed, r);
      const PairedSample sample = draw_study_sample(cfg, param, rng);
      for (std::size_t t = 0; t < nt; ++t) {
        const PreparedTest& test = tests[t];
        try {
          bool reject = false;
          switch (test.kind) {
            case TestKind::Divergence: {
              const DualEstimate est = estimate(ObjectiveContext(*test.divergence, model, sample));
              if (!est.converged) continue;
              reject = 2.0 * static_cast<double>(cfg.n) * est.i_hat > test.critical;
              break;
            }
            case TestKind::Pearson: reject = pearson_test(sample, cfg.alpha).reject; break;
            case TestKind::Spearman: reject = spearman_test(sample, cfg.alpha).reject; break;
            case TestKind::Kendall: reject = kendall_test(sample, cfg.alpha).reject; break;
          }
          outcome[r * nt + t] = reject ? 1 : 0;
        } catch (const Error&) {
        }
      }
    });

    for (std::size_t t = 0; t < nt; ++t) {
      std::size_t ok = 0, rej = 0;
      for (std::size_t r = 0; r < cfg.reps; ++r) {
        const signed char o = outcome[r * nt + t];
        if (o >= 0) ++ok;
        if (o == 1) ++rej;
      }
      const std::size_t failed = cfg.reps - ok;
      if (static_cast<double>(failed) > cfg.max_error_rate * static_cast<double>(cfg.reps)) {
        throw Error(tests[t].name + " failed on " + std::to_string(failed) + " of " +
                    std::to_string(cfg.reps) + " replicates at parameter " +
                    format_shortest(param));
      }
      PowerRow row;
      row.test = tests[t].name;
      row.param = param;
      row.reps = ok;
      row.n = cfg.n;
      row.alpha = cfg.alpha;
      row.rejections = rej;
      row.power = static_cast<double>(rej) / static_cast<double>(ok);
      row.se = std::sqrt(row.power * (1.0 - row.power) / static_cast<double>(ok));
      table.rows.push_back(std::move(row));
    }
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [&](const PowerRow& a, const PowerRow& b) {
    auto pos = [&](const std::string& name) {
      for (std::size_t t = 0; t < nt; ++t) {
        if (tests[t].name == name) return t;
      }
      return nt;
    };
    return pos(a.test) < pos(b.test);
  });
  return table;
}

std::string format_shortest(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

void write_power_csv(const PowerTable& table, std::ostream& out) {
  out << kFormatLine << '\n' << kCsvHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.test << ',' << format_shortest(r.param) << ',' << format_fixed(r.power, 4) << ','
        << format_fixed(r.se, 4) << ',' << r.reps << ',' << r.n << ','
        << format_shortest(r.alpha) << ',' << r.rejections << '\n';
  }
  if (!out) throw IoError("failed to write power table");
}

void write_power_report(const PowerTable& table, const PowerStudyConfig& cfg,
                        std::ostream& out) {
  out << kFormatLine << '\n';
  out << "family: " << study_family_name(cfg.family) << '\n';
  if (cfg.family == StudyFamily::Finite) out << "k: " << cfg.k << '\n';
  out << "n: " << cfg.n << '\n'
      << "reps: " << cfg.reps << '\n'
      << "alpha: " << format_shortest(cfg.alpha) << '\n'
      << "seed: " << cfg.seed << '\n';
  for (const auto& c : table.critical_values) {
    out << "critical " << c.test << " (" << route_name(c.route)
        << "): " << format_fixed(c.value, 4) << '\n';
  }
  std::string current;
  for (const auto& r : table.rows) {
    if (r.test != current) {
      current = r.test;
      out << '\n' << "[" << current << "]\n" << "param      power   se\n";
    }
    std::string p = format_shortest(r.param);
    p.resize(std::max<std::size_t>(p.size(), 10), ' ');
    out << p << ' ' << format_fixed(r.power, 4) << "  " << format_fixed(r.se, 4) << '\n';
  }
  if (!out) throw IoError("failed to write power report");
}

void write_power_long(const PowerTable& table, std::ostream& out) {
  out << kFormatLine << '\n' << "series,x,y,y_low,y_high\n";
  for (const auto& r : table.rows) {
    out << r.test << ',' << format_shortest(r.param) << ',' << format_fixed(r.power, 4) << ','
        << format_fixed(std::max(0.0, r.power - 2.0 * r.se), 4) << ','
        << format_fixed(std::min(1.0, r.power + 2.0 * r.se), 4) << '\n';
  }
  if (!out) throw IoError("failed to write plot data");
}

PowerTable read_power_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kFormatLine) {
    throw ParseError("expected format line '" + std::string(kFormatLine) + "'", line_no);
  }
  ++line_no;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ParseError("expected header '" + std::string(kCsvHeader) + "'", line_no);
  }
  PowerTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      f.push_back(line.substr(start, pos - start));
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    if (f.size() != 8) throw ParseError("expected 8 fields", line_no);
    auto number = [&](const std::string& s, auto& value) {
      const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError("bad number '" + s + "'", line_no);
      }
    };
    PowerRow r;
    r.test = f[0];
    number(f[1], r.param);
    number(f[4], r.reps);
    number(f[5], r.n);
    number(f[6], r.alpha);
    number(f[7], r.rejections);
    if (r.reps == 0 || r.rejections > r.reps) throw ParseError("inconsistent counts", line_no);
    r.power = static_cast<double>(r.rejections) / static_cast<double>(r.reps);
    r.se = std::sqrt(r.power * (1.0 - r.power) / static_cast<double>(r.reps));
    table.rows.push_back(std::move(r));
  }
  return table;
}

}  // namespace phimi
