#include "phimi/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "phimi/error.hpp"
#include "phimi/testing.hpp"

namespace phimi {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void check_keys(const Config::Section& s, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : s.entries) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in section [" + s.name + "]");
    }
  }
}

Range parse_range(const std::string& text) {
  const auto v = parse_doubles(text);
  if (v.size() != 2 || !(v[0] < v[1])) {
    throw ConfigError("bounds '" + text + "' must be two increasing numbers lo,hi");
  }
  return {v[0], v[1]};
}

}  // namespace

std::optional<std::string> Config::Section::get(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return std::nullopt;
}

Config Config::parse(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }
  Config cfg;
  for (const auto& [header, body] : tree) {
    if (body.empty()) {
      throw ConfigError("key '" + header + "' appears outside a section");
    }
    Section s;
    const auto space = header.find_first_of(" \t");
    s.name = header.substr(0, space);
    if (space != std::string::npos) s.label = trim(header.substr(space));
    for (const auto& [key, value] : body) s.entries.emplace_back(key, value.data());
    cfg.sections_.push_back(std::move(s));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open configuration file '" + path + "'");
  return parse(in);
}

const Config::Section* Config::find(const std::string& name) const {
  for (const auto& s : sections_) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(',', start);
    out.push_back(trim(text.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError("'" + text + "' is not a number");
  }
  return v;
}

std::size_t parse_size(const std::string& text) {
  const std::string t = trim(text);
  std::size_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    // Accept integral values in floating notation such as 1e6.
    const double d = parse_double(t);
    if (!(d >= 0.0) || d != std::floor(d) || d > 1e18) {
      throw ConfigError("'" + text + "' is not a non-negative integer");
    }
    return static_cast<std::size_t>(d);
  }
  return v;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(item));
  return out;
}

ModelSpec model_spec_from(const Config::Section& section) {
  check_keys(section, {"model", "alpha_bounds", "beta_bounds", "levels_x", "levels_y"});
  const auto descriptor = section.get("model");
  if (!descriptor) throw ConfigError("section [" + section.name + "] has no 'model' key");
  ModelSpec spec = ModelSpec::parse(*descriptor);
  if (auto v = section.get("alpha_bounds")) spec.alpha = parse_range(*v);
  if (auto v = section.get("beta_bounds")) spec.beta = parse_range(*v);
  const auto lx = section.get("levels_x");
  const auto ly = section.get("levels_y");
  if (lx || ly) {
    if (!lx || !ly) throw ConfigError("levels_x and levels_y must be given together");
    spec.levels = Levels(split_list(*lx), split_list(*ly));
  }
  return spec;
}

PowerStudyConfig power_study_config(const Config& config) {
  const Config::Section* s = config.find("study");
  if (!s) throw ConfigError("configuration has no [study] section");
  check_keys(*s, {"family", "k", "grid", "n", "reps", "alpha", "tests", "route", "seed", "B",
                  "ztz_draws", "moment_draws", "threads"});
  PowerStudyConfig cfg;
  const auto family = s->get("family");
  if (!family) throw ConfigError("[study] needs a 'family' key");
  cfg.family = parse_study_family(*family);
  if (auto v = s->get("k")) cfg.k = parse_size(*v);
  const auto grid = s->get("grid");
  if (!grid) throw ConfigError("[study] needs a 'grid' key");
  cfg.grid = parse_doubles(*grid);
  if (auto v = s->get("n")) cfg.n = parse_size(*v);
  if (auto v = s->get("reps")) cfg.reps = parse_size(*v);
  if (auto v = s->get("alpha")) cfg.alpha = parse_double(*v);
  if (auto v = s->get("tests")) cfg.tests = split_list(*v);
  if (auto v = s->get("route")) {
    if (trim(*v) != "auto") cfg.route = parse_route(trim(*v));
  }
  if (auto v = s->get("seed")) cfg.seed = parse_size(*v);
  if (auto v = s->get("B")) cfg.b_reps = parse_size(*v);
  if (auto v = s->get("ztz_draws")) cfg.ztz_draws = parse_size(*v);
  if (auto v = s->get("moment_draws")) cfg.moment_draws = parse_size(*v);
  if (auto v = s->get("threads")) cfg.threads = parse_size(*v);
  if (const Config::Section* m = config.find("model")) cfg.model = model_spec_from(*m);
  return cfg;
}

std::vector<CvCandidate> cv_candidates(const Config& config) {
  std::vector<CvCandidate> out;
  for (const auto& s : config.sections()) {
    if (s.name != "candidate") continue;
    if (s.label.empty()) throw ConfigError("[candidate] sections need a name");
    out.push_back({s.label, model_spec_from(s)});
  }
  return out;
}

}  // namespace phimi
