#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phimi/model_selection.hpp"
#include "phimi/power_study.hpp"
#include "phimi/ratio_model.hpp"

namespace phimi {

/// INI-style configuration: "[section]" or "[section label]" headers,
/// "key = value" lines, '#' or ';' comment lines.
///
///   [study]      family, k, grid, n, reps, alpha, tests, route, seed, B,
///                ztz_draws, moment_draws, threads
///   [model]      model, alpha_bounds, beta_bounds, levels_x, levels_y
///   [candidate NAME]   same keys as [model]; one section per candidate
class Config {
 public:
  struct Section {
    std::string name;
    std::string label;
    std::vector<std::pair<std::string, std::string>> entries;

    std::optional<std::string> get(const std::string& key) const;
  };

  /// Throws ParseError (with line number) on malformed input.
  static Config parse(std::istream& in);
  /// Throws IoError when the file cannot be read.
  static Config load(const std::string& path);

  const std::vector<Section>& sections() const noexcept { return sections_; }
  const Section* find(const std::string& name) const;

 private:
  std::vector<Section> sections_;
};

/// Splits on commas and trims each item; empty input gives an empty list.
std::vector<std::string> split_list(const std::string& text);
std::vector<double> parse_doubles(const std::string& text);
double parse_double(const std::string& text);
std::size_t parse_size(const std::string& text);

/// Model from a [model] or [candidate] section. Throws ConfigError.
ModelSpec model_spec_from(const Config::Section& section);
/// Study from [study] plus an optional [model] section. Throws ConfigError.
PowerStudyConfig power_study_config(const Config& config);
/// Candidates from the [candidate NAME] sections, in file order.
std::vector<CvCandidate> cv_candidates(const Config& config);

}  // namespace phimi
