#include "phimi/sample.hpp"

#include <algorithm>
#include <numeric>

#include "phimi/error.hpp"

namespace phimi {

namespace {

void check_lengths(std::size_t nx, std::size_t ny) {
  if (nx != ny) {
    throw LengthMismatch("x has " + std::to_string(nx) + " values, y has " +
                         std::to_string(ny));
  }
  if (nx < 2) throw DegenerateInput("a paired sample needs at least 2 pairs");
}

std::unordered_map<std::string, std::size_t> index_labels(
    const std::vector<std::string>& labels) {
  std::unordered_map<std::string, std::size_t> map;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!map.emplace(labels[i], i).second) {
      throw ConfigError("duplicate category label '" + labels[i] + "'");
    }
  }
  return map;
}

}  // namespace

PairedSample PairedSample::real(std::vector<double> x, std::vector<double> y) {
  check_lengths(x.size(), y.size());
  PairedSample s;
  s.kind_ = ValueKind::Real;
  s.n_ = x.size();
  s.x_ = std::move(x);
  s.y_ = std::move(y);
  return s;
}

PairedSample PairedSample::categorical(std::vector<std::string> x,
                                       std::vector<std::string> y) {
  check_lengths(x.size(), y.size());
  PairedSample s;
  s.kind_ = ValueKind::Categorical;
  s.n_ = x.size();
  s.x_tok_ = std::move(x);
  s.y_tok_ = std::move(y);
  return s;
}

PairedSample PairedSample::remix(std::span<const std::size_t> x_index,
                                 std::span<const std::size_t> y_index) const {
  check_lengths(x_index.size(), y_index.size());
  PairedSample s;
  s.kind_ = kind_;
  s.n_ = x_index.size();
  if (is_real()) {
    s.x_.reserve(s.n_);
    s.y_.reserve(s.n_);
    for (std::size_t i = 0; i < s.n_; ++i) {
      s.x_.push_back(x_.at(x_index[i]));
      s.y_.push_back(y_.at(y_index[i]));
    }
  } else {
    s.x_tok_.reserve(s.n_);
    s.y_tok_.reserve(s.n_);
    for (std::size_t i = 0; i < s.n_; ++i) {
      s.x_tok_.push_back(x_tok_.at(x_index[i]));
      s.y_tok_.push_back(y_tok_.at(y_index[i]));
    }
  }
  return s;
}

Levels::Levels(std::vector<std::string> x_labels, std::vector<std::string> y_labels)
    : x_(std::move(x_labels)), y_(std::move(y_labels)) {
  x_map_ = index_labels(x_);
  y_map_ = index_labels(y_);
}

Levels Levels::observed(const PairedSample& sample) {
  if (sample.is_real()) {
    throw ConfigError("category levels requested for a real-valued sample");
  }
  auto collect = [](const std::vector<std::string>& tokens) {
    std::vector<std::string> labels;
    std::unordered_map<std::string, std::size_t> seen;
    for (const auto& t : tokens) {
      if (seen.emplace(t, labels.size()).second) labels.push_back(t);
    }
    return labels;
  };
  return Levels(collect(sample.x_tokens()), collect(sample.y_tokens()));
}

Levels Levels::numbered(std::size_t k1, std::size_t k2) {
  auto labels = [](std::size_t k) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= k; ++i) out.push_back(std::to_string(i));
    return out;
  };
  return Levels(labels(k1), labels(k2));
}

std::size_t Levels::x_code(const std::string& label) const {
  auto it = x_map_.find(label);
  if (it == x_map_.end()) throw SupportError("unknown x category '" + label + "'");
  return it->second;
}

std::size_t Levels::y_code(const std::string& label) const {
  auto it = y_map_.find(label);
  if (it == y_map_.end()) throw SupportError("unknown y category '" + label + "'");
  return it->second;
}

std::vector<double> mid_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 hold ranks i+1..j
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

EmpiricalMargins rank_transform(std::span<const double> x, std::span<const double> y) {
  check_lengths(x.size(), y.size());
  const double scale = 1.0 / static_cast<double>(x.size() + 1);
  EmpiricalMargins m{mid_ranks(x), mid_ranks(y)};
  for (auto& r : m.u) r *= scale;
  for (auto& r : m.v) r *= scale;
  return m;
}

}  // namespace phimi
