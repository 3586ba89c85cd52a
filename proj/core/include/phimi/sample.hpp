#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace phimi {

enum class ValueKind { Real, Categorical };

/// n paired observations (x_i, y_i), all real or all categorical.
class PairedSample {
 public:
  /// Throws LengthMismatch on unequal lengths and DegenerateInput when n < 2.
  static PairedSample real(std::vector<double> x, std::vector<double> y);
  static PairedSample categorical(std::vector<std::string> x,
                                  std::vector<std::string> y);

  std::size_t size() const noexcept { return n_; }
  ValueKind kind() const noexcept { return kind_; }
  bool is_real() const noexcept { return kind_ == ValueKind::Real; }

  /// Real coordinates; empty for categorical samples.
  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& y() const noexcept { return y_; }
  /// Category tokens; empty for real samples.
  const std::vector<std::string>& x_tokens() const noexcept { return x_tok_; }
  const std::vector<std::string>& y_tokens() const noexcept { return y_tok_; }

  /// New sample whose i-th pair is (x[x_index[i]], y[y_index[i]]). Passing the
  /// same index list twice selects a subsample; independent lists resample
  /// from the product of the margins.
  PairedSample remix(std::span<const std::size_t> x_index,
                     std::span<const std::size_t> y_index) const;
  PairedSample subset(std::span<const std::size_t> index) const {
    return remix(index, index);
  }

 private:
  PairedSample() = default;

  ValueKind kind_ = ValueKind::Real;
  std::size_t n_ = 0;
  std::vector<double> x_, y_;
  std::vector<std::string> x_tok_, y_tok_;
};

/// Category label sets of a finite-discrete support, with label -> code maps.
class Levels {
 public:
  Levels() = default;
  Levels(std::vector<std::string> x_labels, std::vector<std::string> y_labels);

  /// Labels in order of first appearance.
  static Levels observed(const PairedSample& sample);
  /// Labels "1", ..., "k" on both sides.
  static Levels numbered(std::size_t k1, std::size_t k2);

  std::size_t k1() const noexcept { return x_.size(); }
  std::size_t k2() const noexcept { return y_.size(); }
  const std::vector<std::string>& x_labels() const noexcept { return x_; }
  const std::vector<std::string>& y_labels() const noexcept { return y_; }

  /// Throws SupportError for unknown labels.
  std::size_t x_code(const std::string& label) const;
  std::size_t y_code(const std::string& label) const;

 private:
  std::vector<std::string> x_, y_;
  std::unordered_map<std::string, std::size_t> x_map_, y_map_;
};

/// Rescaled empirical CDF values u_i = rank(x_i) / (n + 1), v likewise.
struct EmpiricalMargins {
  std::vector<double> u;
  std::vector<double> v;
};

/// Mid-ranks (1-based; tied values share the average of their ranks).
std::vector<double> mid_ranks(std::span<const double> values);

/// Throws LengthMismatch for unequal lengths, DegenerateInput for n < 2.
EmpiricalMargins rank_transform(std::span<const double> x, std::span<const double> y);

}  // namespace phimi
