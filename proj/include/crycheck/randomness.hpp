#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crycheck {

inline constexpr double kDefaultAlpha = 0.01;

/// Bits of a logged value, most significant bit of each byte first.
class BitSequence {
 public:
  BitSequence() = default;

  static BitSequence from_bytes(std::span<const std::uint8_t> bytes);
  /// From a string of '0'/'1' characters; other characters are rejected.
  static BitSequence from_string(std::string_view bits);

  std::size_t size() const { return bits_.size(); }
  int operator[](std::size_t i) const { return bits_[i]; }
  std::size_t count_ones() const;

 private:
  std::vector<std::uint8_t> bits_;
};

class RandTestOutcome {
 public:
  enum class Status { Pass, Fail, Skipped };

  /// Pass when p >= alpha, Fail otherwise.
  static RandTestOutcome from_p(double p, double alpha);
  static RandTestOutcome skipped(std::string reason);

  Status status() const { return status_; }
  bool passed() const { return status_ == Status::Pass; }
  bool failed() const { return status_ == Status::Fail; }
  bool is_skipped() const { return status_ == Status::Skipped; }
  /// Only meaningful when not skipped.
  double p_value() const { return p_; }
  const std::string& reason() const { return reason_; }

  friend bool operator==(const RandTestOutcome&, const RandTestOutcome&) = default;

 private:
  Status status_ = Status::Skipped;
  double p_ = 0.0;
  std::string reason_;
};

struct BatteryResult {
  std::map<std::string, RandTestOutcome> outcomes;
  bool any_fail = false;

  friend bool operator==(const BatteryResult&, const BatteryResult&) = default;
};

// Minimum input lengths, in bits.
inline constexpr std::size_t kMinBitsFrequency = 100;
inline constexpr std::size_t kMinBitsLongestRun = 128;
inline constexpr std::size_t kDefaultBlockLength = 16;

RandTestOutcome monobit(const BitSequence& bits, double alpha = kDefaultAlpha);
RandTestOutcome block_frequency(const BitSequence& bits, std::size_t block_len = kDefaultBlockLength,
                                double alpha = kDefaultAlpha);
/// Skipped when the frequency prerequisite |pi - 1/2| < 2/sqrt(n) does not hold.
RandTestOutcome runs(const BitSequence& bits, double alpha = kDefaultAlpha);
RandTestOutcome longest_run_of_ones(const BitSequence& bits, double alpha = kDefaultAlpha);
/// Forward mode.
RandTestOutcome cumulative_sums(const BitSequence& bits, double alpha = kDefaultAlpha);

/// All five tests over the MSB-first expansion of `value`.
BatteryResult run_battery(std::span<const std::uint8_t> value, double alpha = kDefaultAlpha);

/// Regularised upper incomplete gamma function Q(a, x), a > 0, x >= 0.
double igamc(double a, double x);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace crycheck
