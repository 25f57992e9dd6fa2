#include "crycheck/randomness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crycheck {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 10000;

double clamp_p(double p) { return std::clamp(p, 0.0, 1.0); }

// Lower regularised gamma P(a, x) by its power series; converges for x < a + 1.
double gamma_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularised gamma Q(a, x) by Lentz's continued fraction; x >= a + 1.
double gamma_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

struct LongestRunTable {
  std::size_t min_n;
  std::size_t block;
  int low;   // longest runs <= low share the first category
  int high;  // longest runs >= high share the last category
  std::vector<double> probabilities;
};

const std::array<LongestRunTable, 3>& longest_run_tables() {
  static const std::array<LongestRunTable, 3> tables = {{
      {750000, 10000, 10, 16, {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727}},
      {6272, 128, 4, 9, {0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124}},
      {128, 8, 1, 4, {0.2148, 0.3672, 0.2305, 0.1875}},
  }};
  return tables;
}

}  // namespace

BitSequence BitSequence::from_bytes(std::span<const std::uint8_t> bytes) {
  BitSequence seq;
  seq.bits_.reserve(bytes.size() * 8);
  for (auto byte : bytes)
    for (int i = 7; i >= 0; --i) seq.bits_.push_back(static_cast<std::uint8_t>((byte >> i) & 1));
  return seq;
}

BitSequence BitSequence::from_string(std::string_view bits) {
  BitSequence seq;
  seq.bits_.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') throw std::invalid_argument("bit strings contain only '0' and '1'");
    seq.bits_.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return seq;
}

std::size_t BitSequence::count_ones() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

RandTestOutcome RandTestOutcome::from_p(double p, double alpha) {
  RandTestOutcome o;
  o.p_ = clamp_p(p);
  o.status_ = o.p_ < alpha ? Status::Fail : Status::Pass;
  return o;
}

RandTestOutcome RandTestOutcome::skipped(std::string reason) {
  RandTestOutcome o;
  o.status_ = Status::Skipped;
  o.reason_ = std::move(reason);
  return o;
}

double igamc(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::domain_error("igamc requires a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_series(a, x);
  return gamma_continued_fraction(a, x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

RandTestOutcome monobit(const BitSequence& bits, double alpha) {
  const auto n = bits.size();
  if (n < kMinBitsFrequency) return RandTestOutcome::skipped("needs at least 100 bits");
  const double sum = 2.0 * static_cast<double>(bits.count_ones()) - static_cast<double>(n);
  const double s_obs = std::fabs(sum) / std::sqrt(static_cast<double>(n));
  return RandTestOutcome::from_p(std::erfc(s_obs / std::sqrt(2.0)), alpha);
}

RandTestOutcome block_frequency(const BitSequence& bits, std::size_t block_len, double alpha) {
  if (block_len == 0) throw std::invalid_argument("block length must be positive");
  const auto n = bits.size();
  if (n < kMinBitsFrequency) return RandTestOutcome::skipped("needs at least 100 bits");
  const std::size_t blocks = n / block_len;
  if (blocks == 0) return RandTestOutcome::skipped("block length exceeds input");
  double chi = 0.0;
  for (std::size_t b = 0; b < blocks; ++b) {
    std::size_t ones = 0;
    for (std::size_t i = 0; i < block_len; ++i) ones += static_cast<std::size_t>(bits[b * block_len + i]);
    double pi = static_cast<double>(ones) / static_cast<double>(block_len);
    chi += (pi - 0.5) * (pi - 0.5);
  }
  chi *= 4.0 * static_cast<double>(block_len);
  return RandTestOutcome::from_p(igamc(static_cast<double>(blocks) / 2.0, chi / 2.0), alpha);
}

RandTestOutcome runs(const BitSequence& bits, double alpha) {
  const auto n = bits.size();
  if (n < kMinBitsFrequency) return RandTestOutcome::skipped("needs at least 100 bits");
  const double dn = static_cast<double>(n);
  const double pi = static_cast<double>(bits.count_ones()) / dn;
  if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(dn)) return RandTestOutcome::skipped("frequency prerequisite not met");
  std::size_t v_obs = 1;
  for (std::size_t k = 0; k + 1 < n; ++k)
    if (bits[k] != bits[k + 1]) ++v_obs;
  const double num = std::fabs(static_cast<double>(v_obs) - 2.0 * dn * pi * (1.0 - pi));
  const double den = 2.0 * std::sqrt(2.0 * dn) * pi * (1.0 - pi);
  return RandTestOutcome::from_p(std::erfc(num / den), alpha);
}

RandTestOutcome longest_run_of_ones(const BitSequence& bits, double alpha) {
  const auto n = bits.size();
  if (n < kMinBitsLongestRun) return RandTestOutcome::skipped("needs at least 128 bits");
  const auto& tables = longest_run_tables();
  const auto* table = &tables.back();
  for (const auto& t : tables) {
    if (n >= t.min_n) {
      table = &t;
      break;
    }
  }
  const std::size_t blocks = n / table->block;
  std::vector<std::size_t> counts(table->probabilities.size(), 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    int longest = 0;
    int run = 0;
    for (std::size_t i = 0; i < table->block; ++i) {
      run = bits[b * table->block + i] ? run + 1 : 0;
      longest = std::max(longest, run);
    }
    int category = std::clamp(longest, table->low, table->high) - table->low;
    ++counts[static_cast<std::size_t>(category)];
  }
  double chi = 0.0;
  const double nb = static_cast<double>(blocks);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double expected = nb * table->probabilities[i];
    double diff = static_cast<double>(counts[i]) - expected;
    chi += diff * diff / expected;
  }
  const double dof = static_cast<double>(counts.size() - 1);
  return RandTestOutcome::from_p(igamc(dof / 2.0, chi / 2.0), alpha);
}

RandTestOutcome cumulative_sums(const BitSequence& bits, double alpha) {
  const auto n = bits.size();
  if (n < kMinBitsFrequency) return RandTestOutcome::skipped("needs at least 100 bits");
  long long partial = 0;
  long long z = 0;
  for (std::size_t i = 0; i < n; ++i) {
    partial += bits[i] ? 1 : -1;
    z = std::max(z, std::llabs(partial));
  }
  const double dn = static_cast<double>(n);
  const double dz = static_cast<double>(z);
  const double root = std::sqrt(dn);

  // Summation bounds truncate toward zero, as in the NIST reference code.
  double sum1 = 0.0;
  for (auto k = static_cast<long long>((-dn / dz + 1.0) / 4.0); k <= static_cast<long long>((dn / dz - 1.0) / 4.0); ++k)
    sum1 += normal_cdf((4.0 * k + 1.0) * dz / root) - normal_cdf((4.0 * k - 1.0) * dz / root);
  double sum2 = 0.0;
  for (auto k = static_cast<long long>((-dn / dz - 3.0) / 4.0); k <= static_cast<long long>((dn / dz - 1.0) / 4.0); ++k)
    sum2 += normal_cdf((4.0 * k + 3.0) * dz / root) - normal_cdf((4.0 * k + 1.0) * dz / root);
  return RandTestOutcome::from_p(1.0 - sum1 + sum2, alpha);
}

BatteryResult run_battery(std::span<const std::uint8_t> value, double alpha) {
  const auto bits = BitSequence::from_bytes(value);
  BatteryResult result;
  result.outcomes.emplace("monobit", monobit(bits, alpha));
  result.outcomes.emplace("block_frequency", block_frequency(bits, kDefaultBlockLength, alpha));
  result.outcomes.emplace("runs", runs(bits, alpha));
  result.outcomes.emplace("longest_run", longest_run_of_ones(bits, alpha));
  result.outcomes.emplace("cumulative_sums", cumulative_sums(bits, alpha));
  result.any_fail = std::any_of(result.outcomes.begin(), result.outcomes.end(),
                                [](const auto& kv) { return kv.second.failed(); });
  return result;
}

}  // namespace crycheck
