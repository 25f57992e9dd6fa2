#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace crycheck {

class PasswordError : public std::runtime_error {
 public:
  enum class Kind { FileUnreadable };

  PasswordError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Case-insensitive set of known-bad passwords.
class Blacklist {
 public:
  Blacklist() = default;
  /// Entries are lowercased and deduplicated.
  Blacklist(std::string source, const std::vector<std::string>& entries);

  bool contains(std::string_view password) const;
  std::size_t size() const { return entries_.size(); }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::unordered_set<std::string> entries_;
};

/// One entry per line; blank lines and lines starting with '#' are ignored.
Blacklist parse_blacklist(std::string_view text, std::string source = "inline");
Blacklist load_blacklist(const std::filesystem::path& path);

/// The list compiled into the library (~10k common and default passwords).
const Blacklist& bundled_blacklist();

bool is_blacklisted(std::string_view password, const Blacklist& blacklist = bundled_blacklist());

struct PatternMatch {
  std::string kind;  // dictionary, spatial, repeat, sequence, regex, date, bruteforce
  std::string token;

  friend bool operator==(const PatternMatch&, const PatternMatch&) = default;
};

struct PasswordScore {
  int score = 0;
  double estimated_guesses = 1.0;
  std::vector<PatternMatch> matched_patterns;
};

/// <1e3 -> 0, <1e6 -> 1, <1e8 -> 2, <1e10 -> 3, otherwise 4.
int score_bucket(double guesses);

/// Keyboard adjacency: for each key, neighbour slots in a fixed direction
/// order; an empty slot means no neighbour in that direction.
using AdjacencyGraph = std::map<char, std::vector<std::string>>;

/// Guess-count estimator in the style of zxcvbn: the password is split into
/// the cheapest sequence of dictionary, keyboard, repeat, sequence, year, date
/// and brute-force segments, and the guess count of that split is bucketed.
class StrengthEstimator {
 public:
  /// `dictionaries` maps a name to words in rank order (most common first).
  StrengthEstimator(std::map<std::string, std::vector<std::string>> dictionaries,
                    std::map<std::string, AdjacencyGraph> graphs);
  ~StrengthEstimator();
  StrengthEstimator(StrengthEstimator&&) noexcept;
  StrengthEstimator& operator=(StrengthEstimator&&) noexcept;

  /// Built from the word lists and keyboard layouts compiled into the library.
  static const StrengthEstimator& bundled();

  PasswordScore score(std::string_view password) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// StrengthEstimator::bundled().score(password).
PasswordScore score_password(std::string_view password);

}  // namespace crycheck
