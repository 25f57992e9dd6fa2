#include "crycheck/passwords.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <optional>
#include <tuple>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "embedded_data.hpp"

namespace crycheck {

namespace {

using Real = long double;

constexpr Real kBruteforceCardinality = 10;
constexpr Real kMinGuessesBeforeGrowingSequence = 10000;
constexpr Real kMinSubmatchGuessesSingleChar = 10;
constexpr Real kMinSubmatchGuessesMultiChar = 50;
constexpr int kMinYearSpace = 20;
constexpr int kReferenceYear = 2017;
constexpr int kDateMinYear = 1000;
constexpr int kDateMaxYear = 2050;
constexpr int kMaxSequenceDelta = 5;
// Longer inputs are scored on this prefix; the remainder can only add guesses.
constexpr std::size_t kMaxScoredLength = 256;

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::vector<std::string> data_lines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() != '#') out.emplace_back(line);
    pos = end + 1;
  }
  return out;
}

Real n_choose_k(Real n, Real k) {
  if (k > n) return 0;
  if (k == 0) return 1;
  Real r = 1;
  for (int d = 1; d <= static_cast<int>(k); ++d) {
    r *= n;
    r /= d;
    n -= 1;
  }
  return r;
}

enum class Pattern { Dictionary, Spatial, Repeat, Sequence, Regex, Date, Bruteforce };

std::string_view pattern_name(Pattern p) {
  switch (p) {
    case Pattern::Dictionary: return "dictionary";
    case Pattern::Spatial: return "spatial";
    case Pattern::Repeat: return "repeat";
    case Pattern::Sequence: return "sequence";
    case Pattern::Regex: return "regex";
    case Pattern::Date: return "date";
    case Pattern::Bruteforce: return "bruteforce";
  }
  return "unknown";
}

struct Match {
  Pattern pattern = Pattern::Bruteforce;
  int i = 0;
  int j = 0;
  std::string token;

  // dictionary
  std::string matched_word;
  Real rank = 0;
  bool reversed = false;
  bool l33t = false;
  std::vector<std::pair<char, char>> sub;  // l33t character -> letter

  // spatial
  bool keypad = false;
  int turns = 0;
  int shifted_count = 0;

  // repeat
  Real base_guesses = 0;
  Real repeat_count = 0;

  // sequence
  bool ascending = true;

  // regex and date
  int year = 0;
  bool has_separator = false;

  mutable std::optional<Real> guesses;
};

void sort_by_span(std::vector<Match>& matches) {
  std::stable_sort(matches.begin(), matches.end(),
                   [](const Match& a, const Match& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
}

const std::vector<std::pair<char, std::string>>& l33t_table() {
  static const std::vector<std::pair<char, std::string>> table = {
      {'a', "4@"}, {'b', "8"},  {'c', "({[<"}, {'e', "3"},  {'g', "69"}, {'i', "1!|"},
      {'l', "1|7"}, {'o', "0"}, {'s', "$5"},   {'t', "+7"}, {'x', "%"},  {'z', "2"},
  };
  return table;
}

constexpr std::string_view kShiftedChars = "~!@#$%^&*()_+QWERTYUIOP{}|ASDFGHJKL:\"ZXCVBNM<>?";

struct DateParts {
  int year;
  int month;
  int day;
};

std::optional<std::pair<int, int>> map_ints_to_dm(int a, int b) {
  if (1 <= a && a <= 31 && 1 <= b && b <= 12) return std::make_pair(a, b);
  if (1 <= b && b <= 31 && 1 <= a && a <= 12) return std::make_pair(b, a);
  return std::nullopt;
}

int two_to_four_digit_year(int year) {
  if (year > 99) return year;
  if (year > 50) return year + 1900;
  return year + 2000;
}

std::optional<DateParts> map_ints_to_dmy(const std::array<int, 3>& ints) {
  if (ints[1] > 31 || ints[1] <= 0) return std::nullopt;
  int over_12 = 0, over_31 = 0, under_1 = 0;
  for (int v : ints) {
    if ((99 < v && v < kDateMinYear) || v > kDateMaxYear) return std::nullopt;
    if (v > 31) ++over_31;
    if (v > 12) ++over_12;
    if (v <= 0) ++under_1;
  }
  if (over_31 >= 2 || over_12 == 3 || under_1 >= 2) return std::nullopt;

  const std::array<std::array<int, 3>, 2> splits = {{{ints[2], ints[0], ints[1]}, {ints[0], ints[1], ints[2]}}};
  for (const auto& s : splits) {
    if (kDateMinYear <= s[0] && s[0] <= kDateMaxYear) {
      auto dm = map_ints_to_dm(s[1], s[2]);
      if (!dm) return std::nullopt;
      return DateParts{s[0], dm->second, dm->first};
    }
  }
  for (const auto& s : splits) {
    if (auto dm = map_ints_to_dm(s[1], s[2])) return DateParts{two_to_four_digit_year(s[0]), dm->second, dm->first};
  }
  return std::nullopt;
}

bool is_space_or_date_separator(char c) {
  switch (c) {
    case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
    case '/': case '\\': case '_': case '.': case '-':
      return true;
    default:
      return false;
  }
}

int parse_int(std::string_view digits) {
  int v = 0;
  for (char c : digits) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Blacklist

Blacklist::Blacklist(std::string source, const std::vector<std::string>& entries) : source_(std::move(source)) {
  for (const auto& e : entries) entries_.insert(ascii_lower(e));
}

bool Blacklist::contains(std::string_view password) const { return entries_.count(ascii_lower(password)) > 0; }

Blacklist parse_blacklist(std::string_view text, std::string source) {
  return Blacklist(std::move(source), data_lines(text));
}

Blacklist load_blacklist(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PasswordError(PasswordError::Kind::FileUnreadable, "cannot read blacklist " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw PasswordError(PasswordError::Kind::FileUnreadable, "cannot read blacklist " + path.string());
  return parse_blacklist(buf.str(), path.string());
}

const Blacklist& bundled_blacklist() {
  static const Blacklist list = parse_blacklist(embedded::blacklist(), "bundled");
  return list;
}

bool is_blacklisted(std::string_view password, const Blacklist& blacklist) { return blacklist.contains(password); }

int score_bucket(double guesses) {
  if (guesses < 1e3) return 0;
  if (guesses < 1e6) return 1;
  if (guesses < 1e8) return 2;
  if (guesses < 1e10) return 3;
  return 4;
}

// ---------------------------------------------------------------------------
// StrengthEstimator

struct StrengthEstimator::Impl {
  struct RankedDictionary {
    std::string name;
    std::unordered_map<std::string, int> ranks;
    std::size_t longest = 0;
  };
  struct Graph {
    std::string name;
    AdjacencyGraph adjacency;
    bool keyboard = false;  // qwerty-like layouts track shifted keys
  };

  std::vector<RankedDictionary> dictionaries;
  std::vector<Graph> graphs;
  Real keyboard_starting_positions = 0;
  Real keyboard_average_degree = 0;
  Real keypad_starting_positions = 0;
  Real keypad_average_degree = 0;

  struct Analysis {
    Real guesses = 1;
    std::vector<Match> sequence;
  };

  std::vector<Match> omnimatch(const std::string& password) const;
  Analysis most_guessable(const std::string& password, std::vector<Match> matches) const;

  std::vector<Match> dictionary_match(const std::string& password) const;
  std::vector<Match> reverse_dictionary_match(const std::string& password) const;
  std::vector<Match> l33t_match(const std::string& password) const;
  std::vector<Match> spatial_match(const std::string& password) const;
  std::vector<Match> repeat_match(const std::string& password) const;
  static std::vector<Match> sequence_match(const std::string& password);
  static std::vector<Match> regex_match(const std::string& password);
  static std::vector<Match> date_match(const std::string& password);

  Real estimate_guesses(const Match& m, std::size_t password_len) const;
  Real spatial_guesses(const Match& m) const;
};

namespace {

Real average_degree(const AdjacencyGraph& g) {
  if (g.empty()) return 0;
  Real total = 0;
  for (const auto& [key, slots] : g)
    total += static_cast<Real>(std::count_if(slots.begin(), slots.end(), [](const auto& s) { return !s.empty(); }));
  return total / static_cast<Real>(g.size());
}

Real uppercase_variations(const std::string& word) {
  bool has_upper = std::any_of(word.begin(), word.end(), is_upper);
  if (!has_upper) return 1;
  bool has_lower = std::any_of(word.begin(), word.end(), is_lower);
  const auto n = word.size();
  // ^[A-Z][^A-Z]+$
  if (n >= 2 && is_upper(word[0]) && std::none_of(word.begin() + 1, word.end(), is_upper)) return 2;
  // ^[^A-Z]+[A-Z]$
  if (n >= 2 && is_upper(word[n - 1]) && std::none_of(word.begin(), word.end() - 1, is_upper)) return 2;
  // ^[^a-z]+$
  if (!has_lower) return 2;
  auto u = static_cast<Real>(std::count_if(word.begin(), word.end(), is_upper));
  auto l = static_cast<Real>(std::count_if(word.begin(), word.end(), is_lower));
  Real variations = 0;
  for (int i = 1; i <= static_cast<int>(std::min(u, l)); ++i) variations += n_choose_k(u + l, i);
  return variations;
}

Real l33t_variations(const Match& m) {
  if (!m.l33t) return 1;
  Real variations = 1;
  const auto lower = ascii_lower(m.token);
  for (const auto& [subbed, unsubbed] : m.sub) {
    auto s = static_cast<Real>(std::count(lower.begin(), lower.end(), subbed));
    auto u = static_cast<Real>(std::count(lower.begin(), lower.end(), unsubbed));
    if (s == 0 || u == 0) {
      variations *= 2;
    } else {
      Real possibilities = 0;
      for (int i = 1; i <= static_cast<int>(std::min(u, s)); ++i) possibilities += n_choose_k(u + s, i);
      variations *= possibilities;
    }
  }
  return variations;
}

}  // namespace

Real StrengthEstimator::Impl::spatial_guesses(const Match& m) const {
  const Real s = m.keypad ? keypad_starting_positions : keyboard_starting_positions;
  const Real d = m.keypad ? keypad_average_degree : keyboard_average_degree;
  Real guesses = 0;
  const int len = static_cast<int>(m.token.size());
  for (int i = 2; i <= len; ++i) {
    int possible_turns = std::min(m.turns, i - 1) + 1;
    for (int j = 1; j < possible_turns; ++j) guesses += n_choose_k(i - 1, j - 1) * s * std::pow(d, j);
  }
  if (m.shifted_count) {
    const int shifted = m.shifted_count;
    const int unshifted = len - shifted;
    if (shifted == 0 || unshifted == 0) {
      guesses *= 2;
    } else {
      Real variations = 0;
      for (int i = 1; i <= std::min(shifted, unshifted); ++i) variations += n_choose_k(shifted + unshifted, i);
      guesses *= variations;
    }
  }
  return guesses;
}

Real StrengthEstimator::Impl::estimate_guesses(const Match& m, std::size_t password_len) const {
  if (m.guesses) return *m.guesses;
  Real min_guesses = 1;
  if (m.token.size() < password_len)
    min_guesses = m.token.size() == 1 ? kMinSubmatchGuessesSingleChar : kMinSubmatchGuessesMultiChar;

  Real guesses = 0;
  switch (m.pattern) {
    case Pattern::Bruteforce: {
      guesses = std::pow(kBruteforceCardinality, static_cast<Real>(m.token.size()));
      // one above the submatch floor so real patterns over the same span win
      Real floor = m.token.size() == 1 ? kMinSubmatchGuessesSingleChar + 1 : kMinSubmatchGuessesMultiChar + 1;
      guesses = std::max(guesses, floor);
      break;
    }
    case Pattern::Dictionary:
      guesses = m.rank * uppercase_variations(m.token) * l33t_variations(m) * (m.reversed ? 2 : 1);
      break;
    case Pattern::Spatial:
      guesses = spatial_guesses(m);
      break;
    case Pattern::Repeat:
      guesses = m.base_guesses * m.repeat_count;
      break;
    case Pattern::Sequence: {
      const char first = m.token.empty() ? '\0' : m.token.front();
      Real base = 26;
      if (std::string_view("aAzZ019").find(first) != std::string_view::npos)
        base = 4;
      else if (is_digit(first))
        base = 10;
      if (!m.ascending) base *= 2;
      guesses = base * static_cast<Real>(m.token.size());
      break;
    }
    case Pattern::Regex:
      guesses = std::max(std::abs(m.year - kReferenceYear), kMinYearSpace);
      break;
    case Pattern::Date:
      guesses = static_cast<Real>(std::max(std::abs(m.year - kReferenceYear), kMinYearSpace)) * 365;
      if (m.has_separator) guesses *= 4;
      break;
  }
  m.guesses = std::max(guesses, min_guesses);
  return *m.guesses;
}

std::vector<Match> StrengthEstimator::Impl::dictionary_match(const std::string& password) const {
  std::vector<Match> matches;
  const auto lower = ascii_lower(password);
  const int n = static_cast<int>(password.size());
  for (const auto& dict : dictionaries) {
    for (int i = 0; i < n; ++i) {
      const int last = std::min(n - 1, i + static_cast<int>(dict.longest) - 1);
      for (int j = i; j <= last; ++j) {
        auto word = lower.substr(static_cast<std::size_t>(i), static_cast<std::size_t>(j - i + 1));
        auto it = dict.ranks.find(word);
        if (it == dict.ranks.end()) continue;
        Match m;
        m.pattern = Pattern::Dictionary;
        m.i = i;
        m.j = j;
        m.token = password.substr(static_cast<std::size_t>(i), static_cast<std::size_t>(j - i + 1));
        m.matched_word = std::move(word);
        m.rank = it->second;
        matches.push_back(std::move(m));
      }
    }
  }
  sort_by_span(matches);
  return matches;
}

std::vector<Match> StrengthEstimator::Impl::reverse_dictionary_match(const std::string& password) const {
  std::string reversed(password.rbegin(), password.rend());
  auto matches = dictionary_match(reversed);
  const int n = static_cast<int>(password.size());
  for (auto& m : matches) {
    std::reverse(m.token.begin(), m.token.end());
    m.reversed = true;
    std::tie(m.i, m.j) = std::make_pair(n - 1 - m.j, n - 1 - m.i);
  }
  sort_by_span(matches);
  return matches;
}

std::vector<Match> StrengthEstimator::Impl::l33t_match(const std::string& password) const {
  // Relevant part of the substitution table, in table order.
  std::vector<std::pair<char, std::string>> table;
  for (const auto& [letter, subs] : l33t_table()) {
    std::string relevant;
    for (char c : subs)
      if (password.find(c) != std::string::npos) relevant.push_back(c);
    if (!relevant.empty()) table.emplace_back(letter, relevant);
  }

  // Every consistent assignment of l33t characters to letters.
  using Sub = std::vector<std::pair<char, char>>;  // (l33t character, letter)
  std::vector<Sub> subs{Sub{}};
  for (const auto& [letter, l33t_chars] : table) {
    std::vector<Sub> next;
    for (char l33t_chr : l33t_chars) {
      for (const auto& sub : subs) {
        auto dup = std::find_if(sub.begin(), sub.end(), [&](const auto& p) { return p.first == l33t_chr; });
        if (dup == sub.end()) {
          Sub extended = sub;
          extended.emplace_back(l33t_chr, letter);
          next.push_back(std::move(extended));
        } else {
          Sub alternative = sub;
          alternative.erase(alternative.begin() + (dup - sub.begin()));
          alternative.emplace_back(l33t_chr, letter);
          next.push_back(sub);
          next.push_back(std::move(alternative));
        }
      }
    }
    std::set<std::vector<std::pair<char, char>>> seen;
    subs.clear();
    for (auto& sub : next) {
      std::vector<std::pair<char, char>> label;
      for (const auto& [l, c] : sub) label.emplace_back(c, l);
      std::sort(label.begin(), label.end());
      if (seen.insert(label).second) subs.push_back(std::move(sub));
    }
  }

  std::vector<Match> matches;
  for (const auto& sub : subs) {
    if (sub.empty()) break;
    std::string subbed = password;
    for (auto& c : subbed) {
      auto it = std::find_if(sub.begin(), sub.end(), [&](const auto& p) { return p.first == c; });
      if (it != sub.end()) c = it->second;
    }
    for (auto& m : dictionary_match(subbed)) {
      auto token = password.substr(static_cast<std::size_t>(m.i), static_cast<std::size_t>(m.j - m.i + 1));
      if (ascii_lower(token) == m.matched_word) continue;  // no substitution actually used
      m.sub.clear();
      for (const auto& [l33t_chr, letter] : sub)
        if (token.find(l33t_chr) != std::string::npos) m.sub.emplace_back(l33t_chr, letter);
      m.l33t = true;
      m.token = std::move(token);
      if (m.token.size() > 1) matches.push_back(std::move(m));
    }
  }
  sort_by_span(matches);
  return matches;
}

std::vector<Match> StrengthEstimator::Impl::spatial_match(const std::string& password) const {
  std::vector<Match> matches;
  const int n = static_cast<int>(password.size());
  for (const auto& graph : graphs) {
    int i = 0;
    while (i < n - 1) {
      int j = i + 1;
      int last_direction = -2;
      int turns = 0;
      int shifted_count =
          graph.keyboard && kShiftedChars.find(password[static_cast<std::size_t>(i)]) != std::string_view::npos ? 1 : 0;
      while (true) {
        const char prev = password[static_cast<std::size_t>(j - 1)];
        bool found = false;
        if (j < n) {
          auto it = graph.adjacency.find(prev);
          if (it != graph.adjacency.end()) {
            const char cur = password[static_cast<std::size_t>(j)];
            int direction = -1;
            for (const auto& adj : it->second) {
              ++direction;
              auto pos = adj.find(cur);
              if (adj.empty() || pos == std::string::npos) continue;
              found = true;
              if (pos == 1) ++shifted_count;
              if (last_direction != direction) {
                ++turns;
                last_direction = direction;
              }
              break;
            }
          }
        }
        if (found) {
          ++j;
          continue;
        }
        if (j - i > 2) {
          Match m;
          m.pattern = Pattern::Spatial;
          m.i = i;
          m.j = j - 1;
          m.token = password.substr(static_cast<std::size_t>(i), static_cast<std::size_t>(j - i));
          m.keypad = !graph.keyboard;
          m.turns = turns;
          m.shifted_count = shifted_count;
          matches.push_back(std::move(m));
        }
        i = j;
        break;
      }
    }
  }
  sort_by_span(matches);
  return matches;
}

std::vector<Match> StrengthEstimator::Impl::repeat_match(const std::string& password) const {
  const std::size_t n = password.size();
  // Copies of password[start, start+len) found back to back from `start`.
  auto copies = [&](std::size_t start, std::size_t len) {
    if (password.find('\n', start) < start + len) return std::size_t{0};  // '.' excludes newlines
    std::size_t count = 1;
    while (start + (count + 1) * len <= n && password.compare(start + count * len, len, password, start, len) == 0)
      ++count;
    return count;
  };

  std::vector<Match> matches;
  std::size_t last_index = 0;
  while (last_index < n) {
    // Leftmost start with any base repeated at least twice; the greedy base
    // is the longest such base there, the lazy base the shortest.
    std::size_t start = last_index, greedy_len = 0, lazy_len = 0, greedy_count = 0, lazy_count = 0;
    for (; start < n && greedy_len == 0; ++start) {
      for (std::size_t len = 1; start + 2 * len <= n; ++len) {
        auto c = copies(start, len);
        if (c < 2) continue;
        if (lazy_len == 0) {
          lazy_len = len;
          lazy_count = c;
        }
        greedy_len = len;
        greedy_count = c;
      }
      if (greedy_len != 0) break;
    }
    if (greedy_len == 0) break;

    std::size_t base_len = lazy_len;
    std::size_t span = lazy_len * lazy_count;
    if (greedy_len * greedy_count > span) {
      span = greedy_len * greedy_count;
      // The greedy token may itself be a repeat of something shorter.
      for (std::size_t len = 1; len <= span / 2; ++len) {
        if (span % len == 0 && copies(start, len) * len >= span) {
          base_len = len;
          break;
        }
      }
    }

    Match m;
    m.pattern = Pattern::Repeat;
    m.i = static_cast<int>(start);
    m.j = static_cast<int>(start + span - 1);
    m.token = password.substr(start, span);
    const auto base_token = password.substr(start, base_len);
    auto base = most_guessable(base_token, omnimatch(base_token));
    m.base_guesses = base.guesses;
    m.repeat_count = static_cast<Real>(span) / static_cast<Real>(base_len);
    matches.push_back(std::move(m));
    last_index = start + span;
  }
  return matches;
}

std::vector<Match> StrengthEstimator::Impl::sequence_match(const std::string& password) {
  std::vector<Match> result;
  if (password.size() <= 1) return result;

  auto update = [&](int i, int j, int delta) {
    if (!(j - i > 1 || std::abs(delta) == 1)) return;
    if (!(0 < std::abs(delta) && std::abs(delta) <= kMaxSequenceDelta)) return;
    Match m;
    m.pattern = Pattern::Sequence;
    m.i = i;
    m.j = j;
    m.token = password.substr(static_cast<std::size_t>(i), static_cast<std::size_t>(j - i + 1));
    m.ascending = delta > 0;
    result.push_back(std::move(m));
  };

  auto code = [&](std::size_t k) { return static_cast<int>(static_cast<unsigned char>(password[k])); };
  int i = 0;
  std::optional<int> last_delta;
  for (std::size_t k = 1; k < password.size(); ++k) {
    int delta = code(k) - code(k - 1);
    if (!last_delta) last_delta = delta;
    if (delta == *last_delta) continue;
    int j = static_cast<int>(k) - 1;
    update(i, j, *last_delta);
    i = j;
    last_delta = delta;
  }
  update(i, static_cast<int>(password.size()) - 1, *last_delta);
  return result;
}

std::vector<Match> StrengthEstimator::Impl::regex_match(const std::string& password) {
  // 19\d\d | 200\d | 201\d, leftmost non-overlapping
  std::vector<Match> matches;
  std::size_t pos = 0;
  while (pos + 4 <= password.size()) {
    std::string_view t(password.data() + pos, 4);
    bool year = (t.substr(0, 2) == "19" && is_digit(t[2]) && is_digit(t[3])) ||
                ((t.substr(0, 3) == "200" || t.substr(0, 3) == "201") && is_digit(t[3]));
    if (!year) {
      ++pos;
      continue;
    }
    Match m;
    m.pattern = Pattern::Regex;
    m.i = static_cast<int>(pos);
    m.j = static_cast<int>(pos + 3);
    m.token = std::string(t);
    m.year = parse_int(t);
    matches.push_back(std::move(m));
    pos += 4;
  }
  return matches;
}

std::vector<Match> StrengthEstimator::Impl::date_match(const std::string& password) {
  static const std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> kSplits = {
      {4, {{1, 2}, {2, 3}}},
      {5, {{1, 3}, {2, 3}}},
      {6, {{1, 2}, {2, 4}, {4, 5}}},
      {7, {{1, 3}, {2, 3}, {4, 5}, {4, 6}}},
      {8, {{2, 4}, {4, 6}}},
  };
  std::vector<Match> matches;
  const int n = static_cast<int>(password.size());

  auto add = [&](int i, int j, const DateParts& d, bool separator) {
    Match m;
    m.pattern = Pattern::Date;
    m.i = i;
    m.j = j;
    m.token = password.substr(static_cast<std::size_t>(i), static_cast<std::size_t>(j - i + 1));
    m.year = d.year;
    m.has_separator = separator;
    matches.push_back(std::move(m));
  };

  // 4 to 8 digits without separators
  for (int i = 0; i < n - 3; ++i) {
    for (int j = i + 3; j < i + 8 && j < n; ++j) {
      std::string_view token(password.data() + i, static_cast<std::size_t>(j - i + 1));
      if (!std::all_of(token.begin(), token.end(), is_digit)) continue;
      std::optional<DateParts> best;
      int best_distance = 0;
      for (auto [k, l] : kSplits.at(token.size())) {
        auto dmy = map_ints_to_dmy(
            {parse_int(token.substr(0, k)), parse_int(token.substr(k, l - k)), parse_int(token.substr(l))});
        if (!dmy) continue;
        int distance = std::abs(dmy->year - kReferenceYear);
        if (!best || distance < best_distance) {
          best = dmy;
          best_distance = distance;
        }
      }
      if (best) add(i, j, *best, false);
    }
  }

  // 6 to 10 characters with two identical separators, e.g. 1.1.91
  for (int i = 0; i < n - 5; ++i) {
    for (int j = i + 5; j < i + 10 && j < n; ++j) {
      std::string_view token(password.data() + i, static_cast<std::size_t>(j - i + 1));
      std::size_t a = 0;
      while (a < token.size() && is_digit(token[a])) ++a;
      if (a < 1 || a > 4 || a >= token.size() || !is_space_or_date_separator(token[a])) continue;
      const char sep = token[a];
      std::size_t b = a + 1;
      while (b < token.size() && is_digit(token[b])) ++b;
      if (b - a - 1 < 1 || b - a - 1 > 2 || b >= token.size() || token[b] != sep) continue;
      auto rest = token.substr(b + 1);
      if (rest.empty() || rest.size() > 4 || !std::all_of(rest.begin(), rest.end(), is_digit)) continue;
      auto dmy = map_ints_to_dmy({parse_int(token.substr(0, a)), parse_int(token.substr(a + 1, b - a - 1)), parse_int(rest)});
      if (dmy) add(i, j, *dmy, true);
    }
  }

  // Drop dates contained in a longer date.
  std::vector<Match> kept;
  for (const auto& m : matches) {
    bool submatch = std::any_of(matches.begin(), matches.end(), [&](const Match& o) {
      return !(o.i == m.i && o.j == m.j) && o.i <= m.i && o.j >= m.j;
    });
    if (!submatch) kept.push_back(m);
  }
  sort_by_span(kept);
  return kept;
}

std::vector<Match> StrengthEstimator::Impl::omnimatch(const std::string& password) const {
  std::vector<Match> all;
  auto append = [&](std::vector<Match> ms) { std::move(ms.begin(), ms.end(), std::back_inserter(all)); };
  append(dictionary_match(password));
  append(reverse_dictionary_match(password));
  append(l33t_match(password));
  append(spatial_match(password));
  append(repeat_match(password));
  append(sequence_match(password));
  append(regex_match(password));
  append(date_match(password));
  sort_by_span(all);
  return all;
}

namespace {

// Map keyed by sequence length that remembers insertion order, since the
// search breaks ties by the order in which lengths were first reached.
template <typename T>
class OrderedByInsertion {
 public:
  T* find(int l) {
    for (auto& [k, v] : items_)
      if (k == l) return &v;
    return nullptr;
  }
  void set(int l, T value) {
    if (auto* v = find(l))
      *v = std::move(value);
    else
      items_.emplace_back(l, std::move(value));
  }
  const std::vector<std::pair<int, T>>& items() const { return items_; }

 private:
  std::vector<std::pair<int, T>> items_;
};

Real factorial(int l) {
  Real f = 1;
  for (int i = 2; i <= l; ++i) f *= i;
  return f;
}

}  // namespace

StrengthEstimator::Impl::Analysis StrengthEstimator::Impl::most_guessable(const std::string& password,
                                                                          std::vector<Match> matches) const {
  const int n = static_cast<int>(password.size());
  Analysis result;
  if (n == 0) return result;

  // Owns every match considered, including brute-force segments made on the fly.
  std::deque<Match> pool(std::make_move_iterator(matches.begin()), std::make_move_iterator(matches.end()));
  std::vector<std::vector<const Match*>> by_j(static_cast<std::size_t>(n));
  for (const auto& m : pool) by_j[static_cast<std::size_t>(m.j)].push_back(&m);
  for (auto& lst : by_j)
    std::stable_sort(lst.begin(), lst.end(), [](const Match* a, const Match* b) { return a->i < b->i; });

  struct Entry {
    const Match* m;
    Real pi;
    Real g;
  };
  std::vector<OrderedByInsertion<Entry>> optimal(static_cast<std::size_t>(n));

  auto update = [&](const Match* m, int l) {
    const auto k = static_cast<std::size_t>(m->j);
    Real pi = estimate_guesses(*m, password.size());
    if (l > 1) pi *= optimal[static_cast<std::size_t>(m->i - 1)].find(l - 1)->pi;
    Real g = factorial(l) * pi + std::pow(kMinGuessesBeforeGrowingSequence, static_cast<Real>(l - 1));
    for (const auto& [competing_l, competing] : optimal[k].items()) {
      if (competing_l > l) continue;
      if (competing.g <= g) return;
    }
    optimal[k].set(l, Entry{m, pi, g});
  };

  auto bruteforce = [&](int i, int j) {
    Match m;
    m.pattern = Pattern::Bruteforce;
    m.i = i;
    m.j = j;
    m.token = password.substr(static_cast<std::size_t>(i), static_cast<std::size_t>(j - i + 1));
    pool.push_back(std::move(m));
    return &pool.back();
  };

  for (int k = 0; k < n; ++k) {
    for (const Match* m : by_j[static_cast<std::size_t>(k)]) {
      if (m->i > 0) {
        std::vector<int> lengths;
        for (const auto& [l, e] : optimal[static_cast<std::size_t>(m->i - 1)].items()) lengths.push_back(l);
        for (int l : lengths) update(m, l + 1);
      } else {
        update(m, 1);
      }
    }
    update(bruteforce(0, k), 1);
    for (int i = 1; i <= k; ++i) {
      const Match* m = bruteforce(i, k);
      std::vector<int> lengths;
      for (const auto& [l, e] : optimal[static_cast<std::size_t>(i - 1)].items())
        if (e.m->pattern != Pattern::Bruteforce) lengths.push_back(l);
      for (int l : lengths) update(m, l + 1);
    }
  }

  // Unwind the best sequence ending at the last character.
  const auto& last = optimal[static_cast<std::size_t>(n - 1)].items();
  int best_l = 0;
  Real best_g = std::numeric_limits<Real>::infinity();
  for (const auto& [l, e] : last) {
    if (e.g < best_g || best_l == 0) {
      best_l = l;
      best_g = e.g;
    }
  }
  int k = n - 1;
  int l = best_l;
  while (k >= 0) {
    const Match* m = optimal[static_cast<std::size_t>(k)].find(l)->m;
    result.sequence.insert(result.sequence.begin(), *m);
    k = m->i - 1;
    --l;
  }
  result.guesses = best_g;
  return result;
}

StrengthEstimator::StrengthEstimator(std::map<std::string, std::vector<std::string>> dictionaries,
                                     std::map<std::string, AdjacencyGraph> graphs)
    : impl_(std::make_unique<Impl>()) {
  for (auto& [name, words] : dictionaries) {
    Impl::RankedDictionary dict;
    dict.name = name;
    int rank = 0;
    for (auto& w : words) {
      auto lower = ascii_lower(w);
      dict.longest = std::max(dict.longest, lower.size());
      dict.ranks[std::move(lower)] = ++rank;
    }
    impl_->dictionaries.push_back(std::move(dict));
  }
  for (auto& [name, adjacency] : graphs) {
    const bool keypad = name.find("keypad") != std::string::npos;
    if (name == "qwerty") {
      impl_->keyboard_starting_positions = static_cast<Real>(adjacency.size());
      impl_->keyboard_average_degree = average_degree(adjacency);
    } else if (name == "keypad") {
      impl_->keypad_starting_positions = static_cast<Real>(adjacency.size());
      impl_->keypad_average_degree = average_degree(adjacency);
    }
    impl_->graphs.push_back({name, std::move(adjacency), !keypad});
  }
  // Match the reference layout order: qwerty, dvorak, keypad, mac_keypad.
  auto order = [](const std::string& name) {
    static const std::vector<std::string> known = {"qwerty", "dvorak", "keypad", "mac_keypad"};
    auto it = std::find(known.begin(), known.end(), name);
    return static_cast<std::size_t>(it - known.begin());
  };
  std::stable_sort(impl_->graphs.begin(), impl_->graphs.end(),
                   [&](const auto& a, const auto& b) { return order(a.name) < order(b.name); });
}

StrengthEstimator::~StrengthEstimator() = default;
StrengthEstimator::StrengthEstimator(StrengthEstimator&&) noexcept = default;
StrengthEstimator& StrengthEstimator::operator=(StrengthEstimator&&) noexcept = default;

namespace {

std::map<std::string, AdjacencyGraph> parse_keyboards(std::string_view text) {
  std::map<std::string, AdjacencyGraph> graphs;
  for (const auto& line : data_lines(text)) {
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      auto tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields.size() < 2 || fields[1].size() != 1) continue;
    graphs[fields[0]][fields[1][0]] = std::vector<std::string>(fields.begin() + 2, fields.end());
  }
  return graphs;
}

// Passwords with non-ASCII characters: cardinality of the character classes
// present raised to the number of code points.
PasswordScore bruteforce_only(std::string_view password) {
  bool lower = false, upper = false, digit = false, symbol = false, other = false;
  std::size_t code_points = 0;
  for (char ch : password) {
    auto c = static_cast<unsigned char>(ch);
    if ((c & 0xC0) != 0x80) ++code_points;
    if (c >= 0x80) other = true;
    else if (is_lower(ch)) lower = true;
    else if (is_upper(ch)) upper = true;
    else if (is_digit(ch)) digit = true;
    else symbol = true;
  }
  Real cardinality = (lower ? 26 : 0) + (upper ? 26 : 0) + (digit ? 10 : 0) + (symbol ? 33 : 0) + (other ? 100 : 0);
  Real guesses = std::pow(cardinality, static_cast<Real>(code_points));
  PasswordScore out;
  out.estimated_guesses = static_cast<double>(std::min<Real>(guesses, std::numeric_limits<double>::max()));
  out.score = score_bucket(out.estimated_guesses);
  out.matched_patterns.push_back({"bruteforce", std::string(password)});
  return out;
}

}  // namespace

const StrengthEstimator& StrengthEstimator::bundled() {
  static const StrengthEstimator estimator(
      {{"passwords", data_lines(embedded::passwords())},
       {"english", data_lines(embedded::english())},
       {"names", data_lines(embedded::names())}},
      parse_keyboards(embedded::keyboards()));
  return estimator;
}

PasswordScore StrengthEstimator::score(std::string_view password) const {
  if (std::any_of(password.begin(), password.end(), [](char c) { return static_cast<unsigned char>(c) >= 0x80; }))
    return bruteforce_only(password);

  const std::string pw(password.substr(0, kMaxScoredLength));
  auto analysis = impl_->most_guessable(pw, impl_->omnimatch(pw));
  PasswordScore out;
  out.estimated_guesses =
      static_cast<double>(std::min<Real>(analysis.guesses, std::numeric_limits<double>::max()));
  out.score = score_bucket(out.estimated_guesses);
  for (const auto& m : analysis.sequence) out.matched_patterns.push_back({std::string(pattern_name(m.pattern)), m.token});
  return out;
}

PasswordScore score_password(std::string_view password) { return StrengthEstimator::bundled().score(password); }

}  // namespace crycheck
