#include "crycheck/tracegen.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

#include "crycheck/passwords.hpp"
#include "crycheck/randomness.hpp"

namespace crycheck {

namespace {

using C = CryptoClass;
using K = ParamKey;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(ScenarioError::Kind kind, std::size_t line, const std::string& msg) {
  throw ScenarioError(kind, line, line ? "scenario line " + std::to_string(line) + ": " + msg : "scenario: " + msg);
}

bool valid_name(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  });
}

void check_no_duplicates(const Scenario& s) {
  std::set<RuleId> seen;
  for (const auto& m : s.misuses)
    if (!seen.insert(m.rule).second)
      fail(ScenarioError::Kind::ConflictingMisuses, 0, to_string(m.rule) + " is listed twice in " + s.name);
}

// Seeds independent mt19937_64 streams from one scenario seed.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kConstantStream = 0xc0c0c0c0c0c0c0c0ULL;

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : rng_(seed) {}

  Bytes bytes(std::size_t n) {
    Bytes out;
    out.reserve(n);
    while (out.size() < n) {
      auto word = rng_();
      for (int i = 0; i < 8 && out.size() < n; ++i) out.push_back(static_cast<std::uint8_t>(word >> (8 * i)));
    }
    return out;
  }

  std::uint64_t below(std::uint64_t n) { return rng_() % n; }

  std::string printable(std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>(33 + below(94)));
    return s;
  }

  std::string lowercase(std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + below(26)));
    return s;
  }

 private:
  std::mt19937_64 rng_;
};

bool strong_password(const std::string& p) { return score_password(p).score >= 3 && !is_blacklisted(p); }

std::string strong_password_from(Stream& s) {
  for (;;) {
    auto p = s.printable(16);
    if (strong_password(p)) return p;
  }
}

// Passwords on the bundled blacklist that also score below 3.
constexpr std::array<std::string_view, 10> kBadPasswords = {
    "password", "123456", "qwerty", "letmein", "dontcare", "admin", "secret", "iloveyou", "monkey", "dragon",
};

// Values hard-coded in the synthetic app: identical in every execution.
struct Constants {
  Bytes key;
  Bytes iv;
  Bytes salt;
  Bytes seed;
  std::string derivation_pass;
  std::string keystore_pass;
  std::array<std::string, 2> blacklisted;  // a different one per execution
};

Bytes random_looking(Stream& s, std::size_t n) {
  for (;;) {
    auto b = s.bytes(n);
    if (!run_battery(b, kDefaultAlpha).any_fail) return b;
  }
}

Constants constants_for(std::uint64_t seed) {
  Stream s(mix(seed ^ kConstantStream));
  Constants c;
  c.key = random_looking(s, 16);
  c.iv = random_looking(s, 16);
  c.salt = s.bytes(16);
  c.seed = s.bytes(8);
  c.derivation_pass = strong_password_from(s);
  c.keystore_pass = strong_password_from(s);
  auto first = s.below(kBadPasswords.size());
  auto second = (first + 1 + s.below(kBadPasswords.size() - 1)) % kBadPasswords.size();
  c.blacklisted = {std::string(kBadPasswords[first]), std::string(kBadPasswords[second])};
  return c;
}

class LogBuilder {
 public:
  LogBuilder(const Scenario& s, int execution, const Constants& constants)
      : fresh_(mix(s.seed) ^ mix(static_cast<std::uint64_t>(execution))), execution_(execution), k_(constants) {
    log_.app_id = s.name;
    log_.execution_id = s.name + "." + std::to_string(execution);
    log_.platform = "synthetic";
  }

  void emit(C cls, std::string api, std::map<K, ParamValue> params) {
    log_.events.push_back(CryptoEvent{next_seq_++, cls, std::move(api), std::move(params)});
  }

  // Bytes drawn from a logged SecureRandom call.
  Bytes secure(std::size_t n) {
    auto b = fresh_.bytes(n);
    emit(C::RandomGenerator, "SecureRandom.nextBytes",
         {{K::Alg, ParamValue::text("Secure")}, {K::Out, ParamValue::bytes(b)}});
    return b;
  }

  // Mostly zero bytes; differs between executions but fails the battery.
  Bytes low_entropy(std::size_t n) {
    Bytes b(n, 0);
    b[n - 2] = static_cast<std::uint8_t>(execution_);
    b[n - 1] = fresh_.bytes(1)[0];
    return b;
  }

  std::string fresh_password() { return strong_password_from(fresh_); }

  std::string weak_password() {
    for (;;) {
      auto p = fresh_.lowercase(5) + static_cast<char>('0' + execution_);
      if (score_password(p).score < 3 && !is_blacklisted(p)) return p;
    }
  }

  void digest(std::string alg) { emit(C::MessageDigest, "MessageDigest.digest", {{K::Alg, ParamValue::text(std::move(alg))}}); }

  void cipher(std::string transform, Bytes key, std::optional<Bytes> iv, std::uint64_t blocks) {
    std::map<K, ParamValue> p{{K::Alg, ParamValue::text(std::move(transform))},
                              {K::Key, ParamValue::bytes(std::move(key))},
                              {K::NumBlocks, ParamValue::uint(blocks)}};
    if (iv) p.emplace(K::Iv, ParamValue::bytes(std::move(*iv)));
    emit(C::SymmEncryption, "Cipher.doFinal", std::move(p));
  }

  void gcm(Bytes key, Bytes iv) { cipher("AES/GCM/NoPadding", std::move(key), std::move(iv), 1 + fresh_.below(8)); }

  void derive(std::string pass, Bytes salt, std::uint64_t iter) {
    emit(C::KeyDerivation, "PBEKeySpec.<init>",
         {{K::Pass, ParamValue::text(std::move(pass))},
          {K::Salt, ParamValue::bytes(std::move(salt))},
          {K::Iter, ParamValue::uint(iter)}});
  }

  void rsa(std::string transform, std::uint64_t bits) {
    emit(C::AsymmEncryption, "Cipher.init",
         {{K::Alg, ParamValue::text(std::move(transform))}, {K::Key, ParamValue::uint(bits)}});
  }

  void keystore(std::string pass) { emit(C::KeyStorage, "KeyStore.load", {{K::Pass, ParamValue::text(std::move(pass))}}); }

  void url(std::string protocol) { emit(C::SslTlsCert, "URL.<init>", {{K::UrlProt, ParamValue::text(std::move(protocol))}}); }

  void benign(std::size_t k) {
    switch (k % 7) {
      case 0: digest("SHA-256"); break;
      case 1: {
        auto key = secure(16);
        gcm(std::move(key), secure(12));
        break;
      }
      case 2: {
        auto salt = secure(16);
        derive(fresh_password(), std::move(salt), 10000);
        break;
      }
      case 3: rsa("RSA/ECB/OAEPWithSHA-256AndMGF1Padding", 2048); break;
      case 4: keystore(fresh_password()); break;
      case 5:
        url("https");
        emit(C::SslTlsCert, "SSLContext.init", {{K::AllCert, ParamValue::boolean(false)}});
        emit(C::SslTlsCert, "SocketFactory.getDefault", {{K::AllHost, ParamValue::boolean(false)}});
        break;
      default: emit(C::RandomGenerator, "SecureRandom.<init>", {{K::Alg, ParamValue::text("Secure")}}); break;
    }
  }

  // Events for one rule: the misuse when `bad`, a compliant use otherwise.
  void rule(RuleId id, bool bad) {
    switch (id) {
      case RuleId::R01: digest(bad ? "SHA1" : "SHA-256"); break;
      case RuleId::R02: {
        if (bad) {
          auto key = secure(8);
          cipher("DES/CTR/NoPadding", std::move(key), secure(8), 2);
        } else {
          auto key = secure(16);
          gcm(std::move(key), secure(12));
        }
        break;
      }
      case RuleId::R03: cipher("AES/ECB/PKCS5Padding", secure(16), std::nullopt, bad ? 3 : 1); break;
      case RuleId::R04: {
        auto key = secure(16);
        auto iv = secure(16);
        if (bad)
          cipher("AES/CBC/PKCS5Padding", std::move(key), std::move(iv), 2);
        else
          gcm(std::move(key), std::move(iv));
        break;
      }
      case RuleId::R05: {
        auto key = bad ? k_.key : secure(16);
        gcm(std::move(key), secure(12));
        break;
      }
      case RuleId::R06: {
        auto key = bad ? low_entropy(16) : secure(16);
        gcm(std::move(key), secure(12));
        break;
      }
      case RuleId::R07: {
        auto key = secure(16);
        gcm(std::move(key), bad ? k_.iv : secure(16));
        break;
      }
      case RuleId::R08: {
        auto key = secure(16);
        gcm(std::move(key), bad ? low_entropy(16) : secure(16));
        break;
      }
      case RuleId::R09: {
        auto key = secure(16);
        auto iv = secure(12);
        gcm(key, iv);
        if (!bad) {
          key = secure(16);
          iv = secure(12);
        }
        gcm(key, iv);
        break;
      }
      case RuleId::R10: {
        auto salt = bad ? k_.salt : secure(16);
        derive(fresh_password(), std::move(salt), 10000);
        break;
      }
      case RuleId::R11: {
        auto salt = secure(bad ? 6 : 8);
        derive(fresh_password(), std::move(salt), 10000);
        break;
      }
      case RuleId::R12: {
        auto salt = secure(16);
        derive(fresh_password(), salt, 10000);
        if (!bad) salt = secure(16);
        derive(fresh_password(), salt, 10000);
        break;
      }
      case RuleId::R13: {
        auto salt = secure(16);
        derive(fresh_password(), std::move(salt), bad ? 500 : 1000);
        break;
      }
      case RuleId::R14:
      case RuleId::R15:
      case RuleId::R16: {
        auto salt = secure(16);
        std::string pass;
        if (!bad)
          pass = fresh_password();
        else if (id == RuleId::R14)
          pass = weak_password();
        else if (id == RuleId::R15)
          pass = k_.blacklisted[static_cast<std::size_t>(execution_ - 1)];
        else
          pass = k_.derivation_pass;
        derive(std::move(pass), std::move(salt), 10000);
        break;
      }
      case RuleId::R17: {
        auto seed = bad ? k_.seed : fresh_.bytes(8);
        emit(C::RandomGenerator, "SecureRandom.setSeed",
             {{K::Alg, ParamValue::text("Secure")}, {K::Seed, ParamValue::bytes(std::move(seed))}});
        break;
      }
      case RuleId::R18:
        if (bad)
          emit(C::RandomGenerator, "Random.<init>", {{K::Alg, ParamValue::text("NotSecure")}});
        else
          emit(C::RandomGenerator, "SecureRandom.<init>", {{K::Alg, ParamValue::text("Secure")}});
        break;
      case RuleId::R19: rsa("RSA/ECB/OAEPWithSHA-256AndMGF1Padding", bad ? 1024 : 2048); break;
      case RuleId::R20: rsa(bad ? "RSA/ECB/NoPadding" : "RSA/ECB/OAEPWithSHA-256AndMGF1Padding", 2048); break;
      case RuleId::R21: rsa(bad ? "RSA/ECB/PKCS1Padding" : "RSA/ECB/OAEPWithSHA-256AndMGF1Padding", 2048); break;
      case RuleId::R22: url(bad ? "http" : "https"); break;
      case RuleId::R23: keystore(bad ? k_.keystore_pass : fresh_password()); break;
      case RuleId::R24:
        emit(C::SslTlsCert, "HttpsURLConnection.setHostnameVerifier", {{K::AllHost, ParamValue::boolean(bad)}});
        break;
      case RuleId::R25:
        emit(C::SslTlsCert, "SSLContext.init", {{K::AllCert, ParamValue::boolean(bad)}});
        break;
      case RuleId::R26:
        emit(C::SslTlsCert, "HttpsURLConnection.setHostnameVerifier",
             {{K::AllHost, ParamValue::boolean(false)}, {K::SetHost, ParamValue::boolean(bad)}});
        break;
    }
  }

  ExecutionLog take() { return std::move(log_); }

 private:
  ExecutionLog log_;
  std::uint64_t next_seq_ = 0;
  Stream fresh_;
  int execution_;
  const Constants& k_;
};

ExecutionLog generate_one(const Scenario& s, int execution, const Constants& constants) {
  LogBuilder b(s, execution, constants);
  b.emit(C::RandomGenerator, "SecureRandom.<init>", {{K::Alg, ParamValue::text("Secure")}});
  const std::size_t half = s.benign_events / 2;
  for (std::size_t k = 0; k < half; ++k) b.benign(k);
  for (const auto& m : s.misuses) {
    if (!m.trigger && s.category == Category::ArgumentSensitive) continue;  // path never taken
    b.rule(m.rule, m.trigger);
  }
  for (std::size_t k = half; k < s.benign_events; ++k) b.benign(k);
  return b.take();
}

struct CorpusRow {
  RuleId rule;
  int tp;
  int tn;
  int fn;
};

// Per-rule test counts of the benchmark.
constexpr std::array<CorpusRow, 16> kCorpusTable = {{
    {RuleId::R01, 24, 5, 4},
    {RuleId::R02, 30, 6, 5},
    {RuleId::R03, 6, 6, 1},
    {RuleId::R05, 7, 3, 1},
    {RuleId::R07, 8, 2, 1},
    {RuleId::R10, 7, 2, 1},
    {RuleId::R13, 7, 2, 1},
    {RuleId::R16, 8, 3, 1},
    {RuleId::R17, 14, 3, 1},
    {RuleId::R18, 1, 1, 0},
    {RuleId::R19, 5, 1, 1},
    {RuleId::R22, 6, 3, 1},
    {RuleId::R23, 7, 3, 1},
    {RuleId::R24, 1, 1, 0},
    {RuleId::R25, 3, 0, 0},
    {RuleId::R26, 4, 0, 0},
}};

std::string rule_slug(RuleId id) {
  auto s = to_string(id);  // "R-05"
  return "r" + s.substr(2);
}

std::string two_digits(int n) { return (n < 10 ? "0" : "") + std::to_string(n); }

std::optional<RuleId> primary_rule(const Scenario& s) {
  if (s.misuses.empty()) return std::nullopt;
  return s.misuses.front().rule;
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Basic: return "Basic";
    case Category::Miscellaneous: return "Miscellaneous";
    case Category::Interprocedural: return "Interprocedural";
    case Category::PathSensitive: return "PathSensitive";
    case Category::FieldSensitive: return "FieldSensitive";
    case Category::MultipleClasses: return "MultipleClasses";
    case Category::ArgumentSensitive: return "ArgumentSensitive";
  }
  return "?";
}

std::optional<Category> parse_category(std::string_view name) {
  for (auto c : kAllCategories) {
    auto canon = to_string(c);
    if (canon.size() == name.size() &&
        std::equal(canon.begin(), canon.end(), name.begin(), [](char a, char b) {
          return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
        }))
      return c;
  }
  return std::nullopt;
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  bool have_name = false;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (line.empty() || line.front() == '#') continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ScenarioError::Kind::Parse, lineno, "expected key=value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));

    auto number = [&](std::string_view v) {
      std::uint64_t n = 0;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
      if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
        fail(ScenarioError::Kind::Parse, lineno, "expected an unsigned integer, got '" + std::string(v) + "'");
      return n;
    };

    if (key == "name") {
      if (!valid_name(value))
        fail(ScenarioError::Kind::Parse, lineno, "names use letters, digits, '-', '_' and '.' only");
      s.name = std::string(value);
      have_name = true;
    } else if (key == "seed") {
      s.seed = number(value);
    } else if (key == "benign") {
      s.benign_events = static_cast<std::size_t>(number(value));
    } else if (key == "category") {
      auto c = parse_category(value);
      if (!c) fail(ScenarioError::Kind::Parse, lineno, "unknown category '" + std::string(value) + "'");
      s.category = *c;
    } else if (key == "misuse") {
      auto colon = value.find(':');
      if (colon == std::string_view::npos) fail(ScenarioError::Kind::Parse, lineno, "expected misuse=RNN:on|off");
      auto id = parse_rule_id(trim(value.substr(0, colon)));
      if (!id) fail(ScenarioError::Kind::UnknownRuleId, lineno, "unknown rule '" + std::string(value.substr(0, colon)) + "'");
      auto state = trim(value.substr(colon + 1));
      if (state != "on" && state != "off") fail(ScenarioError::Kind::Parse, lineno, "trigger must be on or off");
      if (std::any_of(s.misuses.begin(), s.misuses.end(), [&](const Misuse& m) { return m.rule == *id; }))
        fail(ScenarioError::Kind::ConflictingMisuses, lineno, to_string(*id) + " is listed twice");
      s.misuses.push_back({*id, state == "on"});
    } else {
      fail(ScenarioError::Kind::Parse, lineno, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_name) fail(ScenarioError::Kind::Parse, 0, "missing name");
  return s;
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "name=" << s.name << "\n";
  out << "seed=" << s.seed << "\n";
  out << "category=" << to_string(s.category) << "\n";
  for (const auto& m : s.misuses) {
    auto id = to_string(m.rule);
    out << "misuse=R" << id.substr(2) << ":" << (m.trigger ? "on" : "off") << "\n";
  }
  out << "benign=" << s.benign_events << "\n";
  return out.str();
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(ScenarioError::Kind::Unreadable, 0, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::pair<ExecutionLog, ExecutionLog> generate(const Scenario& scenario) {
  if (!valid_name(scenario.name)) fail(ScenarioError::Kind::Parse, 0, "invalid scenario name '" + scenario.name + "'");
  check_no_duplicates(scenario);
  const auto constants = constants_for(scenario.seed);
  return {generate_one(scenario, 1, constants), generate_one(scenario, 2, constants)};
}

bool misuse_present(const Scenario& s, RuleId rule) {
  return std::any_of(s.misuses.begin(), s.misuses.end(), [&](const Misuse& m) {
    return m.rule == rule && (m.trigger || s.category == Category::ArgumentSensitive);
  });
}

std::set<RuleId> expected_flags(const Scenario& s) {
  std::set<RuleId> out;
  for (const auto& m : s.misuses) {
    if (!m.trigger) continue;
    out.insert(m.rule);
    if (m.rule == RuleId::R10) out.insert(RuleId::R12);
    if (m.rule == RuleId::R15) out.insert(RuleId::R14);
  }
  return out;
}

Corpus builtin_corpus() {
  static constexpr std::array<Category, 6> kStatic = {
      Category::Basic,          Category::Miscellaneous,   Category::Interprocedural,
      Category::PathSensitive, Category::FieldSensitive, Category::MultipleClasses,
  };
  Corpus corpus;
  std::uint64_t index = 0;
  std::size_t positive_turn = 0;
  std::size_t negative_turn = 0;

  auto add = [&](RuleId rule, const std::string& kind, int n, bool trigger, Category category) {
    Scenario s;
    s.name = rule_slug(rule) + "-" + kind + "-" + two_digits(n);
    s.seed = 0x5eed0000ULL + index;
    s.benign_events = 4 + static_cast<std::size_t>((index * 5) % 9);
    s.category = category;
    s.misuses.push_back({rule, trigger});
    ++index;
    corpus.entries.push_back({s, expected_flags(s)});
  };

  for (const auto& row : kCorpusTable) {
    for (int i = 1; i <= row.tp; ++i) add(row.rule, "tp", i, true, kStatic[positive_turn++ % kStatic.size()]);
    for (int i = 1; i <= row.tn; ++i) add(row.rule, "tn", i, false, kStatic[negative_turn++ % kStatic.size()]);
    for (int i = 1; i <= row.fn; ++i) add(row.rule, "fn", i, false, Category::ArgumentSensitive);
  }
  return corpus;
}

std::filesystem::path write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto manifest_path = dir / "manifest.txt";
  std::ofstream manifest(manifest_path);
  if (!manifest) throw ScenarioError(ScenarioError::Kind::Unreadable, 0, "cannot write " + manifest_path.string());
  manifest << "# scenario file<TAB>rules the checker must flag (- for none)\n";
  for (const auto& e : corpus.entries) {
    const auto file = e.scenario.name + ".scn";
    std::ofstream out(dir / file);
    if (!out) throw ScenarioError(ScenarioError::Kind::Unreadable, 0, "cannot write " + (dir / file).string());
    out << serialize_scenario(e.scenario);
    std::string ids;
    for (auto id : e.expected) ids += (ids.empty() ? "" : ",") + to_string(id);
    manifest << file << "\t" << (ids.empty() ? "-" : ids) << "\n";
  }
  return manifest_path;
}

Corpus load_corpus(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ScenarioError(ScenarioError::Kind::Unreadable, 0, "cannot read " + manifest.string());
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto tab = view.find('\t');
    if (tab == std::string_view::npos) fail(ScenarioError::Kind::Parse, lineno, "manifest lines are <file><TAB><rules>");
    CorpusEntry entry;
    entry.scenario = load_scenario(manifest.parent_path() / std::string(trim(view.substr(0, tab))));
    auto ids = trim(view.substr(tab + 1));
    if (ids != "-") {
      for (std::size_t p = 0;;) {
        auto comma = ids.find(',', p);
        auto tok = trim(ids.substr(p, comma == std::string_view::npos ? std::string_view::npos : comma - p));
        auto id = parse_rule_id(tok);
        if (!id) fail(ScenarioError::Kind::UnknownRuleId, lineno, "unknown rule '" + std::string(tok) + "'");
        entry.expected.insert(*id);
        if (comma == std::string_view::npos) break;
        p = comma + 1;
      }
    }
    corpus.entries.push_back(std::move(entry));
  }
  return corpus;
}

BenchResult expected_table(const Corpus& corpus, std::optional<Category> only) {
  BenchResult result;
  for (const auto& e : corpus.entries) {
    const auto& s = e.scenario;
    if (only && s.category != *only) continue;
    Confusion c;
    ScenarioOutcome o{s.name, RuleId::R01, e.expected, e.expected, 'N'};
    auto rule = primary_rule(s);
    if (rule && misuse_present(s, *rule)) {
      bool triggered = e.expected.count(*rule) > 0;
      o.verdict = triggered ? 'P' : 'F';
      (triggered ? c.tp : c.fn) = 1;
    } else {
      c.tn = 1;
    }
    if (rule) {
      o.rule = *rule;
      result.per_rule[*rule] += c;
    }
    result.total += c;
    result.outcomes.push_back(std::move(o));
  }
  return result;
}

BenchResult run_bench(const Corpus& corpus, const Ruleset& ruleset, std::optional<Category> only,
                      const Dependencies& deps) {
  BenchResult result;
  for (const auto& e : corpus.entries) {
    const auto& s = e.scenario;
    if (only && s.category != *only) continue;
    auto [a, b] = generate(s);
    auto report = run_all(a, &b, ruleset, deps);

    ScenarioOutcome o;
    o.name = s.name;
    o.expected = e.expected;
    for (const auto& r : report.rules)
      if (r.violated) o.flagged.insert(r.rule);

    auto rule = primary_rule(s);
    Confusion c;
    if (!std::includes(e.expected.begin(), e.expected.end(), o.flagged.begin(), o.flagged.end())) {
      c.fp = 1;
      o.verdict = 'X';
    } else if (rule && misuse_present(s, *rule)) {
      bool flagged = o.flagged.count(*rule) > 0;
      (flagged ? c.tp : c.fn) = 1;
      o.verdict = flagged ? 'P' : 'F';
    } else {
      c.tn = 1;
      o.verdict = 'N';
    }
    if (rule) {
      o.rule = *rule;
      result.per_rule[*rule] += c;
    }
    result.total += c;
    result.outcomes.push_back(std::move(o));
  }
  return result;
}

}  // namespace crycheck
