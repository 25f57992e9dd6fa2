#include "crycheck/ruleset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace crycheck {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(RulesetError::Kind kind, std::size_t line, const std::string& msg) {
  throw RulesetError(kind, line, "config line " + std::to_string(line) + ": " + msg);
}

std::int64_t parse_int(std::string_view v, std::size_t line) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    fail(RulesetError::Kind::ConfigParse, line, "expected an integer, got '" + std::string(v) + "'");
  return out;
}

bool parse_bool(std::string_view v, std::size_t line) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  fail(RulesetError::Kind::ConfigParse, line, "expected true/false, got '" + std::string(v) + "'");
}

RuleSpec make(RuleId id, CryptoClass cls, std::vector<ParamKey> keys, std::string summary) {
  RuleSpec spec;
  spec.id = id;
  spec.kind = procedure_of(id);
  spec.binding = {cls, std::move(keys)};
  spec.summary = std::move(summary);
  return spec;
}

}  // namespace

std::string to_string(RuleId id) {
  auto n = index_of(id) + 1;
  std::string out = "R-";
  if (n < 10) out += '0';
  out += std::to_string(n);
  return out;
}

std::optional<RuleId> parse_rule_id(std::string_view text) {
  if (text.empty() || (text[0] != 'R' && text[0] != 'r')) return std::nullopt;
  text.remove_prefix(1);
  if (!text.empty() && text[0] == '-') text.remove_prefix(1);
  if (text.size() != 2) return std::nullopt;
  int n = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc() || ptr != text.data() + text.size() || n < 1 || n > static_cast<int>(kRuleCount))
    return std::nullopt;
  return rule_at(static_cast<std::size_t>(n - 1));
}

std::string_view to_string(ProcedureKind kind) {
  switch (kind) {
    case ProcedureKind::Unacceptable: return "unacceptable";
    case ProcedureKind::Constant: return "constant";
    case ProcedureKind::BadlyDerived: return "badly-derived";
    case ProcedureKind::Reused: return "reused";
  }
  return "?";
}

ProcedureKind procedure_of(RuleId id) {
  switch (id) {
    case RuleId::R05:
    case RuleId::R07:
    case RuleId::R10:
    case RuleId::R17:
    case RuleId::R23:
      return ProcedureKind::Constant;
    case RuleId::R06:
    case RuleId::R08:
      return ProcedureKind::BadlyDerived;
    case RuleId::R09:
    case RuleId::R12:
    case RuleId::R16:
      return ProcedureKind::Reused;
    default:
      return ProcedureKind::Unacceptable;
  }
}

Ruleset::Ruleset(std::vector<RuleSpec> rules, Tunables tunables)
    : rules_(std::move(rules)), tunables_(tunables) {
  std::sort(rules_.begin(), rules_.end(), [](const RuleSpec& a, const RuleSpec& b) { return a.id < b.id; });
  if (rules_.size() != kRuleCount) throw std::invalid_argument("a ruleset holds exactly 26 rules");
  for (std::size_t i = 0; i < kRuleCount; ++i)
    if (rules_[i].id != rule_at(i)) throw std::invalid_argument("ruleset is missing " + to_string(rule_at(i)));
}

std::string normalize_alg_name(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

Ruleset default_ruleset() {
  using C = CryptoClass;
  using K = ParamKey;
  std::vector<RuleSpec> rules;
  rules.push_back(make(RuleId::R01, C::MessageDigest, {K::Alg}, "broken hash function"));
  rules.back().string_sets["broken_hashes"] = {"MD2", "MD5", "SHA1"};
  rules.push_back(make(RuleId::R02, C::SymmEncryption, {K::Alg}, "broken symmetric cipher"));
  rules.back().string_sets["broken_ciphers"] = {"ARCFOUR", "BLOWFISH", "DES", "IDEA", "RC2", "RC4"};
  rules.push_back(make(RuleId::R03, C::SymmEncryption, {K::Mode, K::NumBlocks}, "ECB mode over more than one block"));
  rules.back().thresholds["max_ecb_blocks"] = 1;
  rules.push_back(make(RuleId::R04, C::SymmEncryption, {K::Mode},
                       "CBC mode (relevant in client/server settings)"));
  rules.push_back(make(RuleId::R05, C::SymmEncryption, {K::Key}, "constant encryption key"));
  rules.push_back(make(RuleId::R06, C::SymmEncryption, {K::Key}, "badly-derived encryption key"));
  rules.push_back(make(RuleId::R07, C::SymmEncryption, {K::Iv}, "constant IV"));
  rules.push_back(make(RuleId::R08, C::SymmEncryption, {K::Iv}, "badly-derived IV"));
  rules.push_back(make(RuleId::R09, C::SymmEncryption, {K::Key, K::Iv}, "reused (key, IV) pair"));
  rules.push_back(make(RuleId::R10, C::KeyDerivation, {K::Salt}, "constant salt"));
  rules.push_back(make(RuleId::R11, C::KeyDerivation, {K::Salt}, "short salt"));
  rules.back().thresholds["min_salt_bits"] = 64;
  rules.push_back(make(RuleId::R12, C::KeyDerivation, {K::Salt}, "reused salt"));
  rules.push_back(make(RuleId::R13, C::KeyDerivation, {K::Iter}, "too few key-derivation iterations"));
  rules.back().thresholds["min_iterations"] = 1000;
  rules.push_back(make(RuleId::R14, C::KeyDerivation, {K::Pass}, "weak password"));
  rules.back().thresholds["min_password_score"] = 3;
  rules.push_back(make(RuleId::R15, C::KeyDerivation, {K::Pass}, "blacklisted password"));
  rules.push_back(make(RuleId::R16, C::KeyDerivation, {K::Pass}, "reused password"));
  rules.push_back(make(RuleId::R17, C::RandomGenerator, {K::Seed}, "constant PRNG seed"));
  rules.push_back(make(RuleId::R18, C::RandomGenerator, {K::Alg}, "PRNG not suited for crypto"));
  rules.push_back(make(RuleId::R19, C::AsymmEncryption, {K::Alg, K::Key}, "short RSA key"));
  rules.back().thresholds["min_rsa_bits"] = 2048;
  rules.push_back(make(RuleId::R20, C::AsymmEncryption, {K::Alg, K::Pad}, "textbook RSA (no padding)"));
  rules.push_back(make(RuleId::R21, C::AsymmEncryption, {K::Alg, K::Pad}, "RSA with PKCS1-v1.5 padding"));
  rules.push_back(make(RuleId::R22, C::SslTlsCert, {K::UrlProt}, "plain HTTP connection"));
  rules.push_back(make(RuleId::R23, C::KeyStorage, {K::Pass}, "constant key-store password"));
  rules.push_back(make(RuleId::R24, C::SslTlsCert, {K::AllHost}, "hostname verifier accepts every host"));
  rules.push_back(make(RuleId::R25, C::SslTlsCert, {K::AllCert}, "trust manager accepts every certificate"));
  rules.push_back(make(RuleId::R26, C::SslTlsCert, {K::SetHost}, "default hostname verifier replaced"));
  return Ruleset(std::move(rules), Tunables{});
}

void apply_config(Ruleset& ruleset, std::string_view config_text) {
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= config_text.size()) {
    auto nl = config_text.find('\n', pos);
    if (nl == std::string_view::npos) nl = config_text.size();
    auto line = trim(config_text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineno;
    if (line.empty() || line.front() == '#') continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(RulesetError::Kind::ConfigParse, lineno, "expected key=value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));

    std::vector<std::string_view> parts;
    for (std::size_t p = 0;;) {
      auto dot = key.find('.', p);
      parts.push_back(key.substr(p, dot == std::string_view::npos ? std::string_view::npos : dot - p));
      if (dot == std::string_view::npos) break;
      p = dot + 1;
    }

    if (parts.size() == 3 && parts[0] == "rule") {
      auto id = parse_rule_id(parts[1]);
      if (!id) fail(RulesetError::Kind::UnknownRuleId, lineno, "unknown rule '" + std::string(parts[1]) + "'");
      auto& spec = ruleset.spec(*id);
      if (parts[2] == "enabled") {
        spec.enabled = parse_bool(value, lineno);
        continue;
      }
      auto it = spec.thresholds.find(std::string(parts[2]));
      if (it == spec.thresholds.end())
        fail(RulesetError::Kind::UnknownThreshold, lineno,
             to_string(*id) + " has no threshold '" + std::string(parts[2]) + "'");
      it->second = parse_int(value, lineno);
    } else if (parts.size() == 3 && parts[0] == "set") {
      std::set<std::string>* target = nullptr;
      for (std::size_t i = 0; i < kRuleCount && !target; ++i) {
        auto& sets = ruleset.spec(rule_at(i)).string_sets;
        auto it = sets.find(std::string(parts[1]));
        if (it != sets.end()) target = &it->second;
      }
      if (!target) fail(RulesetError::Kind::UnknownSet, lineno, "unknown set '" + std::string(parts[1]) + "'");
      if (parts[2] == "add") {
        if (value.empty()) fail(RulesetError::Kind::ConfigParse, lineno, "empty set member");
        target->insert(normalize_alg_name(value));
      } else if (parts[2] == "remove") {
        target->erase(normalize_alg_name(value));
      } else if (parts[2] == "clear") {
        target->clear();
      } else {
        fail(RulesetError::Kind::ConfigParse, lineno, "set operation must be add, remove or clear");
      }
    } else if (parts.size() == 2 && parts[0] == "option") {
      auto& t = ruleset.tunables();
      if (parts[1] == "nist_alpha") {
        std::string v(value);
        char* end = nullptr;
        double alpha = std::strtod(v.c_str(), &end);
        if (v.empty() || *end != '\0' || !(alpha > 0.0 && alpha < 1.0))
          fail(RulesetError::Kind::ConfigParse, lineno, "nist_alpha must be in (0, 1)");
        t.nist_alpha = alpha;
      } else if (parts[1] == "min_match_bytes" || parts[1] == "min_constant_bytes" || parts[1] == "evidence_cap") {
        auto n = parse_int(value, lineno);
        if (n < 0) fail(RulesetError::Kind::ConfigParse, lineno, "value must be non-negative");
        auto& slot = parts[1] == "min_match_bytes"      ? t.min_match_bytes
                     : parts[1] == "min_constant_bytes" ? t.min_constant_bytes
                                                        : t.evidence_cap;
        slot = static_cast<std::size_t>(n);
      } else {
        fail(RulesetError::Kind::UnknownThreshold, lineno, "unknown option '" + std::string(parts[1]) + "'");
      }
    } else {
      fail(RulesetError::Kind::ConfigParse, lineno, "unrecognised key '" + std::string(key) + "'");
    }
  }
}

Ruleset load_ruleset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RulesetError(RulesetError::Kind::Unreadable, 0, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto ruleset = default_ruleset();
  apply_config(ruleset, buf.str());
  return ruleset;
}

}  // namespace crycheck
