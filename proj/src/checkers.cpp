#include "crycheck/checkers.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>

#include "crycheck/passwords.hpp"

namespace crycheck {

namespace {

void require_kind(const RuleSpec& spec, ProcedureKind kind) {
  if (spec.kind != kind)
    throw CheckError(CheckError::Kind::WrongProcedure,
                     to_string(spec.id) + " is not checked by the " + std::string(to_string(kind)) + " procedure");
}

std::optional<std::string> normalized_text(const CryptoEvent& e, ParamKey key) {
  const auto* v = e.find(key);
  if (!v || !v->is_text()) return std::nullopt;
  return normalize_alg_name(v->as_text());
}

// Algorithm, mode and padding of a cipher event. A combined transform such as
// "AES/ECB/PKCS5Padding" in `alg` is split; explicit mode/pad params win.
struct CipherView {
  std::optional<std::string> alg, mode, pad;
};

CipherView cipher_view(const CryptoEvent& e) {
  CipherView view;
  if (const auto* a = e.find(ParamKey::Alg); a && a->is_text()) {
    std::string_view transform = a->as_text();
    std::vector<std::string_view> parts;
    for (std::size_t pos = 0;;) {
      auto slash = transform.find('/', pos);
      parts.push_back(transform.substr(pos, slash == std::string_view::npos ? std::string_view::npos : slash - pos));
      if (slash == std::string_view::npos) break;
      pos = slash + 1;
    }
    view.alg = normalize_alg_name(parts[0]);
    if (parts.size() > 1) view.mode = normalize_alg_name(parts[1]);
    if (parts.size() > 2) view.pad = normalize_alg_name(parts[2]);
  }
  if (auto m = normalized_text(e, ParamKey::Mode)) view.mode = m;
  if (auto p = normalized_text(e, ParamKey::Pad)) view.pad = p;
  return view;
}

bool is_pkcs1_v15(const std::string& pad) {
  return pad == "PKCS1PADDING" || pad == "PKCS1V1.5" || pad == "PKCS1V15" || pad == "PKCS1";
}

std::optional<std::uint64_t> bit_length(const ParamValue& v) {
  if (v.is_uint()) return v.as_uint();
  if (v.is_bytes()) return static_cast<std::uint64_t>(v.as_bytes().size()) * 8;
  return std::nullopt;
}

bool contains_run(std::span<const std::uint8_t> haystack, std::span<const std::uint8_t> needle) {
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

bool values_match(std::span<const std::uint8_t> value, std::span<const std::uint8_t> out, std::size_t min_match) {
  if (value.empty() || out.empty()) return false;
  if (value.size() == out.size()) return std::equal(value.begin(), value.end(), out.begin());
  auto shorter = value.size() < out.size() ? value : out;
  auto longer = value.size() < out.size() ? out : value;
  return shorter.size() >= min_match && contains_run(longer, shorter);
}

Violation make_violation(RuleId rule, std::string message, const ExecutionLog& log, const CryptoEvent& e,
                         std::vector<ParamValue> values) {
  return Violation{rule, std::move(message), {EventRef{log.execution_id, e.seq}}, std::move(values)};
}

std::string in_quotes(const std::string& s) { return "'" + s + "'"; }

}  // namespace

bool Report::any_violation() const {
  return std::any_of(rules.begin(), rules.end(), [](const RuleEntry& r) { return r.violated; });
}

Report empty_report(std::string app_id) {
  Report report;
  report.app_id = std::move(app_id);
  for (std::size_t i = 0; i < kRuleCount; ++i) report.rules.push_back(RuleEntry{rule_at(i), true, false, 0, {}});
  return report;
}

std::string_view to_string(ValueOrigin origin) {
  switch (origin) {
    case ValueOrigin::SecureRng: return "secure-rng";
    case ValueOrigin::InsecureRng: return "insecure-rng";
    case ValueOrigin::Unknown: return "unknown";
  }
  return "?";
}

ValueOrigin classify_origin(std::span<const std::uint8_t> value, const ExecutionLog& log, std::uint64_t before_seq,
                            std::size_t min_match_bytes) {
  bool insecure = false;
  for (const auto& e : log.events) {
    if (e.seq >= before_seq) break;
    if (e.cls != CryptoClass::RandomGenerator) continue;
    const auto* out = e.find(ParamKey::Out);
    if (!out || !values_match(value, out->octets(), min_match_bytes)) continue;
    if (normalized_text(e, ParamKey::Alg) == "SECURE") return ValueOrigin::SecureRng;
    insecure = true;
  }
  return insecure ? ValueOrigin::InsecureRng : ValueOrigin::Unknown;
}

Dependencies Dependencies::defaults() {
  Dependencies deps;
  deps.battery = [](std::span<const std::uint8_t> v, double alpha) { return run_battery(v, alpha); };
  deps.password_score = [](std::string_view p) { return score_password(p).score; };
  deps.is_blacklisted = [](std::string_view p) { return crycheck::is_blacklisted(p); };
  return deps;
}

bool below_threshold(const RuleSpec& spec, std::uint64_t measured) {
  for (const auto& [name, limit] : spec.thresholds)
    if (name.starts_with("min_")) return limit > 0 && measured < static_cast<std::uint64_t>(limit);
  throw CheckError(CheckError::Kind::WrongProcedure, to_string(spec.id) + " has no minimum threshold");
}

std::vector<Violation> check_unacceptable(const ExecutionLog& log, const RuleSpec& spec, const Dependencies& deps) {
  require_kind(spec, ProcedureKind::Unacceptable);
  std::vector<Violation> out;
  const auto id = spec.id;

  for (const auto& e : log.events) {
    if (e.cls != spec.binding.cls) continue;
    auto flag = [&](std::string message, std::vector<ParamValue> values) {
      out.push_back(make_violation(id, std::move(message), log, e, std::move(values)));
    };
    auto param = [&](ParamKey k) { return e.find(k); };

    switch (id) {
      case RuleId::R01: {
        auto alg = normalized_text(e, ParamKey::Alg);
        if (alg && spec.string_set("broken_hashes").count(*alg)) flag("broken hash " + in_quotes(*alg), {*param(ParamKey::Alg)});
        break;
      }
      case RuleId::R02: {
        auto view = cipher_view(e);
        if (view.alg && spec.string_set("broken_ciphers").count(*view.alg))
          flag("broken cipher " + in_quotes(*view.alg), {*param(ParamKey::Alg)});
        break;
      }
      case RuleId::R03: {
        auto view = cipher_view(e);
        const auto* blocks = param(ParamKey::NumBlocks);
        if (view.mode == "ECB" && blocks && blocks->is_uint() &&
            blocks->as_uint() > static_cast<std::uint64_t>(spec.threshold("max_ecb_blocks")))
          flag("ECB mode over " + std::to_string(blocks->as_uint()) + " blocks", {*blocks});
        break;
      }
      case RuleId::R04: {
        if (cipher_view(e).mode == "CBC") flag("CBC mode", {ParamValue::text("CBC")});
        break;
      }
      case RuleId::R11: {
        const auto* salt = param(ParamKey::Salt);
        if (!salt || !(salt->is_bytes() || salt->is_text())) break;
        const std::uint64_t bits = salt->octets().size() * 8;
        if (below_threshold(spec, bits)) flag("salt of " + std::to_string(bits) + " bits", {*salt});
        break;
      }
      case RuleId::R13: {
        const auto* iter = param(ParamKey::Iter);
        if (iter && iter->is_uint() && below_threshold(spec, iter->as_uint()))
          flag(std::to_string(iter->as_uint()) + " iterations", {*iter});
        break;
      }
      case RuleId::R14: {
        const auto* pass = param(ParamKey::Pass);
        if (!pass || !pass->is_text()) break;
        int score = deps.password_score(pass->as_text());
        if (score < 0 || below_threshold(spec, static_cast<std::uint64_t>(score)))
          flag("password strength score " + std::to_string(score), {*pass});
        break;
      }
      case RuleId::R15: {
        const auto* pass = param(ParamKey::Pass);
        if (pass && pass->is_text() && deps.is_blacklisted(pass->as_text())) flag("blacklisted password", {*pass});
        break;
      }
      case RuleId::R18: {
        auto alg = normalized_text(e, ParamKey::Alg);
        if (alg && *alg != "SECURE") flag("non-cryptographic generator", {*param(ParamKey::Alg)});
        break;
      }
      case RuleId::R19: {
        auto view = cipher_view(e);
        const auto* key = param(ParamKey::Key);
        if (view.alg != "RSA" || !key) break;
        auto bits = bit_length(*key);
        if (bits && below_threshold(spec, *bits))
          flag("RSA key of " + std::to_string(*bits) + " bits", {*key});
        break;
      }
      case RuleId::R20: {
        auto view = cipher_view(e);
        if (view.alg == "RSA" && view.pad == "NOPADDING") flag("RSA without padding", {ParamValue::text(*view.pad)});
        break;
      }
      case RuleId::R21: {
        auto view = cipher_view(e);
        if (view.alg == "RSA" && view.pad && is_pkcs1_v15(*view.pad))
          flag("RSA with PKCS#1 v1.5 padding", {ParamValue::text(*view.pad)});
        break;
      }
      case RuleId::R22: {
        if (normalized_text(e, ParamKey::UrlProt) == "HTTP") flag("plain HTTP", {*param(ParamKey::UrlProt)});
        break;
      }
      case RuleId::R24: {
        const auto* v = param(ParamKey::AllHost);
        if (v && v->is_bool() && v->as_bool()) flag("hostname verifier accepts any host", {*v});
        break;
      }
      case RuleId::R25: {
        const auto* v = param(ParamKey::AllCert);
        if (v && v->is_bool() && v->as_bool()) flag("trust manager accepts any certificate", {*v});
        break;
      }
      case RuleId::R26: {
        const auto* v = param(ParamKey::SetHost);
        if (v && !(v->is_bool() && !v->as_bool())) flag("hostname verifier replaced", {*v});
        break;
      }
      default:
        break;
    }
  }
  return out;
}

std::vector<Violation> check_constant(const ExecutionLog& a, const ExecutionLog& b, const RuleSpec& spec,
                                      const Tunables& tunables) {
  require_kind(spec, ProcedureKind::Constant);
  if (a.execution_id == b.execution_id)
    throw CheckError(CheckError::Kind::SameExecutionId, "both logs are execution " + a.execution_id);
  const auto cls = spec.binding.cls;
  const auto key = spec.binding.keys.at(0);

  // value -> occurrences, per log
  auto collect = [&](const ExecutionLog& log) {
    std::map<ParamValue, std::vector<EventRef>> seen;
    for (const auto& e : log.events) {
      if (e.cls != cls) continue;
      const auto* v = e.find(key);
      if (!v || !(v->is_bytes() || v->is_text()) || v->octets().size() < tunables.min_constant_bytes) continue;
      seen[*v].push_back({log.execution_id, e.seq});
    }
    return seen;
  };
  const auto in_a = collect(a);
  const auto in_b = collect(b);

  std::vector<Violation> out;
  for (const auto& [value, refs_a] : in_a) {
    auto it = in_b.find(value);
    if (it == in_b.end()) continue;
    Violation v{spec.id, "same " + std::string(to_string(key)) + " in both executions", refs_a, {value}};
    v.evidence.insert(v.evidence.end(), it->second.begin(), it->second.end());
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Violation> check_badly_derived(const ExecutionLog& log, const RuleSpec& spec, const Tunables& tunables,
                                           const Dependencies& deps) {
  require_kind(spec, ProcedureKind::BadlyDerived);
  const auto key = spec.binding.keys.at(0);
  std::vector<Violation> out;
  for (const auto& e : log.events) {
    if (e.cls != spec.binding.cls) continue;
    const auto* v = e.find(key);
    if (!v || !(v->is_bytes() || v->is_text())) continue;
    const auto name = std::string(to_string(key));
    switch (classify_origin(v->octets(), log, e.seq, tunables.min_match_bytes)) {
      case ValueOrigin::SecureRng:
        break;
      case ValueOrigin::InsecureRng:
        out.push_back(make_violation(spec.id, name + " taken from a non-cryptographic generator", log, e, {*v}));
        break;
      case ValueOrigin::Unknown: {
        auto result = deps.battery(v->octets(), tunables.nist_alpha);
        if (!result.any_fail) break;
        std::string failed;
        for (const auto& [test, outcome] : result.outcomes) {
          if (!outcome.failed()) continue;
          if (!failed.empty()) failed += ", ";
          failed += test;
        }
        out.push_back(make_violation(spec.id, name + " fails randomness tests: " + failed, log, e, {*v}));
        break;
      }
    }
  }
  return out;
}

std::vector<Violation> check_reused(std::span<const ExecutionLog* const> logs, const RuleSpec& spec) {
  require_kind(spec, ProcedureKind::Reused);
  const auto& keys = spec.binding.keys;
  std::map<std::vector<ParamValue>, std::vector<EventRef>> seen;
  for (const auto* log : logs) {
    for (const auto& e : log->events) {
      if (e.cls != spec.binding.cls) continue;
      std::vector<ParamValue> tuple;
      for (auto k : keys) {
        const auto* v = e.find(k);
        if (!v) break;
        tuple.push_back(*v);
      }
      if (tuple.size() != keys.size()) continue;
      seen[std::move(tuple)].push_back({log->execution_id, e.seq});
    }
  }

  std::string what;
  for (auto k : keys) what += (what.empty() ? "" : ", ") + std::string(to_string(k));
  if (keys.size() > 1) what = "(" + what + ")";

  std::vector<Violation> out;
  for (auto& [tuple, refs] : seen) {
    if (refs.size() < 2) continue;
    out.push_back(Violation{spec.id, what + " used " + std::to_string(refs.size()) + " times", std::move(refs), tuple});
  }
  return out;
}

Report run_all(const ExecutionLog& a, const ExecutionLog* b, const Ruleset& ruleset, const Dependencies& deps) {
  if (b) {
    if (a.execution_id == b->execution_id)
      throw CheckError(CheckError::Kind::SameExecutionId, "both logs are execution " + a.execution_id);
    if (a.app_id != b->app_id)
      throw CheckError(CheckError::Kind::AppMismatch, "logs belong to different apps: " + a.app_id + ", " + b->app_id);
  } else {
    for (const auto& spec : ruleset.rules())
      if (spec.enabled && spec.kind == ProcedureKind::Constant)
        throw CheckError(CheckError::Kind::MissingSecondLog,
                         to_string(spec.id) + " compares two executions but only one log was given");
  }

  std::vector<const ExecutionLog*> logs{&a};
  if (b) logs.push_back(b);
  const auto& tunables = ruleset.tunables();
  const std::size_t cap = std::max<std::size_t>(tunables.evidence_cap, 1);

  Report report = empty_report(a.app_id);
  for (const auto& spec : ruleset.rules()) {
    auto& entry = report.rules[index_of(spec.id)];
    entry.enabled = spec.enabled;
    if (!spec.enabled) continue;

    std::vector<Violation> found;
    auto append = [&](std::vector<Violation> vs) { std::move(vs.begin(), vs.end(), std::back_inserter(found)); };
    switch (spec.kind) {
      case ProcedureKind::Unacceptable:
        for (const auto* log : logs) append(check_unacceptable(*log, spec, deps));
        break;
      case ProcedureKind::BadlyDerived:
        for (const auto* log : logs) append(check_badly_derived(*log, spec, tunables, deps));
        break;
      case ProcedureKind::Constant:
        append(check_constant(a, *b, spec, tunables));
        break;
      case ProcedureKind::Reused:
        append(check_reused(logs, spec));
        break;
    }
    entry.count = found.size();
    entry.violated = !found.empty();
    if (found.size() > cap) found.resize(cap);
    entry.violations = std::move(found);
  }
  return report;
}

}  // namespace crycheck
