#pragma once

// Random log builders and brute-force oracles shared by the unit and
// acceptance tests. Nothing here calls into the checkers.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "crycheck/checkers.hpp"
#include "crycheck/logmodel.hpp"
#include "crycheck/ruleset.hpp"

namespace crycheck::testing {

using Occurrences = std::set<std::pair<std::vector<ParamValue>, std::vector<EventRef>>>;

inline ExecutionLog empty_log(std::string app, std::string execution) {
  ExecutionLog log;
  log.app_id = std::move(app);
  log.execution_id = std::move(execution);
  log.platform = "test";
  return log;
}

inline Bytes random_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

/// Log of up to `max_events` events whose key/iv/salt/pass values come from
/// small pools, so duplicates are common. Some events omit parameters.
inline ExecutionLog random_reuse_log(std::mt19937_64& rng, std::size_t max_events, const std::string& execution) {
  std::vector<Bytes> keys, ivs, salts;
  for (int i = 0; i < 12; ++i) {
    keys.push_back(random_bytes(rng, 16));
    ivs.push_back(random_bytes(rng, 12));
    salts.push_back(random_bytes(rng, 1 + rng() % 16));
  }
  const std::vector<std::string> passwords = {"alpha", "bravo", "charlie", "delta", "echo", "foxtrot", ""};

  auto log = empty_log("reuse-app", execution);
  const std::size_t n = rng() % (max_events + 1);
  std::uint64_t seq = rng() % 3;
  // Pool size per log varies so both sparse and dense duplication occur.
  const std::size_t pool = 1 + rng() % 12;
  for (std::size_t i = 0; i < n; ++i) {
    CryptoEvent e;
    e.seq = seq;
    seq += 1 + rng() % 3;
    switch (rng() % 4) {
      case 0:
        e.cls = CryptoClass::SymmEncryption;
        e.api = "Cipher.doFinal";
        if (rng() % 8) e.params[ParamKey::Key] = ParamValue::bytes(keys[rng() % pool]);
        if (rng() % 8) e.params[ParamKey::Iv] = ParamValue::bytes(ivs[rng() % pool]);
        break;
      case 1:
        e.cls = CryptoClass::KeyDerivation;
        e.api = "PBEKeySpec.<init>";
        if (rng() % 8) e.params[ParamKey::Salt] = ParamValue::bytes(salts[rng() % pool]);
        if (rng() % 8) e.params[ParamKey::Pass] = ParamValue::text(passwords[rng() % passwords.size()]);
        break;
      case 2:
        // Text and bytes with the same octets are different values.
        e.cls = CryptoClass::KeyDerivation;
        e.api = "PBEKeySpec.<init>";
        e.params[ParamKey::Salt] = ParamValue::text("bravo");
        e.params[ParamKey::Pass] = ParamValue::text(rng() % 2 ? "bravo" : "zulu");
        break;
      default:
        e.cls = CryptoClass::MessageDigest;
        e.api = "MessageDigest.digest";
        e.params[ParamKey::Alg] = ParamValue::text("SHA-256");
        break;
    }
    log.events.push_back(std::move(e));
  }
  return log;
}

/// Every value tuple of the rule's binding that occurs at least twice, with
/// all of its occurrences, found by comparing every pair of events.
inline Occurrences brute_force_duplicates(const std::vector<const ExecutionLog*>& logs, const RuleSpec& spec) {
  std::vector<std::pair<std::vector<ParamValue>, EventRef>> all;
  for (const auto* log : logs) {
    for (const auto& e : log->events) {
      if (e.cls != spec.binding.cls) continue;
      std::vector<ParamValue> tuple;
      bool complete = true;
      for (auto k : spec.binding.keys) {
        const auto* v = e.find(k);
        if (!v) {
          complete = false;
          break;
        }
        tuple.push_back(*v);
      }
      if (complete) all.push_back({tuple, {log->execution_id, e.seq}});
    }
  }
  std::vector<bool> duplicated(all.size(), false);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (all[i].first == all[j].first) duplicated[i] = duplicated[j] = true;

  Occurrences out;
  std::vector<bool> used(all.size(), false);
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!duplicated[i] || used[i]) continue;
    std::vector<EventRef> refs;
    for (std::size_t j = i; j < all.size(); ++j) {
      if (all[j].first == all[i].first) {
        refs.push_back(all[j].second);
        used[j] = true;
      }
    }
    std::sort(refs.begin(), refs.end());
    out.insert({all[i].first, refs});
  }
  return out;
}

inline Occurrences as_occurrences(const std::vector<Violation>& violations) {
  Occurrences out;
  for (const auto& v : violations) {
    auto refs = v.evidence;
    std::sort(refs.begin(), refs.end());
    out.insert({v.offending_values, refs});
  }
  return out;
}

/// Pair of executions exercising every constant-rule parameter, with each
/// value (all at least 4 bytes) drawn once from `rng` and never repeated
/// within or across the two logs.
inline std::pair<ExecutionLog, ExecutionLog> disjoint_pair(std::mt19937_64& rng, const std::string& app) {
  std::set<Bytes> used;
  auto fresh = [&](std::size_t min_len) {
    for (;;) {
      auto b = random_bytes(rng, min_len + rng() % 28);
      if (used.insert(b).second) return b;
    }
  };
  auto fresh_text = [&] {
    for (;;) {
      std::string s;
      const std::size_t n = 4 + rng() % 12;
      for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>(33 + rng() % 94));
      if (used.insert(Bytes(s.begin(), s.end())).second) return s;
    }
  };

  auto build = [&](const std::string& execution) {
    auto log = empty_log(app, execution);
    std::uint64_t seq = 0;
    const std::size_t n = 1 + rng() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      CryptoEvent e;
      e.seq = seq++;
      switch (rng() % 5) {
        case 0:
          e.cls = CryptoClass::SymmEncryption;
          e.api = "Cipher.doFinal";
          e.params[ParamKey::Key] = ParamValue::bytes(fresh(4));
          e.params[ParamKey::Iv] = ParamValue::bytes(fresh(4));
          break;
        case 1:
          e.cls = CryptoClass::KeyDerivation;
          e.api = "PBEKeySpec.<init>";
          e.params[ParamKey::Salt] = ParamValue::bytes(fresh(4));
          e.params[ParamKey::Pass] = ParamValue::text(fresh_text());
          break;
        case 2:
          e.cls = CryptoClass::RandomGenerator;
          e.api = "SecureRandom.setSeed";
          e.params[ParamKey::Seed] = ParamValue::bytes(fresh(4));
          break;
        case 3:
          e.cls = CryptoClass::KeyStorage;
          e.api = "KeyStore.load";
          e.params[ParamKey::Pass] = ParamValue::text(fresh_text());
          break;
        default:
          e.cls = CryptoClass::MessageDigest;
          e.api = "MessageDigest.digest";
          e.params[ParamKey::Alg] = ParamValue::text("SHA-256");
          break;
      }
      log.events.push_back(std::move(e));
    }
    return log;
  };
  auto a = build(app + ".1");
  auto b = build(app + ".2");
  return {std::move(a), std::move(b)};
}

/// Adds one encryption event using `key` at the end of `log`.
inline void append_key_use(ExecutionLog& log, const Bytes& key) {
  CryptoEvent e;
  e.seq = log.events.empty() ? 0 : log.events.back().seq + 1;
  e.cls = CryptoClass::SymmEncryption;
  e.api = "Cipher.doFinal";
  e.params[ParamKey::Key] = ParamValue::bytes(key);
  log.events.push_back(std::move(e));
}

}  // namespace crycheck::testing
