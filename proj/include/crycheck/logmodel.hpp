#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace crycheck {

using Bytes = std::vector<std::uint8_t>;

enum class CryptoClass {
  MessageDigest,
  SymmEncryption,
  AsymmEncryption,
  KeyDerivation,
  RandomGenerator,
  KeyStorage,
  SslTlsCert,
};

inline constexpr std::array<CryptoClass, 7> kAllClasses = {
    CryptoClass::MessageDigest,   CryptoClass::SymmEncryption, CryptoClass::AsymmEncryption,
    CryptoClass::KeyDerivation,   CryptoClass::RandomGenerator, CryptoClass::KeyStorage,
    CryptoClass::SslTlsCert,
};

std::string_view to_string(CryptoClass c);
std::optional<CryptoClass> parse_crypto_class(std::string_view name);

enum class ParamKey {
  Alg,
  Mode,
  Pad,
  Key,
  Iv,
  NumBlocks,
  Out,
  Pass,
  Salt,
  Iter,
  Seed,
  UrlProt,
  AllHost,
  AllCert,
  SetHost,
};

inline constexpr std::array<ParamKey, 15> kAllParamKeys = {
    ParamKey::Alg,  ParamKey::Mode,    ParamKey::Pad,     ParamKey::Key,     ParamKey::Iv,
    ParamKey::NumBlocks, ParamKey::Out, ParamKey::Pass,   ParamKey::Salt,    ParamKey::Iter,
    ParamKey::Seed, ParamKey::UrlProt, ParamKey::AllHost, ParamKey::AllCert, ParamKey::SetHost,
};

/// Wire name of a parameter ("alg", "numBlocks", ...).
std::string_view to_string(ParamKey k);
std::optional<ParamKey> parse_param_key(std::string_view name);

/// Whether `key` is one of the parameters declared for `cls`.
bool key_allowed(CryptoClass cls, ParamKey key);

/// Instrumented method names accepted in the api column.
std::span<const std::string_view> known_apis();
bool is_known_api(std::string_view api);

/// A logged parameter value: text, raw bytes, unsigned integer or boolean.
class ParamValue {
 public:
  enum class Type { Text, Bytes, UInt, Bool };

  ParamValue() = default;

  static ParamValue text(std::string s) { return ParamValue(Storage{std::in_place_index<0>, std::move(s)}); }
  static ParamValue bytes(Bytes b) { return ParamValue(Storage{std::in_place_index<1>, std::move(b)}); }
  static ParamValue uint(std::uint64_t v) { return ParamValue(Storage{std::in_place_index<2>, v}); }
  static ParamValue boolean(bool v) { return ParamValue(Storage{std::in_place_index<3>, v}); }

  Type type() const { return static_cast<Type>(value_.index()); }
  bool is_text() const { return type() == Type::Text; }
  bool is_bytes() const { return type() == Type::Bytes; }
  bool is_uint() const { return type() == Type::UInt; }
  bool is_bool() const { return type() == Type::Bool; }

  const std::string& as_text() const { return std::get<0>(value_); }
  const Bytes& as_bytes() const { return std::get<1>(value_); }
  std::uint64_t as_uint() const { return std::get<2>(value_); }
  bool as_bool() const { return std::get<3>(value_); }

  /// Raw octets of a Text or Bytes value; empty for the other types.
  std::span<const std::uint8_t> octets() const;

  /// Canonical wire encoding, e.g. "t:SHA1" or "b:00ff".
  std::string encode() const;

  friend bool operator==(const ParamValue&, const ParamValue&) = default;
  friend auto operator<=>(const ParamValue&, const ParamValue&) = default;

 private:
  using Storage = std::variant<std::string, Bytes, std::uint64_t, bool>;
  explicit ParamValue(Storage v) : value_(std::move(v)) {}
  Storage value_{std::in_place_index<0>};
};

struct CryptoEvent {
  std::uint64_t seq = 0;
  CryptoClass cls = CryptoClass::MessageDigest;
  std::string api;
  std::map<ParamKey, ParamValue> params;

  const ParamValue* find(ParamKey k) const {
    auto it = params.find(k);
    return it == params.end() ? nullptr : &it->second;
  }

  friend bool operator==(const CryptoEvent&, const CryptoEvent&) = default;
};

inline constexpr std::string_view kSchemaVersion = "1";

struct ExecutionLog {
  std::string schema_version{kSchemaVersion};
  std::string app_id;
  std::string execution_id;
  std::string platform;
  std::vector<CryptoEvent> events;

  /// Event with the given seq, or nullptr.
  const CryptoEvent* find_event(std::uint64_t seq) const;

  friend bool operator==(const ExecutionLog&, const ExecutionLog&) = default;
};

class LogError : public std::runtime_error {
 public:
  enum class Kind {
    MalformedHeader,
    MalformedLine,
    NonMonotoneSeq,
    UnknownClass,
    UnknownApi,
    IllegalKey,
    BadHexEncoding,
    IllegalKeyForClass,
    Unreadable,
  };

  LogError(Kind kind, std::size_t line, const std::string& what)
      : std::runtime_error(what), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  /// 1-based line number; 0 when not tied to a line.
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

enum class ParseMode { Strict, Lenient };

/// Parses a complete log file. In lenient mode, lines naming an unknown class
/// or api are skipped and unknown or illegal parameters are dropped; each skip
/// appends a message to `warnings` when it is non-null.
ExecutionLog parse_log(std::string_view input, ParseMode mode = ParseMode::Strict,
                       std::vector<std::string>* warnings = nullptr);

ExecutionLog read_log_file(const std::filesystem::path& path, ParseMode mode = ParseMode::Strict,
                           std::vector<std::string>* warnings = nullptr);

/// Canonical byte form: header, then events by seq with params sorted by name.
std::string serialize_log(const ExecutionLog& log);

/// All values of `key` on events of class `cls`, in seq order.
std::vector<ParamValue> values_of(const ExecutionLog& log, CryptoClass cls, ParamKey key);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::optional<Bytes> from_hex(std::string_view hex);

std::string escape_text(std::string_view s);

}  // namespace crycheck
