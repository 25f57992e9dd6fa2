#include "crycheck/logmodel.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace crycheck {

namespace {

constexpr std::array<std::string_view, 7> kClassNames = {
    "MessageDigest", "SymmEncryption", "AsymmEncryption", "KeyDerivation",
    "RandomGenerator", "KeyStorage", "SslTlsCert",
};

constexpr std::array<std::string_view, 15> kKeyNames = {
    "alg", "mode", "pad", "key", "iv", "numBlocks", "out", "pass",
    "salt", "iter", "seed", "urlprot", "allhost", "allcert", "sethost",
};

constexpr std::array<std::string_view, 22> kKnownApis = {
    "MessageDigest.digest",
    "Cipher.init",
    "Cipher.update",
    "Cipher.doFinal",
    "Signature.initSign",
    "Signature.initVerify",
    "PBEKeySpec.<init>",
    "PBEParameterSpec.<init>",
    "SecureRandom.<init>",
    "SecureRandom.nextBytes",
    "SecureRandom.setSeed",
    "Random.<init>",
    "Random.next",
    "Random.nextBytes",
    "KeyStore.getKey",
    "KeyStore.load",
    "KeyStore.store",
    "URL.<init>",
    "HttpsURLConnection.setHostnameVerifier",
    "HttpsURLConnection.setDefaultHostnameVerifier",
    "SSLContext.init",
    "SocketFactory.getDefault",
};

constexpr std::string_view kMagic = "#crylog v1";

[[noreturn]] void fail(LogError::Kind kind, std::size_t line, const std::string& msg) {
  throw LogError(kind, line, "line " + std::to_string(line) + ": " + msg);
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Splits on `sep` occurrences that are not preceded by an escaping backslash.
std::vector<std::string_view> split_unescaped(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\') {
      ++i;
      continue;
    }
    if (s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(s.substr(start));
  return parts;
}

std::optional<std::string> unescape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
      continue;
    }
    if (++i == s.size()) return std::nullopt;
    switch (s[i]) {
      case '\\': out.push_back('\\'); break;
      case ';': out.push_back(';'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      default: return std::nullopt;
    }
  }
  return out;
}

bool is_id_token(std::string_view s) {
  return !s.empty() && std::none_of(s.begin(), s.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r';
  });
}

ParamValue decode_value(std::string_view raw, std::size_t line) {
  if (raw.size() < 2 || raw[1] != ':') fail(LogError::Kind::MalformedLine, line, "value lacks a type prefix");
  std::string_view body = raw.substr(2);
  switch (raw[0]) {
    case 't': {
      auto text = unescape_text(body);
      if (!text) fail(LogError::Kind::MalformedLine, line, "bad escape in text value");
      return ParamValue::text(std::move(*text));
    }
    case 'b': {
      auto bytes = from_hex(body);
      if (!bytes) fail(LogError::Kind::BadHexEncoding, line, "invalid hex '" + std::string(body) + "'");
      return ParamValue::bytes(std::move(*bytes));
    }
    case 'u': {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
      if (body.empty() || ec != std::errc() || ptr != body.data() + body.size())
        fail(LogError::Kind::MalformedLine, line, "invalid unsigned value '" + std::string(body) + "'");
      return ParamValue::uint(v);
    }
    case 'o':
      if (body == "0") return ParamValue::boolean(false);
      if (body == "1") return ParamValue::boolean(true);
      fail(LogError::Kind::MalformedLine, line, "boolean must be 0 or 1");
    default:
      fail(LogError::Kind::MalformedLine, line, std::string("unknown value prefix '") + raw[0] + "'");
  }
}

}  // namespace

std::string_view to_string(CryptoClass c) { return kClassNames[static_cast<std::size_t>(c)]; }

std::optional<CryptoClass> parse_crypto_class(std::string_view name) {
  for (std::size_t i = 0; i < kClassNames.size(); ++i)
    if (kClassNames[i] == name) return static_cast<CryptoClass>(i);
  return std::nullopt;
}

std::string_view to_string(ParamKey k) { return kKeyNames[static_cast<std::size_t>(k)]; }

std::optional<ParamKey> parse_param_key(std::string_view name) {
  for (std::size_t i = 0; i < kKeyNames.size(); ++i)
    if (kKeyNames[i] == name) return static_cast<ParamKey>(i);
  return std::nullopt;
}

bool key_allowed(CryptoClass cls, ParamKey key) {
  using K = ParamKey;
  switch (cls) {
    case CryptoClass::MessageDigest: return key == K::Alg;
    case CryptoClass::SymmEncryption:
      return key == K::Alg || key == K::Mode || key == K::Pad || key == K::Key || key == K::Iv ||
             key == K::NumBlocks;
    case CryptoClass::AsymmEncryption: return key == K::Alg || key == K::Pad || key == K::Key;
    case CryptoClass::KeyDerivation: return key == K::Pass || key == K::Salt || key == K::Iter;
    case CryptoClass::RandomGenerator: return key == K::Alg || key == K::Out || key == K::Seed;
    case CryptoClass::KeyStorage: return key == K::Pass;
    case CryptoClass::SslTlsCert:
      return key == K::UrlProt || key == K::AllHost || key == K::AllCert || key == K::SetHost;
  }
  return false;
}

std::span<const std::string_view> known_apis() { return kKnownApis; }

bool is_known_api(std::string_view api) {
  return std::find(kKnownApis.begin(), kKnownApis.end(), api) != kKnownApis.end();
}

std::span<const std::uint8_t> ParamValue::octets() const {
  if (is_bytes()) return as_bytes();
  if (is_text()) {
    const auto& s = as_text();
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
  }
  return {};
}

std::string ParamValue::encode() const {
  switch (type()) {
    case Type::Text: return "t:" + escape_text(as_text());
    case Type::Bytes: return "b:" + to_hex(as_bytes());
    case Type::UInt: return "u:" + std::to_string(as_uint());
    case Type::Bool: return as_bool() ? "o:1" : "o:0";
  }
  return {};
}

const CryptoEvent* ExecutionLog::find_event(std::uint64_t seq) const {
  auto it = std::lower_bound(events.begin(), events.end(), seq,
                             [](const CryptoEvent& e, std::uint64_t s) { return e.seq < s; });
  return (it != events.end() && it->seq == seq) ? &*it : nullptr;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

std::optional<Bytes> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_digit(hex[2 * i]);
    int lo = hex_digit(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case ';': out += "\\;"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

ExecutionLog parse_log(std::string_view input, ParseMode mode, std::vector<std::string>* warnings) {
  const bool strict = mode == ParseMode::Strict;
  auto warn = [&](std::size_t line, const std::string& msg) {
    if (warnings) warnings->push_back("line " + std::to_string(line) + ": " + msg);
  };

  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < input.size();) {
    auto nl = input.find('\n', pos);
    if (nl == std::string_view::npos) nl = input.size();
    lines.push_back(input.substr(pos, nl - pos));
    pos = nl + 1;
  }

  ExecutionLog log;
  if (lines.size() < 3) fail(LogError::Kind::MalformedHeader, lines.size() + 1, "truncated header");
  if (lines[0] != kMagic) fail(LogError::Kind::MalformedHeader, 1, "expected '#crylog v1'");
  log.schema_version = std::string(kSchemaVersion);

  {
    std::string_view app = lines[1];
    if (!app.starts_with("#app ")) fail(LogError::Kind::MalformedHeader, 2, "expected '#app <app_id> <execution_id>'");
    app.remove_prefix(5);
    auto space = app.find(' ');
    if (space == std::string_view::npos) fail(LogError::Kind::MalformedHeader, 2, "missing execution id");
    auto app_id = app.substr(0, space);
    auto exec_id = app.substr(space + 1);
    if (!is_id_token(app_id) || !is_id_token(exec_id))
      fail(LogError::Kind::MalformedHeader, 2, "app and execution ids must be non-empty tokens");
    log.app_id = std::string(app_id);
    log.execution_id = std::string(exec_id);
  }
  {
    std::string_view platform = lines[2];
    if (!platform.starts_with("#platform ")) fail(LogError::Kind::MalformedHeader, 3, "expected '#platform <string>'");
    log.platform = std::string(platform.substr(10));
  }

  std::optional<std::uint64_t> last_seq;
  for (std::size_t idx = 3; idx < lines.size(); ++idx) {
    const std::size_t lineno = idx + 1;
    std::string_view line = lines[idx];
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    for (std::size_t pos = 0;;) {
      auto tab = line.find('\t', pos);
      if (tab == std::string_view::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    if (fields.size() == 3) fields.emplace_back();
    if (fields.size() != 4) fail(LogError::Kind::MalformedLine, lineno, "expected 4 tab-separated fields");

    CryptoEvent ev;
    {
      auto f = fields[0];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), ev.seq);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
        fail(LogError::Kind::MalformedLine, lineno, "invalid seq '" + std::string(f) + "'");
    }

    auto cls = parse_crypto_class(fields[1]);
    if (!cls) {
      if (strict) fail(LogError::Kind::UnknownClass, lineno, "unknown class '" + std::string(fields[1]) + "'");
      warn(lineno, "skipped event with unknown class '" + std::string(fields[1]) + "'");
      continue;
    }
    ev.cls = *cls;

    if (!is_known_api(fields[2])) {
      if (strict) fail(LogError::Kind::UnknownApi, lineno, "unknown api '" + std::string(fields[2]) + "'");
      warn(lineno, "skipped event with unknown api '" + std::string(fields[2]) + "'");
      continue;
    }
    ev.api = std::string(fields[2]);

    if (!fields[3].empty()) {
      for (auto item : split_unescaped(fields[3], ';')) {
        auto eq = item.find('=');
        if (eq == std::string_view::npos) fail(LogError::Kind::MalformedLine, lineno, "parameter lacks '='");
        auto name = item.substr(0, eq);
        auto value = decode_value(item.substr(eq + 1), lineno);
        auto key = parse_param_key(name);
        if (!key || !key_allowed(ev.cls, *key)) {
          std::string msg = !key ? "unknown parameter '" + std::string(name) + "'"
                                 : "parameter '" + std::string(name) + "' not allowed on " +
                                       std::string(to_string(ev.cls));
          if (strict) fail(LogError::Kind::IllegalKey, lineno, msg);
          warn(lineno, "dropped " + msg);
          continue;
        }
        if (!ev.params.emplace(*key, std::move(value)).second)
          fail(LogError::Kind::MalformedLine, lineno, "duplicate parameter '" + std::string(name) + "'");
      }
    }

    if (last_seq && ev.seq <= *last_seq)
      fail(LogError::Kind::NonMonotoneSeq, lineno,
           "seq " + std::to_string(ev.seq) + " does not follow " + std::to_string(*last_seq));
    last_seq = ev.seq;
    log.events.push_back(std::move(ev));
  }
  return log;
}

ExecutionLog read_log_file(const std::filesystem::path& path, ParseMode mode, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LogError(LogError::Kind::Unreadable, 0, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_log(buf.str(), mode, warnings);
}

std::string serialize_log(const ExecutionLog& log) {
  std::string out;
  out += kMagic;
  out += "\n#app " + log.app_id + " " + log.execution_id + "\n";
  out += "#platform " + log.platform + "\n";

  std::vector<const CryptoEvent*> events;
  events.reserve(log.events.size());
  for (const auto& e : log.events) events.push_back(&e);
  std::stable_sort(events.begin(), events.end(), [](auto* a, auto* b) { return a->seq < b->seq; });

  for (const auto* e : events) {
    out += std::to_string(e->seq);
    out += '\t';
    out += to_string(e->cls);
    out += '\t';
    out += e->api;
    out += '\t';
    std::vector<std::pair<std::string_view, const ParamValue*>> params;
    for (const auto& [k, v] : e->params) params.emplace_back(to_string(k), &v);
    std::sort(params.begin(), params.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (i) out += ';';
      out += params[i].first;
      out += '=';
      out += params[i].second->encode();
    }
    out += '\n';
  }
  return out;
}

std::vector<ParamValue> values_of(const ExecutionLog& log, CryptoClass cls, ParamKey key) {
  if (!key_allowed(cls, key))
    throw LogError(LogError::Kind::IllegalKeyForClass, 0,
                   std::string(to_string(key)) + " is not a parameter of " + std::string(to_string(cls)));
  std::vector<ParamValue> out;
  for (const auto& e : log.events) {
    if (e.cls != cls) continue;
    if (const auto* v = e.find(key)) out.push_back(*v);
  }
  return out;
}

}  // namespace crycheck
