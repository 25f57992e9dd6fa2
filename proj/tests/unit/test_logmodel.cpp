#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "crycheck/logmodel.hpp"

using namespace crycheck;

namespace {

const std::filesystem::path kLogs = std::filesystem::path(CRYCHECK_FIXTURES) / "logs";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::string kHeader = "#crylog v1\n#app demo demo-1\n#platform test\n";

LogError::Kind error_of(const std::string& text, ParseMode mode = ParseMode::Strict) {
  try {
    parse_log(text, mode);
  } catch (const LogError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return LogError::Kind::Unreadable;
}

}  // namespace

TEST(Logmodel, ParsesSingleDigestEvent) {
  auto log = parse_log(kHeader + "0\tMessageDigest\tMessageDigest.digest\talg=t:SHA1\n");
  EXPECT_EQ(log.app_id, "demo");
  EXPECT_EQ(log.execution_id, "demo-1");
  EXPECT_EQ(log.platform, "test");
  ASSERT_EQ(log.events.size(), 1u);
  EXPECT_EQ(log.events[0].cls, CryptoClass::MessageDigest);
  ASSERT_NE(log.events[0].find(ParamKey::Alg), nullptr);
  EXPECT_EQ(*log.events[0].find(ParamKey::Alg), ParamValue::text("SHA1"));
}

TEST(Logmodel, BadHexIsReported) {
  EXPECT_EQ(error_of(kHeader + "0\tSymmEncryption\tCipher.doFinal\tkey=b:ZZ\n"), LogError::Kind::BadHexEncoding);
  EXPECT_EQ(error_of(kHeader + "0\tSymmEncryption\tCipher.doFinal\tkey=b:abc\n"), LogError::Kind::BadHexEncoding);
}

TEST(Logmodel, StructuralErrors) {
  EXPECT_EQ(error_of("#crylog v2\n#app a b\n#platform p\n"), LogError::Kind::MalformedHeader);
  EXPECT_EQ(error_of("#crylog v1\n#platform p\n"), LogError::Kind::MalformedHeader);
  EXPECT_EQ(error_of(kHeader + "0\tMessageDigest\n"), LogError::Kind::MalformedLine);
  EXPECT_EQ(error_of(kHeader + "x\tMessageDigest\tMessageDigest.digest\talg=t:SHA1\n"), LogError::Kind::MalformedLine);
  EXPECT_EQ(error_of(kHeader + "0\tMessageDigest\tMessageDigest.digest\talg=q:SHA1\n"), LogError::Kind::MalformedLine);
  EXPECT_EQ(error_of(kHeader + "0\tMessageDigest\tMessageDigest.digest\talg=t:A\n"
                               "0\tMessageDigest\tMessageDigest.digest\talg=t:B\n"),
            LogError::Kind::NonMonotoneSeq);
  EXPECT_EQ(error_of(kHeader + "0\tQuantumCrypto\tMessageDigest.digest\talg=t:A\n"), LogError::Kind::UnknownClass);
  EXPECT_EQ(error_of(kHeader + "0\tMessageDigest\tMessageDigest.hash\talg=t:A\n"), LogError::Kind::UnknownApi);
  EXPECT_EQ(error_of(kHeader + "0\tMessageDigest\tMessageDigest.digest\tsalt=b:00\n"), LogError::Kind::IllegalKey);
}

TEST(Logmodel, ErrorCarriesLineNumber) {
  try {
    parse_log(kHeader + "0\tMessageDigest\tMessageDigest.digest\talg=t:A\n1\tSymmEncryption\tCipher.doFinal\tkey=b:q\n");
    FAIL();
  } catch (const LogError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
}

TEST(Logmodel, LenientModeSkipsUnknownsWithWarnings) {
  std::vector<std::string> warnings;
  auto log = parse_log(kHeader +
                           "0\tQuantumCrypto\tQ.go\talg=t:A\n"
                           "1\tMessageDigest\tMessageDigest.digest\talg=t:MD5;salt=b:00;color=t:red\n",
                       ParseMode::Lenient, &warnings);
  ASSERT_EQ(log.events.size(), 1u);
  EXPECT_EQ(log.events[0].params.size(), 1u);
  EXPECT_EQ(warnings.size(), 3u);
}

TEST(Logmodel, EmptyLogSerializesToHeaderOnly) {
  ExecutionLog log;
  log.app_id = "demo";
  log.execution_id = "demo-1";
  log.platform = "test";
  EXPECT_EQ(serialize_log(log), kHeader);
}

TEST(Logmodel, ParamsAreEmittedAlphabetically) {
  auto log = parse_log(kHeader + "0\tKeyDerivation\tPBEKeySpec.<init>\tsalt=b:0011;iter=u:5;pass=t:x\n");
  EXPECT_EQ(serialize_log(log), kHeader + "0\tKeyDerivation\tPBEKeySpec.<init>\titer=u:5;pass=t:x;salt=b:0011\n");
}

TEST(Logmodel, FixturesRoundTripByteForByte) {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kLogs)) {
    auto text = slurp(entry.path());
    auto log = parse_log(text);
    EXPECT_EQ(serialize_log(log), text) << entry.path();
    EXPECT_EQ(parse_log(serialize_log(log)), log) << entry.path();
    ++seen;
  }
  EXPECT_GE(seen, 4);
}

TEST(Logmodel, TextEscapesSurviveRoundTrip) {
  auto log = read_log_file(kLogs / "escapes.log");
  EXPECT_EQ(log.events[0].find(ParamKey::Pass)->as_text(), "semi;colon\ttab\\back\nline");
  EXPECT_EQ(log.events[1].find(ParamKey::Iter)->as_uint(), 18446744073709551615ull);
  EXPECT_TRUE(log.events[1].find(ParamKey::Salt)->as_bytes().empty());
}

TEST(Logmodel, ValuesOfKeepsOrderAndDuplicates) {
  auto log = parse_log(kHeader +
                       "0\tSymmEncryption\tCipher.doFinal\tkey=b:01\n"
                       "4\tMessageDigest\tMessageDigest.digest\talg=t:MD5\n"
                       "5\tSymmEncryption\tCipher.doFinal\tkey=b:02\n"
                       "9\tSymmEncryption\tCipher.doFinal\tkey=b:01\n");
  auto keys = values_of(log, CryptoClass::SymmEncryption, ParamKey::Key);
  ASSERT_EQ(keys.size(), 3u);
  EXPECT_EQ(keys[0], ParamValue::bytes({1}));
  EXPECT_EQ(keys[1], ParamValue::bytes({2}));
  EXPECT_EQ(keys[2], ParamValue::bytes({1}));
  EXPECT_TRUE(values_of(log, CryptoClass::KeyDerivation, ParamKey::Salt).empty());
}

TEST(Logmodel, ValuesOfRejectsIllegalKey) {
  ExecutionLog log;
  try {
    values_of(log, CryptoClass::MessageDigest, ParamKey::Salt);
    FAIL();
  } catch (const LogError& e) {
    EXPECT_EQ(e.kind(), LogError::Kind::IllegalKeyForClass);
  }
}

TEST(Logmodel, MissingFileIsUnreadable) {
  try {
    read_log_file(kLogs / "does-not-exist.log");
    FAIL();
  } catch (const LogError& e) {
    EXPECT_EQ(e.kind(), LogError::Kind::Unreadable);
  }
}

TEST(Logmodel, HexHelpers) {
  Bytes b{0x00, 0xab, 0xff};
  EXPECT_EQ(to_hex(b), "00abff");
  EXPECT_EQ(from_hex("00ABff"), b);
  EXPECT_FALSE(from_hex("0g").has_value());
  EXPECT_EQ(known_apis().size(), 22u);
}
