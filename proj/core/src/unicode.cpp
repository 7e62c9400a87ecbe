#include "unicode.hpp"

#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

namespace trainlab::unicode {

std::vector<char32_t> decode(std::string_view utf8) {
  std::vector<char32_t> out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto len = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(s, i, len, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool err = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), err);
  if (err) {
    out += "\xEF\xBF\xBD";
    return;
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
}

std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (const auto cp : cps) {
    append_utf8(out, cp);
  }
  return out;
}

std::vector<std::size_t> code_point_offsets(std::string_view utf8) {
  std::vector<std::size_t> out;
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const auto len = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < len) {
    out.push_back(static_cast<std::size_t>(i));
    UChar32 c;
    U8_NEXT(s, i, len, c);
  }
  out.push_back(utf8.size());
  return out;
}

bool is_punctuation(char32_t cp) { return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_P_MASK) != 0; }
bool is_symbol(char32_t cp) { return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_S_MASK) != 0; }
bool is_number(char32_t cp) { return (U_GET_GC_MASK(static_cast<UChar32>(cp)) & U_GC_N_MASK) != 0; }
bool is_whitespace(char32_t cp) { return u_isUWhiteSpace(static_cast<UChar32>(cp)) != 0; }

std::string to_lower(std::string_view utf8) {
  auto ustr = icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  ustr.toLower(icu::Locale::getRoot());
  std::string out;
  ustr.toUTF8String(out);
  return out;
}

std::vector<std::string> split_whitespace(std::string_view utf8) {
  std::vector<std::string> out;
  const auto offsets = code_point_offsets(utf8);
  const auto cps = decode(utf8);
  std::size_t start = 0;
  bool in_token = false;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (is_whitespace(cps[i])) {
      if (in_token) {
        out.emplace_back(utf8.substr(start, offsets[i] - start));
        in_token = false;
      }
    } else if (!in_token) {
      start = offsets[i];
      in_token = true;
    }
  }
  if (in_token) {
    out.emplace_back(utf8.substr(start));
  }
  return out;
}

}  // namespace trainlab::unicode
