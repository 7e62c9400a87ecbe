#pragma once

// Thin ICU wrapper shared by the tokenizer and the subword trainer.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace trainlab::unicode {

/// Decodes UTF-8; ill-formed sequences decode to U+FFFD so callers never fail.
std::vector<char32_t> decode(std::string_view utf8);
std::string encode(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

/// Byte offsets of code point starts, plus a final entry at utf8.size().
std::vector<std::size_t> code_point_offsets(std::string_view utf8);

bool is_punctuation(char32_t cp);  // general category P*
bool is_symbol(char32_t cp);       // S*
bool is_number(char32_t cp);       // N*
bool is_whitespace(char32_t cp);   // White_Space property

/// Full (context-free, root locale) Unicode lowercasing.
std::string to_lower(std::string_view utf8);

/// Splits on White_Space runs; no empty tokens.
std::vector<std::string> split_whitespace(std::string_view utf8);

}  // namespace trainlab::unicode
