#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace parlalign::unicode {

// Decodes UTF-8; malformed sequences decode to U+FFFD one byte at a time.
std::u32string decode(std::string_view utf8);
void decode_into(std::string_view utf8, std::u32string& out);

void append_utf8(std::string& out, char32_t cp);
std::string encode(std::u32string_view cps);

// True iff the bytes are well-formed UTF-8.
bool is_valid_utf8(std::string_view bytes);

std::size_t codepoint_count(std::string_view utf8);

bool is_whitespace(char32_t cp);
// Unicode general category P* (Pc, Pd, Ps, Pe, Pi, Pf, Po).
bool is_punctuation(char32_t cp);
// Simple (1:1) default case folding.
char32_t fold(char32_t cp);

std::string fold_case(std::string_view utf8);

// Splits on Unicode whitespace; no empty pieces.
std::vector<std::string_view> split_whitespace(std::string_view utf8);

// Collapses each maximal whitespace run to one ASCII space and trims both ends.
std::string collapse_whitespace(std::string_view utf8);

}  // namespace parlalign::unicode
