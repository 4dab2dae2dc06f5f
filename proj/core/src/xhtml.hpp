#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

namespace parlalign::xhtml {

enum class TokenKind { kText, kStartTag, kEndTag, kEmptyTag };

struct Token {
  TokenKind kind;
  // Lower-cased local element name (namespace prefix dropped); empty for text.
  std::string name;
  // Entity-decoded character data; empty for tags.
  std::string text;
  std::size_t offset;
};

// Streams tokens in document order. Comments, doctype and processing
// instructions are skipped; CDATA is delivered as text. Throws MarkupError
// (with the byte offset of the offending construct) when the markup cannot
// be tokenized.
void tokenize(std::string_view doc, const std::function<void(const Token&)>& sink);

std::string decode_entities(std::string_view raw);

}  // namespace parlalign::xhtml
