#include "xhtml.hpp"

#include <cstdlib>

#include "parlalign/error.hpp"
#include "parlalign/unicode.hpp"

namespace parlalign::xhtml {

namespace {

bool is_name_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == ':' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

std::string local_name(std::string_view qname) {
  if (auto colon = qname.rfind(':'); colon != std::string_view::npos) qname.remove_prefix(colon + 1);
  std::string out(qname);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  return out;
}

bool decode_named(std::string_view name, std::string& out) {
  struct Entity {
    std::string_view name;
    char32_t cp;
  };
  static constexpr Entity kEntities[] = {
      {"amp", '&'},     {"lt", '<'},       {"gt", '>'},       {"quot", '"'},
      {"apos", '\''},   {"nbsp", 0xA0},    {"ndash", 0x2013}, {"mdash", 0x2014},
      {"hellip", 0x2026}, {"bdquo", 0x201E}, {"ldquo", 0x201C}, {"rdquo", 0x201D},
      {"lsquo", 0x2018}, {"rsquo", 0x2019}, {"shy", 0xAD},
  };
  for (const auto& e : kEntities) {
    if (e.name == name) {
      unicode::append_utf8(out, e.cp);
      return true;
    }
  }
  return false;
}

}  // namespace

std::string decode_entities(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size();) {
    if (raw[i] != '&') {
      out.push_back(raw[i++]);
      continue;
    }
    const std::size_t semi = raw.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(raw[i++]);
      continue;
    }
    const std::string_view body = raw.substr(i + 1, semi - i - 1);
    bool ok = false;
    if (body.size() > 1 && body[0] == '#') {
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const std::string digits(body.substr(hex ? 2 : 1));
      char* end = nullptr;
      const unsigned long cp = digits.empty() ? 0 : std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
      if (!digits.empty() && end && *end == '\0' && cp > 0 && cp <= 0x10FFFF &&
          !(cp >= 0xD800 && cp <= 0xDFFF)) {
        unicode::append_utf8(out, static_cast<char32_t>(cp));
        ok = true;
      }
    } else {
      ok = decode_named(body, out);
    }
    if (ok) {
      i = semi + 1;
    } else {
      out.push_back(raw[i++]);
    }
  }
  return out;
}

void tokenize(std::string_view doc, const std::function<void(const Token&)>& sink) {
  std::size_t i = 0;
  const std::size_t n = doc.size();
  auto starts_with = [&](std::size_t at, std::string_view s) { return doc.substr(at, s.size()) == s; };

  while (i < n) {
    if (doc[i] != '<') {
      const std::size_t lt = doc.find('<', i);
      const std::size_t end = lt == std::string_view::npos ? n : lt;
      sink(Token{TokenKind::kText, {}, decode_entities(doc.substr(i, end - i)), i});
      i = end;
      continue;
    }
    const std::size_t at = i;
    if (starts_with(i, "<!--")) {
      const std::size_t close = doc.find("-->", i + 4);
      if (close == std::string_view::npos) throw MarkupError("unterminated comment", at);
      i = close + 3;
      continue;
    }
    if (starts_with(i, "<![CDATA[")) {
      const std::size_t close = doc.find("]]>", i + 9);
      if (close == std::string_view::npos) throw MarkupError("unterminated CDATA section", at);
      sink(Token{TokenKind::kText, {}, std::string(doc.substr(i + 9, close - i - 9)), at});
      i = close + 3;
      continue;
    }
    if (starts_with(i, "<?")) {
      const std::size_t close = doc.find("?>", i + 2);
      if (close == std::string_view::npos) throw MarkupError("unterminated processing instruction", at);
      i = close + 2;
      continue;
    }
    if (starts_with(i, "<!")) {
      const std::size_t close = doc.find('>', i + 2);
      if (close == std::string_view::npos) throw MarkupError("unterminated declaration", at);
      i = close + 1;
      continue;
    }

    const bool closing = i + 1 < n && doc[i + 1] == '/';
    std::size_t p = i + (closing ? 2 : 1);
    if (p >= n || !is_name_start(doc[p])) throw MarkupError("stray '<' not starting a tag", at);
    const std::size_t name_begin = p;
    while (p < n && is_name_char(doc[p])) ++p;
    std::string name = local_name(doc.substr(name_begin, p - name_begin));

    if (closing) {
      while (p < n && is_space(doc[p])) ++p;
      if (p >= n || doc[p] != '>') throw MarkupError("malformed end tag </" + name + ">", at);
      sink(Token{TokenKind::kEndTag, std::move(name), {}, at});
      i = p + 1;
      continue;
    }

    // Attributes are parsed only far enough to skip them.
    bool empty = false;
    for (;;) {
      while (p < n && is_space(doc[p])) ++p;
      if (p >= n) throw MarkupError("unterminated tag <" + name + ">", at);
      if (doc[p] == '>') {
        ++p;
        break;
      }
      if (doc[p] == '/') {
        if (p + 1 < n && doc[p + 1] == '>') {
          empty = true;
          p += 2;
          break;
        }
        throw MarkupError("unexpected '/' in tag <" + name + ">", p);
      }
      if (!is_name_start(doc[p])) throw MarkupError("invalid attribute in tag <" + name + ">", p);
      while (p < n && is_name_char(doc[p])) ++p;
      while (p < n && is_space(doc[p])) ++p;
      if (p < n && doc[p] == '=') {
        ++p;
        while (p < n && is_space(doc[p])) ++p;
        if (p >= n) throw MarkupError("unterminated tag <" + name + ">", at);
        if (doc[p] == '"' || doc[p] == '\'') {
          const std::size_t close = doc.find(doc[p], p + 1);
          if (close == std::string_view::npos) throw MarkupError("unterminated attribute value", p);
          p = close + 1;
        } else {
          while (p < n && !is_space(doc[p]) && doc[p] != '>') ++p;
        }
      }
    }
    sink(Token{empty ? TokenKind::kEmptyTag : TokenKind::kStartTag, std::move(name), {}, at});
    i = p;
  }
}

}  // namespace parlalign::xhtml
