#include "pitchside/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace pitchside::text {
namespace {

const icu::Normalizer2& nfc_instance() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || nfc == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *nfc;
}

bool ascii_only(std::string_view s) {
  for (unsigned char c : s) {
    if (c >= 0x80) return false;
  }
  return true;
}

bool is_word_char(UChar32 c) { return c == '_' || u_isalnum(c); }

}  // namespace

std::string fold(std::string_view utf8) {
  if (ascii_only(utf8)) {
    std::string out(utf8);
    for (char& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
  }
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  u.foldCase(U_FOLD_CASE_DEFAULT);
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString normalized = nfc_instance().normalize(u, status);
  if (U_FAILURE(status)) normalized = u;
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::optional<std::string> normalize_hashtag(std::string_view raw) {
  const auto lead = raw.find_first_not_of(" \t\r\n");
  raw.remove_prefix(lead == std::string_view::npos ? raw.size() : lead);
  if (raw.starts_with("#")) {
    raw.remove_prefix(1);
  } else if (raw.starts_with("\xEF\xBC\x83")) {  // U+FF03 FULLWIDTH NUMBER SIGN
    raw.remove_prefix(3);
  }
  std::string folded = fold(raw);
  const auto first = folded.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return std::nullopt;
  const auto last = folded.find_last_not_of(" \t\r\n");
  return folded.substr(first, last - first + 1);
}

bool contains_word(std::string_view haystack, std::string_view term) {
  if (term.empty() || term.size() > haystack.size()) return false;
  const auto* bytes = reinterpret_cast<const uint8_t*>(haystack.data());
  const auto length = static_cast<int32_t>(haystack.size());
  std::size_t pos = haystack.find(term);
  while (pos != std::string_view::npos) {
    bool left_ok = true;
    if (pos > 0) {
      int32_t i = static_cast<int32_t>(pos);
      UChar32 c;
      U8_PREV(bytes, 0, i, c);
      left_ok = !is_word_char(c);
    }
    bool right_ok = true;
    const std::size_t end = pos + term.size();
    if (end < haystack.size()) {
      int32_t i = static_cast<int32_t>(end);
      UChar32 c;
      U8_NEXT(bytes, i, length, c);
      right_ok = !is_word_char(c);
    }
    if (left_ok && right_ok) return true;
    pos = haystack.find(term, pos + 1);
  }
  return false;
}

}  // namespace pitchside::text
