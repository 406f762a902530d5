#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hoplab::text {

// Replaces invalid UTF-8 byte sequences with U+FFFD. Valid input is returned
// unchanged (single pass, no allocation unless a repair is needed).
std::string sanitize_utf8(std::string_view s);

// Lowercases ASCII plus Latin-1/Latin-Extended-A letters. Input must be valid
// UTF-8 (run sanitize_utf8 first on untrusted bytes). Other codepoints pass
// through untouched; composed/decomposed forms are treated as distinct, so
// callers should feed NFC text (Wikipedia dumps already are).
std::string fold_case(std::string_view s);

// Word character test used for token-boundary checks: ASCII alphanumerics and
// any codepoint >= 0x80 that is not a common Unicode space or punctuation
// mark. Digits count as word characters.
bool is_word_char(uint32_t cp);

// Decodes the codepoint ending at byte offset `end` (exclusive). Returns 0
// when end == 0. Assumes valid UTF-8.
uint32_t codepoint_before(std::string_view s, size_t end);
// Decodes the codepoint starting at byte offset `pos`. Returns 0 at the end.
uint32_t codepoint_at(std::string_view s, size_t pos);

// Splits a document into paragraphs: maximal runs of lines separated by at
// least one blank (empty or whitespace-only) line. Paragraph text keeps its
// internal newlines; separators are dropped. Never yields an empty paragraph.
std::vector<std::string> segment_paragraphs(std::string_view document);

// Whitespace word tokenizer where '\n' is its own token. Used by the toy
// language model's closed vocabulary.
std::vector<std::string> word_tokens(std::string_view s);

}  // namespace hoplab::text
