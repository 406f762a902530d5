#include "hoplab/text.hpp"

#include <array>
#include <cctype>

namespace hoplab::text {

namespace {

// Returns the length of the valid UTF-8 sequence starting at s[i], or 0.
size_t utf8_seq_len(std::string_view s, size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return 1;
    size_t len = 0;
    uint32_t min_cp = 0;
    if ((b0 & 0xE0) == 0xC0) { len = 2; min_cp = 0x80; }
    else if ((b0 & 0xF0) == 0xE0) { len = 3; min_cp = 0x800; }
    else if ((b0 & 0xF8) == 0xF0) { len = 4; min_cp = 0x10000; }
    else return 0;
    if (i + len > s.size()) return 0;
    uint32_t cp = b0 & (0x7Fu >> len);
    for (size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return 0;
        cp = (cp << 6) | (b & 0x3Fu);
    }
    if (cp < min_cp) return 0;                       // overlong
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
    return len;
}

uint32_t decode_at(std::string_view s, size_t i, size_t len) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (len == 1) return b0;
    uint32_t cp = b0 & (0x7Fu >> len);
    for (size_t k = 1; k < len; ++k)
        cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3Fu);
    return cp;
}

void append_codepoint(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

uint32_t lower_codepoint(uint32_t cp) {
    if (cp < 0x80) return static_cast<uint32_t>(std::tolower(static_cast<int>(cp)));
    // Latin-1 supplement letters.
    if ((cp >= 0xC0 && cp <= 0xDE) && cp != 0xD7) return cp + 0x20;
    // Latin Extended-A: mostly alternating upper/lower pairs.
    if (cp >= 0x100 && cp <= 0x177 && (cp % 2) == 0) return cp + 1;
    if (cp >= 0x179 && cp <= 0x17E && (cp % 2) == 1) return cp + 1;
    return cp;
}

bool is_blank_line(std::string_view line) {
    for (char c : line)
        if (c != ' ' && c != '\t' && c != '\r') return false;
    return true;
}

}  // namespace

std::string sanitize_utf8(std::string_view s) {
    size_t i = 0;
    while (i < s.size()) {
        const size_t len = utf8_seq_len(s, i);
        if (len == 0) break;
        i += len;
    }
    if (i == s.size()) return std::string(s);

    std::string out;
    out.reserve(s.size() + 8);
    out.append(s.substr(0, i));
    while (i < s.size()) {
        const size_t len = utf8_seq_len(s, i);
        if (len == 0) {
            out.append("\xEF\xBF\xBD");  // U+FFFD
            ++i;
        } else {
            out.append(s.substr(i, len));
            i += len;
        }
    }
    return out;
}

std::string fold_case(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        const size_t len = utf8_seq_len(s, i);
        if (len == 0) {  // should not happen on sanitized input
            out.push_back(s[i++]);
            continue;
        }
        append_codepoint(out, lower_codepoint(decode_at(s, i, len)));
        i += len;
    }
    return out;
}

bool is_word_char(uint32_t cp) {
    if (cp < 0x80)
        return std::isalnum(static_cast<int>(cp)) != 0;
    // General punctuation, spaces, dashes and quotes commonly found in dumps.
    if (cp == 0xA0 || (cp >= 0x2000 && cp <= 0x206F)) return false;
    if (cp == 0xAB || cp == 0xBB || cp == 0xB7) return false;
    if (cp >= 0x3000 && cp <= 0x303F) return false;  // CJK punctuation
    return true;
}

uint32_t codepoint_before(std::string_view s, size_t end) {
    if (end == 0) return 0;
    size_t start = end - 1;
    while (start > 0 && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80)
        --start;
    const size_t len = utf8_seq_len(s, start);
    if (len == 0 || start + len != end) return 0xFFFD;
    return decode_at(s, start, len);
}

uint32_t codepoint_at(std::string_view s, size_t pos) {
    if (pos >= s.size()) return 0;
    const size_t len = utf8_seq_len(s, pos);
    if (len == 0) return 0xFFFD;
    return decode_at(s, pos, len);
}

std::vector<std::string> segment_paragraphs(std::string_view document) {
    std::vector<std::string> out;
    std::string current;
    size_t pos = 0;
    while (pos <= document.size()) {
        const size_t nl = document.find('\n', pos);
        const std::string_view line =
            document.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (is_blank_line(line)) {
            if (!current.empty()) {
                out.push_back(std::move(current));
                current.clear();
            }
        } else {
            if (!current.empty()) current.push_back('\n');
            std::string_view trimmed = line;
            if (!trimmed.empty() && trimmed.back() == '\r') trimmed.remove_suffix(1);
            current.append(trimmed);
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == '\n') {
            if (!cur.empty()) { out.push_back(cur); cur.clear(); }
            out.emplace_back("\n");
        } else if (c == ' ' || c == '\t' || c == '\r') {
            if (!cur.empty()) { out.push_back(cur); cur.clear(); }
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace hoplab::text
