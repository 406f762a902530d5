#include "hoplab/corpus_ref.hpp"

#include <algorithm>
#include <set>

#include "hoplab/text.hpp"

namespace hoplab::corpus::ref {

namespace {

// Own copy of the normalization semantics: ASCII + Latin-1 + Latin-Ext-A
// lowercase fold over sanitized UTF-8. Kept separate from text::fold_case on
// purpose so a bug there cannot cancel out in the comparison tests.
std::string naive_fold(std::string_view s) {
    std::string sane = text::sanitize_utf8(s);
    std::string out;
    out.reserve(sane.size());
    size_t i = 0;
    while (i < sane.size()) {
        const auto b0 = static_cast<unsigned char>(sane[i]);
        if (b0 < 0x80) {
            out.push_back(b0 >= 'A' && b0 <= 'Z' ? static_cast<char>(b0 + 32)
                                                 : static_cast<char>(b0));
            ++i;
        } else if ((b0 & 0xE0) == 0xC0 && i + 1 < sane.size()) {
            uint32_t cp = ((b0 & 0x1Fu) << 6) | (static_cast<unsigned char>(sane[i + 1]) & 0x3Fu);
            uint32_t low = cp;
            if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) low = cp + 0x20;
            else if (cp >= 0x100 && cp <= 0x177 && cp % 2 == 0) low = cp + 1;
            else if (cp >= 0x179 && cp <= 0x17E && cp % 2 == 1) low = cp + 1;
            out.push_back(static_cast<char>(0xC0 | (low >> 6)));
            out.push_back(static_cast<char>(0x80 | (low & 0x3F)));
            i += 2;
        } else {
            // Longer sequences carry no case distinctions we fold.
            size_t len = 1;
            if ((b0 & 0xF0) == 0xE0) len = 3;
            else if ((b0 & 0xF8) == 0xF0) len = 4;
            len = std::min(len, sane.size() - i);
            out.append(sane, i, len);
            i += len;
        }
    }
    return out;
}

bool naive_word_char(uint32_t cp) {
    if (cp == 0) return false;
    if (cp < 0x80)
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp == 0xA0 || (cp >= 0x2000 && cp <= 0x206F)) return false;
    if (cp == 0xAB || cp == 0xBB || cp == 0xB7) return false;
    if (cp >= 0x3000 && cp <= 0x303F) return false;
    return true;
}

bool contains_alias(const std::string& folded_text, const std::string& folded_alias) {
    if (folded_alias.empty()) return false;
    size_t from = 0;
    while (true) {
        const size_t at = folded_text.find(folded_alias, from);
        if (at == std::string::npos) return false;
        const uint32_t before = text::codepoint_before(folded_text, at);
        const uint32_t after = text::codepoint_at(folded_text, at + folded_alias.size());
        if (!naive_word_char(before) && !naive_word_char(after)) return true;
        from = at + 1;
    }
}

}  // namespace

std::vector<std::string> match_entities_naive(const std::vector<EntityPattern>& patterns,
                                              std::string_view txt) {
    const std::string folded = naive_fold(txt);
    std::set<std::string> hits;
    for (const auto& pattern : patterns) {
        for (const auto& alias : pattern.aliases) {
            if (contains_alias(folded, naive_fold(alias))) {
                hits.insert(pattern.entity_id);
                break;
            }
        }
    }
    return {hits.begin(), hits.end()};
}

CooccurrenceStats count_cooccurrences_naive(DocumentStream& stream,
                                            const std::vector<EntityPattern>& patterns,
                                            const std::vector<EntityPair>& pairs,
                                            const std::string& corpus_id) {
    CooccurrenceStats stats;
    stats.corpus_id = corpus_id;
    for (const auto& pair : pairs) stats.pair_counts[pair];

    Document doc;
    while (stream.next(doc)) {
        ++stats.documents_scanned;
        for (const auto& paragraph : text::segment_paragraphs(doc.text)) {
            ++stats.paragraphs_scanned;
            const auto entities = match_entities_naive(patterns, paragraph);
            for (const auto& pair : pairs) {
                const bool a = std::binary_search(entities.begin(), entities.end(), pair.first);
                const bool b = std::binary_search(entities.begin(), entities.end(), pair.second);
                if (a && b) ++stats.pair_counts[pair];
            }
        }
    }
    return stats;
}

}  // namespace hoplab::corpus::ref
