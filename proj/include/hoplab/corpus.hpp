#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hoplab::corpus {

// One entity with all of its surface forms. Aliases are matched
// case-insensitively at token boundaries.
struct EntityPattern {
    std::string entity_id;
    std::vector<std::string> aliases;
};

using EntityPair = std::pair<std::string, std::string>;

// Paragraph-level co-occurrence counts for a fixed set of entity pairs.
// Merging is plain integer addition per pair, so shard merges commute.
struct CooccurrenceStats {
    std::string corpus_id;
    std::map<EntityPair, uint64_t> pair_counts;
    uint64_t paragraphs_scanned = 0;
    uint64_t documents_scanned = 0;

    void merge(const CooccurrenceStats& other);
};

struct FrequencyHistogram {
    std::vector<uint64_t> bucket_edges;   // strictly increasing
    std::vector<uint64_t> bucket_totals;  // size = edges.size() + 1
};

// Default edges for the shortcut-frequency histogram (log-ish decades).
inline const std::vector<uint64_t> kDefaultHistogramEdges = {0, 1, 10, 100, 1000, 10000};

// Aho-Corasick automaton over case-folded alias strings, with token-boundary
// filtering. Immutable after construction; safe to share across threads.
class Matcher {
public:
    // Throws std::invalid_argument on empty input, duplicate entity_id, or a
    // pattern whose alias list is empty after normalization/dedup.
    static Matcher build(const std::vector<EntityPattern>& patterns);

    // Entity ids with at least one alias occurring in `text` as a
    // token-boundary-delimited substring (case-insensitive). Sorted, unique.
    std::vector<std::string> match_entities(std::string_view text) const;

    // Same result as a bitset over entity indices; used by the hot scan path.
    void match_into(std::string_view text, std::vector<uint8_t>& hit) const;

    const std::vector<std::string>& entity_ids() const { return entity_ids_; }
    std::optional<size_t> entity_index(std::string_view id) const;
    size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        std::map<unsigned char, int32_t> next;
        int32_t fail = 0;
        int32_t output_head = -1;  // index into outputs_, chained via next_output
    };
    struct Output {
        uint32_t entity = 0;
        uint32_t length = 0;  // pattern length in bytes (folded form)
        int32_t next_output = -1;
    };

    std::vector<Node> nodes_;
    std::vector<Output> outputs_;
    std::vector<std::string> entity_ids_;
};

// A corpus document plus provenance for error reporting.
struct Document {
    std::string text;
    std::string source;  // "path" or "path:line"
};

// Pull-based document stream. next() returns false at end of corpus and
// throws CorpusReadError on unreadable input.
class DocumentStream {
public:
    virtual ~DocumentStream() = default;
    virtual bool next(Document& out) = 0;
};

struct CorpusReadError : std::runtime_error {
    uint64_t documents_scanned;
    uint64_t paragraphs_scanned;
    CorpusReadError(const std::string& what, uint64_t docs, uint64_t paras)
        : std::runtime_error(what), documents_scanned(docs), paragraphs_scanned(paras) {}
};

// Opens one corpus file: plain text (one document per file) or JSONL with a
// "text" field (one document per line). Gzip input is detected by magic
// bytes and inflated transparently.
std::unique_ptr<DocumentStream> open_corpus_file(const std::string& path);
// Concatenation of several corpus files.
std::unique_ptr<DocumentStream> open_corpus_files(const std::vector<std::string>& paths);
// In-memory stream, mainly for tests and the synthetic pipeline.
std::unique_ptr<DocumentStream> memory_corpus(std::vector<std::string> documents,
                                              const std::string& source = "memory");

struct ScanOptions {
    int workers = 0;            // 0 = use OpenMP default
    size_t batch_documents = 256;  // documents per parallel batch
    std::string corpus_id = "corpus";
};

// Counts, for every requested pair, the number of paragraphs in which both
// entities are mentioned. A paragraph contributes at most 1 per pair.
// Documents are scanned in parallel batches; each worker owns a private
// accumulator and the final merge is deterministic integer addition.
CooccurrenceStats count_cooccurrences(DocumentStream& stream, const Matcher& matcher,
                                      const std::vector<EntityPair>& pairs,
                                      const ScanOptions& options = {});

FrequencyHistogram bucket_histogram(const CooccurrenceStats& stats,
                                    const std::vector<EntityPair>& pairs,
                                    const std::vector<uint64_t>& bucket_edges);

// Pearson correlation coefficient. Throws std::invalid_argument when fewer
// than two points are given or either sequence has zero variance.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// CSV round-trip: header `entity_a,entity_b,count`, UTF-8, LF endings, rows
// sorted by (entity_a, entity_b). import throws std::runtime_error naming the
// offending line on malformed input.
void export_stats(const CooccurrenceStats& stats, const std::string& path);
CooccurrenceStats import_stats(const std::string& path);

}  // namespace hoplab::corpus
