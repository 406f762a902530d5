#include "hoplab/corpus.hpp"

#include <omp.h>
#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "hoplab/text.hpp"
#include "json.hpp"

namespace hoplab::corpus {

void CooccurrenceStats::merge(const CooccurrenceStats& other) {
    for (const auto& [pair, count] : other.pair_counts) pair_counts[pair] += count;
    paragraphs_scanned += other.paragraphs_scanned;
    documents_scanned += other.documents_scanned;
}

// ---------------------------------------------------------------------------
// Matcher
// ---------------------------------------------------------------------------

Matcher Matcher::build(const std::vector<EntityPattern>& patterns) {
    if (patterns.empty()) throw std::invalid_argument("matcher: no patterns given");

    Matcher m;
    m.nodes_.emplace_back();  // root

    std::set<std::string> seen_ids;
    for (const auto& pattern : patterns) {
        if (!seen_ids.insert(pattern.entity_id).second)
            throw std::invalid_argument("matcher: duplicate entity_id '" + pattern.entity_id + "'");
        const auto entity = static_cast<uint32_t>(m.entity_ids_.size());
        m.entity_ids_.push_back(pattern.entity_id);

        std::set<std::string> folded;
        for (const auto& alias : pattern.aliases) {
            std::string norm = text::fold_case(text::sanitize_utf8(alias));
            if (!norm.empty()) folded.insert(std::move(norm));
        }
        if (folded.empty())
            throw std::invalid_argument("matcher: entity '" + pattern.entity_id +
                                        "' has no usable alias");

        for (const auto& alias : folded) {
            int32_t node = 0;
            for (unsigned char c : alias) {
                auto it = m.nodes_[node].next.find(c);
                if (it == m.nodes_[node].next.end()) {
                    m.nodes_.emplace_back();
                    const auto added = static_cast<int32_t>(m.nodes_.size() - 1);
                    m.nodes_[node].next.emplace(c, added);
                    node = added;
                } else {
                    node = it->second;
                }
            }
            m.outputs_.push_back({entity, static_cast<uint32_t>(alias.size()),
                                  m.nodes_[node].output_head});
            m.nodes_[node].output_head = static_cast<int32_t>(m.outputs_.size() - 1);
        }
    }

    // Fail links by BFS; output lists are chained through the fail target so
    // every match is reported exactly once per end position.
    std::deque<int32_t> queue;
    for (auto& [c, child] : m.nodes_[0].next) {
        m.nodes_[child].fail = 0;
        queue.push_back(child);
    }
    while (!queue.empty()) {
        const int32_t node = queue.front();
        queue.pop_front();
        for (auto& [c, child] : m.nodes_[node].next) {
            int32_t f = m.nodes_[node].fail;
            while (f != 0 && !m.nodes_[f].next.count(c)) f = m.nodes_[f].fail;
            auto it = m.nodes_[f].next.find(c);
            m.nodes_[child].fail = (it != m.nodes_[f].next.end() && it->second != child)
                                       ? it->second
                                       : 0;
            // Append the fail node's outputs to the child's chain.
            if (m.nodes_[m.nodes_[child].fail].output_head >= 0) {
                int32_t tail = m.nodes_[child].output_head;
                if (tail < 0) {
                    m.nodes_[child].output_head = m.nodes_[m.nodes_[child].fail].output_head;
                } else {
                    while (m.outputs_[tail].next_output >= 0) tail = m.outputs_[tail].next_output;
                    m.outputs_[tail].next_output = m.nodes_[m.nodes_[child].fail].output_head;
                }
            }
            queue.push_back(child);
        }
    }
    return m;
}

std::optional<size_t> Matcher::entity_index(std::string_view id) const {
    for (size_t i = 0; i < entity_ids_.size(); ++i)
        if (entity_ids_[i] == id) return i;
    return std::nullopt;
}

void Matcher::match_into(std::string_view raw, std::vector<uint8_t>& hit) const {
    hit.assign(entity_ids_.size(), 0);
    const std::string folded = text::fold_case(text::sanitize_utf8(raw));
    const std::string_view s = folded;

    int32_t node = 0;
    for (size_t i = 0; i < s.size(); ++i) {
        const auto c = static_cast<unsigned char>(s[i]);
        while (node != 0 && !nodes_[node].next.count(c)) node = nodes_[node].fail;
        auto it = nodes_[node].next.find(c);
        node = (it != nodes_[node].next.end()) ? it->second : 0;

        for (int32_t o = nodes_[node].output_head; o >= 0; o = outputs_[o].next_output) {
            const Output& out = outputs_[o];
            if (hit[out.entity]) continue;
            const size_t end = i + 1;
            const size_t start = end - out.length;
            // Token boundary on both sides.
            if (text::is_word_char(text::codepoint_before(s, start))) continue;
            if (text::is_word_char(text::codepoint_at(s, end))) continue;
            hit[out.entity] = 1;
        }
    }
}

std::vector<std::string> Matcher::match_entities(std::string_view raw) const {
    std::vector<uint8_t> hit;
    match_into(raw, hit);
    std::vector<std::string> out;
    for (size_t i = 0; i < hit.size(); ++i)
        if (hit[i]) out.push_back(entity_ids_[i]);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Document streams
// ---------------------------------------------------------------------------

namespace {

// gzFile reads both gzip (by magic) and plain files, so one reader serves all
// corpus inputs.
class GzReader {
public:
    explicit GzReader(const std::string& path) : path_(path) {
        file_ = gzopen(path.c_str(), "rb");
        if (!file_) throw std::runtime_error("cannot open corpus file: " + path);
    }
    ~GzReader() {
        if (file_) gzclose(file_);
    }
    GzReader(const GzReader&) = delete;
    GzReader& operator=(const GzReader&) = delete;

    // Reads one '\n'-terminated line (terminator stripped). Returns false at EOF.
    bool read_line(std::string& line) {
        line.clear();
        char buf[4096];
        while (true) {
            if (gzgets(file_, buf, sizeof buf) == nullptr) {
                check_error();
                return !line.empty();
            }
            line += buf;
            if (!line.empty() && line.back() == '\n') {
                line.pop_back();
                return true;
            }
        }
    }

    std::string read_all() {
        std::string out;
        char buf[1 << 16];
        int n;
        while ((n = gzread(file_, buf, sizeof buf)) > 0) out.append(buf, static_cast<size_t>(n));
        if (n < 0) check_error(true);
        return out;
    }

private:
    void check_error(bool force = false) {
        int errnum = 0;
        const char* msg = gzerror(file_, &errnum);
        if (errnum != Z_OK && errnum != Z_STREAM_END)
            throw std::runtime_error("corpus read error in " + path_ + ": " +
                                     (msg ? msg : "unknown"));
        if (force) throw std::runtime_error("corpus read error in " + path_);
    }

    std::string path_;
    gzFile file_ = nullptr;
};

class TextFileStream : public DocumentStream {
public:
    explicit TextFileStream(std::string path) : path_(std::move(path)) {}
    bool next(Document& out) override {
        if (done_) return false;
        GzReader reader(path_);
        out.text = reader.read_all();
        out.source = path_;
        done_ = true;
        return true;
    }

private:
    std::string path_;
    bool done_ = false;
};

class JsonlStream : public DocumentStream {
public:
    explicit JsonlStream(std::string path) : path_(path), reader_(path) {}
    bool next(Document& out) override {
        std::string line;
        while (reader_.read_line(line)) {
            ++line_no_;
            if (line.empty()) continue;
            nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
            if (record.is_discarded() || !record.contains("text") ||
                !record["text"].is_string()) {
                throw std::runtime_error(path_ + ":" + std::to_string(line_no_) +
                                         ": JSONL record without a string \"text\" field");
            }
            out.text = record["text"].get<std::string>();
            out.source = path_ + ":" + std::to_string(line_no_);
            return true;
        }
        return false;
    }

private:
    std::string path_;
    GzReader reader_;
    uint64_t line_no_ = 0;
};

bool looks_like_jsonl(const std::string& path) {
    if (path.ends_with(".jsonl") || path.ends_with(".jsonl.gz") || path.ends_with(".ndjson"))
        return true;
    if (path.ends_with(".txt") || path.ends_with(".txt.gz")) return false;
    // Content sniff: first non-space byte '{'.
    GzReader reader(path);
    std::string line;
    while (reader.read_line(line)) {
        for (char c : line) {
            if (c == ' ' || c == '\t') continue;
            return c == '{';
        }
    }
    return false;
}

class ConcatStream : public DocumentStream {
public:
    explicit ConcatStream(std::vector<std::string> paths) : paths_(std::move(paths)) {}
    bool next(Document& out) override {
        while (true) {
            if (current_ && current_->next(out)) return true;
            if (index_ >= paths_.size()) return false;
            current_ = open_corpus_file(paths_[index_++]);
        }
    }

private:
    std::vector<std::string> paths_;
    size_t index_ = 0;
    std::unique_ptr<DocumentStream> current_;
};

class MemoryStream : public DocumentStream {
public:
    MemoryStream(std::vector<std::string> docs, std::string source)
        : docs_(std::move(docs)), source_(std::move(source)) {}
    bool next(Document& out) override {
        if (index_ >= docs_.size()) return false;
        out.text = docs_[index_];
        out.source = source_ + "#" + std::to_string(index_);
        ++index_;
        return true;
    }

private:
    std::vector<std::string> docs_;
    std::string source_;
    size_t index_ = 0;
};

}  // namespace

std::unique_ptr<DocumentStream> open_corpus_file(const std::string& path) {
    if (looks_like_jsonl(path)) return std::make_unique<JsonlStream>(path);
    return std::make_unique<TextFileStream>(path);
}

std::unique_ptr<DocumentStream> open_corpus_files(const std::vector<std::string>& paths) {
    return std::make_unique<ConcatStream>(paths);
}

std::unique_ptr<DocumentStream> memory_corpus(std::vector<std::string> documents,
                                              const std::string& source) {
    return std::make_unique<MemoryStream>(std::move(documents), source);
}

// ---------------------------------------------------------------------------
// Scanning
// ---------------------------------------------------------------------------

namespace {

struct PairTable {
    // pair slot -> (entity index a, entity index b)
    std::vector<std::pair<uint32_t, uint32_t>> slots;
    // entity index -> pair slots anchored on it (each pair anchored once)
    std::vector<std::vector<uint32_t>> anchored;
};

PairTable build_pair_table(const Matcher& matcher, const std::vector<EntityPair>& pairs) {
    PairTable table;
    table.anchored.resize(matcher.entity_ids().size());
    table.slots.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        const auto ia = matcher.entity_index(a);
        const auto ib = matcher.entity_index(b);
        if (!ia || !ib)
            throw std::invalid_argument("pair references entity unknown to the matcher: " +
                                        (ia ? b : a));
        const auto slot = static_cast<uint32_t>(table.slots.size());
        table.slots.emplace_back(static_cast<uint32_t>(*ia), static_cast<uint32_t>(*ib));
        table.anchored[*ia].push_back(slot);
    }
    return table;
}

struct ShardCounts {
    std::vector<uint64_t> pair_hits;
    uint64_t paragraphs = 0;

    explicit ShardCounts(size_t n_pairs) : pair_hits(n_pairs, 0) {}

    void scan_document(const std::string& doc, const Matcher& matcher, const PairTable& table,
                       std::vector<uint8_t>& hit_scratch) {
        for (const auto& paragraph : text::segment_paragraphs(doc)) {
            ++paragraphs;
            matcher.match_into(paragraph, hit_scratch);
            for (uint32_t e = 0; e < hit_scratch.size(); ++e) {
                if (!hit_scratch[e] || table.anchored[e].empty()) continue;
                for (uint32_t slot : table.anchored[e])
                    if (hit_scratch[table.slots[slot].second]) ++pair_hits[slot];
            }
        }
    }
};

}  // namespace

CooccurrenceStats count_cooccurrences(DocumentStream& stream, const Matcher& matcher,
                                      const std::vector<EntityPair>& pairs,
                                      const ScanOptions& options) {
    const PairTable table = build_pair_table(matcher, pairs);

    CooccurrenceStats stats;
    stats.corpus_id = options.corpus_id;
    for (const auto& pair : pairs) stats.pair_counts[pair];  // ensure entries exist

    const int workers = options.workers > 0 ? options.workers : omp_get_max_threads();
    std::vector<uint64_t> totals(pairs.size(), 0);
    uint64_t paragraphs = 0;
    uint64_t documents = 0;

    std::vector<std::string> batch;
    batch.reserve(options.batch_documents);
    Document doc;
    bool more = true;
    while (more) {
        batch.clear();
        try {
            while (batch.size() < options.batch_documents && (more = stream.next(doc)))
                batch.push_back(std::move(doc.text));
        } catch (const std::exception& e) {
            throw CorpusReadError(std::string("scan aborted: ") + e.what(),
                                  documents + batch.size(), paragraphs);
        }
        if (batch.empty()) break;

        std::vector<ShardCounts> shards(static_cast<size_t>(workers), ShardCounts(pairs.size()));
#pragma omp parallel num_threads(workers)
        {
            const int tid = omp_get_thread_num();
            std::vector<uint8_t> hit_scratch;
#pragma omp for schedule(dynamic, 4)
            for (long i = 0; i < static_cast<long>(batch.size()); ++i)
                shards[static_cast<size_t>(tid)].scan_document(batch[static_cast<size_t>(i)],
                                                               matcher, table, hit_scratch);
        }
        for (const auto& shard : shards) {
            paragraphs += shard.paragraphs;
            for (size_t p = 0; p < totals.size(); ++p) totals[p] += shard.pair_hits[p];
        }
        documents += batch.size();
    }

    for (size_t p = 0; p < pairs.size(); ++p) stats.pair_counts[pairs[p]] = totals[p];
    stats.paragraphs_scanned = paragraphs;
    stats.documents_scanned = documents;
    return stats;
}

FrequencyHistogram bucket_histogram(const CooccurrenceStats& stats,
                                    const std::vector<EntityPair>& pairs,
                                    const std::vector<uint64_t>& bucket_edges) {
    for (size_t i = 1; i < bucket_edges.size(); ++i)
        if (bucket_edges[i] <= bucket_edges[i - 1])
            throw std::invalid_argument("histogram edges must be strictly increasing");

    FrequencyHistogram hist;
    hist.bucket_edges = bucket_edges;
    hist.bucket_totals.assign(bucket_edges.size() + 1, 0);
    for (const auto& pair : pairs) {
        const auto it = stats.pair_counts.find(pair);
        const uint64_t count = it == stats.pair_counts.end() ? 0 : it->second;
        // Bucket i covers (edges[i-1], edges[i]]; the last covers (edges.back(), inf).
        size_t bucket = 0;
        while (bucket < bucket_edges.size() && count > bucket_edges[bucket]) ++bucket;
        ++hist.bucket_totals[bucket];
    }
    return hist;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("pearson: need two sequences of equal length >= 2");
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson: degenerate variance (constant sequence)");
    return sxy / std::sqrt(sxx * syy);
}

static std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

void export_stats(const CooccurrenceStats& stats, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write stats file: " + path);
    out << "entity_a,entity_b,count\n";
    for (const auto& [pair, count] : stats.pair_counts)
        out << csv_escape(pair.first) << ',' << csv_escape(pair.second) << ',' << count << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

// Minimal CSV field splitter with quote handling, enough for the stats format.
std::vector<std::string> split_csv_row(const std::string& line, const std::string& path,
                                       uint64_t line_no) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    fields.back().push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                fields.back().push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back().push_back(c);
        }
    }
    if (quoted)
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unterminated quote");
    return fields;
}

}  // namespace

CooccurrenceStats import_stats(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read stats file: " + path);

    CooccurrenceStats stats;
    std::string line;
    uint64_t line_no = 0;
    if (!std::getline(in, line))
        throw std::runtime_error(path + ":1: empty stats file (missing header)");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "entity_a,entity_b,count")
        throw std::runtime_error(path + ":1: bad header, expected entity_a,entity_b,count");

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_row(line, path, line_no);
        if (fields.size() != 3)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 3 fields, got " + std::to_string(fields.size()));
        uint64_t count = 0;
        try {
            size_t used = 0;
            count = std::stoull(fields[2], &used);
            if (used != fields[2].size()) throw std::invalid_argument("trailing bytes");
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": bad count '" + fields[2] + "'");
        }
        stats.pair_counts[{fields[0], fields[1]}] += count;
    }
    return stats;
}

}  // namespace hoplab::corpus
