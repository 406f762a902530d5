#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hoplab/corpus.hpp"

namespace hoplab::dataset {

struct KnowledgeTuple {
    std::string subject;
    std::string relation;
    std::string object;
};

// One requested single-hop edit. The template contains exactly one "{}"
// placeholder for the subject.
struct RewriteRequest {
    std::string prompt_template;
    std::string subject;
    std::string target_true;
    std::string target_new;
    std::string question;  // informational, may be empty
};

struct SingleHop {
    std::string question;
    std::string cloze;
    std::string answer;
    std::vector<std::string> answer_aliases;
};

// A multi-hop benchmark record: questions plus the edit requests and the
// before/after hop chains.
struct MultiHopInstance {
    int64_t case_id = 0;
    std::string subject;  // initial subject of the chain; may be absent in
                          // third-party data, in which case augmentation
                          // reports an error for the record
    std::vector<RewriteRequest> rewrites;
    std::vector<std::string> questions;  // exactly 3 paraphrases
    std::string answer;
    std::vector<std::string> answer_aliases;
    std::string new_answer;
    std::vector<std::string> new_answer_aliases;
    std::optional<uint64_t> shortcut_frequency;
    std::vector<SingleHop> single_hops;
    std::vector<SingleHop> new_single_hops;
};

struct RecordIssue {
    int64_t case_id = -1;     // -1 when the id itself was unreadable
    uint64_t line = 0;        // JSONL line, 0 for array input
    std::string field_path;   // e.g. "single_hops[1].cloze"
    std::string message;
};

struct LoadReport {
    std::vector<MultiHopInstance> instances;
    std::vector<RecordIssue> rejections;
    std::vector<RecordIssue> warnings;  // lenient chain-property mismatches
};

// Loads JSONL (one record per line) or a JSON array. Invalid records are
// collected into the rejection report. Throws std::runtime_error when the
// file is unreadable or no record is valid.
LoadReport load_instances(const std::string& path);
LoadReport parse_instances(const std::string& content, const std::string& origin);

// Canonical serialization: fixed key order, one record per line, LF endings.
// load(save(x)) is the identity.
std::string to_jsonl(const std::vector<MultiHopInstance>& instances);
void save_instances(const std::vector<MultiHopInstance>& instances, const std::string& path);

struct AugmentOutcome {
    std::vector<MultiHopInstance> instances;
    std::vector<RecordIssue> errors;  // per-instance missing-pair entries
};

// Sets shortcut_frequency from the (initial subject, pre-edit answer) pair
// count. Instances whose pair is missing from the stats are returned
// unaugmented with an error entry.
AugmentOutcome augment_shortcut_frequency(std::vector<MultiHopInstance> instances,
                                          const corpus::CooccurrenceStats& stats);

// Splits into (count <= tau, count > tau). Throws std::invalid_argument if
// any instance lacks shortcut_frequency.
std::pair<std::vector<MultiHopInstance>, std::vector<MultiHopInstance>> partition_by_frequency(
    const std::vector<MultiHopInstance>& instances, uint64_t tau);

}  // namespace hoplab::dataset
