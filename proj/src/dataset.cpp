#include "hoplab/dataset.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hoplab::dataset {

using nlohmann::ordered_json;

namespace {

size_t count_placeholders(const std::string& tmpl) {
    size_t n = 0;
    for (size_t at = tmpl.find("{}"); at != std::string::npos; at = tmpl.find("{}", at + 2)) ++n;
    return n;
}

std::vector<std::string> string_list(const ordered_json& j) {
    std::vector<std::string> out;
    if (j.is_string()) {  // some dumps store a single alias as a bare string
        out.push_back(j.get<std::string>());
        return out;
    }
    for (const auto& item : j)
        if (item.is_string()) out.push_back(item.get<std::string>());
    return out;
}

struct FieldError {
    std::string path;
    std::string message;
};

// Throws FieldError with a json-path-ish diagnostic on schema violations.
MultiHopInstance parse_record(const ordered_json& j, std::vector<RecordIssue>& warnings,
                              uint64_t line) {
    auto require = [&](const char* key) -> const ordered_json& {
        if (!j.contains(key)) throw FieldError{key, "missing field"};
        return j.at(key);
    };

    MultiHopInstance inst;
    const auto& id = require("case_id");
    if (!id.is_number_integer()) throw FieldError{"case_id", "must be an integer"};
    inst.case_id = id.get<int64_t>();

    if (j.contains("subject")) inst.subject = j.at("subject").get<std::string>();

    const auto& rewrites = require("requested_rewrite");
    if (!rewrites.is_array() || rewrites.empty())
        throw FieldError{"requested_rewrite", "must be a non-empty array"};
    for (size_t i = 0; i < rewrites.size(); ++i) {
        const auto& r = rewrites[i];
        const std::string path = "requested_rewrite[" + std::to_string(i) + "]";
        RewriteRequest req;
        try {
            req.prompt_template = r.at("prompt").get<std::string>();
            req.subject = r.at("subject").get<std::string>();
            req.target_true = r.at("target_true").get<std::string>();
            req.target_new = r.at("target_new").get<std::string>();
        } catch (const ordered_json::exception&) {
            throw FieldError{path, "needs prompt/subject/target_true/target_new strings"};
        }
        if (r.contains("question")) req.question = r.at("question").get<std::string>();
        if (count_placeholders(req.prompt_template) != 1)
            throw FieldError{path + ".prompt", "must contain exactly one {} placeholder"};
        if (req.target_true == req.target_new)
            throw FieldError{path + ".target_new", "must differ from target_true"};
        if (req.subject.empty()) throw FieldError{path + ".subject", "must be non-empty"};
        inst.rewrites.push_back(std::move(req));
    }

    const auto& questions = require("questions");
    if (!questions.is_array() || questions.size() != 3)
        throw FieldError{"questions", "must be exactly 3 paraphrases"};
    for (size_t i = 0; i < 3; ++i) {
        if (!questions[i].is_string() || questions[i].get<std::string>().empty())
            throw FieldError{"questions[" + std::to_string(i) + "]", "must be a non-empty string"};
        inst.questions.push_back(questions[i].get<std::string>());
    }

    inst.answer = require("answer").get<std::string>();
    if (inst.answer.empty()) throw FieldError{"answer", "must be non-empty"};
    if (j.contains("answer_alias")) inst.answer_aliases = string_list(j.at("answer_alias"));
    inst.new_answer = require("new_answer").get<std::string>();
    if (inst.new_answer.empty()) throw FieldError{"new_answer", "must be non-empty"};
    if (j.contains("new_answer_alias"))
        inst.new_answer_aliases = string_list(j.at("new_answer_alias"));

    if (j.contains("shortcut_frequency")) {
        const auto& f = j.at("shortcut_frequency");
        if (!f.is_number_integer() || f.get<int64_t>() < 0)
            throw FieldError{"shortcut_frequency", "must be a non-negative integer"};
        inst.shortcut_frequency = f.get<uint64_t>();
    }

    auto parse_hops = [&](const char* key) {
        std::vector<SingleHop> hops;
        const auto& arr = require(key);
        if (!arr.is_array()) throw FieldError{key, "must be an array"};
        for (size_t i = 0; i < arr.size(); ++i) {
            const std::string path = std::string(key) + "[" + std::to_string(i) + "]";
            SingleHop hop;
            try {
                hop.question = arr[i].at("question").get<std::string>();
                hop.cloze = arr[i].at("cloze").get<std::string>();
                hop.answer = arr[i].at("answer").get<std::string>();
            } catch (const ordered_json::exception&) {
                throw FieldError{path, "needs question/cloze/answer strings"};
            }
            if (arr[i].contains("answer_alias"))
                hop.answer_aliases = string_list(arr[i].at("answer_alias"));
            if (hop.question.empty()) throw FieldError{path + ".question", "must be non-empty"};
            if (hop.cloze.empty()) throw FieldError{path + ".cloze", "must be non-empty"};
            hops.push_back(std::move(hop));
        }
        return hops;
    };
    inst.single_hops = parse_hops("single_hops");
    inst.new_single_hops = parse_hops("new_single_hops");

    if (inst.single_hops.size() != inst.new_single_hops.size())
        throw FieldError{"new_single_hops", "length must match single_hops"};
    if (inst.single_hops.size() < 2 || inst.single_hops.size() > 4)
        throw FieldError{"single_hops", "hop count must be 2, 3 or 4"};

    // Lenient chain check: hop i's answer (or an alias) should appear in hop
    // i+1's text. Surface-form drift is a warning, not a rejection.
    for (size_t i = 0; i + 1 < inst.single_hops.size(); ++i) {
        const auto& cur = inst.single_hops[i];
        const auto& nxt = inst.single_hops[i + 1];
        std::vector<std::string> forms = cur.answer_aliases;
        forms.push_back(cur.answer);
        bool linked = false;
        for (const auto& form : forms) {
            if (!form.empty() && (nxt.question.find(form) != std::string::npos ||
                                  nxt.cloze.find(form) != std::string::npos)) {
                linked = true;
                break;
            }
        }
        if (!linked)
            warnings.push_back({inst.case_id, line,
                                "single_hops[" + std::to_string(i + 1) + "]",
                                "next hop does not mention previous answer '" + cur.answer + "'"});
    }
    return inst;
}

ordered_json hop_to_json(const SingleHop& hop) {
    ordered_json j;
    j["question"] = hop.question;
    j["cloze"] = hop.cloze;
    j["answer"] = hop.answer;
    j["answer_alias"] = hop.answer_aliases;
    return j;
}

ordered_json instance_to_json(const MultiHopInstance& inst) {
    ordered_json j;
    j["case_id"] = inst.case_id;
    if (!inst.subject.empty()) j["subject"] = inst.subject;
    j["requested_rewrite"] = ordered_json::array();
    for (const auto& r : inst.rewrites) {
        ordered_json rj;
        rj["prompt"] = r.prompt_template;
        rj["target_new"] = r.target_new;
        rj["target_true"] = r.target_true;
        rj["subject"] = r.subject;
        if (!r.question.empty()) rj["question"] = r.question;
        j["requested_rewrite"].push_back(rj);
    }
    j["questions"] = inst.questions;
    j["answer"] = inst.answer;
    j["answer_alias"] = inst.answer_aliases;
    j["new_answer"] = inst.new_answer;
    j["new_answer_alias"] = inst.new_answer_aliases;
    if (inst.shortcut_frequency) j["shortcut_frequency"] = *inst.shortcut_frequency;
    j["single_hops"] = ordered_json::array();
    for (const auto& h : inst.single_hops) j["single_hops"].push_back(hop_to_json(h));
    j["new_single_hops"] = ordered_json::array();
    for (const auto& h : inst.new_single_hops) j["new_single_hops"].push_back(hop_to_json(h));
    return j;
}

void collect_record(const ordered_json& record, uint64_t line, LoadReport& report) {
    int64_t case_id = -1;
    if (record.is_object() && record.contains("case_id") &&
        record["case_id"].is_number_integer())
        case_id = record["case_id"].get<int64_t>();
    try {
        report.instances.push_back(parse_record(record, report.warnings, line));
    } catch (const FieldError& e) {
        report.rejections.push_back({case_id, line, e.path, e.message});
    } catch (const ordered_json::exception& e) {
        report.rejections.push_back({case_id, line, "", e.what()});
    }
}

}  // namespace

LoadReport parse_instances(const std::string& content, const std::string& origin) {
    LoadReport report;

    // JSON array or JSONL, decided by the first non-space byte.
    size_t first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '[') {
        ordered_json arr = ordered_json::parse(content, nullptr, false);
        if (arr.is_discarded()) throw std::runtime_error(origin + ": malformed JSON array");
        for (const auto& record : arr) collect_record(record, 0, report);
    } else {
        std::istringstream in(content);
        std::string line;
        uint64_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            ordered_json record = ordered_json::parse(line, nullptr, false);
            if (record.is_discarded()) {
                report.rejections.push_back({-1, line_no, "", "malformed JSON"});
                continue;
            }
            collect_record(record, line_no, report);
        }
    }

    if (report.instances.empty())
        throw std::runtime_error(origin + ": no valid instance records (" +
                                 std::to_string(report.rejections.size()) + " rejected)");
    return report;
}

LoadReport load_instances(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read dataset: " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_instances(content, path);
}

std::string to_jsonl(const std::vector<MultiHopInstance>& instances) {
    std::string out;
    for (const auto& inst : instances) {
        out += instance_to_json(inst).dump();
        out += '\n';
    }
    return out;
}

void save_instances(const std::vector<MultiHopInstance>& instances, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write dataset: " + path);
    out << to_jsonl(instances);
    if (!out) throw std::runtime_error("write failed: " + path);
}

AugmentOutcome augment_shortcut_frequency(std::vector<MultiHopInstance> instances,
                                          const corpus::CooccurrenceStats& stats) {
    AugmentOutcome outcome;
    for (auto& inst : instances) {
        if (inst.subject.empty()) {
            outcome.errors.push_back(
                {inst.case_id, 0, "subject", "initial subject unknown, cannot look up pair"});
        } else {
            const auto it = stats.pair_counts.find({inst.subject, inst.answer});
            if (it == stats.pair_counts.end()) {
                outcome.errors.push_back({inst.case_id, 0, "shortcut_frequency",
                                          "no count for pair (" + inst.subject + ", " +
                                              inst.answer + ")"});
            } else {
                inst.shortcut_frequency = it->second;
            }
        }
        outcome.instances.push_back(std::move(inst));
    }
    return outcome;
}

std::pair<std::vector<MultiHopInstance>, std::vector<MultiHopInstance>> partition_by_frequency(
    const std::vector<MultiHopInstance>& instances, uint64_t tau) {
    std::pair<std::vector<MultiHopInstance>, std::vector<MultiHopInstance>> out;
    for (const auto& inst : instances) {
        if (!inst.shortcut_frequency)
            throw std::invalid_argument("partition: instance " + std::to_string(inst.case_id) +
                                        " lacks shortcut_frequency");
        (*inst.shortcut_frequency <= tau ? out.first : out.second).push_back(inst);
    }
    return out;
}

}  // namespace hoplab::dataset
