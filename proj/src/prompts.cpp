#include "hoplab/prompts.hpp"

#include <stdexcept>

namespace hoplab::dataset {

namespace {

std::string replace_all(std::string s, const std::string& what, const std::string& with) {
    for (size_t at = s.find(what); at != std::string::npos; at = s.find(what, at + with.size()))
        s.replace(at, what.size(), with);
    return s;
}

std::string join_demos(const std::vector<std::string>& demos, const std::string& sep, int count) {
    std::string out;
    const size_t n = std::min<size_t>(demos.size(), count < 0 ? 0 : static_cast<size_t>(count));
    for (size_t i = 0; i < n; ++i) {
        out += demos[i];
        out += sep;
    }
    return out;
}

}  // namespace

const PromptStyle& default_prompt_style() {
    static const PromptStyle style = [] {
        PromptStyle s;
        s.few_shot_demos = {
            "Q: Who is the spouse of the US president? A: Jill Biden",
            "Q: In which country is the company that created Nissan 200SX located? A: Japan",
        };
        s.cot_demos = {
            "Question: Who is the spouse of the US president?\n"
            "Thoughts: The US president is Joe Biden. The spouse of Joe Biden is Jill Biden.\n"
            "Answer: Jill Biden.",
            "Question: In which country is the company that created Nissan 200SX located?\n"
            "Thoughts: Nissan 200SX was created by Nissan. Nissan is located in the country of "
            "Japan.\n"
            "Answer: Japan.",
        };
        s.single_hop_demos = s.few_shot_demos;
        return s;
    }();
    return style;
}

RenderedPrompt render_prompt(const MultiHopInstance& instance, PromptMode mode,
                             int question_index, const PromptStyle& style,
                             const std::string& thoughts) {
    if (mode == PromptMode::single_hop)
        throw std::invalid_argument("single_hop mode takes a SingleHop, use render_single_hop");
    if (question_index < 0 || question_index >= static_cast<int>(instance.questions.size()))
        throw std::out_of_range("question_index out of range");
    const std::string& question = instance.questions[static_cast<size_t>(question_index)];

    RenderedPrompt out;
    if (mode == PromptMode::few_shot) {
        out.text = join_demos(style.few_shot_demos, style.few_shot_separator,
                              style.demonstrations_count);
        out.text += replace_all(style.few_shot_format, "{q}", question);
        out.answer_prefix = style.few_shot_answer_prefix;
    } else {
        out.text = join_demos(style.cot_demos, style.cot_separator, style.demonstrations_count);
        out.text += replace_all(replace_all(style.cot_format, "{q}", question), "{t}", thoughts);
        out.answer_prefix = style.cot_answer_prefix;
    }
    return out;
}

RenderedPrompt render_single_hop(const SingleHop& hop, const PromptStyle& style) {
    RenderedPrompt out;
    out.text = join_demos(style.single_hop_demos, style.few_shot_separator,
                          style.demonstrations_count);
    out.text += replace_all(style.single_hop_format, "{cloze}", hop.cloze);
    out.answer_prefix = hop.cloze;
    return out;
}

CotParts render_cot_parts(const MultiHopInstance& instance, int question_index,
                          const PromptStyle& style) {
    const auto full = render_prompt(instance, PromptMode::chain_of_thought, question_index, style,
                                    "\x01");
    const size_t at = full.text.find('\x01');
    if (at == std::string::npos)
        throw std::logic_error("cot_format lacks a {t} thoughts slot");
    return {full.text.substr(0, at), full.text.substr(at + 1)};
}

}  // namespace hoplab::dataset
