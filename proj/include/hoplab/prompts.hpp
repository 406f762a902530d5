#pragma once

#include <string>
#include <vector>

#include "hoplab/dataset.hpp"

namespace hoplab::dataset {

enum class PromptMode { few_shot, chain_of_thought, single_hop };

// Prompt construction recipe. The default style carries the fixed English
// demonstrations; the synthetic pipeline substitutes closed-vocabulary demos
// so every prompt tokenizes against the toy model's vocabulary.
struct PromptStyle {
    std::vector<std::string> few_shot_demos;
    std::vector<std::string> cot_demos;
    std::vector<std::string> single_hop_demos;
    std::string few_shot_separator = "\n";
    std::string cot_separator = "\n\n";
    // {q} = question text, {t} = thoughts text (may be empty), {cloze} = cloze.
    std::string few_shot_format = "Q: {q} A:";
    std::string cot_format = "Question: {q}\nThoughts:{t}\nAnswer:";
    std::string single_hop_format = "{cloze}";
    std::string few_shot_answer_prefix = "A:";
    std::string cot_answer_prefix = "Answer:";
    int demonstrations_count = 2;
};

// Fixed 2-shot English demonstrations (spouse-of-president, Nissan 200SX).
const PromptStyle& default_prompt_style();

struct RenderedPrompt {
    std::string text;
    std::string answer_prefix;
};

// Renders the prompt for one of the instance's three question paraphrases.
// mode=few_shot ends at the few-shot answer prefix; mode=chain_of_thought
// embeds `thoughts` (exactly as given) and ends at the chain-of-thought
// answer prefix. Throws std::out_of_range for a bad question index.
RenderedPrompt render_prompt(const MultiHopInstance& instance, PromptMode mode,
                             int question_index, const PromptStyle& style = default_prompt_style(),
                             const std::string& thoughts = "");

// Cloze-continuation prompt for a single hop: demonstrations followed by the
// bare cloze; the decoded continuation is the hop answer.
RenderedPrompt render_single_hop(const SingleHop& hop,
                                 const PromptStyle& style = default_prompt_style());

// chain-of-thought prompt split around the thoughts slot, for drivers that
// generate the thoughts with the model before appending the answer prefix.
struct CotParts {
    std::string before_thoughts;  // ends right where generated thoughts start
    std::string after_thoughts;   // ends at the answer prefix
};
CotParts render_cot_parts(const MultiHopInstance& instance, int question_index,
                          const PromptStyle& style = default_prompt_style());

}  // namespace hoplab::dataset
