/*
 * Copyright 2026 The GraphReview Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "graphreview/prompts.hpp"

#include <filesystem>

#include "graphreview/util.hpp"

namespace graphreview {

namespace {

// Template bodies are kept byte-identical to the published prompt tables,
// including trailing spaces.
constexpr const char* kScoringDataSystem =
    R"PROMPT(You are an expert reviewer. 
Evaluating a paper by its quality.
Your analysis must follow the following criteria:
{criteria}
Your answer should be about 2000 words.
Do not use bold or any other symbols.
Your answer must always begin with a scored number, and there must be no other text before it.
Do not mention any issues regarding the truncation of submitted content; truncation does not constitute part of the analysis.
The correct score for this paper is {ground_truth}.
You must give this score and provide a convincing explanation for why this score is appropriate. 
)PROMPT";

constexpr const char* kScoringUser =
    R"PROMPT(Evaluate the following paper and provide a score using the following scale:
0: strong reject
1: reject, not good enough
2: marginally below the acceptance threshold
3: marginally above the acceptance threshold
4: accept, good paper
5: strong accept, should be highlighted at the conference
Here is the paper:
```
{paper_text}
```
Please provide your score first as a single number (0-5), then explain your reasoning.
Score:
)PROMPT";

constexpr const char* kScoringSystem =
    R"PROMPT(You are an expert reviewer. 
Evaluating a paper by its quality.
Your analysis must follow the following criteria:
{criteria}
Your answer should be about 2000 words.
Do not use bold or any other symbols.
Your answer must always begin with a scored number, and there must be no other text before it.
Do not mention any issues regarding the truncation of submitted content; truncation does not constitute part of the analysis.
)PROMPT";

constexpr const char* kComparisonDataSystem =
    R"PROMPT(You are an expert reviewer. 
Analyze the following two papers separately, then indicate which one is of higher quality.
Your analysis must follow the following criteria:
{criteria}
Your answer should be about 1000 words.
Do not use bold or any other symbols.
Your answer must always begin with a choice (A or B), and there must be no other text before it.
Do not mention any issues regarding the truncation of submitted content; truncation does not constitute part of the analysis.
The correct choice is {ground_truth}.
You must output this choice and provide a convincing explanation for why this choice is appropriate.
)PROMPT";

constexpr const char* kComparisonUser =
    R"PROMPT(Compare the following two papers and decide which one is better in quality.
Paper A:
```
{paper_text_a}
```
Paper B:
```
{paper_text_b}
```
Please provide your choice first as a single letter (A or B), then explain your reasoning.
Choice: 
)PROMPT";

constexpr const char* kComparisonSystem =
    R"PROMPT(You are an expert reviewer. 
Analyze the following two papers separately, then indicate which one is of higher quality.
Your analysis must follow the following criteria:
{criteria}
Your answer should be about 1000 words.
Do not use bold or any other symbols.
Your answer must always begin with a choice (A or B), and there must be no other text before it.
Do not mention any issues regarding the truncation of submitted content; truncation does not constitute part of the analysis.
)PROMPT";

constexpr const char* kConsolidationUser =
    R"PROMPT(You are an expert academic reviewer and research analyst.
Your task is to produce an enhanced review of a single paper by integrating valuable comparative insights.
Instructions:
1. Use the provided `single_paper_review` as the primary foundation and preserve its core judgment unless the comparative evidence clearly justifies adjustment.
2. For each entry in `related_pairs`, briefly extract only the most relevant information from `pair_comparison`, especially comparative strengths, weaknesses, missing validations, or clearer methodological standards that are directly useful for evaluating this paper.
3. Integrate these insights naturally into the `single_paper_review`, citing the relevant literature in the merged text. Citation format: e.g. `(#0, 2025)`. Use comparisons selectively and only when they strengthen or clarify the review.
4. You must output content related to `ranking` and `decision` at first, e.g. `**Ranking:** (0/500)` and `**Decision:** Accept`. Make sure the ranking, decision, and all arguments are fully consistent with each other after revision.
5. Structure the review clearly into layered sections: first give an overall assessment, then list the most important strengths, then the most important weaknesses, and finally concrete questions/suggestions. Avoid repetition across sections.
6. The questions and suggestions proposed must all be highly practical, specific, feasible, and directly actionable for the authors to address.
7. Keep the tone professional, evidence-based, and concise. Avoid exaggerated claims or unsupported criticism.
8. Only output the merged text. Do not include any other content.
Here is all the content related to the paper:
```
{json_str}
```
The output format you need to follow:
```
**Ranking:**
**Decision:**
**Summary**:
**Advantages**:
**Disadvantages**:
**Questions**:
**Suggestions**:
```
)PROMPT";

constexpr const char* kCriteriaOptimizationUser =
    R"PROMPT(You are an expert prompt optimizer.
Your task is to optimize the {criteria} so that the language model can generate better responses.
Do not provide any information related to the output format or output requirements; analyze only the content.
The <Criteria> you provide must be structured (Use 1. 2. 3. ...), expressed clearly and accurately.
You must only return the optimized <Criteria>.
Prompt:
```
{prompt}
```
Current <Criteria> (Empty if none):
```
{criteria}
```
)PROMPT";

constexpr const char* kAnswerEvaluationUser =
    R"PROMPT(You are an expert answer evaluator.
Your task is to compare which of the two answers is of higher quality.
You must only return the character (A/B) representing the quality.
Answer A:
```
{answer_A}
```
Answer B:
```
{answer_B}
```
Better: 
)PROMPT";

}  // namespace

std::vector<ChatMessage> PromptTemplate::render(const TemplateValues& values) const {
  std::vector<ChatMessage> messages;
  if (!system.empty()) messages.push_back({"system", util::render_template(system, values)});
  messages.push_back({"user", util::render_template(user, values)});
  return messages;
}

std::string PromptTemplate::hash() const {
  return util::sha256_hex(system + std::string(kUserMarker) + user);
}

PromptTemplate parse_prompt_file(const std::string& contents) {
  const std::string marker(kUserMarker);
  if (contents.starts_with(marker)) return PromptTemplate{"", contents.substr(marker.size())};
  const auto pos = contents.find("\n" + marker);
  if (pos == std::string::npos) return PromptTemplate{"", contents};
  return PromptTemplate{contents.substr(0, pos + 1), contents.substr(pos + 1 + marker.size())};
}

PromptSet PromptSet::defaults() {
  PromptSet set;
  set.scoring = {kScoringSystem, kScoringUser};
  set.comparison = {kComparisonSystem, kComparisonUser};
  set.scoring_data = {kScoringDataSystem, kScoringUser};
  set.comparison_data = {kComparisonDataSystem, kComparisonUser};
  set.consolidation = {"", kConsolidationUser};
  set.criteria_optimization = {"", kCriteriaOptimizationUser};
  set.answer_evaluation = {"", kAnswerEvaluationUser};
  return set;
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
  PromptSet set = defaults();
  const std::pair<const char*, PromptTemplate*> slots[] = {
      {"scoring.txt", &set.scoring},
      {"comparison.txt", &set.comparison},
      {"scoring_data.txt", &set.scoring_data},
      {"comparison_data.txt", &set.comparison_data},
      {"consolidation.txt", &set.consolidation},
      {"criteria_optimization.txt", &set.criteria_optimization},
      {"answer_evaluation.txt", &set.answer_evaluation},
  };
  for (const auto& [name, slot] : slots) {
    const auto path = dir / name;
    if (std::filesystem::exists(path)) *slot = parse_prompt_file(util::read_text_file(path));
  }
  if (std::filesystem::exists(dir / "criteria.txt")) {
    set.criteria = util::read_text_file(dir / "criteria.txt");
    while (!set.criteria.empty() && set.criteria.back() == '\n') set.criteria.pop_back();
  }
  return set;
}

}  // namespace graphreview
