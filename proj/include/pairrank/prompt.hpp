#pragma once
// The pairwise judging prompt and its renderer. The template text is the
// checked-in protocol asset; do not edit it without versioning the change,
// since cached judge responses are only comparable under one prompt.

#include <string>
#include <string_view>
#include <unordered_map>

#include "pairrank/errors.hpp"
#include "pairrank/types.hpp"

namespace pairrank {

// Placeholders use {name} syntax; {{ and }} are literal braces. Each
// placeholder occurs twice: the first occurrence is filled from the paper
// shown first, the second from the paper shown second.
inline constexpr std::string_view kPairwisePromptTemplate =
    R"(Please act as an impartial judge and evaluate the quality of the following two papers. As the area chair for a top ML conference, you can only select one paper. Start with a brief meta-review/reasoning of the pros and cons for each paper (two sentences), and then provide your choice in a binary format. Start with a brief meta-review/reasoning of the pros and cons for each paper, focusing on novelty, significance, clarity, methodology, and practical implications. Be very critical and do not be biased by what the author claimed. Finally, provide your choice in a binary format.


Please provide your analysis in JSON format.

### Paper 1:
Submission Title: {title}

```
Abstract: {abstract}

Figures Captions:
{figure_and_table_captions}

Main:
{main_content}
```


### Paper 2:
Submission Title: {title}

```
Abstract: {abstract}

Figures Captions:
{figure_and_table_captions}

Main:
{main_content}
```

Your JSON output should look like this:

{{
    "paper_1_review": "Your meta-review and reasoning for paper 1",
    "paper_2_review": "Your meta-review and reasoning for paper 2",
    "chosen_paper": "paper_1 or paper_2"
}})";

constexpr std::size_t kDefaultMainTextChars = 60000;

namespace detail {

inline std::string truncate_utf8_safe(const std::string& text,
                                      std::size_t budget) {
  if (text.size() <= budget) return text;
  std::size_t cut = budget;
  // do not split a UTF-8 sequence
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) {
    --cut;
  }
  return text.substr(0, cut);
}

}  // namespace detail

// Renders the template for one assignment. Substitution is literal: paper
// text is inserted verbatim, placeholders inside it are not re-expanded.
inline std::string render_pairwise_prompt(
    const PaperRecord& first, const PaperRecord& second,
    std::size_t main_text_chars = kDefaultMainTextChars) {
  const std::string first_main =
      detail::truncate_utf8_safe(first.main_text, main_text_chars);
  const std::string second_main =
      detail::truncate_utf8_safe(second.main_text, main_text_chars);

  auto field = [&](std::string_view name, int occurrence) -> const std::string& {
    const PaperRecord& p = occurrence == 0 ? first : second;
    if (name == "title") return p.title;
    if (name == "abstract") return p.abstract;
    if (name == "figure_and_table_captions") return p.captions;
    if (name == "main_content") return occurrence == 0 ? first_main : second_main;
    throw Error("unknown prompt placeholder: {" + std::string(name) + "}");
  };

  std::string out;
  out.reserve(kPairwisePromptTemplate.size() + first_main.size() +
              second_main.size() + first.abstract.size() +
              second.abstract.size() + 256);
  std::unordered_map<std::string_view, int> seen;
  const std::string_view t = kPairwisePromptTemplate;
  for (std::size_t i = 0; i < t.size();) {
    if (t[i] == '{') {
      if (i + 1 < t.size() && t[i + 1] == '{') {
        out += '{';
        i += 2;
        continue;
      }
      const std::size_t close = t.find('}', i);
      if (close == std::string_view::npos) {
        throw Error("unterminated placeholder in prompt template");
      }
      const std::string_view name = t.substr(i + 1, close - i - 1);
      out += field(name, seen[name]++);
      i = close + 1;
      continue;
    }
    if (t[i] == '}' && i + 1 < t.size() && t[i + 1] == '}') {
      out += '}';
      i += 2;
      continue;
    }
    out += t[i];
    ++i;
  }
  return out;
}

}  // namespace pairrank
