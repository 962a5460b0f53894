#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rr::textdiff {

// Disjoint wikitext token classes. Every byte of the input belongs to exactly
// one token.
enum class TokenCategory {
  Word,
  Punctuation,
  Whitespace,
  Media,
  Reference,
  Template,
  Wikilink,
  ExternalLink,
  Heading,
  Table,
  Other,
};

constexpr std::array<TokenCategory, 11> kAllCategories = {
    TokenCategory::Word,      TokenCategory::Punctuation,  TokenCategory::Whitespace,
    TokenCategory::Media,     TokenCategory::Reference,    TokenCategory::Template,
    TokenCategory::Wikilink,  TokenCategory::ExternalLink, TokenCategory::Heading,
    TokenCategory::Table,     TokenCategory::Other,
};

std::string_view category_name(TokenCategory cat);

struct Token {
  std::string text;
  TokenCategory category;

  bool operator==(const Token&) const = default;
};

struct DiffConfig {
  double sentence_match_threshold = 0.5;   // tau_s
  double paragraph_match_threshold = 0.4;  // tau_p
  std::size_t max_sentence_length = 2000;  // codepoints

  void validate() const;  // requires 0 < tau_p <= tau_s < 1
};

// Extracted content changes for one revision.
struct TextDelta {
  std::vector<std::string> inserts;
  std::vector<std::string> removes;
  std::vector<std::pair<std::string, std::string>> changes;  // (old, new)

  bool empty() const { return inserts.empty() && removes.empty() && changes.empty(); }
};

enum class EditAction { change, insert, move, remove };
constexpr std::array<EditAction, 4> kAllActions = {EditAction::change, EditAction::insert,
                                                   EditAction::move, EditAction::remove};
std::string_view action_name(EditAction action);

// Per (action, category) counts. move_* is always zero; the upstream
// taxonomy includes it and downstream feature layouts keep the slot.
struct ActionCounts {
  std::int64_t counts[4][11] = {};

  std::int64_t& at(EditAction a, TokenCategory c) {
    return counts[static_cast<int>(a)][static_cast<int>(c)];
  }
  std::int64_t at(EditAction a, TokenCategory c) const {
    return counts[static_cast<int>(a)][static_cast<int>(c)];
  }
  // Flat "insert_Word"-style keys, category-major, actions in
  // change/insert/move/remove order within each category.
  std::map<std::string, std::int64_t> to_flat_map() const;
};

// Character-level edit distance over Unicode scalar values.
std::size_t levenshtein(std::string_view a, std::string_view b);

// 1 - levenshtein(a,b) / max(|a|,|b|), lengths in scalar values; 1 when both
// empty.
double similarity(std::string_view a, std::string_view b);

// Longest-match tokenization with precedence
// Reference > Template > Media > Table > Heading > Wikilink > ExternalLink >
// Word > Punctuation > Whitespace > Other. Unbalanced openers degrade to an
// Other token covering just the opener.
std::vector<Token> tokenize_wikitext(std::string_view text);

// Paragraphs with markup stripped: splits on blank lines, drops
// Reference/Template/Media/Table/Heading tokens, unwraps wikilink display
// text, collapses whitespace runs, drops empty results.
std::vector<std::string> extract_plain_paragraphs(std::string_view text);

// Splits after terminal marks {. ! ? U+3002 U+061F U+0964 U+1362} followed by
// whitespace or end of text. Sentences longer than max_len codepoints are
// truncated.
std::vector<std::string> split_sentences(std::string_view paragraph,
                                         std::size_t max_len = DiffConfig().max_sentence_length);

TextDelta extract_delta(std::string_view parent_text, std::string_view current_text,
                        const DiffConfig& config = {});

ActionCounts compute_action_counts(std::string_view parent_text, std::string_view current_text,
                                   const DiffConfig& config = {});

}  // namespace rr::textdiff
