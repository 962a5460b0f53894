#include "revertrisk/textdiff.hpp"

#include <algorithm>
#include <cstring>
#include <numeric>

#include "revertrisk/errors.hpp"
#include "revertrisk/util.hpp"

namespace rr::textdiff {

namespace {

bool is_ascii_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v';
}

bool is_unicode_space(char32_t cp) {
  if (is_ascii_space(cp)) return true;
  switch (cp) {
    case 0x00A0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_ascii_punct(char32_t cp) {
  return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) || (cp >= 0x5B && cp <= 0x60) ||
         (cp >= 0x7B && cp <= 0x7E);
}

// Covers the punctuation blocks that occur in practice in wikitext across the
// supported scripts. Anything unclassified and non-ASCII counts as Word.
bool is_unicode_punct(char32_t cp) {
  if (is_ascii_punct(cp)) return true;
  switch (cp) {
    case 0x00A1:  // inverted exclamation
    case 0x00A7:
    case 0x00AB:
    case 0x00B6:
    case 0x00B7:
    case 0x00BB:
    case 0x00BF:  // inverted question
    case 0x0589:  // Armenian full stop
    case 0x05BE:
    case 0x05C0:
    case 0x05C3:
    case 0x05C6:
    case 0x060C:  // Arabic comma
    case 0x061B:  // Arabic semicolon
    case 0x061F:  // Arabic question mark
    case 0x06D4:  // Arabic full stop
    case 0x0964:  // Devanagari danda
    case 0x0965:
    case 0x30FB:
      return true;
    default:
      break;
  }
  if (cp >= 0x1360 && cp <= 0x1368) return true;  // Ethiopic punctuation
  if (cp >= 0x2010 && cp <= 0x2027) return true;  // dashes, quotes, ellipsis
  if (cp >= 0x2030 && cp <= 0x205E) return true;  // primes, bullets, brackets
  if (cp >= 0x2E00 && cp <= 0x2E7F) return true;  // supplemental punctuation
  if (cp >= 0x3001 && cp <= 0x3003) return true;  // CJK comma / full stop
  if (cp >= 0x3008 && cp <= 0x3011) return true;
  if (cp >= 0x3014 && cp <= 0x301F) return true;
  if (cp == 0x3002) return true;
  if (cp >= 0xFF01 && cp <= 0xFF0F) return true;  // fullwidth forms
  if (cp >= 0xFF1A && cp <= 0xFF20) return true;
  if (cp >= 0xFF3B && cp <= 0xFF40) return true;
  if (cp >= 0xFF5B && cp <= 0xFF65) return true;
  if (cp >= 0xFE50 && cp <= 0xFE6B) return true;  // small form variants
  return false;
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= '0' && cp <= '9') || (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
  }
  return !is_unicode_space(cp) && !is_unicode_punct(cp) && cp != 0xFFFD;
}

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > text.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char a = text[pos + i];
    char b = prefix[i];
    if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
    if (a != b) return false;
  }
  return true;
}

// Finds the end (exclusive) of a balanced bracket construct starting at pos,
// where the opener/closer are two-char sequences. Returns npos if unbalanced.
std::size_t find_balanced(std::string_view text, std::size_t pos, std::string_view opener,
                          std::string_view closer) {
  int depth = 0;
  std::size_t i = pos;
  while (i < text.size()) {
    if (text.compare(i, opener.size(), opener) == 0) {
      ++depth;
      i += opener.size();
    } else if (text.compare(i, closer.size(), closer) == 0) {
      --depth;
      i += closer.size();
      if (depth == 0) return i;
    } else {
      ++i;
    }
  }
  return std::string_view::npos;
}

// <ref ...>...</ref> or <ref ... />, case-insensitive tag name.
std::size_t match_reference(std::string_view text, std::size_t pos) {
  if (!starts_with_ci(text, pos, "<ref")) return std::string_view::npos;
  char after = pos + 4 < text.size() ? text[pos + 4] : '\0';
  if (after != '>' && after != ' ' && after != '\t' && after != '/' && after != '\n')
    return std::string_view::npos;
  std::size_t gt = text.find('>', pos);
  if (gt == std::string_view::npos) return std::string_view::npos;
  if (gt > pos && text[gt - 1] == '/') return gt + 1;  // self-closing
  // scan for the closing tag
  std::size_t i = gt + 1;
  while (i < text.size()) {
    if (starts_with_ci(text, i, "</ref")) {
      std::size_t close = text.find('>', i);
      if (close == std::string_view::npos) return std::string_view::npos;
      return close + 1;
    }
    ++i;
  }
  return std::string_view::npos;
}

std::size_t match_heading(std::string_view text, std::size_t pos) {
  // pos is at a line start with at least "==". The heading ends at the line
  // end and the line must close with a run of '=' of length >= 2.
  std::size_t eol = text.find('\n', pos);
  std::size_t end = eol == std::string_view::npos ? text.size() : eol;
  std::size_t last = end;
  while (last > pos && (text[last - 1] == ' ' || text[last - 1] == '\t')) --last;
  std::size_t eq_end = last;
  while (eq_end > pos && text[eq_end - 1] == '=') --eq_end;
  std::size_t closing = last - eq_end;
  std::size_t opening = 0;
  while (pos + opening < end && text[pos + opening] == '=') ++opening;
  if (closing < 2 || opening < 2) return std::string_view::npos;
  if (pos + opening >= eq_end && opening + closing > end - pos)
    return std::string_view::npos;  // just a run of '='
  return end;
}

}  // namespace

std::string_view category_name(TokenCategory cat) {
  switch (cat) {
    case TokenCategory::Word: return "Word";
    case TokenCategory::Punctuation: return "Punctuation";
    case TokenCategory::Whitespace: return "Whitespace";
    case TokenCategory::Media: return "Media";
    case TokenCategory::Reference: return "Reference";
    case TokenCategory::Template: return "Template";
    case TokenCategory::Wikilink: return "Wikilink";
    case TokenCategory::ExternalLink: return "ExternalLink";
    case TokenCategory::Heading: return "Heading";
    case TokenCategory::Table: return "Table";
    case TokenCategory::Other: return "Other";
  }
  return "Other";
}

std::string_view action_name(EditAction action) {
  switch (action) {
    case EditAction::change: return "change";
    case EditAction::insert: return "insert";
    case EditAction::move: return "move";
    case EditAction::remove: return "remove";
  }
  return "change";
}

std::map<std::string, std::int64_t> ActionCounts::to_flat_map() const {
  // Fig-6 style key order: categories alphabetical, actions alphabetical
  // within each category.
  std::vector<TokenCategory> cats(kAllCategories.begin(), kAllCategories.end());
  std::sort(cats.begin(), cats.end(), [](TokenCategory a, TokenCategory b) {
    return category_name(a) < category_name(b);
  });
  std::map<std::string, std::int64_t> out;
  for (TokenCategory c : cats) {
    for (EditAction a : kAllActions) {
      out[std::string(action_name(a)) + "_" + std::string(category_name(c))] = at(a, c);
    }
  }
  return out;
}

void DiffConfig::validate() const {
  if (!(paragraph_match_threshold > 0.0 && paragraph_match_threshold <= sentence_match_threshold &&
        sentence_match_threshold < 1.0)) {
    throw usage_error("diff thresholds must satisfy 0 < tau_p <= tau_s < 1");
  }
  if (max_sentence_length == 0) throw usage_error("max_sentence_length must be positive");
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<char32_t> ua = decode_utf8(a);
  std::vector<char32_t> ub = decode_utf8(b);
  if (ua.empty()) return ub.size();
  if (ub.empty()) return ua.size();
  if (ua.size() < ub.size()) ua.swap(ub);  // keep the inner row small

  std::vector<std::size_t> row(ub.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= ua.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= ub.size(); ++j) {
      std::size_t sub = diag + (ua[i - 1] == ub[j - 1] ? 0 : 1);
      diag = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
    }
  }
  return row[ub.size()];
}

double similarity(std::string_view a, std::string_view b) {
  std::size_t la = decode_utf8(a).size();
  std::size_t lb = decode_utf8(b).size();
  std::size_t longest = std::max(la, lb);
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

std::vector<Token> tokenize_wikitext(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  bool at_line_start = true;

  auto emit = [&](std::size_t begin, std::size_t end, TokenCategory cat) {
    tokens.push_back(Token{std::string(text.substr(begin, end - begin)), cat});
    at_line_start = end > begin && text[end - 1] == '\n';
    pos = end;
  };

  while (pos < text.size()) {
    char c = text[pos];
    bool line_start = at_line_start;

    if (c == '<') {
      std::size_t end = match_reference(text, pos);
      if (end != std::string_view::npos) {
        emit(pos, end, TokenCategory::Reference);
        continue;
      }
      if (starts_with_ci(text, pos, "<ref")) {  // unmatched opener
        emit(pos, pos + 4, TokenCategory::Other);
        continue;
      }
    }
    if (c == '{' && pos + 1 < text.size() && text[pos + 1] == '{') {
      std::size_t end = find_balanced(text, pos, "{{", "}}");
      if (end != std::string_view::npos) {
        emit(pos, end, TokenCategory::Template);
      } else {
        emit(pos, pos + 2, TokenCategory::Other);
      }
      continue;
    }
    if (c == '[' && pos + 1 < text.size() && text[pos + 1] == '[') {
      std::size_t end = find_balanced(text, pos, "[[", "]]");
      if (end == std::string_view::npos) {
        emit(pos, pos + 2, TokenCategory::Other);
        continue;
      }
      bool media = starts_with_ci(text, pos + 2, "file:") || starts_with_ci(text, pos + 2, "image:");
      emit(pos, end, media ? TokenCategory::Media : TokenCategory::Wikilink);
      continue;
    }
    if (c == '{' && pos + 1 < text.size() && text[pos + 1] == '|') {
      std::size_t end = find_balanced(text, pos, "{|", "|}");
      if (end != std::string_view::npos) {
        emit(pos, end, TokenCategory::Table);
      } else {
        emit(pos, pos + 2, TokenCategory::Other);
      }
      continue;
    }
    if (c == '=' && line_start && pos + 1 < text.size() && text[pos + 1] == '=') {
      std::size_t end = match_heading(text, pos);
      if (end != std::string_view::npos) {
        emit(pos, end, TokenCategory::Heading);
        continue;
      }
    }
    if (starts_with_ci(text, pos, "http://") || starts_with_ci(text, pos, "https://")) {
      std::size_t end = pos;
      while (end < text.size()) {
        char u = text[end];
        if (is_ascii_space(static_cast<unsigned char>(u)) || u == ']' || u == '|' || u == '<' ||
            u == '>')
          break;
        ++end;
      }
      emit(pos, end, TokenCategory::ExternalLink);
      continue;
    }

    std::size_t cp_pos = pos;
    char32_t cp = next_codepoint(text, cp_pos);
    if (is_word_char(cp)) {
      std::size_t end = cp_pos;
      while (end < text.size()) {
        std::size_t next = end;
        char32_t ncp = next_codepoint(text, next);
        if (!is_word_char(ncp)) break;
        end = next;
      }
      emit(pos, end, TokenCategory::Word);
      continue;
    }
    if (is_unicode_space(cp)) {
      std::size_t end = cp_pos;
      while (end < text.size()) {
        std::size_t next = end;
        char32_t ncp = next_codepoint(text, next);
        if (!is_unicode_space(ncp)) break;
        end = next;
      }
      emit(pos, end, TokenCategory::Whitespace);
      continue;
    }
    if (is_unicode_punct(cp)) {
      emit(pos, cp_pos, TokenCategory::Punctuation);  // one mark per token
      continue;
    }
    emit(pos, cp_pos, TokenCategory::Other);
  }
  return tokens;
}

std::vector<std::string> extract_plain_paragraphs(std::string_view text) {
  // Split on blank lines first (a line of only whitespace separates).
  std::vector<std::string_view> raw;
  std::size_t start = 0;
  std::size_t i = 0;
  auto flush = [&](std::size_t end) {
    if (end > start) raw.push_back(text.substr(start, end - start));
  };
  while (i < text.size()) {
    if (text[i] == '\n') {
      std::size_t j = i + 1;
      bool blank = false;
      while (j < text.size()) {
        if (text[j] == '\n') {
          blank = true;
          ++j;
        } else if (text[j] == ' ' || text[j] == '\t' || text[j] == '\r') {
          ++j;
        } else {
          break;
        }
      }
      if (blank) {
        flush(i);
        start = j;
        i = j;
        continue;
      }
    }
    ++i;
  }
  flush(text.size());

  std::vector<std::string> out;
  for (std::string_view para : raw) {
    std::string plain;
    for (const Token& tok : tokenize_wikitext(para)) {
      switch (tok.category) {
        case TokenCategory::Reference:
        case TokenCategory::Template:
        case TokenCategory::Media:
        case TokenCategory::Table:
        case TokenCategory::Heading:
          break;  // stripped
        case TokenCategory::Wikilink: {
          std::string_view inner(tok.text);
          if (inner.size() >= 4) inner = inner.substr(2, inner.size() - 4);
          std::size_t bar = inner.rfind('|');
          if (bar != std::string_view::npos) inner = inner.substr(bar + 1);
          plain += inner;
          break;
        }
        case TokenCategory::Whitespace:
          plain += ' ';
          break;
        default:
          plain += tok.text;
          break;
      }
    }
    // collapse repeated whitespace and trim
    std::string collapsed;
    bool in_space = true;  // leading spaces dropped
    for (char ch : plain) {
      if (ch == ' ') {
        if (!in_space) collapsed += ' ';
        in_space = true;
      } else {
        collapsed += ch;
        in_space = false;
      }
    }
    while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();
    if (!collapsed.empty()) out.push_back(std::move(collapsed));
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view paragraph, std::size_t max_len) {
  static constexpr char32_t kTerminals[] = {'.', '!', '?', 0x3002, 0x061F, 0x0964, 0x1362};
  auto is_terminal = [&](char32_t cp) {
    for (char32_t t : kTerminals)
      if (cp == t) return true;
    return false;
  };

  std::vector<std::string> out;
  std::size_t pos = 0;
  std::size_t sent_start = 0;
  auto push = [&](std::size_t begin, std::size_t end) {
    std::string_view s = paragraph.substr(begin, end - begin);
    while (!s.empty() && is_ascii_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && is_ascii_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) return;
    // truncate to max_len codepoints
    std::size_t cp_count = 0;
    std::size_t byte_end = 0;
    while (byte_end < s.size() && cp_count < max_len) {
      next_codepoint(s, byte_end);
      ++cp_count;
    }
    out.emplace_back(s.substr(0, byte_end));
  };

  while (pos < paragraph.size()) {
    std::size_t cp_end = pos;
    char32_t cp = next_codepoint(paragraph, cp_end);
    if (is_terminal(cp)) {
      std::size_t look = cp_end;
      bool at_end = look >= paragraph.size();
      char32_t nxt = 0;
      if (!at_end) {
        std::size_t tmp = look;
        nxt = next_codepoint(paragraph, tmp);
      }
      if (at_end || is_unicode_space(nxt)) {
        push(sent_start, cp_end);
        sent_start = cp_end;
      }
    }
    pos = cp_end;
  }
  if (sent_start < paragraph.size()) push(sent_start, paragraph.size());
  return out;
}

namespace {

struct MatchCandidate {
  double sim;
  std::size_t left;   // index into remaining parent units
  std::size_t right;  // index into remaining current units
  // Tie keys chosen so that swapping parent/current yields the mirrored
  // matching: the unordered pair of strings is swap-invariant.
  const std::string* lo;
  const std::string* hi;
};

// Greedy descending-similarity matching of the unit lists, after consuming
// exact matches. Returns matched index pairs; unmatched indices are reported
// through the two out-vectors.
std::vector<std::pair<std::size_t, std::size_t>> greedy_match(
    const std::vector<std::string>& left, const std::vector<std::string>& right, double threshold,
    std::size_t max_cp, std::vector<std::size_t>& left_unmatched,
    std::vector<std::size_t>& right_unmatched) {
  std::vector<bool> left_used(left.size(), false);
  std::vector<bool> right_used(right.size(), false);

  // exact matches first
  for (std::size_t i = 0; i < left.size(); ++i) {
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (!right_used[j] && !left_used[i] && left[i] == right[j]) {
        left_used[i] = true;
        right_used[j] = true;
        break;
      }
    }
  }

  auto truncate_cp = [&](const std::string& s) -> std::string_view {
    std::size_t cp_count = 0, byte_end = 0;
    std::string_view v(s);
    while (byte_end < v.size() && cp_count < max_cp) {
      next_codepoint(v, byte_end);
      ++cp_count;
    }
    return v.substr(0, byte_end);
  };

  std::vector<MatchCandidate> candidates;
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (left_used[i]) continue;
    for (std::size_t j = 0; j < right.size(); ++j) {
      if (right_used[j]) continue;
      double sim = similarity(truncate_cp(left[i]), truncate_cp(right[j]));
      if (sim >= threshold) {
        const std::string* lo = &left[i];
        const std::string* hi = &right[j];
        if (*hi < *lo) std::swap(lo, hi);
        candidates.push_back({sim, i, j, lo, hi});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const MatchCandidate& a, const MatchCandidate& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    if (*a.lo != *b.lo) return *a.lo < *b.lo;
    if (*a.hi != *b.hi) return *a.hi < *b.hi;
    if (a.left != b.left) return a.left < b.left;
    return a.right < b.right;
  });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const MatchCandidate& c : candidates) {
    if (left_used[c.left] || right_used[c.right]) continue;
    left_used[c.left] = true;
    right_used[c.right] = true;
    pairs.emplace_back(c.left, c.right);
  }
  for (std::size_t i = 0; i < left.size(); ++i)
    if (!left_used[i]) left_unmatched.push_back(i);
  for (std::size_t j = 0; j < right.size(); ++j)
    if (!right_used[j]) right_unmatched.push_back(j);
  return pairs;
}

}  // namespace

TextDelta extract_delta(std::string_view parent_text, std::string_view current_text,
                        const DiffConfig& config) {
  config.validate();
  TextDelta delta;

  std::vector<std::string> parent_paras = extract_plain_paragraphs(parent_text);
  std::vector<std::string> current_paras = extract_plain_paragraphs(current_text);

  std::vector<std::size_t> removed_paras, inserted_paras;
  auto para_pairs = greedy_match(parent_paras, current_paras, config.paragraph_match_threshold,
                                 config.max_sentence_length, removed_paras, inserted_paras);

  for (std::size_t idx : removed_paras)
    for (std::string& s : split_sentences(parent_paras[idx], config.max_sentence_length))
      delta.removes.push_back(std::move(s));
  for (std::size_t idx : inserted_paras)
    for (std::string& s : split_sentences(current_paras[idx], config.max_sentence_length))
      delta.inserts.push_back(std::move(s));

  for (auto [pi, ci] : para_pairs) {
    std::vector<std::string> old_sents = split_sentences(parent_paras[pi], config.max_sentence_length);
    std::vector<std::string> new_sents = split_sentences(current_paras[ci], config.max_sentence_length);
    std::vector<std::size_t> old_unmatched, new_unmatched;
    auto sent_pairs = greedy_match(old_sents, new_sents, config.sentence_match_threshold,
                                   config.max_sentence_length, old_unmatched, new_unmatched);
    for (auto [oi, ni] : sent_pairs)
      delta.changes.emplace_back(old_sents[oi], new_sents[ni]);
    for (std::size_t oi : old_unmatched) delta.removes.push_back(old_sents[oi]);
    for (std::size_t ni : new_unmatched) delta.inserts.push_back(new_sents[ni]);
  }
  return delta;
}

ActionCounts compute_action_counts(std::string_view parent_text, std::string_view current_text,
                                   const DiffConfig& config) {
  ActionCounts out;

  std::int64_t parent_counts[11] = {};
  std::int64_t current_counts[11] = {};
  for (const Token& t : tokenize_wikitext(parent_text))
    ++parent_counts[static_cast<int>(t.category)];
  for (const Token& t : tokenize_wikitext(current_text))
    ++current_counts[static_cast<int>(t.category)];

  for (TokenCategory c : kAllCategories) {
    int ci = static_cast<int>(c);
    std::int64_t d = current_counts[ci] - parent_counts[ci];
    if (d > 0) out.at(EditAction::insert, c) = d;
    if (d < 0) out.at(EditAction::remove, c) = -d;
  }

  // change_c: changed sentence pairs with at least one differing token of
  // category c (token multisets compared per category).
  TextDelta delta = extract_delta(parent_text, current_text, config);
  for (const auto& [old_s, new_s] : delta.changes) {
    std::vector<std::string> old_by_cat[11], new_by_cat[11];
    for (const Token& t : tokenize_wikitext(old_s))
      old_by_cat[static_cast<int>(t.category)].push_back(t.text);
    for (const Token& t : tokenize_wikitext(new_s))
      new_by_cat[static_cast<int>(t.category)].push_back(t.text);
    for (TokenCategory c : kAllCategories) {
      int ci = static_cast<int>(c);
      std::sort(old_by_cat[ci].begin(), old_by_cat[ci].end());
      std::sort(new_by_cat[ci].begin(), new_by_cat[ci].end());
      if (old_by_cat[ci] != new_by_cat[ci]) ++out.at(EditAction::change, c);
    }
  }
  return out;
}

}  // namespace rr::textdiff
