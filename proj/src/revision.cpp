#include "revertrisk/revision.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "revertrisk/errors.hpp"
#include "revertrisk/util.hpp"

namespace rr {

using nlohmann::json;

std::string_view user_kind_name(UserKind kind) {
  switch (kind) {
    case UserKind::anonymous: return "anonymous";
    case UserKind::registered: return "registered";
    case UserKind::bot: return "bot";
  }
  return "registered";
}

void RevisionRecord::validate() const {
  if (wiki_db.empty()) throw schema_error("wiki_db must be non-empty");
  if (revision_id <= 0) throw schema_error("revision_id must be positive");
  if (revision_parent_id < 0) throw schema_error("revision_parent_id must be nonnegative");
  if (seconds_since_previous_revision && *seconds_since_previous_revision < 0)
    throw schema_error("event_user_seconds_since_previous_revision must be nonnegative");
  if (has_texts()) {
    auto expected = static_cast<std::int64_t>(current_text->size()) -
                    static_cast<std::int64_t>(parent_text->size());
    if (revision_text_bytes_diff != expected)
      throw data_error("revision_text_bytes_diff inconsistent with texts (" +
                       std::to_string(revision_text_bytes_diff) + " vs " +
                       std::to_string(expected) + ")");
  }
}

namespace {

std::string line_prefix(std::size_t line_number) {
  return line_number ? "line " + std::to_string(line_number) + ": " : "";
}

bool json_to_bool(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) return v.get<std::int64_t>() != 0;
  if (v.is_number_unsigned()) return v.get<std::uint64_t>() != 0;
  throw schema_error("expected boolean or 0/1");
}

}  // namespace

RevisionRecord parse_revision_record(std::string_view line, std::size_t line_number) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw parse_error(line_prefix(line_number) + "malformed record line");

  auto require = [&](const char* field) -> const json& {
    auto it = j.find(field);
    if (it == j.end() || it->is_null())
      throw schema_error(line_prefix(line_number) + "missing required field: " +
                         std::string(field));
    return *it;
  };
  auto optional_field = [&](const char* field) -> const json* {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) return nullptr;
    return &*it;
  };

  RevisionRecord r;
  try {
    r.wiki_db = require("wiki_db").get<std::string>();
    r.revision_id = require("revision_id").get<std::int64_t>();
    r.revision_parent_id = require("revision_parent_id").get<std::int64_t>();
    r.page_title = require("page_title").get<std::string>();
    r.event_timestamp_ms = parse_timestamp_ms(require("event_timestamp").get<std::string>());

    if (const json* v = optional_field("event_comment")) r.event_comment = v->get<std::string>();
    if (const json* v = optional_field("event_user_text_historical"))
      r.event_user_text = v->get<std::string>();
    if (const json* v = optional_field("event_user_seconds_since_previous_revision")) {
      if (v->is_number())
        r.seconds_since_previous_revision = static_cast<std::int64_t>(v->get<double>());
    }

    bool anonymous = false, bot = false;
    if (const json* v = optional_field("is_anonymous")) anonymous = json_to_bool(*v);
    if (const json* v = optional_field("is_bot")) bot = json_to_bool(*v);
    r.user_kind = bot ? UserKind::bot : (anonymous ? UserKind::anonymous : UserKind::registered);

    if (const json* v = optional_field("is_mobile_edit")) r.flags.is_mobile_edit = json_to_bool(*v);
    if (const json* v = optional_field("is_mobile_web_edit"))
      r.flags.is_mobile_web_edit = json_to_bool(*v);
    if (const json* v = optional_field("is_visualeditor")) r.flags.is_visualeditor = json_to_bool(*v);
    if (const json* v = optional_field("is_wikieditor")) r.flags.is_wikieditor = json_to_bool(*v);
    if (const json* v = optional_field("is_mobile_app_edit"))
      r.flags.is_mobile_app_edit = json_to_bool(*v);
    if (const json* v = optional_field("is_android_app_edit"))
      r.flags.is_android_app_edit = json_to_bool(*v);
    if (const json* v = optional_field("is_ios_app_edit"))
      r.flags.is_ios_app_edit = json_to_bool(*v);

    if (const json* v = optional_field("parent_text")) r.parent_text = v->get<std::string>();
    if (const json* v = optional_field("current_text")) r.current_text = v->get<std::string>();

    if (const json* v = optional_field("revision_is_identity_reverted"))
      r.is_reverted = json_to_bool(*v);
    if (const json* v = optional_field("is_revert")) r.is_revert = json_to_bool(*v);

    if (const json* v = optional_field("revision_text_bytes_diff")) {
      r.revision_text_bytes_diff = v->get<std::int64_t>();
    } else if (r.has_texts()) {
      r.revision_text_bytes_diff = static_cast<std::int64_t>(r.current_text->size()) -
                                   static_cast<std::int64_t>(r.parent_text->size());
    } else {
      throw schema_error(line_prefix(line_number) +
                         "missing required field: revision_text_bytes_diff");
    }
  } catch (const json::exception& e) {
    throw schema_error(line_prefix(line_number) + "bad field type: " + e.what());
  }

  try {
    r.validate();
  } catch (const Error& e) {
    throw Error(e.kind(), line_prefix(line_number) + e.what());
  }
  return r;
}

std::string serialize_revision_record(const RevisionRecord& r) {
  json j;
  j["wiki_db"] = r.wiki_db;
  j["event_comment"] = r.event_comment;
  j["event_user_text_historical"] = r.event_user_text;
  if (r.seconds_since_previous_revision)
    j["event_user_seconds_since_previous_revision"] = *r.seconds_since_previous_revision;
  else
    j["event_user_seconds_since_previous_revision"] = nullptr;
  j["revision_id"] = r.revision_id;
  j["page_title"] = r.page_title;
  j["revision_text_bytes_diff"] = r.revision_text_bytes_diff;
  if (r.is_reverted) j["revision_is_identity_reverted"] = *r.is_reverted ? 1 : 0;
  j["event_timestamp"] = format_timestamp_ms(r.event_timestamp_ms);
  j["revision_parent_id"] = r.revision_parent_id;
  j["is_mobile_edit"] = r.flags.is_mobile_edit ? 1 : 0;
  j["is_mobile_web_edit"] = r.flags.is_mobile_web_edit ? 1 : 0;
  j["is_visualeditor"] = r.flags.is_visualeditor ? 1 : 0;
  j["is_wikieditor"] = r.flags.is_wikieditor ? 1 : 0;
  j["is_mobile_app_edit"] = r.flags.is_mobile_app_edit ? 1 : 0;
  j["is_android_app_edit"] = r.flags.is_android_app_edit ? 1 : 0;
  j["is_ios_app_edit"] = r.flags.is_ios_app_edit ? 1 : 0;
  j["is_anonymous"] = r.user_kind == UserKind::anonymous ? 1 : 0;
  if (r.user_kind == UserKind::bot) j["is_bot"] = 1;
  if (r.parent_text) j["parent_text"] = *r.parent_text;
  if (r.current_text) j["current_text"] = *r.current_text;
  if (r.is_revert) j["is_revert"] = *r.is_revert ? 1 : 0;
  return j.dump();
}

void Corpus::recount() {
  per_language_counts.clear();
  for (const RevisionRecord& r : records) ++per_language_counts[r.wiki_db];
}

void Corpus::normalize() {
  std::stable_sort(records.begin(), records.end(),
                   [](const RevisionRecord& a, const RevisionRecord& b) {
                     if (a.wiki_db != b.wiki_db) return a.wiki_db < b.wiki_db;
                     if (a.page_title != b.page_title) return a.page_title < b.page_title;
                     if (a.event_timestamp_ms != b.event_timestamp_ms)
                       return a.event_timestamp_ms < b.event_timestamp_ms;
                     return a.revision_id < b.revision_id;
                   });
  recount();
}

std::vector<std::pair<std::size_t, std::size_t>> Corpus::page_ranges() const {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= records.size(); ++i) {
    if (i == records.size() || records[i].wiki_db != records[begin].wiki_db ||
        records[i].page_title != records[begin].page_title) {
      ranges.emplace_back(begin, i);
      begin = i;
    }
  }
  return ranges;
}

Corpus load_corpus(const std::string& path, std::int64_t train_cap, std::int64_t test_cap,
                   CorpusRole role, LoadMode mode, LoadReport* report) {
  std::int64_t cap = role == CorpusRole::train ? train_cap : test_cap;
  if (cap <= 0) throw usage_error("per-language cap must be positive");

  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open corpus file: " + path);

  LoadReport local;
  LoadReport& rep = report ? *report : local;
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++rep.total_lines;
    try {
      corpus.records.push_back(parse_revision_record(line, line_no));
      ++rep.parsed;
    } catch (const Error& e) {
      if (mode == LoadMode::strict) throw;
      rep.skipped.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw io_error("read failure: " + path);
  if (corpus.records.empty())
    throw data_error("no valid records in corpus file: " + path);

  // Per language keep the `cap` earliest records by timestamp.
  std::unordered_map<std::string, std::vector<std::size_t>> by_lang;
  for (std::size_t i = 0; i < corpus.records.size(); ++i)
    by_lang[corpus.records[i].wiki_db].push_back(i);
  std::vector<char> keep(corpus.records.size(), 1);
  for (auto& [lang, idxs] : by_lang) {
    if (static_cast<std::int64_t>(idxs.size()) <= cap) continue;
    std::sort(idxs.begin(), idxs.end(), [&](std::size_t a, std::size_t b) {
      const auto& ra = corpus.records[a];
      const auto& rb = corpus.records[b];
      if (ra.event_timestamp_ms != rb.event_timestamp_ms)
        return ra.event_timestamp_ms < rb.event_timestamp_ms;
      return ra.revision_id < rb.revision_id;
    });
    for (std::size_t k = static_cast<std::size_t>(cap); k < idxs.size(); ++k) keep[idxs[k]] = 0;
  }
  std::size_t w = 0;
  for (std::size_t i = 0; i < corpus.records.size(); ++i)
    if (keep[i]) corpus.records[w++] = std::move(corpus.records[i]);
  corpus.records.resize(w);

  corpus.normalize();
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open corpus file for writing: " + path);
  for (const RevisionRecord& r : corpus.records) out << serialize_revision_record(r) << '\n';
  if (!out) throw io_error("write failure: " + path);
}

std::string content_digest(std::string_view wikitext) { return sha256_hex(wikitext); }

void annotate_reverts(std::span<RevisionRecord> page, int window) {
  if (page.empty()) return;
  if (window <= 0) throw usage_error("annotation window must be positive");
  for (std::size_t i = 0; i < page.size(); ++i) {
    const RevisionRecord& r = page[i];
    if (r.wiki_db != page[0].wiki_db || r.page_title != page[0].page_title)
      throw data_error("annotate_reverts requires records of a single page");
    if (i > 0 && r.event_timestamp_ms < page[i - 1].event_timestamp_ms)
      throw data_error("annotate_reverts requires timestamp-ascending history");
    if (!r.current_text)
      throw data_error("annotate_reverts requires texts: current_text absent at revision " +
                       std::to_string(r.revision_id));
  }
  if (!page[0].parent_text)
    throw data_error("annotate_reverts requires texts: parent_text absent at first revision");

  // Digest index i corresponds to the state after record i; index -1 (stored
  // at slot 0) is the state before the window.
  std::vector<std::string> digests(page.size() + 1);
  digests[0] = content_digest(*page[0].parent_text);
  for (std::size_t i = 0; i < page.size(); ++i)
    digests[i + 1] = content_digest(*page[i].current_text);

  std::vector<char> revert(page.size(), 0), reverted(page.size(), 0);
  for (std::size_t k = 0; k < page.size(); ++k) {
    std::size_t dk = k + 1;
    if (digests[dk] == digests[dk - 1]) continue;  // null edit
    // nearest earlier identical state at distance >= 2 within the window
    for (std::size_t dist = 2; dist <= static_cast<std::size_t>(window) && dist <= dk; ++dist) {
      if (digests[dk - dist] == digests[dk]) {
        revert[k] = 1;
        for (std::size_t m = dk - dist + 1; m < dk; ++m) reverted[m - 1] = 1;
        break;
      }
    }
  }
  for (std::size_t i = 0; i < page.size(); ++i) {
    page[i].is_revert = revert[i] != 0;
    page[i].is_reverted = reverted[i] != 0;
  }
}

std::size_t annotate_corpus(Corpus& corpus, int window) {
  std::size_t filled = 0;
  for (auto [begin, end] : corpus.page_ranges()) {
    bool complete = true;
    for (std::size_t i = begin; i < end; ++i) {
      if (!corpus.records[i].is_reverted || !corpus.records[i].is_revert) {
        complete = false;
        break;
      }
    }
    if (complete) continue;

    std::vector<RevisionRecord> copy(corpus.records.begin() + static_cast<std::ptrdiff_t>(begin),
                                     corpus.records.begin() + static_cast<std::ptrdiff_t>(end));
    annotate_reverts(copy, window);
    for (std::size_t i = begin; i < end; ++i) {
      RevisionRecord& dst = corpus.records[i];
      const RevisionRecord& src = copy[i - begin];
      bool touched = false;
      if (!dst.is_reverted) {
        dst.is_reverted = src.is_reverted;
        touched = true;
      }
      if (!dst.is_revert) {
        dst.is_revert = src.is_revert;
        touched = true;
      }
      if (touched) ++filled;
    }
  }
  return filled;
}

}  // namespace rr
