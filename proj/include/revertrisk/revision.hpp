#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rr {

enum class UserKind { anonymous, registered, bot };

std::string_view user_kind_name(UserKind kind);

struct InterfaceFlags {
  bool is_mobile_edit = false;
  bool is_mobile_web_edit = false;
  bool is_visualeditor = false;
  bool is_wikieditor = false;
  bool is_mobile_app_edit = false;
  bool is_android_app_edit = false;
  bool is_ios_app_edit = false;

  bool operator==(const InterfaceFlags&) const = default;
};

// One revision of one page: metadata, optional wikitext pair, revert labels.
struct RevisionRecord {
  std::string wiki_db;
  std::int64_t revision_id = 0;
  std::int64_t revision_parent_id = 0;  // 0 = page creation
  std::string page_title;
  std::int64_t event_timestamp_ms = 0;  // UTC
  std::string event_comment;
  std::string event_user_text;
  UserKind user_kind = UserKind::registered;
  std::optional<std::int64_t> seconds_since_previous_revision;
  std::int64_t revision_text_bytes_diff = 0;
  InterfaceFlags flags;
  std::optional<std::string> parent_text;
  std::optional<std::string> current_text;
  std::optional<bool> is_reverted;  // label; absent at inference time
  std::optional<bool> is_revert;

  bool is_anonymous() const { return user_kind == UserKind::anonymous; }
  bool has_texts() const { return parent_text.has_value() && current_text.has_value(); }

  // Throws schema/data errors on invariant violations.
  void validate() const;

  bool operator==(const RevisionRecord&) const = default;
};

// Parses one line of the corpus file format (JSON object per line, field
// names as in the data schema). line_number only decorates error messages.
RevisionRecord parse_revision_record(std::string_view line, std::size_t line_number = 0);

// Inverse of parse_revision_record up to field ordering.
std::string serialize_revision_record(const RevisionRecord& record);

struct Corpus {
  std::vector<RevisionRecord> records;
  std::map<std::string, std::int64_t> per_language_counts;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  // Restores the corpus invariant: records sorted by
  // (wiki_db, page_title, event_timestamp, revision_id), counts rebuilt.
  void normalize();
  void recount();

  // Half-open index ranges [begin, end) of maximal per-page runs. Requires a
  // normalized corpus.
  std::vector<std::pair<std::size_t, std::size_t>> page_ranges() const;
};

enum class LoadMode { strict, lenient };
enum class CorpusRole { train, test };

struct SkippedLine {
  std::size_t line_number;
  std::string error;
};

struct LoadReport {
  std::size_t total_lines = 0;
  std::size_t parsed = 0;
  std::vector<SkippedLine> skipped;
};

// Loads a line-delimited corpus file. Per language, at most `cap` records are
// retained, keeping the earliest by timestamp. Lenient mode skips malformed
// lines and reports them; strict mode throws on the first.
Corpus load_corpus(const std::string& path, std::int64_t train_cap, std::int64_t test_cap,
                   CorpusRole role, LoadMode mode = LoadMode::lenient,
                   LoadReport* report = nullptr);

void save_corpus(const Corpus& corpus, const std::string& path);

// SHA-256 of the exact wikitext bytes; reverts restore exact content, so no
// normalization is applied.
std::string content_digest(std::string_view wikitext);

// Identity-revert annotation over one page's ordered history. A revision r_k
// is a revert iff its content digest equals an earlier state at distance in
// [2, window]; the pre-window state (parent text of the first record) counts
// as an earlier state. Revisions strictly between the restored state and the
// revert are marked reverted. Null edits trigger nothing.
//
// Requires: same (wiki_db, page_title) on all records, timestamps ascending,
// current_text present everywhere, parent_text present on the first record.
void annotate_reverts(std::span<RevisionRecord> page_history, int window);

// Corpus-wide annotation that respects precomputed labels: pages where every
// record already carries both flags are left untouched; elsewhere computed
// values fill only the absent fields. Returns the number of records whose
// flags were filled.
std::size_t annotate_corpus(Corpus& corpus, int window);

}  // namespace rr
