#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "revertrisk/revision.hpp"
#include "revertrisk/textdiff.hpp"
#include "revertrisk/textscore_types.hpp"

namespace rr::filters {

struct NamespaceConfig {
  // Prefixes applied to every language; per-language entries extend them.
  std::vector<std::string> default_prefixes = {"Talk:", "User:", "Wikipedia:", "File:"};
  std::map<std::string, std::vector<std::string>> per_language;

  bool is_excluded(const std::string& wiki_db, const std::string& title) const;
};

enum class UserFilterMode { all, anonymous_only };

struct SplitSpec {
  std::int64_t train_start_ms = 0;
  std::int64_t train_end_ms = 0;
  std::int64_t test_end_ms = 0;
  double scorer_fraction = 0.6;
  std::uint64_t seed = 0;

  void validate() const;
};

// Drops page creations (revision_parent_id == 0) and non-encyclopedic
// namespaces (title prefix list).
Corpus filter_content(const Corpus& corpus, const NamespaceConfig& ns = {});

// Bots always removed; anonymous_only additionally removes registered users.
Corpus filter_users(const Corpus& corpus, UserFilterMode mode);

// Drops every reverting revision that is itself reverted by the immediately
// following revision of the same page. Requires revert annotations.
Corpus filter_edit_wars(const Corpus& corpus);

// train = [train_start, train_end), test = [train_end, test_end).
std::pair<Corpus, Corpus> split_time(const Corpus& corpus, const SplitSpec& spec);

// Page-disjoint partition via seeded hash of (wiki_db, page_title); first
// element holds the scorer-training share.
std::pair<Corpus, Corpus> split_articles(const Corpus& corpus, double scorer_fraction,
                                         std::uint64_t seed);

// Indices of records whose delta has exactly one unit in the channel.
std::vector<std::size_t> single_modification_indices(const std::vector<textdiff::TextDelta>& deltas,
                                                     TextChannel channel);

// Seeded uniform downsampling of the majority class to the minority size.
// Returns the retained indices in their original order.
std::vector<std::size_t> undersample_balance(const std::vector<int>& labels, std::uint64_t seed);

}  // namespace rr::filters
