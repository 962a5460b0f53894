#include "revertrisk/filters.hpp"

#include <algorithm>
#include <random>

#include "revertrisk/errors.hpp"
#include "revertrisk/util.hpp"

namespace rr::filters {

namespace {

constexpr std::uint64_t kArticleSplitSalt = 0x9d2c5680aa517393ULL;

Corpus keep_if(const Corpus& corpus, const std::function<bool(const RevisionRecord&)>& pred) {
  Corpus out;
  out.records.reserve(corpus.records.size());
  for (const RevisionRecord& r : corpus.records)
    if (pred(r)) out.records.push_back(r);
  out.recount();
  return out;
}

}  // namespace

bool NamespaceConfig::is_excluded(const std::string& wiki_db, const std::string& title) const {
  for (const std::string& p : default_prefixes)
    if (title.compare(0, p.size(), p) == 0) return true;
  auto it = per_language.find(wiki_db);
  if (it != per_language.end()) {
    for (const std::string& p : it->second)
      if (title.compare(0, p.size(), p) == 0) return true;
  }
  return false;
}

void SplitSpec::validate() const {
  if (!(train_start_ms < train_end_ms && train_end_ms <= test_end_ms))
    throw usage_error("split spec requires train_start < train_end <= test_end");
  if (!(scorer_fraction > 0.0 && scorer_fraction < 1.0))
    throw usage_error("scorer_fraction must lie in (0,1)");
}

Corpus filter_content(const Corpus& corpus, const NamespaceConfig& ns) {
  return keep_if(corpus, [&](const RevisionRecord& r) {
    return r.revision_parent_id > 0 && !ns.is_excluded(r.wiki_db, r.page_title);
  });
}

Corpus filter_users(const Corpus& corpus, UserFilterMode mode) {
  return keep_if(corpus, [&](const RevisionRecord& r) {
    if (r.user_kind == UserKind::bot) return false;
    if (mode == UserFilterMode::anonymous_only) return r.user_kind == UserKind::anonymous;
    return true;
  });
}

Corpus filter_edit_wars(const Corpus& corpus) {
  for (const RevisionRecord& r : corpus.records)
    if (!r.is_revert)
      throw data_error("filter_edit_wars requires revert annotations (revision " +
                       std::to_string(r.revision_id) + " lacks is_revert)");

  std::vector<char> drop(corpus.records.size(), 0);
  for (auto [begin, end] : corpus.page_ranges()) {
    for (std::size_t i = begin; i + 1 < end; ++i) {
      // A revert immediately followed by another revert restores a state that
      // predates it, so the earlier revert is itself reverted: drop it.
      if (*corpus.records[i].is_revert && *corpus.records[i + 1].is_revert) drop[i] = 1;
    }
  }
  Corpus out;
  out.records.reserve(corpus.records.size());
  for (std::size_t i = 0; i < corpus.records.size(); ++i)
    if (!drop[i]) out.records.push_back(corpus.records[i]);
  out.recount();
  return out;
}

std::pair<Corpus, Corpus> split_time(const Corpus& corpus, const SplitSpec& spec) {
  spec.validate();
  Corpus train, test;
  for (const RevisionRecord& r : corpus.records) {
    if (r.event_timestamp_ms >= spec.train_start_ms && r.event_timestamp_ms < spec.train_end_ms)
      train.records.push_back(r);
    else if (r.event_timestamp_ms >= spec.train_end_ms && r.event_timestamp_ms < spec.test_end_ms)
      test.records.push_back(r);
  }
  train.recount();
  test.recount();
  return {std::move(train), std::move(test)};
}

std::pair<Corpus, Corpus> split_articles(const Corpus& corpus, double scorer_fraction,
                                         std::uint64_t seed) {
  if (!(scorer_fraction > 0.0 && scorer_fraction < 1.0))
    throw usage_error("scorer_fraction must lie in (0,1)");
  Corpus scorer, classifier;
  for (const RevisionRecord& r : corpus.records) {
    std::uint64_t h = hash64(r.wiki_db + '\x1f' + r.page_title, seed ^ kArticleSplitSalt);
    if (hash_to_unit(h) < scorer_fraction)
      scorer.records.push_back(r);
    else
      classifier.records.push_back(r);
  }
  scorer.recount();
  classifier.recount();
  return {std::move(scorer), std::move(classifier)};
}

std::vector<std::size_t> single_modification_indices(const std::vector<textdiff::TextDelta>& deltas,
                                                     TextChannel channel) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    std::size_t n = 0;
    switch (channel) {
      case TextChannel::change: n = deltas[i].changes.size(); break;
      case TextChannel::insert: n = deltas[i].inserts.size(); break;
      case TextChannel::remove: n = deltas[i].removes.size(); break;
      case TextChannel::title: throw usage_error("single_modification_filter: title has no units");
    }
    if (n == 1) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> undersample_balance(const std::vector<int>& labels, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty())
    throw data_error("undersample_balance requires both classes present");

  std::vector<std::size_t>& majority = pos.size() > neg.size() ? pos : neg;
  std::size_t target = std::min(pos.size(), neg.size());
  std::mt19937_64 rng(seed);
  std::shuffle(majority.begin(), majority.end(), rng);
  majority.resize(target);

  std::vector<std::size_t> keep;
  keep.reserve(2 * target);
  keep.insert(keep.end(), pos.begin(), pos.end());
  keep.insert(keep.end(), neg.begin(), neg.end());
  std::sort(keep.begin(), keep.end());
  return keep;
}

}  // namespace rr::filters
