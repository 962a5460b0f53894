#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "revertrisk/revision.hpp"
#include "revertrisk/textdiff.hpp"
#include "revertrisk/textscore_types.hpp"

namespace rr::textscore {

struct ScorerHyperparams {
  int hash_bits = 18;
  int ngram_min = 1;
  int ngram_max = 3;
  int epochs = 5;
  double learning_rate = 0.1;  // decays as lr / sqrt(t)

  void validate() const;
};

// Pre-sigmoid margin and post-sigmoid probability. The title channel is a
// clamped regression: raw == probability.
struct ChannelScore {
  double raw = 0.0;
  double probability = 0.5;
};

struct PoolBlock {
  double mean_raw = 0.0;
  double max_raw = 0.0;
  double mean_prob = 0.0;
  double max_prob = 0.0;
  std::size_t count = 0;
};

struct PooledTextFeatures {
  std::optional<PoolBlock> change;
  std::optional<PoolBlock> insert;
  std::optional<PoolBlock> remove;
  double title_score = 0.0;
};

// Hashed character n-gram sparse features: index -> weight, L2-normalized.
// The change channel hashes old-side grams into block 0 and new-side grams
// into block 1.
using SparseVec = std::vector<std::pair<std::uint32_t, float>>;

SparseVec featurize_text(TextChannel channel, const ChannelUnit& unit,
                         const ScorerHyperparams& hp = {});

// Per-channel scorer contract shared by the trained n-gram models and the
// remote adapter.
class TextScorer {
 public:
  virtual ~TextScorer() = default;
  virtual TextChannel channel() const = 0;
  virtual std::string kind() const = 0;
  // One score per unit, in input order.
  virtual std::vector<ChannelScore> score(const std::vector<ChannelUnit>& units) const = 0;
  // Which corpus trained the scorer ("all" or "anonymous_only"); remote
  // scorers report what the endpoint declares.
  virtual std::string training_mode() const = 0;

  void save(const std::string& path) const;
  virtual std::string to_json_string() const = 0;
};

std::unique_ptr<TextScorer> load_scorer(const std::string& path);
std::unique_ptr<TextScorer> scorer_from_json_string(const std::string& payload);

class NgramScorer final : public TextScorer {
 public:
  NgramScorer(TextChannel channel, ScorerHyperparams hp, std::string training_mode);

  TextChannel channel() const override { return channel_; }
  std::string kind() const override { return "ngram"; }
  std::string training_mode() const override { return training_mode_; }
  std::vector<ChannelScore> score(const std::vector<ChannelUnit>& units) const override;
  std::string to_json_string() const override;

  const ScorerHyperparams& hyperparams() const { return hp_; }
  ChannelScore score_one(const ChannelUnit& unit) const;

  // Internal state, exposed for training and persistence.
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  double& bias() { return bias_; }
  double bias() const { return bias_; }
  bool is_regression() const { return channel_ == TextChannel::title; }

 private:
  TextChannel channel_;
  ScorerHyperparams hp_;
  std::string training_mode_;
  std::vector<double> weights_;
  double bias_ = 0.0;
};

// POSTs {endpoint}/score with {"channel", "units"} and expects
// {"scores": [{"raw", "probability"}, ...]}.
class RemoteScorer final : public TextScorer {
 public:
  RemoteScorer(TextChannel channel, std::string endpoint, std::string training_mode = "remote",
               double timeout_seconds = 10.0);

  TextChannel channel() const override { return channel_; }
  std::string kind() const override { return "remote"; }
  std::string training_mode() const override { return training_mode_; }
  std::vector<ChannelScore> score(const std::vector<ChannelUnit>& units) const override;
  std::string to_json_string() const override;

  const std::string& endpoint() const { return endpoint_; }

 private:
  TextChannel channel_;
  std::string endpoint_;
  std::string training_mode_;
  double timeout_seconds_;
};

// Seeded SGD on logistic loss over hashed n-grams. Requires a nonempty,
// two-class dataset (apply the single-modification filter and balancing
// upstream).
std::unique_ptr<NgramScorer> train_scorer(TextChannel channel,
                                          const std::vector<ChannelUnit>& units,
                                          const std::vector<int>& labels, std::uint64_t seed,
                                          const ScorerHyperparams& hp, std::string training_mode);

// Pages with >= min_revisions revisions mapped to their revert rate; pages
// are keyed per language.
std::map<std::pair<std::string, std::string>, double> build_title_targets(
    const Corpus& corpus, std::size_t min_revisions = 5);

// Squared-loss regression over hashed title n-grams; predictions clamped to
// [0,1]. Requires at least two distinct target values.
std::unique_ptr<NgramScorer> train_title_regressor(
    const std::map<std::pair<std::string, std::string>, double>& targets, std::uint64_t seed,
    const ScorerHyperparams& hp, std::string training_mode);

std::optional<PoolBlock> pool(const std::vector<ChannelScore>& scores);

struct ScorerSet {
  std::unique_ptr<TextScorer> change;
  std::unique_ptr<TextScorer> insert;
  std::unique_ptr<TextScorer> remove;
  std::unique_ptr<TextScorer> title;

  const TextScorer& for_channel(TextChannel c) const;
  bool complete() const { return change && insert && remove && title; }
};

// Pools the three delta channels and scores the page title.
PooledTextFeatures assemble_pooled(const ScorerSet& scorers, const textdiff::TextDelta& delta,
                                   const std::string& page_title);

std::vector<ChannelUnit> units_for_channel(const textdiff::TextDelta& delta, TextChannel channel);

}  // namespace rr::textscore
