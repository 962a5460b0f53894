#include "revertrisk/textscore.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include <json.hpp>

#include "revertrisk/errors.hpp"
#include "revertrisk/util.hpp"

namespace rr::textscore {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGramSalt = 0x51ab3fb1c94d07e5ULL;
constexpr int kScorerSchemaVersion = 1;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void hash_grams(std::string_view text, const ScorerHyperparams& hp, std::uint32_t block_offset,
                std::unordered_map<std::uint32_t, float>& acc) {
  const std::uint32_t mask = (1u << hp.hash_bits) - 1;
  std::string lowered;
  lowered.reserve(text.size());
  for (char c : text) lowered.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);

  // codepoint boundaries
  std::vector<std::size_t> bounds;
  std::size_t pos = 0;
  bounds.push_back(0);
  std::string_view v(lowered);
  while (pos < v.size()) {
    next_codepoint(v, pos);
    bounds.push_back(pos);
  }
  std::size_t n_cp = bounds.size() - 1;
  for (int n = hp.ngram_min; n <= hp.ngram_max; ++n) {
    if (n_cp + 1 < static_cast<std::size_t>(n) + 1) break;
    for (std::size_t i = 0; i + n <= n_cp; ++i) {
      std::string_view gram = v.substr(bounds[i], bounds[i + n] - bounds[i]);
      std::uint64_t h = hash64(gram, kGramSalt);
      std::uint32_t bucket = static_cast<std::uint32_t>(h & mask) + block_offset;
      float sign = (h >> 63) ? -1.0f : 1.0f;
      acc[bucket] += sign;
    }
  }
}

}  // namespace

void ScorerHyperparams::validate() const {
  if (hash_bits < 4 || hash_bits > 26) throw usage_error("hash_bits must lie in [4,26]");
  if (ngram_min < 1 || ngram_max < ngram_min) throw usage_error("bad ngram range");
  if (epochs < 1) throw usage_error("epochs must be positive");
  if (learning_rate <= 0) throw usage_error("learning_rate must be positive");
}

std::string_view channel_name(TextChannel channel) {
  switch (channel) {
    case TextChannel::change: return "change";
    case TextChannel::insert: return "insert";
    case TextChannel::remove: return "remove";
    case TextChannel::title: return "title";
  }
  return "change";
}

TextChannel channel_from_name(std::string_view name) {
  if (name == "change") return TextChannel::change;
  if (name == "insert") return TextChannel::insert;
  if (name == "remove") return TextChannel::remove;
  if (name == "title") return TextChannel::title;
  throw usage_error("unknown text channel: " + std::string(name));
}

SparseVec featurize_text(TextChannel channel, const ChannelUnit& unit,
                         const ScorerHyperparams& hp) {
  hp.validate();
  std::unordered_map<std::uint32_t, float> acc;
  if (channel == TextChannel::change) {
    hash_grams(unit.old_text, hp, 0, acc);
    hash_grams(unit.text, hp, 1u << hp.hash_bits, acc);
  } else {
    hash_grams(unit.text, hp, 0, acc);
  }

  SparseVec vec;
  vec.reserve(acc.size());
  double norm_sq = 0.0;
  for (auto& [idx, val] : acc) {
    if (val == 0.0f) continue;  // cancelled signs
    vec.emplace_back(idx, val);
    norm_sq += static_cast<double>(val) * val;
  }
  if (norm_sq > 0.0) {
    float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
    for (auto& [idx, val] : vec) val *= inv;
  }
  std::sort(vec.begin(), vec.end());
  return vec;
}

NgramScorer::NgramScorer(TextChannel channel, ScorerHyperparams hp, std::string training_mode)
    : channel_(channel), hp_(hp), training_mode_(std::move(training_mode)) {
  hp_.validate();
  std::size_t dim = std::size_t{1} << hp_.hash_bits;
  if (channel_ == TextChannel::change) dim *= 2;
  weights_.assign(dim, 0.0);
}

ChannelScore NgramScorer::score_one(const ChannelUnit& unit) const {
  SparseVec vec = featurize_text(channel_, unit, hp_);
  double margin = bias_;
  for (auto [idx, val] : vec) margin += weights_[idx] * val;
  ChannelScore s;
  if (is_regression()) {
    double clamped = std::clamp(margin, 0.0, 1.0);
    s.raw = clamped;
    s.probability = clamped;
  } else {
    s.raw = margin;
    s.probability = sigmoid(margin);
  }
  return s;
}

std::vector<ChannelScore> NgramScorer::score(const std::vector<ChannelUnit>& units) const {
  std::vector<ChannelScore> out;
  out.reserve(units.size());
  for (const ChannelUnit& u : units) out.push_back(score_one(u));
  return out;
}

std::string NgramScorer::to_json_string() const {
  json j;
  j["schema_version"] = kScorerSchemaVersion;
  j["kind"] = "ngram";
  j["channel"] = std::string(channel_name(channel_));
  j["hash_bits"] = hp_.hash_bits;
  j["ngram_min"] = hp_.ngram_min;
  j["ngram_max"] = hp_.ngram_max;
  j["epochs"] = hp_.epochs;
  j["learning_rate"] = hp_.learning_rate;
  j["training_mode"] = training_mode_;
  j["bias"] = bias_;
  json idx = json::array();
  json val = json::array();
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] != 0.0) {
      idx.push_back(i);
      val.push_back(weights_[i]);
    }
  }
  j["weights"] = {{"idx", std::move(idx)}, {"val", std::move(val)}};
  return j.dump();
}

RemoteScorer::RemoteScorer(TextChannel channel, std::string endpoint, std::string training_mode,
                           double timeout_seconds)
    : channel_(channel),
      endpoint_(std::move(endpoint)),
      training_mode_(std::move(training_mode)),
      timeout_seconds_(timeout_seconds) {}

std::string RemoteScorer::to_json_string() const {
  json j;
  j["schema_version"] = kScorerSchemaVersion;
  j["kind"] = "remote";
  j["channel"] = std::string(channel_name(channel_));
  j["endpoint"] = endpoint_;
  j["training_mode"] = training_mode_;
  j["timeout_seconds"] = timeout_seconds_;
  return j.dump();
}

void TextScorer::save(const std::string& path) const { write_file(path, to_json_string()); }

std::unique_ptr<TextScorer> scorer_from_json_string(const std::string& payload) {
  json j = json::parse(payload, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw parse_error("malformed scorer file");
  try {
    int version = j.at("schema_version").get<int>();
    if (version > kScorerSchemaVersion)
      throw data_error("scorer schema version " + std::to_string(version) +
                       " is newer than supported " + std::to_string(kScorerSchemaVersion));
    std::string kind = j.at("kind").get<std::string>();
    TextChannel channel = channel_from_name(j.at("channel").get<std::string>());
    std::string mode = j.value("training_mode", std::string("all"));
    if (kind == "remote") {
      return std::make_unique<RemoteScorer>(channel, j.at("endpoint").get<std::string>(), mode,
                                            j.value("timeout_seconds", 10.0));
    }
    if (kind != "ngram") throw data_error("unknown scorer kind: " + kind);
    ScorerHyperparams hp;
    hp.hash_bits = j.at("hash_bits").get<int>();
    hp.ngram_min = j.at("ngram_min").get<int>();
    hp.ngram_max = j.at("ngram_max").get<int>();
    hp.epochs = j.value("epochs", hp.epochs);
    hp.learning_rate = j.value("learning_rate", hp.learning_rate);
    auto scorer = std::make_unique<NgramScorer>(channel, hp, mode);
    scorer->bias() = j.at("bias").get<double>();
    const json& idx = j.at("weights").at("idx");
    const json& val = j.at("weights").at("val");
    if (idx.size() != val.size()) throw data_error("scorer weight arrays disagree in length");
    for (std::size_t i = 0; i < idx.size(); ++i) {
      std::size_t k = idx[i].get<std::size_t>();
      if (k >= scorer->weights().size()) throw data_error("scorer weight index out of range");
      scorer->weights()[k] = val[i].get<double>();
    }
    return scorer;
  } catch (const json::exception& e) {
    throw schema_error(std::string("scorer file: ") + e.what());
  }
}

std::unique_ptr<TextScorer> load_scorer(const std::string& path) {
  return scorer_from_json_string(read_file(path));
}

std::unique_ptr<NgramScorer> train_scorer(TextChannel channel,
                                          const std::vector<ChannelUnit>& units,
                                          const std::vector<int>& labels, std::uint64_t seed,
                                          const ScorerHyperparams& hp, std::string training_mode) {
  if (channel == TextChannel::title)
    throw usage_error("train_scorer handles classification channels; use train_title_regressor");
  if (units.empty()) throw data_error("scorer training set is empty");
  if (units.size() != labels.size()) throw usage_error("units/labels size mismatch");
  bool has_pos = false, has_neg = false;
  for (int y : labels) (y ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg)
    throw data_error("scorer training set has a single class; cannot fit");

  auto scorer = std::make_unique<NgramScorer>(channel, hp, std::move(training_mode));
  std::vector<SparseVec> feats;
  feats.reserve(units.size());
  for (const ChannelUnit& u : units) feats.push_back(featurize_text(channel, u, hp));

  std::vector<std::size_t> order(units.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);

  std::vector<double>& w = scorer->weights();
  double& b = scorer->bias();
  std::size_t t = 1;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      double margin = b;
      for (auto [idx, val] : feats[i]) margin += w[idx] * val;
      double grad = sigmoid(margin) - labels[i];
      double lr = hp.learning_rate / std::sqrt(static_cast<double>(t));
      for (auto [idx, val] : feats[i]) w[idx] -= lr * grad * val;
      b -= lr * grad;
      ++t;
    }
  }
  return scorer;
}

std::map<std::pair<std::string, std::string>, double> build_title_targets(
    const Corpus& corpus, std::size_t min_revisions) {
  std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> counts;
  for (const RevisionRecord& r : corpus.records) {
    if (!r.is_reverted)
      throw data_error("build_title_targets requires labels (revision " +
                       std::to_string(r.revision_id) + " lacks is_reverted)");
    auto& [total, reverted] = counts[{r.wiki_db, r.page_title}];
    ++total;
    if (*r.is_reverted) ++reverted;
  }
  std::map<std::pair<std::string, std::string>, double> out;
  for (const auto& [key, c] : counts) {
    if (c.first >= min_revisions)
      out[key] = static_cast<double>(c.second) / static_cast<double>(c.first);
  }
  return out;
}

std::unique_ptr<NgramScorer> train_title_regressor(
    const std::map<std::pair<std::string, std::string>, double>& targets, std::uint64_t seed,
    const ScorerHyperparams& hp, std::string training_mode) {
  if (targets.empty()) throw data_error("title regressor training set is empty");
  double first = targets.begin()->second;
  bool distinct = false;
  for (const auto& [key, y] : targets)
    if (y != first) {
      distinct = true;
      break;
    }
  if (!distinct) throw data_error("title regressor requires at least two distinct target values");

  auto scorer = std::make_unique<NgramScorer>(TextChannel::title, hp, std::move(training_mode));
  std::vector<SparseVec> feats;
  std::vector<double> ys;
  feats.reserve(targets.size());
  for (const auto& [key, y] : targets) {
    feats.push_back(featurize_text(TextChannel::title, ChannelUnit::single(key.second), hp));
    ys.push_back(y);
  }

  std::vector<std::size_t> order(feats.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);

  std::vector<double>& w = scorer->weights();
  double& b = scorer->bias();
  std::size_t t = 1;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      double pred = b;
      for (auto [idx, val] : feats[i]) pred += w[idx] * val;
      double grad = pred - ys[i];
      double lr = hp.learning_rate / std::sqrt(static_cast<double>(t));
      for (auto [idx, val] : feats[i]) w[idx] -= lr * grad * val;
      b -= lr * grad;
      ++t;
    }
  }
  return scorer;
}

std::optional<PoolBlock> pool(const std::vector<ChannelScore>& scores) {
  if (scores.empty()) return std::nullopt;
  PoolBlock blk;
  blk.count = scores.size();
  blk.max_raw = scores[0].raw;
  blk.max_prob = scores[0].probability;
  double sum_raw = 0.0, sum_prob = 0.0;
  for (const ChannelScore& s : scores) {
    sum_raw += s.raw;
    sum_prob += s.probability;
    blk.max_raw = std::max(blk.max_raw, s.raw);
    blk.max_prob = std::max(blk.max_prob, s.probability);
  }
  blk.mean_raw = sum_raw / static_cast<double>(scores.size());
  blk.mean_prob = sum_prob / static_cast<double>(scores.size());
  return blk;
}

const TextScorer& ScorerSet::for_channel(TextChannel c) const {
  const TextScorer* s = nullptr;
  switch (c) {
    case TextChannel::change: s = change.get(); break;
    case TextChannel::insert: s = insert.get(); break;
    case TextChannel::remove: s = remove.get(); break;
    case TextChannel::title: s = title.get(); break;
  }
  if (!s) throw internal_error("scorer set is missing the " + std::string(channel_name(c)) +
                               " channel");
  return *s;
}

std::vector<ChannelUnit> units_for_channel(const textdiff::TextDelta& delta, TextChannel channel) {
  std::vector<ChannelUnit> units;
  switch (channel) {
    case TextChannel::change:
      for (const auto& [old_s, new_s] : delta.changes) units.push_back(ChannelUnit::pair(old_s, new_s));
      break;
    case TextChannel::insert:
      for (const std::string& s : delta.inserts) units.push_back(ChannelUnit::single(s));
      break;
    case TextChannel::remove:
      for (const std::string& s : delta.removes) units.push_back(ChannelUnit::single(s));
      break;
    case TextChannel::title:
      throw usage_error("title units come from the page title, not the delta");
  }
  return units;
}

PooledTextFeatures assemble_pooled(const ScorerSet& scorers, const textdiff::TextDelta& delta,
                                   const std::string& page_title) {
  if (!scorers.complete()) throw internal_error("assemble_pooled requires all four scorers");
  PooledTextFeatures out;
  out.change = pool(scorers.for_channel(TextChannel::change)
                        .score(units_for_channel(delta, TextChannel::change)));
  out.insert = pool(scorers.for_channel(TextChannel::insert)
                        .score(units_for_channel(delta, TextChannel::insert)));
  out.remove = pool(scorers.for_channel(TextChannel::remove)
                        .score(units_for_channel(delta, TextChannel::remove)));
  auto title_scores =
      scorers.for_channel(TextChannel::title).score({ChannelUnit::single(page_title)});
  out.title_score = title_scores.empty() ? 0.0 : title_scores[0].probability;
  return out;
}

}  // namespace rr::textscore
