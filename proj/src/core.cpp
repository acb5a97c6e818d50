#include "agghrl/core.hpp"

#include <algorithm>
#include <stdexcept>
#include <cmath>

namespace agghrl {

int slot_count(const SourceSet& o, const SourceResults& results) {
  int total = 0;
  for (int j = 0; j < static_cast<int>(results.by_source.size()); ++j) {
    if (o.contains(j)) total += results.count(j);
  }
  return total;
}

Vec source_mean_embedding(const SourceResults& results, int source_id, int d_item) {
  Vec mean = zeros(d_item);
  const auto& stack = results.by_source.at(source_id);
  if (stack.empty()) return mean;
  for (const auto& item : stack) {
    if (static_cast<int>(item.embedding.size()) != d_item)
      throw std::invalid_argument("source_mean_embedding: item embedding width mismatch");
    for (int i = 0; i < d_item; ++i) mean[i] += item.embedding[i];
  }
  const double inv = 1.0 / static_cast<double>(stack.size());
  for (auto& v : mean) v *= inv;
  return mean;
}

static void check_dim(const Vec& v, int want, const char* segment) {
  if (static_cast<int>(v.size()) != want) {
    throw std::invalid_argument(std::string("featurize: segment '") + segment + "' has width " +
                                std::to_string(v.size()) + ", expected " + std::to_string(want));
  }
}

static void append(Vec& out, const Vec& v) { out.insert(out.end(), v.begin(), v.end()); }

// Retrieval-style match score between an item embedding and the query; 0 for
// zero vectors so empty stacks featurize to all-zero segments.
static double match_score(const Vec& item, const Vec& query) {
  double dot = 0.0, ni = 0.0, nq = 0.0;
  for (std::size_t i = 0; i < item.size(); ++i) {
    dot += item[i] * query[i];
    ni += item[i] * item[i];
    nq += query[i] * query[i];
  }
  if (ni <= 0.0 || nq <= 0.0) return 0.0;
  return dot / std::sqrt(ni * nq);
}

static void append_request(Vec& out, const SearchRequest& r, const FeatureConfig& cfg,
                           bool full_page_enc) {
  check_dim(r.query_embedding, cfg.d_item, "query_embedding");
  check_dim(r.demographics, cfg.demo_dim, "demographics");
  check_dim(r.recent_click_mean, cfg.d_item, "recent_click_mean");
  if (cfg.page_enc_dim != 2) throw std::invalid_argument("featurize: page_enc_dim must be 2");
  if (r.page_number < 1) throw std::invalid_argument("featurize: page_number must be >= 1");
  append(out, r.query_embedding);
  append(out, r.demographics);
  append(out, r.recent_click_mean);
  out.push_back(1.0 / static_cast<double>(r.page_number));
  if (full_page_enc) out.push_back(std::min(r.page_number, 10) / 10.0);
}

Vec featurize_high(const HighState& s, const FeatureConfig& cfg) {
  Vec out;
  out.reserve(cfg.high_dim());
  append_request(out, s.request, cfg, /*full_page_enc=*/true);
  if (static_cast<int>(s.source_mean.size()) != cfg.n_sources())
    throw std::invalid_argument("featurize_high: source_mean count mismatch");
  for (int j = 0; j < cfg.n_sources(); ++j) {
    check_dim(s.source_mean[j], cfg.d_item, "source_mean");
    append(out, s.source_mean[j]);
  }
  for (int v = 1; v <= cfg.n_verticals; ++v)
    out.push_back(s.latest_option.contains(v) ? 1.0 : 0.0);
  if (static_cast<int>(out.size()) != cfg.high_dim())
    throw std::logic_error("featurize_high: assembled width mismatch");
  return out;
}

Vec featurize_low(const LowState& s, const FeatureConfig& cfg) {
  Vec out;
  out.reserve(cfg.low_dim());
  append_request(out, s.request, cfg, /*full_page_enc=*/false);
  if (static_cast<int>(s.top_items.size()) != cfg.n_sources() ||
      static_cast<int>(s.available.size()) != cfg.n_sources() ||
      static_cast<int>(s.remaining.size()) != cfg.n_sources())
    throw std::invalid_argument("featurize_low: per-source block count mismatch");
  for (int j = 0; j < cfg.n_sources(); ++j) {
    check_dim(s.top_items[j], cfg.d_item, "top_item");
    if (s.remaining[j] < 0)
      throw std::invalid_argument("featurize_low: negative remaining count");
    append(out, s.top_items[j]);
    out.push_back(s.available[j] ? match_score(s.top_items[j], s.request.query_embedding) : 0.0);
    out.push_back(s.remaining[j] / 10.0);
  }
  if (s.last_action < -1 || s.last_action >= cfg.n_actions())
    throw std::invalid_argument("featurize_low: last_action out of range");
  for (int a = 0; a < cfg.n_actions(); ++a) out.push_back(a == s.last_action ? 1.0 : 0.0);
  if (s.option.index() >= static_cast<unsigned>(cfg.n_options()))
    throw std::invalid_argument("featurize_low: option index out of range");
  for (int v = 1; v <= cfg.n_verticals; ++v)
    out.push_back(s.option.contains(v) ? 1.0 : 0.0);
  if (static_cast<int>(out.size()) != cfg.low_dim())
    throw std::logic_error("featurize_low: assembled width mismatch");
  return out;
}

}  // namespace agghrl
