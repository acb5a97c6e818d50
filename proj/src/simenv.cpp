#include "agghrl/simenv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace agghrl {

namespace {

constexpr std::uint64_t kUserSalt = 0x5553455253414C54ULL;
constexpr std::uint64_t kCatalogSalt = 0x434154414C4F4721ULL;

Vec random_unit(Rng& rng, int d) {
  Vec v(d);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
  } while (norm2 < 1e-12);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& x : v) x *= inv;
  return v;
}

double sigm(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double cosine(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: width mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na < 1e-24 || nb < 1e-24) return 0.0;
  return dot / std::sqrt(na * nb);
}

const Item& Catalog::item_by_id(std::int64_t item_id) const {
  const int source = static_cast<int>(item_id / 1000000);
  const int index = static_cast<int>(item_id % 1000000);
  if (source < 0 || source >= static_cast<int>(by_source.size()) || index < 0 ||
      index >= static_cast<int>(by_source[source].size()))
    throw std::out_of_range("catalog: unknown item id " + std::to_string(item_id));
  return by_source[source][index];
}

SimEnv::SimEnv(const EnvConfig& cfg) : cfg_(cfg) {
  Rng rng(mix64(kCatalogSalt, cfg_.catalog_seed));
  catalog_.by_source.resize(1 + cfg_.n_verticals);
  auto build = [&](int source, int count, double mu, double sigma) {
    auto& items = catalog_.by_source[source];
    items.reserve(count);
    for (int i = 0; i < count; ++i) {
      Item it;
      it.item_id = Catalog::compose_id(source, i);
      it.source = source;
      it.embedding = random_unit(rng, cfg_.d_item);
      it.price = rng.lognormal(mu, sigma);
      items.push_back(std::move(it));
    }
  };
  build(0, cfg_.core_catalog, cfg_.price_mu, cfg_.price_sigma);
  for (int v = 0; v < cfg_.n_verticals; ++v)
    build(1 + v, cfg_.vertical_catalog, cfg_.vertical_price_mu[v], cfg_.vertical_price_sigma[v]);
  catalog_.queries.reserve(cfg_.query_pool);
  for (int q = 0; q < cfg_.query_pool; ++q) catalog_.queries.push_back(random_unit(rng, cfg_.d_item));
}

UserProfile SimEnv::user_profile(std::int64_t user_id) const {
  Rng rng(mix64(mix64(kUserSalt, cfg_.catalog_seed), static_cast<std::uint64_t>(user_id)));
  UserProfile u;
  u.user_id = user_id;
  u.demographics.resize(cfg_.demo_dim);
  for (auto& d : u.demographics) d = rng.uniform(-1.0, 1.0);
  u.alpha = rng.u01();
  return u;
}

SessionContext SimEnv::begin_session(std::int64_t user_id, std::uint64_t session_seed) const {
  SessionContext ctx;
  ctx.user = user_profile(user_id);
  ctx.session_id = static_cast<std::int64_t>(session_seed);
  ctx.rng = Rng(session_seed);
  ctx.query_id = static_cast<std::int64_t>(ctx.rng.uniform_int(catalog_.queries.size()));
  ctx.query = catalog_.queries[ctx.query_id];
  Vec noise = random_unit(ctx.rng, cfg_.d_item);
  ctx.intent.resize(cfg_.d_item);
  double norm2 = 0.0;
  for (int i = 0; i < cfg_.d_item; ++i) {
    ctx.intent[i] = ctx.user.alpha * ctx.query[i] + (1.0 - ctx.user.alpha) * noise[i];
    norm2 += ctx.intent[i] * ctx.intent[i];
  }
  const double inv = 1.0 / std::sqrt(std::max(norm2, 1e-12));
  for (auto& x : ctx.intent) x *= inv;
  ctx.page_number = 1;
  ctx.click_sum = zeros(cfg_.d_item);
  ctx.click_count = 0;
  return ctx;
}

SearchRequest SimEnv::make_request(const SessionContext& ctx) const {
  SearchRequest r;
  r.request_id = ctx.session_id * 100 + ctx.page_number;
  r.user_id = ctx.user.user_id;
  r.query_id = ctx.query_id;
  r.page_number = ctx.page_number;
  r.query_embedding = ctx.query;
  r.demographics = ctx.user.demographics;
  r.recent_click_mean = click_mean(ctx.click_sum, ctx.click_count, cfg_.d_item);
  return r;
}

SourceResults SimEnv::retrieve(SessionContext& ctx) const {
  SourceResults res;
  res.by_source.resize(1 + cfg_.n_verticals);
  // Stable ranking of a source's catalog by query affinity; each page takes
  // the next window down that ranking.
  auto ranked = [&](int source) {
    const auto& items = catalog_.by_source[source];
    std::vector<int> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> score(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) score[i] = cosine(items[i].embedding, ctx.query);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (score[a] != score[b]) return score[a] > score[b];
      return a < b;
    });
    return order;
  };
  {
    const auto order = ranked(0);
    const int offset = (ctx.page_number - 1) * cfg_.n_core;
    for (int k = 0; k < cfg_.n_core; ++k) {
      const int pos = (offset + k) % static_cast<int>(order.size());
      Item it = catalog_.by_source[0][order[pos]];
      it.within_source_rank = k;
      res.by_source[0].push_back(std::move(it));
    }
  }
  for (int v = 0; v < cfg_.n_verticals; ++v) {
    const int source = 1 + v;
    if (ctx.rng.bernoulli(cfg_.vertical_empty_prob)) continue;
    const int depth = ctx.rng.bernoulli(cfg_.vertical_second_prob) ? 2 : 1;
    const auto order = ranked(source);
    const int offset = (ctx.page_number - 1) * 2;
    for (int k = 0; k < depth; ++k) {
      const int pos = (offset + k) % static_cast<int>(order.size());
      Item it = catalog_.by_source[source][order[pos]];
      it.within_source_rank = k;
      res.by_source[source].push_back(std::move(it));
    }
  }
  return res;
}

double SimEnv::click_logit(const SessionContext& ctx, const Item& item) const {
  const double wq = cfg_.click_query_weight;
  double affinity = wq * cosine(item.embedding, ctx.query) +
                    (1.0 - wq) * cosine(item.embedding, ctx.intent);
  double logit = cfg_.click_base + cfg_.click_affinity * affinity;
  if (ctx.click_count > 0) {
    const Vec mean = click_mean(ctx.click_sum, ctx.click_count, cfg_.d_item);
    logit += cfg_.behavior_gain * std::max(0.0, cosine(item.embedding, mean));
  }
  if (item.source > 0) logit += cfg_.vertical_click_bonus[item.source - 1];
  return logit;
}

double SimEnv::buy_logit(const SessionContext& ctx, const Item& item) const {
  const double wq = cfg_.click_query_weight;
  const double affinity = wq * cosine(item.embedding, ctx.query) +
                          (1.0 - wq) * cosine(item.embedding, ctx.intent);
  return cfg_.buy_base + cfg_.buy_affinity * affinity -
         cfg_.buy_price_weight * (std::log1p(item.price) - cfg_.buy_price_ref);
}

SimEnv::SlotEval SimEnv::evaluate_slot(const SessionContext& ctx, const Item& item,
                                       int position0) const {
  SlotEval ev;
  ev.exam_p = std::pow(1.0 / std::log2(position0 + 2.0), cfg_.position_bias);
  ev.p_click_given_exam = sigm(click_logit(ctx, item));
  ev.p_buy_given_click = sigm(buy_logit(ctx, item));
  const double wq = cfg_.click_query_weight;
  ev.affinity = wq * cosine(item.embedding, ctx.query) +
                (1.0 - wq) * cosine(item.embedding, ctx.intent);
  return ev;
}

PageFeedback SimEnv::respond(const Page& page, SessionContext& ctx) const {
  PageFeedback fb;
  fb.slots.resize(page.slots.size());
  for (std::size_t k = 0; k < page.slots.size(); ++k) {
    const Item& item = page.slots[k].item;
    auto& slot = fb.slots[k];
    const double exam_p =
        std::pow(1.0 / std::log2(static_cast<double>(k) + 2.0), cfg_.position_bias);
    slot.examined = ctx.rng.bernoulli(exam_p);
    if (!slot.examined) continue;
    slot.clicked = ctx.rng.bernoulli(sigm(click_logit(ctx, item)));
    if (!slot.clicked) continue;
    if (ctx.rng.bernoulli(sigm(buy_logit(ctx, item)))) slot.pay = item.price;
    double mu = cfg_.dwell_mu;
    if (item.source > 0) mu += cfg_.vertical_dwell_bonus[item.source - 1];
    slot.dwell_ms = ctx.rng.lognormal(mu, cfg_.dwell_sigma);
    update_click_stats(ctx.click_sum, ctx.click_count, item.embedding);
  }
  return fb;
}

bool SimEnv::continue_session(SessionContext& ctx) const {
  if (ctx.page_number >= cfg_.max_pages) return false;
  const double p = cfg_.continuation * std::pow(cfg_.continuation_decay, ctx.page_number - 1);
  if (!ctx.rng.bernoulli(p)) return false;
  ctx.page_number += 1;
  return true;
}

void SimEnv::update_click_stats(Vec& click_sum, int& click_count, const Vec& embedding) {
  if (click_sum.size() != embedding.size())
    throw std::invalid_argument("update_click_stats: width mismatch");
  for (std::size_t i = 0; i < embedding.size(); ++i) click_sum[i] += embedding[i];
  click_count += 1;
}

Vec SimEnv::click_mean(const Vec& click_sum, int click_count, int d_item) {
  Vec mean = zeros(d_item);
  if (click_count <= 0) return mean;
  for (int i = 0; i < d_item; ++i) mean[i] = click_sum[i] / click_count;
  return mean;
}

}  // namespace agghrl
