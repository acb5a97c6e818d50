#pragma once
// Session simulator: a seeded catalog of items and queries, hash-derived
// user profiles, per-page retrieval from heterogeneous sources, and a
// position-biased click/purchase/dwell model with within-session behavioural
// feedback (clicks raise the appeal of similar items later in the session).
//
// The catalog and user population derive from env.catalog_seed only, so log
// generation, pretraining, and A/B evaluation all see the same world no
// matter which run seed drives the stochastics.

#include <cstdint>

#include "agghrl/config.hpp"
#include "agghrl/core.hpp"
#include "agghrl/rng.hpp"

namespace agghrl {

struct Catalog {
  std::vector<std::vector<Item>> by_source;  // build-order item lists per source
  std::vector<Vec> queries;

  const Item& item_by_id(std::int64_t item_id) const;
  static std::int64_t compose_id(int source, int index) {
    return static_cast<std::int64_t>(source) * 1000000 + index;
  }
};

struct UserProfile {
  std::int64_t user_id = 0;
  Vec demographics;
  double alpha = 0.0;  // how strongly the user's intent tracks the query
};

struct SessionContext {
  UserProfile user;
  std::int64_t session_id = 0;
  std::int64_t query_id = 0;
  Vec query;
  Vec intent;
  int page_number = 1;
  Vec click_sum;        // running sum of clicked-item embeddings this session
  int click_count = 0;
  Rng rng;
};

class SimEnv {
 public:
  explicit SimEnv(const EnvConfig& cfg);

  const EnvConfig& config() const { return cfg_; }
  const Catalog& catalog() const { return catalog_; }
  int n_sources() const { return 1 + cfg_.n_verticals; }

  // Pure function of (catalog_seed, user_id).
  UserProfile user_profile(std::int64_t user_id) const;

  SessionContext begin_session(std::int64_t user_id, std::uint64_t session_seed) const;

  SearchRequest make_request(const SessionContext& ctx) const;

  // Ranked per-source stacks for the context's current page. Draws vertical
  // availability from the session RNG.
  SourceResults retrieve(SessionContext& ctx) const;

  // Simulates the user scanning the page top-down. Mutates the context's
  // click history as clicks happen (earlier clicks influence later slots).
  PageFeedback respond(const Page& page, SessionContext& ctx) const;

  // Decides whether another page follows; advances ctx.page_number when so.
  bool continue_session(SessionContext& ctx) const;

  static std::uint64_t session_seed(std::uint64_t run_seed, std::int64_t user_id,
                                    std::int64_t per_user_index) {
    return mix64(mix64(run_seed, static_cast<std::uint64_t>(user_id)),
                 static_cast<std::uint64_t>(per_user_index));
  }

  static void update_click_stats(Vec& click_sum, int& click_count, const Vec& embedding);
  static Vec click_mean(const Vec& click_sum, int click_count, int d_item);

  // Closed-form per-slot probabilities for the context's current history;
  // the test oracle for the sampling path.
  struct SlotEval {
    double exam_p = 0.0;
    double p_click_given_exam = 0.0;
    double p_buy_given_click = 0.0;
    double affinity = 0.0;
  };
  SlotEval evaluate_slot(const SessionContext& ctx, const Item& item, int position0) const;

 private:
  EnvConfig cfg_;
  Catalog catalog_;

  double click_logit(const SessionContext& ctx, const Item& item) const;
  double buy_logit(const SessionContext& ctx, const Item& item) const;
};

double cosine(const Vec& a, const Vec& b);

}  // namespace agghrl
