#pragma once
// Comparison policies sharing the environment and metrics harness: the
// fixed-slot rule, template selection by a single flat DQN, per-vertical
// behavioral-cloning classifiers, a pointwise reward-regression ranker, and
// the composites that mix those parts with the hierarchical agent's levels.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "agghrl/agent.hpp"
#include "agghrl/config.hpp"
#include "agghrl/core.hpp"
#include "agghrl/simenv.hpp"

namespace agghrl {

// One page layout: vertical source j placed at a fixed 1-based slot, top
// item only; core items fill everything else in ranking order. A vertical
// slot whose source is empty falls back to the next core item.
struct TemplateSpec {
  std::string name;
  std::vector<std::pair<int, int>> vertical_slots;  // (source_id, slot)
};

// Parses "core|topic@4|blog@9|..." against the configured vertical names.
std::vector<TemplateSpec> parse_templates(const std::string& text, const EnvConfig& env);

// (source_id, slot) pairs for the rule policy, from baselines.rule_slots.
std::vector<std::pair<int, int>> rule_vertical_slots(const RunConfig& cfg);

// Assembles a page from fixed vertical slots plus the core ranking. Slots
// beyond the assembled page length are dropped.
Page compose_slotted_page(const SourceResults& results,
                          const std::vector<std::pair<int, int>>& vertical_slots);

// Page 1: core only. Later pages: verticals at their configured slots when
// available.
Page rule_policy(const SearchRequest& x, const SourceResults& results,
                 const std::vector<std::pair<int, int>>& vertical_slots);

// Decisions a policy made while assembling a page, for session logging.
struct PageDecision {
  bool has = false;
  unsigned option_bits = 0;
  std::vector<int> actions;
};

class PagePolicy {
 public:
  virtual ~PagePolicy() = default;
  virtual std::string name() const = 0;
  virtual void begin_session() {}
  virtual Page present(const SearchRequest& req, const SourceResults& res, PageDecision* dec) = 0;
};

// ---- Flat RL over templates ----

struct FlatAgent {
  PolicyBundle bundle;  // non-recurrent DQN over the template set
  std::vector<TemplateSpec> templates;
};

FlatAgent make_flat_agent(const RunConfig& cfg, Rng& rng);

struct FlatTrainResult {
  FlatAgent agent;
  std::vector<CurveRecord> curves;
  std::vector<EpisodeRecord> episodes;
};

// ε-greedy template choice per page; state and reward are the high-level
// featurization and page reward; one replay update per page with γ targets.
FlatTrainResult train_flat(const SimEnv& env, const RunConfig& cfg, long long budget_sessions,
                           std::uint64_t seed);

// ---- Behavioral-cloning vertical classifiers ----

struct VerticalClassifiers {
  std::vector<MlpParams> nets;  // one binary classifier per vertical
  double slope = 0.01;
  bool trained = false;
};

// Untrained nets with the training-time shapes, for weight loading.
VerticalClassifiers make_classifiers(const RunConfig& cfg, Rng& rng);

// Trains per-vertical click classifiers on logged pages where the vertical
// was shown (positive label: any click on its slots).
VerticalClassifiers train_bc_classifiers(const std::vector<SessionLog>& logs, const SimEnv& env,
                                         const RunConfig& cfg, Rng& rng);

// Vertical included iff its classifier probability >= 0.5. Untrained
// classifiers are a hard error.
SourceSet bc_vertical_select(const HighState& s, const FeatureConfig& fcfg,
                             const VerticalClassifiers& cls);

// ---- Pointwise reward regression ----

struct RewardModel {
  MlpParams net;
  double slope = 0.01;
  bool trained = false;
};

RewardModel make_reward_model(const RunConfig& cfg, Rng& rng);

RewardModel train_reward_model(const std::vector<SessionLog>& logs, const SimEnv& env,
                               const RunConfig& cfg, Rng& rng);

double rm_score(const RewardModel& rm, const SearchRequest& req, const Item& item,
                const FeatureConfig& fcfg);

// Scores every candidate of the selected sources pointwise and sorts
// descending (ties: source id, then within-source rank). Deliberately free
// to interleave across sources and to violate within-source order.
Page rm_present(const SourceSet& o, const SourceResults& results,
                const std::function<double(const Item&)>& scorer);

// ---- Policy construction ----

struct PolicyArtifacts {
  std::shared_ptr<PolicyBundle> selector;
  std::shared_ptr<PolicyBundle> presenter;
  std::shared_ptr<FlatAgent> flat;
  std::shared_ptr<VerticalClassifiers> classifiers;
  std::shared_ptr<RewardModel> reward_model;
};

// names: rule, hrl, flat, bc_rm, bc_rl, rl_rm. Missing constituents are a
// hard error. eps adds ε-greedy noise to learned decisions (0 = greedy).
std::unique_ptr<PagePolicy> make_policy(const std::string& policy_name,
                                        const PolicyArtifacts& artifacts, const RunConfig& cfg,
                                        double eps, std::uint64_t rng_seed);

}  // namespace agghrl
