#pragma once
// Two-level agent: the page-level source selector picks an option (set of
// vertical sources) once per page; the slot-level item presenter fills the
// page one slot at a time by popping source stacks. Both are recurrent
// dueling double-DQNs trained from separate replay buffers with ε-greedy
// exploration, Huber-clipped TD errors, RMSProp, and periodically synced
// target networks. Recurrent state carries across a rollout but every
// gradient update starts from a zeroed hidden state.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "agghrl/config.hpp"
#include "agghrl/core.hpp"
#include "agghrl/qnet.hpp"
#include "agghrl/replay.hpp"
#include "agghrl/simenv.hpp"

namespace agghrl {

struct PolicyBundle {
  QNetConfig cfg;
  QNetworkParams online;
  QNetworkParams target;
  RmsProp opt;
  Vec hidden;             // rollout recurrent state
  long long step = 0;     // completed gradient steps

  void reset_hidden() { hidden.assign(cfg.recurrent ? cfg.rnn_dim : 0, 0.0); }
};

PolicyBundle make_bundle(const QNetConfig& cfg, double lr, double rms_decay, double rms_eps,
                         Rng& rng);

// Option space legal on this page (commercial constraint filter).
ActionMask option_mask(const FeatureConfig& fcfg, const AgentConfig& acfg, int page_number);

// ε-greedy masked option choice; advances the selector's recurrent state.
// An all-false mask falls back to the core-only option without consulting
// the network.
SourceSet select_option(PolicyBundle& selector, const FeatureConfig& fcfg, const HighState& s,
                        double eps, const ActionMask& mask, Rng& rng);

// ε-greedy masked action choice; advances the presenter's recurrent state.
int select_action(PolicyBundle& presenter, const FeatureConfig& fcfg, const LowState& s,
                  double eps, const ActionMask& mask, Rng& rng);

// λ·click + (1−λ)·min(ln(1+pay), δ) with click ∈ {+1,−1}. Negative pay is a
// hard error. The page-level no-click penalty is applied by execute_option.
double intrinsic_reward(const SlotFeedback& fb, double lambda, double delta);

// (1/l)·Σ_k γ^k r_k over one page's intrinsic rewards.
double extrinsic_reward(const std::vector<double>& intrinsics, double gamma);

struct SlotFill {
  Page page;
  std::vector<int> actions;
  std::vector<Vec> feats;        // featurized low state per slot (when collected)
  std::vector<ActionMask> masks;
  Vec end_feat;                  // featurized state after the last pop
};

// Fills slot_count(o, results) slots by ε-greedy stack popping. Shared by
// training (which also needs the per-slot features) and evaluation-only
// presentation.
SlotFill fill_slots(const SourceSet& o, const SourceResults& results, const SearchRequest& req,
                    PolicyBundle& presenter, const FeatureConfig& fcfg, double eps, Rng& rng,
                    bool collect_feats);

struct ExecutionResult {
  Page page;
  PageFeedback feedback;
  std::vector<LowTransition> low_transitions;  // rewards filled, masks filled
  std::vector<double> intrinsics;
  double r_e = 0.0;
  int l = 0;
};

// Runs option o to termination (all selected stacks empty): fills slots via
// the presenter, shows the page, computes per-slot intrinsic rewards and the
// page reward r_e under the configured strategy. l = 0 (nothing retrievable)
// returns an empty result with no transitions.
ExecutionResult execute_option(const SourceSet& o, const SourceResults& results, const SimEnv& env,
                               SessionContext& ctx, PolicyBundle& presenter,
                               const FeatureConfig& fcfg, const AgentConfig& acfg, double eps,
                               Rng& rng);

// Double-DQN page-level targets: y = r for terminal transitions, else
// r + γ^l · Q_target(s', argmax_masked Q_online(s')). smdp_discount false
// replaces γ^l with γ (the divergence-prone training variant).
std::vector<double> high_td_target(const std::vector<const HighTransition*>& batch,
                                   const PolicyBundle& selector, double gamma,
                                   bool smdp_discount = true);

// Same with exponent 1 and the action mask of the successor slot.
std::vector<double> low_td_target(const std::vector<const LowTransition*>& batch,
                                  const PolicyBundle& presenter, double gamma);

// One RMSProp step on the Huber TD error of the taken action only, averaged
// over the batch; recurrent state zeroed per transition. Returns the mean
// Huber loss. Non-finite gradients skip the update (diagnostic on stderr).
double train_step(PolicyBundle& bundle, const std::vector<Vec>& states,
                  const std::vector<int>& taken, const std::vector<double>& targets,
                  double huber_threshold);

// θ⁻ ← θ exactly when step ≡ 0 (mod C).
void sync_targets(PolicyBundle& bundle, long long step, long long C);

struct CurveRecord {
  long long step = 0;
  std::string level;  // "high", "low", or "flat"
  double loss = 0.0;
};

struct EpisodeRecord {
  long long session = 0;
  double ret = 0.0;  // sum of page rewards over the session
  int pages = 0;
  long long clicks = 0;
  long long slots = 0;
};

struct TrainResult {
  PolicyBundle selector;
  PolicyBundle presenter;
  std::vector<CurveRecord> curves;
  std::vector<EpisodeRecord> episodes;
};

QNetConfig selector_net_config(const RunConfig& cfg);
QNetConfig presenter_net_config(const RunConfig& cfg);

double epsilon_at(const AgentConfig& acfg, long long session, long long budget,
                  double eps_final);

// Optional warm-start parameters (e.g. from behavioral-cloning pretraining);
// null members keep the random initialization.
struct TrainInit {
  const QNetworkParams* selector = nullptr;
  const QNetworkParams* presenter = nullptr;
};

// Full training loop: per session, per page: select option, execute it with
// one presenter replay update per filled slot, then store the page
// transition and take one selector replay update. workers > 1 runs
// inference-only rollout threads feeding a single trainer thread
// (bit-determinism is only guaranteed for workers == 1).
TrainResult run_training(const SimEnv& env, const RunConfig& cfg, long long budget_sessions,
                         std::uint64_t seed, int workers = 1, const TrainInit* init = nullptr);

// Supervised warm start from logged sessions: regresses Q(s, taken) toward
// the logged Monte-Carlo discounted return (Huber-clipped), replaying each
// logged page/session in order with the recurrent state carried across
// steps; target networks are synced to the result. Logged pages without
// recorded decisions are a hard error.
void bc_pretrain(const std::vector<SessionLog>& logs, const SimEnv& env, const RunConfig& cfg,
                 PolicyBundle& selector, PolicyBundle& presenter, int epochs, Rng& rng);

struct AgreementStats {
  double low = 0.0;   // greedy top-1 match rate with logged slot actions
  double high = 0.0;  // greedy match rate with logged options
  long long n_low = 0;
  long long n_high = 0;
};

// Replays logs greedily (recurrent state carried as in a live rollout) and
// measures decision agreement.
AgreementStats bc_agreement(const std::vector<SessionLog>& logs, const SimEnv& env,
                            const RunConfig& cfg, PolicyBundle& selector,
                            PolicyBundle& presenter);

// Shared log-replay helpers (also used by baseline training).
struct ReplayedPage {
  HighState high_state;
  SourceResults results;
  std::vector<Vec> low_feats;      // one per filled slot, in order
  std::vector<int> actions;
  std::vector<ActionMask> action_masks;
  unsigned option_bits = 0;
  std::vector<double> intrinsics;  // no-click penalty applied
  double r_e = 0.0;
  int l = 0;
};

// Reconstructs states/decisions/rewards for one logged session against the
// environment's catalog. Requires logged decisions when need_decisions.
std::vector<ReplayedPage> replay_session(const SessionLog& log, const SimEnv& env,
                                         const RunConfig& cfg, bool need_decisions);

}  // namespace agghrl
