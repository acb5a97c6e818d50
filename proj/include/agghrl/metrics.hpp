#pragma once
// Evaluation metrics over session logs (CTR, ADT, COV, GMV) and the
// bucket-testing harness: users are stably hashed into one bucket per
// policy, every bucket sees the same user/query distribution, and results
// are reported per metric with relative gains against a named baseline.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agghrl/baselines.hpp"
#include "agghrl/config.hpp"
#include "agghrl/core.hpp"
#include "agghrl/simenv.hpp"

namespace agghrl {

// Clicked impressions / impressions of one source. examination_based counts
// only slots the simulated user actually examined as impressions. Absent
// when the source was never viewed.
std::optional<double> ctr(const std::vector<SessionLog>& logs, int source, bool examination_based);

// Mean dwell (seconds) over clicked impressions of the source; absent
// without clicks.
std::optional<double> adt_seconds(const std::vector<SessionLog>& logs, int source);

// Slots occupied by the source / total slots.
double cov(const std::vector<SessionLog>& logs, int source);

// Σ pay over the source's slots.
double gmv(const std::vector<SessionLog>& logs, int source);

// Clicked slots / all slots, all sources pooled.
std::optional<double> overall_ctr(const std::vector<SessionLog>& logs, bool examination_based);

// Stable hash of the user id into [0, n_buckets).
int bucket_assign(std::int64_t user_id, int n_buckets);

// Drives one full session of a policy in the simulator, returning the log.
SessionLog run_session(const SimEnv& env, SessionContext& ctx, PagePolicy& policy,
                       bool log_decisions);

struct SourceMetrics {
  std::optional<double> ctr;
  std::optional<double> adt;
  double cov = 0.0;
  double gmv = 0.0;
};

struct PolicyMetrics {
  std::string policy;
  std::vector<SourceMetrics> per_source;  // indexed by source id
  std::optional<double> overall_ctr;
  long long sessions = 0;
  long long pages = 0;
  long long slots = 0;
};

PolicyMetrics compute_metrics(const std::string& policy_name, const std::vector<SessionLog>& logs,
                              int n_sources, bool examination_ctr);

struct AbResult {
  std::vector<PolicyMetrics> rows;
  int baseline_row = -1;

  // (v - v_base)/v_base; absent when either side is absent or base is 0.
  std::optional<double> gain_ctr(int row, int source) const;
  std::optional<double> gain_adt(int row, int source) const;
  std::optional<double> gain_cov(int row, int source) const;
  std::optional<double> gain_gmv(int row, int source) const;
  std::optional<double> gain_overall_ctr(int row) const;
};

struct AbPolicySpec {
  std::string name;
  // Builds the bucket's policy; seeded so stochastic policies are
  // reproducible per bucket.
  std::function<std::unique_ptr<PagePolicy>(std::uint64_t seed)> make;
};

// One shared user-id stream; bucket_assign routes each user to exactly one
// policy; sessions accrue until every bucket holds sessions_per_bucket. The
// per-session simulation seed depends only on (seed, user, visit index), so
// a user behaves identically whichever bucket they landed in.
AbResult ab_test(const SimEnv& env, const std::vector<AbPolicySpec>& policies,
                 long long sessions_per_bucket, std::uint64_t seed,
                 const std::string& baseline_name, const MetricsConfig& mcfg,
                 std::vector<std::vector<SessionLog>>* bucket_logs = nullptr);

// Plain-text table of the result (values plus gains vs the baseline).
std::string format_ab_table(const AbResult& result, const EnvConfig& env);

}  // namespace agghrl
