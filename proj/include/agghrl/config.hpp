#pragma once
// Run configuration: sectioned key=value text files over built-in defaults.
// Parsing is strict: unknown sections or keys, malformed values, and
// cross-field inconsistencies are hard errors. A canonical dump of the
// effective config feeds the run-manifest fingerprint.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "agghrl/core.hpp"

namespace agghrl {

// Thrown when the config file itself cannot be opened (CLI exits 2 on it).
struct ConfigFileMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EnvConfig {
  std::uint64_t catalog_seed = 7777;
  int n_verticals = 2;
  int d_item = 8;
  int demo_dim = 4;
  std::vector<std::string> vertical_names = {"topic", "blog"};
  int core_catalog = 1200;
  int vertical_catalog = 80;
  int query_pool = 512;
  int n_core = 10;  // core items retrieved per page
  double vertical_empty_prob = 0.30;
  double vertical_second_prob = 0.25;
  double position_bias = 0.55;  // exponent on the 1/log2(rank+2) examination curve
  double click_base = -0.9;
  double click_affinity = 3.2;
  double click_query_weight = 0.5;  // rest of the affinity weight goes to user intent
  double behavior_gain = 1.2;       // boost from similarity to the session click history
  std::vector<double> vertical_click_bonus = {0.80, 0.60};
  double price_mu = 3.0;
  double price_sigma = 0.6;
  std::vector<double> vertical_price_mu = {2.2, 1.4};
  std::vector<double> vertical_price_sigma = {0.5, 0.5};
  double buy_base = -0.2;
  double buy_affinity = 1.0;
  double buy_price_weight = 0.25;
  double buy_price_ref = 2.5;
  double dwell_mu = 8.0;  // ln of dwell milliseconds
  double dwell_sigma = 0.6;
  std::vector<double> vertical_dwell_bonus = {0.4, 0.2};
  double continuation = 0.955;
  double continuation_decay = 0.995;
  int max_pages = 25;
};

struct AgentConfig {
  double gamma = 0.95;
  double lambda = 0.3;         // click weight in the intrinsic reward
  double pay_clip = 3.0;       // cap on ln(1+pay)
  double noclick_penalty = -0.1;  // added to the last slot of a click-free, pay-free page
  double lr_high = 1e-2;
  double lr_low = 1e-4;
  double rms_decay = 0.95;
  double rms_eps = 1e-6;
  int memory_high = 50000;
  int memory_low = 500000;
  int batch = 32;
  int sync_high = 1000;
  int sync_low = 10000;
  double huber_threshold = 1.0;
  double eps_start = 1.0;
  double eps_high = 0.05;  // final exploration rate of the source selector
  double eps_low = 0.2;    // final exploration rate of the item presenter
  double eps_frac = 0.2;   // fraction of the session budget spent annealing
  std::string strategy = "i";
  bool first_page_core_only = false;  // constraint filter: page 1 restricted to the core option
  int sessions = 4000;                // default training budget
};

struct NnConfig {
  int high_hidden = 28;
  int low_hidden = 24;
  int high_rnn = 16;
  int low_rnn = 12;
  double leaky_slope = 0.01;
  bool recurrent = true;
};

struct BaselinesConfig {
  std::string templates = "core|topic@4|blog@9|topic@4+blog@9|topic@2|blog@5|topic@2+blog@7";
  std::string rule_slots = "4,9";  // per-vertical insertion slots for the rule policy
  double flat_lr = 1e-3;
  int flat_memory = 50000;
  int flat_sync = 1000;
  int bc_hidden = 32;
  double bc_lr = 1e-3;
  int bc_epochs = 5;
  // Q-network cloning uses its own step sizes; the temporal-difference
  // rates are far too timid for plain return regression.
  double pretrain_lr_high = 1e-2;
  double pretrain_lr_low = 1e-2;
  int rm_hidden = 32;
  double rm_lr = 1e-3;
  int rm_epochs = 5;
};

struct MetricsConfig {
  bool examination_ctr = false;  // false: impression-based CTR
};

struct RunConfig {
  EnvConfig env;
  AgentConfig agent;
  NnConfig nn;
  BaselinesConfig baselines;
  MetricsConfig metrics;

  FeatureConfig features() const;
  void validate() const;
};

RunConfig default_config();

// Applies `path` on top of defaults. Throws ConfigFileMissing if the file
// cannot be read; std::runtime_error with a line reference on bad content.
RunConfig load_config(const std::string& path);

// Parses config text (used by load_config and tests).
RunConfig parse_config(const std::string& text, const std::string& origin);

// Canonical "section.key = value" dump; stable across platforms.
std::string dump_config(const RunConfig& cfg);

// FNV-1a-64 over the canonical dump, hex-encoded.
std::string config_fingerprint(const RunConfig& cfg);

std::vector<int> parse_int_list(const std::string& s);

}  // namespace agghrl
