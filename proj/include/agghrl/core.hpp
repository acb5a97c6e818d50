#pragma once
// Domain types for aggregated search pages: sources, items, requests, pages,
// the two decision levels' states, and their fixed-width featurizations.
// Source id 0 is the core item corpus; ids 1..N are vertical sources.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agghrl/nn.hpp"

namespace agghrl {

// Subset of vertical sources chosen for one result page. The core source is
// always included; bit (j-1) covers vertical source j.
struct SourceSet {
  unsigned bits = 0;

  static SourceSet from_index(unsigned idx) { return SourceSet{idx}; }
  unsigned index() const { return bits; }
  bool contains(int source_id) const {
    return source_id == 0 || ((bits >> (source_id - 1)) & 1u) != 0;
  }
  bool operator==(const SourceSet& o) const { return bits == o.bits; }
};

struct FeatureConfig {
  int d_item = 8;        // item and query embedding width
  int n_verticals = 2;   // vertical sources beyond the core corpus
  int demo_dim = 4;      // user demographic block
  int page_enc_dim = 2;  // page-number encoding block

  int n_sources() const { return 1 + n_verticals; }
  int n_options() const { return 1 << n_verticals; }
  int n_actions() const { return 1 + n_verticals; }
  int request_dim() const { return d_item + demo_dim + d_item + page_enc_dim; }
  int high_dim() const { return request_dim() + n_sources() * d_item + n_verticals; }
  // The low featurizer uses a 1-dim page encoding and per-vertical option
  // bits; each per-source block carries the top-item embedding plus its query
  // match score and remaining stack depth.
  int low_dim() const {
    return request_dim() - 1 + n_sources() * (d_item + 2) + n_actions() + n_verticals;
  }
};

struct SearchRequest {
  std::int64_t request_id = 0;
  std::int64_t user_id = 0;
  std::int64_t query_id = 0;
  int page_number = 1;  // 1-based
  Vec query_embedding;
  Vec demographics;
  Vec recent_click_mean;  // zero vector until the user clicks something
};

struct Item {
  std::int64_t item_id = 0;
  int source = 0;
  int within_source_rank = 0;  // 0-based rank inside its source's ranking
  double price = 0.0;
  Vec embedding;
};

// Ranked candidate stacks, one per source, as returned by the backends.
struct SourceResults {
  std::vector<std::vector<Item>> by_source;

  int count(int source_id) const { return static_cast<int>(by_source[source_id].size()); }
};

struct PageSlot {
  int position = 0;  // 1-based slot on the page
  Item item;
};

struct Page {
  std::vector<PageSlot> slots;
};

struct HighState {
  SearchRequest request;
  std::vector<Vec> source_mean;  // per-source mean embedding, zeros when empty
  SourceSet latest_option;       // last executed option; empty set at session start
};

struct LowState {
  SearchRequest request;
  std::vector<Vec> top_items;    // current top of each stack, zeros when empty
  std::vector<char> available;   // stack non-empty flags, per source
  std::vector<int> remaining;    // undrawn items left in each stack, per source
  int last_action = -1;          // source chosen at the previous slot, -1 before the first
  SourceSet option;              // option under execution
};

// Number of primitive steps option o runs for given the current stacks.
int slot_count(const SourceSet& o, const SourceResults& results);

// Mean embedding of one source's candidates; zero vector when the stack is
// empty. d_item is required to size that zero vector.
Vec source_mean_embedding(const SourceResults& results, int source_id, int d_item);

Vec featurize_high(const HighState& s, const FeatureConfig& cfg);
Vec featurize_low(const LowState& s, const FeatureConfig& cfg);

// Per-slot user feedback joined back to a shown page.
struct SlotFeedback {
  bool examined = false;
  bool clicked = false;
  double pay = 0.0;       // transaction amount, 0 when no purchase
  double dwell_ms = 0.0;  // dwell time after a click, 0 otherwise
};

struct PageFeedback {
  std::vector<SlotFeedback> slots;
};

// One logged page: what was requested, what was shown, what the user did,
// and (when the logger is a learning policy) which decisions produced it.
struct PageLog {
  std::int64_t query_id = 0;
  int page_number = 1;
  bool has_decisions = false;  // option/actions filled in by the writing policy
  unsigned option_bits = 0;
  std::vector<int> actions;                   // per-slot source choice
  std::vector<std::int64_t> retrieved_items;  // flattened stacks, see retrieved_counts
  std::vector<int> retrieved_counts;          // per-source stack sizes
  std::vector<std::int64_t> shown_items;
  std::vector<int> shown_sources;
  std::vector<double> shown_prices;
  std::vector<char> examined;
  std::vector<char> clicked;
  std::vector<double> pay;
  std::vector<double> dwell_ms;
};

struct SessionLog {
  std::int64_t user_id = 0;
  std::int64_t session_id = 0;
  std::string policy;
  std::vector<PageLog> pages;
};

}  // namespace agghrl
