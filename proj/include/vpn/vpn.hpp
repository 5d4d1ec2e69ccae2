#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vpn/data.hpp"
#include "vpn/solver.hpp"
#include "vpn/trigger.hpp"

namespace vpn {

enum class SearchMode { iterative, joint };

struct VpnConfig {
  int miss_tolerance = 0;       // k: suite members allowed to miss the target
  int trigger_size = 3;         // s: square side in pixels
  int stride = 1;
  double margin_delta = 1e-6;   // strict-classification margin
  double per_query_time = 1800.0;
  double total_time = 86400.0;
  double exclusion_radius = 0.05;  // widening of failed-assignment exclusions
  SearchMode mode = SearchMode::iterative;
  std::vector<int> label_order;    // empty = all labels, default ordering
  bool skip_vacuous_labels = true;
  int max_iterative_rounds = 64;
  long max_nodes = 2'000'000;
  double min_width = 1.0 / 512.0;
  int max_free_dim = kDefaultMaxFreeDim;
  int workers = 1;
  bool deterministic = false;  // forces single-worker solving
};

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QueryOutcome {
  enum class Status { sat, sat_not_general, unsat, unknown };

  int input_index = 0;  // -1 for joint queries spanning the whole suite
  TriggerRegion region;
  int target = 0;
  Status status = Status::unknown;
  bool proven = false;  // unsat/sat_not_general: search space exhausted soundly
  std::optional<TriggerAssignment> values;  // sat only
  int miss_count = 0;                       // sat only
  int rounds = 1;
  std::vector<BlockRegion> blocks;  // exclusions active at the final solve
  double wall_time_s = 0.0;
};

struct Verdict {
  enum class Kind { poisoned, poison_free, inconclusive };

  Kind kind = Kind::inconclusive;
  // poisoned
  TriggerRegion region;
  TriggerAssignment assignment;
  int target = 0;
  int successes = 0;
  int misses = 0;
  // poison_free
  int n_unsat = 0;
  double resolution_min_width = 0.0;
  double resolution_exclusion_radius = 0.0;
  // inconclusive
  int unknown_count = 0;
};

struct VerifyResult {
  Verdict verdict;
  std::vector<QueryOutcome> outcomes;
  SolverStats stats;
  std::vector<int> skipped_labels;  // vacuous targets excluded from the search
};

// Counts suite members that classify as target once the trigger is applied;
// pure forward passes, no solver.
struct GeneralizationCount {
  int successes = 0;
  int misses = 0;
};
GeneralizationCount generalization_check(const Network& net, const TestSuite& suite,
                                         const TriggerRegion& region,
                                         const TriggerAssignment& assignment, int target,
                                         int threads = 1);

struct SolveOneResult {
  enum class Kind { found, invalid_proven, invalid_unknown };

  Kind kind = Kind::invalid_unknown;
  TriggerAssignment values;  // found only
  int successes = 0;
  int miss_count = 0;
  int rounds = 0;
  std::vector<BlockRegion> blocks;
  SolveStatus::Reason reason = SolveStatus::Reason::none;
  double wall_time_s = 0.0;
};

// One (image, region, target) query: solve for the image alone, check
// generalization across the suite, exclude failed assignments and retry
// until proven out, accepted, or out of budget.
SolveOneResult solve_trigger_for_label(const Network& net, const AffineNetwork& affine_net,
                                       const TestSuite& suite, int miss_tolerance,
                                       const Image& x, const TriggerRegion& region, int target,
                                       const VpnConfig& cfg, SolverStats* stats = nullptr);

// Full verification loop over (input, region, label). Returns poisoned on
// the first generalizing assignment, poison_free once more than
// miss_tolerance inputs are proven un-poisonable (joint mode: every
// region/label pair proven), inconclusive otherwise.
VerifyResult vpn_verify(const Network& net, const TestSuite& suite, const VpnConfig& cfg);

}  // namespace vpn
