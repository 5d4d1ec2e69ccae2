#pragma once

#include <string>

#include "vpn/data.hpp"
#include "vpn/trigger.hpp"

namespace vpn {

struct AttackReport {
  std::string model_id;
  std::string source_model_id;  // set by transfer_evaluate
  TriggerRegion region;
  TriggerAssignment assignment;
  int target = 0;
  double asr_all = 0.0;                    // over every image
  double asr_excluding_target_class = 0.0; // over images with ground truth != target
  long evaluated_count = 0;
};

class eval_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double clean_accuracy(const Network& net, const Dataset& data, int threads = 1);

AttackReport attack_success_rate(const Network& net, const Dataset& data,
                                 const TriggerRegion& region,
                                 const TriggerAssignment& assignment, int target,
                                 const std::string& model_id = "", int threads = 1);

// Replays the source report's trigger on another model over fresh data.
AttackReport transfer_evaluate(const AttackReport& source_report, const Network& target_net,
                               const Dataset& data, const std::string& target_model_id = "",
                               int threads = 1);

}  // namespace vpn
