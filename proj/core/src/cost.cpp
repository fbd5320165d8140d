#include "gem/cost.hpp"

#include "gem/errors.hpp"

namespace gem {

namespace {

bool counted_stage(Stage stage) {
  return stage == Stage::generate || stage == Stage::topic_assign ||
         stage == Stage::product_select || stage == Stage::rewrite;
}

long sum_tokens(const PipelineTrace& trace, bool prompt_side, bool subtract_baseline) {
  long total = 0;
  bool baseline_taken = false;
  for (const auto& call : trace.calls) {
    if (!counted_stage(call.stage)) continue;
    long tokens = prompt_side ? call.prompt_tokens : call.completion_tokens;
    total += tokens;
    if (subtract_baseline && !baseline_taken && call.stage == Stage::generate) {
      total -= tokens;
      baseline_taken = true;
    }
  }
  return total;
}

}  // namespace

long ittft(const PipelineTrace& trace, bool subtract_generate_baseline) {
  return sum_tokens(trace, /*prompt_side=*/true, subtract_generate_baseline);
}

long ottft(const PipelineTrace& trace, bool subtract_generate_baseline) {
  return sum_tokens(trace, /*prompt_side=*/false, subtract_generate_baseline);
}

double cost_overall(double ittft_value, double ottft_value) {
  if (ittft_value < 0.0 || ottft_value < 0.0) {
    throw PreconditionError("cost_overall: token means must be non-negative");
  }
  return 0.5 * ittft_value + ottft_value;
}

CostReport make_cost_report(double mean_ittft, double mean_ottft) {
  CostReport report;
  report.ittft = mean_ittft;
  report.ottft = mean_ottft;
  report.overall = cost_overall(mean_ittft, mean_ottft);
  return report;
}

}  // namespace gem
