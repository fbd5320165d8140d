#pragma once

#include "gem/model.hpp"

namespace gem {

// Token cost accounting over pipeline traces. Counted stages are the
// chat-completion ones: generate, topic_assign, product_select, rewrite.
// Judge calls and retrieve-stage embedding inputs never affect the ledger.
// With subtract_generate_baseline the first generate-stage call's tokens are
// removed from the totals (an optional "extra over an ad-free call" view,
// off by default).
long ittft(const PipelineTrace& trace, bool subtract_generate_baseline = false);
long ottft(const PipelineTrace& trace, bool subtract_generate_baseline = false);

// Aggregated cost: 0.5 * ittft + ottft (input:output unit prices ~ 1:2).
double cost_overall(double ittft_value, double ottft_value);

struct CostReport {
  double ittft = 0.0;   // mean prompt tokens per query
  double ottft = 0.0;   // mean completion tokens per query
  double overall = 0.0; // 0.5 * ittft + ottft
};

CostReport make_cost_report(double mean_ittft, double mean_ottft);

}  // namespace gem
