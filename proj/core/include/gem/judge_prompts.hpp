#pragma once

#include "gem/judge.hpp"

namespace gem {

// Built-in judge prompt bodies, one system + one user template per metric.
// The copies under config/prompts/ are golden-tested against these.
const char* builtin_system_template(JudgeMetric metric);
const char* builtin_user_template(JudgeMetric metric);

}  // namespace gem
