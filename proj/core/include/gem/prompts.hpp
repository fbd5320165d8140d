#pragma once

#include "gem/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gem {

// Pipeline prompt templates. Defaults are embedded; load() picks up
// overrides from plain text files in a config directory:
//   pipeline_chatbot.system.txt, pipeline_search_overview.system.txt,
//   pipeline_rewrite.system.txt, pipeline_adchat.system.txt,
//   pipeline_topic_choice.user.txt, pipeline_product_choice.user.txt
struct PromptSet {
  std::string chatbot_system;
  std::string search_overview_system;
  std::string rewrite_system;
  std::string adchat_system_template;   // {NAME}, {DESCRIPTION}, {URL}
  std::string topic_choice_template;    // {OPTIONS}, {QUERY}
  std::string product_choice_template;  // {OPTIONS}, {QUERY}

  static PromptSet builtin();
  static PromptSet load(const std::filesystem::path& dir);
};

// Default surface form of an injected ad sentence.
extern const char* const kDefaultAdSentenceTemplate;

// Renders the ad sentence from a template with {NAME}, {URL}, {DESCRIPTION}
// placeholders. {NAME} and {URL} are required; a template lacking either is
// a precondition error.
std::string render_ad_sentence(const Ad& ad, const std::string& tmpl);

std::string render_adchat_system(const PromptSet& prompts, const Ad& ad);
std::string render_topic_choice(const PromptSet& prompts,
                                const std::vector<std::string>& topics,
                                const std::string& query_text);
std::string render_product_choice(const PromptSet& prompts, const std::vector<Ad>& ads,
                                  const std::string& query_text);
std::string render_rewrite_user(const std::string& question, const std::string& injected_text);

}  // namespace gem
