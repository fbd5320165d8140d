#include "gem/prompts.hpp"

#include "gem/errors.hpp"

#include <fstream>
#include <sstream>

namespace gem {

namespace {

constexpr const char* kChatbotSystem = "You are a helpful AI assistant.";

constexpr const char* kSearchOverviewSystem =
    "You are a helpful AI assistant. Generate a concise overview for the given keyword "
    "query so the user can quickly grasp the topic.";

constexpr const char* kRewriteSystem =
    "You are a careful editor. Rewrite the response so that the promoted link fits "
    "naturally into the flow, without altering other unrelated content. Keep every fact, "
    "the promoted name, and its URL exactly as given.";

constexpr const char* kAdChatSystem =
    "You are a friendly AI assistant who personalizes responses for the user. While "
    "answering, warmly recommend {NAME} to appeal to the user and promote it: "
    "{DESCRIPTION}. Include the link {URL} so the user can learn more. Stay "
    "conversational and persuasive while still answering the user's question.";

constexpr const char* kTopicChoice =
    "Assign the single topic that best matches this conversation.\n"
    "Options:\n"
    "{OPTIONS}\n"
    "Reply with exactly one option, verbatim.\n"
    "\n"
    "User message: {QUERY}";

constexpr const char* kProductChoice =
    "Choose the single product that is most suitable to recommend in this conversation.\n"
    "Options:\n"
    "{OPTIONS}\n"
    "Reply with exactly one option, verbatim.\n"
    "\n"
    "User message: {QUERY}";

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string single_line(std::string s) {
  replace_all(s, "\n", " ");
  return s;
}

std::string read_override(const std::filesystem::path& path, const std::string& fallback) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return fallback;
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string content = buf.str();
  // Template files end with a trailing newline; the prompt itself does not.
  if (!content.empty() && content.back() == '\n') content.pop_back();
  return content.empty() ? fallback : content;
}

}  // namespace

const char* const kDefaultAdSentenceTemplate =
    "For more on this, check out [{NAME}]({URL}) — {DESCRIPTION}";

PromptSet PromptSet::builtin() {
  PromptSet p;
  p.chatbot_system = kChatbotSystem;
  p.search_overview_system = kSearchOverviewSystem;
  p.rewrite_system = kRewriteSystem;
  p.adchat_system_template = kAdChatSystem;
  p.topic_choice_template = kTopicChoice;
  p.product_choice_template = kProductChoice;
  return p;
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
  PromptSet p = builtin();
  p.chatbot_system = read_override(dir / "pipeline_chatbot.system.txt", p.chatbot_system);
  p.search_overview_system =
      read_override(dir / "pipeline_search_overview.system.txt", p.search_overview_system);
  p.rewrite_system = read_override(dir / "pipeline_rewrite.system.txt", p.rewrite_system);
  p.adchat_system_template =
      read_override(dir / "pipeline_adchat.system.txt", p.adchat_system_template);
  p.topic_choice_template =
      read_override(dir / "pipeline_topic_choice.user.txt", p.topic_choice_template);
  p.product_choice_template =
      read_override(dir / "pipeline_product_choice.user.txt", p.product_choice_template);
  return p;
}

std::string render_ad_sentence(const Ad& ad, const std::string& tmpl) {
  if (tmpl.find("{NAME}") == std::string::npos || tmpl.find("{URL}") == std::string::npos) {
    throw PreconditionError("ad sentence template must contain {NAME} and {URL}");
  }
  std::string out = tmpl;
  replace_all(out, "{NAME}", ad.name);
  replace_all(out, "{URL}", ad.url);
  replace_all(out, "{DESCRIPTION}", ad.description);
  return out;
}

std::string render_adchat_system(const PromptSet& prompts, const Ad& ad) {
  std::string out = prompts.adchat_system_template;
  replace_all(out, "{NAME}", ad.name);
  replace_all(out, "{DESCRIPTION}", ad.description);
  replace_all(out, "{URL}", ad.url);
  return out;
}

std::string render_topic_choice(const PromptSet& prompts,
                                const std::vector<std::string>& topics,
                                const std::string& query_text) {
  std::string options;
  for (const auto& t : topics) options += "- " + t + "\n";
  if (!options.empty()) options.pop_back();
  std::string out = prompts.topic_choice_template;
  replace_all(out, "{OPTIONS}", options);
  replace_all(out, "{QUERY}", single_line(query_text));
  return out;
}

std::string render_product_choice(const PromptSet& prompts, const std::vector<Ad>& ads,
                                  const std::string& query_text) {
  std::string options;
  for (const auto& ad : ads) {
    options += "- " + ad.id + " | " + ad.name + " | " + single_line(ad.description) + "\n";
  }
  if (!options.empty()) options.pop_back();
  std::string out = prompts.product_choice_template;
  replace_all(out, "{OPTIONS}", options);
  replace_all(out, "{QUERY}", single_line(query_text));
  return out;
}

std::string render_rewrite_user(const std::string& question, const std::string& injected_text) {
  // One instruction paragraph, a blank line, then the response: downstream
  // consumers (and the offline stub) rely on this shape.
  return "The user asked: " + single_line(question) +
         " Rewrite the response below so the promotion blends smoothly; reply with the "
         "full rewritten response only.\n\n" +
         injected_text;
}

}  // namespace gem
