#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ravenx/puzzle.hpp"

namespace ravenx {

/// Plain prompts list modal integer tuples; probabilistic prompts list every
/// attribute as "<p::v,...>" with two-decimal probabilities.
enum class PromptStyle { Plain, Probabilistic };

std::string_view style_name(PromptStyle style);
PromptStyle style_from_name(std::string_view name);

/// Probabilistic iff the puzzle carries a non-degenerate PMF.
PromptStyle style_for(const Puzzle& puzzle);

/// Renders the discriminative prompt. Throws StyleMismatchError when `style`
/// differs from style_for(puzzle).
std::string render_prompt(const Puzzle& puzzle, PromptStyle style);

struct ParsedAnswer {
  int index = 0;
  bool failed = true;

  friend bool operator==(const ParsedAnswer&, const ParsedAnswer&) = default;
};

/// Last "My Answer: Answer #<j>" in the response wins. No match, or an index
/// outside [0, 7], yields {0, failed}.
ParsedAnswer parse_answer(std::string_view response);

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 1000;
  double backoff_multiplier = 2.0;
};

struct ProviderConfig {
  /// Full URL of the chat-completion route, e.g. https://host/v1/chat/completions.
  std::string endpoint;
  std::string model;
  /// Environment variable holding the bearer token; unset means no header.
  std::string api_key_env = "OPENAI_API_KEY";
  int max_output_tokens = 25000;
  /// Request field carrying max_output_tokens ("max_tokens" or
  /// "max_completion_tokens" depending on the provider).
  std::string max_tokens_field = "max_tokens";
  std::optional<double> temperature = 0.6;
  std::optional<double> top_p = 0.7;
  std::optional<std::string> reasoning_effort;
  int max_concurrency = 1;
  double timeout_s = 600.0;
  RetryPolicy retry;

  void validate() const;
};

struct ChatReply {
  std::string content;
  long output_tokens = 0;
};

/// One single-turn chat completion. Implementations throw TransportError on
/// retryable failures and AuthError on rejected credentials.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;
  virtual ChatReply complete(const std::string& prompt) = 0;
};

/// Request body: one user message plus sampling fields; optional fields are
/// omitted when unset.
nlohmann::json build_chat_request(const ProviderConfig& provider, const std::string& prompt);

/// Extracts choices[0].message.content and the provider-reported output
/// token count (0 when absent). Throws TransportError on malformed bodies.
ChatReply parse_chat_response(std::string_view body);

class HttpChatTransport : public ChatTransport {
 public:
  explicit HttpChatTransport(ProviderConfig provider);
  ChatReply complete(const std::string& prompt) override;

 private:
  ProviderConfig provider_;
  std::string base_url_;
  std::string path_;
  std::string api_key_;
};

struct EvalOptions {
  /// Append-only JSONL journal; records already present are not re-queried.
  std::optional<std::filesystem::path> journal;
  /// Write prompts to <dir>/<puzzle_id>.txt instead of querying.
  std::optional<std::filesystem::path> dry_run_dir;
  /// nullopt selects style_for() per puzzle.
  std::optional<PromptStyle> style;
};

/// One request per puzzle with bounded parallelism and retries. Returns
/// records in dataset order (empty for a dry run). Transport failures that
/// outlive the retry policy become parse_failed records; AuthError aborts.
std::vector<EvalRecord> run_eval(std::span<const Puzzle> dataset, ChatTransport& transport,
                                 const ProviderConfig& provider, const EvalOptions& options);

std::vector<EvalRecord> run_eval(std::span<const Puzzle> dataset, const ProviderConfig& provider,
                                 const EvalOptions& options);

}  // namespace ravenx
