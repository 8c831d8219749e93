#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tgia {

enum class Strategy { stay_away, contrast, fusion };

const char* strategy_name(Strategy strategy);
Strategy strategy_from_name(const std::string& name);

/// Domain metadata rendered into the general prompt clause. max_words is
/// conventionally mean text length plus two standard deviations.
struct DomainMeta {
  std::string topic_name;
  std::vector<std::string> category_names;
  int max_words = 60;
};

struct PromptBundle {
  Strategy strategy = Strategy::stay_away;
  std::string system_text;
  std::string user_text;
  int max_words = 60;
};

enum class GenBackend { http, mock };

/// Backend failure surfaced by generate(): exhausted retries, a non-2xx
/// status, or an unusable completion. Campaigns record the affected target
/// as skipped instead of failing.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenParams {
  GenBackend backend = GenBackend::mock;
  std::string endpoint;    // http: e.g. https://host/v1/chat/completions
  std::string model_name;  // http
  double temperature = 0.7;
  std::uint64_t seed = 0;  // mock
  int timeout_ms = 30000;
  int max_retries = 3;
};

/// Example text with the T-I similarity it scored against the target.
using ScoredText = std::pair<std::string, double>;

/// Assembles the strategy's system prompt (plus the general topic/category
/// clause) and the user prompt listing the target as Negative Example 1,
/// further negatives and positives each with its similarity sentence, and
/// the word limit. Pure function; similarities render with 4 decimals.
/// contrast and fusion require at least one positive.
PromptBundle build_prompt(Strategy strategy, const std::string& target_text,
                          const std::vector<ScoredText>& negatives,
                          const std::vector<ScoredText>& positives,
                          const DomainMeta& meta);

/// Examples recovered from a user prompt; used by the mock backend and the
/// prompt regression tests.
struct ParsedPrompt {
  std::vector<ScoredText> negatives;  // first entry is the target, sim NaN
  std::vector<ScoredText> positives;
  int max_words = 0;
};
ParsedPrompt parse_user_prompt(const std::string& user_text);

/// Injection point for the http transport, so tests can fake or fail it.
class HttpTransport {
 public:
  struct Response {
    bool transport_ok = false;  // false: connection-level failure
    int status = 0;
    std::string body;
    std::string error;
  };
  virtual ~HttpTransport() = default;
  virtual Response post(const std::string& endpoint, const std::string& body,
                        const std::string& api_key, int timeout_ms) = 0;
};

/// Name of the environment variable carrying the http credential.
inline constexpr const char* kApiKeyEnvVar = "LLM_API_KEY";

/// Generates one candidate text. The http backend posts a chat-completion
/// JSON body and retries transient failures with exponential backoff; the
/// mock backend deterministically synthesizes text from the bundle alone
/// (positive-example vocabulary preferred, top-frequency negative words
/// excluded, filler padding, truncated to max_words) and never touches the
/// transport.
std::string generate(const PromptBundle& bundle, const GenParams& params,
                     HttpTransport* transport = nullptr);

}  // namespace tgia
