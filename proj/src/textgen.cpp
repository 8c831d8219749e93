#include "tgia/textgen.hpp"

#include "tgia/encoder.hpp"
#include "tgia/rng.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>
#include <unordered_set>

namespace tgia {

const char* strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::stay_away: return "stay_away";
    case Strategy::contrast: return "contrast";
    case Strategy::fusion: return "fusion";
  }
  return "unknown";
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "stay_away") return Strategy::stay_away;
  if (name == "contrast") return Strategy::contrast;
  if (name == "fusion") return Strategy::fusion;
  throw std::invalid_argument("unknown strategy: " + name);
}

namespace {

constexpr const char* kStayAwaySystem =
    "Your task is to craft a book description and title that remain "
    "distinctly different from the user's input negative examples in terms "
    "of length, vocabulary, theme, and style.";

constexpr const char* kContrastSystem =
    "Your task is to craft a book description and title that closely mirror "
    "the user's input positive examples in terms of length, vocabulary, "
    "theme, and style, while ensuring they remain distinctly different from "
    "the user's input negative examples.";

constexpr const char* kFusionSystem =
    "Your task is to craft a book description and title that naturally "
    "weave together the semantics of the user's input positive examples, "
    "reflecting their length, vocabulary, theme, and style. Ensure the "
    "content remains distinctly different from the user's input negative "
    "examples by incorporating keywords from the positive examples and "
    "avoiding those from the negative examples.";

std::string one_line(const std::string& text) {
  std::string out = text;
  for (char& ch : out)
    if (ch == '\n' || ch == '\r' || ch == '\t') ch = ' ';
  return out;
}

std::string format_sim(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

}  // namespace

PromptBundle build_prompt(Strategy strategy, const std::string& target_text,
                          const std::vector<ScoredText>& negatives,
                          const std::vector<ScoredText>& positives,
                          const DomainMeta& meta) {
  if (meta.category_names.empty())
    throw std::invalid_argument("category_names must be nonempty");
  if (meta.max_words < 1)
    throw std::invalid_argument("max_words must be >= 1");
  if (strategy != Strategy::stay_away && positives.empty())
    throw std::invalid_argument(std::string(strategy_name(strategy)) +
                                " strategy requires at least one positive "
                                "example");

  PromptBundle bundle;
  bundle.strategy = strategy;
  bundle.max_words = meta.max_words;

  std::string system;
  switch (strategy) {
    case Strategy::stay_away: system = kStayAwaySystem; break;
    case Strategy::contrast: system = kContrastSystem; break;
    case Strategy::fusion: system = kFusionSystem; break;
  }
  system += "\nThe book should fit within the " + meta.topic_name +
            " genre and fall into one of these categories: {";
  for (std::size_t i = 0; i < meta.category_names.size(); ++i) {
    if (i) system += ", ";
    system += meta.category_names[i];
  }
  system += "}.";
  bundle.system_text = std::move(system);

  std::string user =
      "Here are examples of high and low semantic similarity to guide your "
      "task.\n";
  user += "Negative Example 1: " + one_line(target_text) + "\n";
  int neg_index = 2;
  for (const auto& [text, sim] : negatives) {
    user += "Negative Example " + std::to_string(neg_index) + ": " +
            one_line(text) + "\n";
    user += "The similarity between Negative Example 1 and Negative Example " +
            std::to_string(neg_index) + " is " + format_sim(sim) + ".\n";
    ++neg_index;
  }
  if (strategy != Strategy::stay_away) {
    int pos_index = 1;
    for (const auto& [text, sim] : positives) {
      user += "Positive Example " + std::to_string(pos_index) + ": " +
              one_line(text) + "\n";
      user +=
          "The similarity between Negative Example 1 and Positive Example " +
          std::to_string(pos_index) + " is " + format_sim(sim) + ".\n";
      ++pos_index;
    }
  }
  user += "Please generate the new book and description.\n";
  user += "Limit length: " + std::to_string(meta.max_words) + " words.";
  bundle.user_text = std::move(user);
  return bundle;
}

ParsedPrompt parse_user_prompt(const std::string& user_text) {
  ParsedPrompt parsed;
  std::size_t pos = 0;
  auto next_line = [&](std::string& line) {
    if (pos >= user_text.size()) return false;
    const std::size_t end = user_text.find('\n', pos);
    if (end == std::string::npos) {
      line = user_text.substr(pos);
      pos = user_text.size();
    } else {
      line = user_text.substr(pos, end - pos);
      pos = end + 1;
    }
    return true;
  };

  const std::string neg_prefix = "Negative Example ";
  const std::string pos_prefix = "Positive Example ";
  const std::string sim_prefix = "The similarity between Negative Example 1 and ";
  const std::string limit_prefix = "Limit length: ";

  std::string line;
  while (next_line(line)) {
    if (line.rfind(sim_prefix, 0) == 0) {
      const std::size_t is_at = line.rfind(" is ");
      if (is_at == std::string::npos) continue;
      const double sim = std::strtod(line.c_str() + is_at + 4, nullptr);
      const std::string which = line.substr(sim_prefix.size(), 8);
      if (which == "Negative" && !parsed.negatives.empty())
        parsed.negatives.back().second = sim;
      else if (which == "Positive" && !parsed.positives.empty())
        parsed.positives.back().second = sim;
    } else if (line.rfind(neg_prefix, 0) == 0) {
      const std::size_t colon = line.find(": ");
      if (colon == std::string::npos) continue;
      parsed.negatives.emplace_back(line.substr(colon + 2),
                                    std::numeric_limits<double>::quiet_NaN());
    } else if (line.rfind(pos_prefix, 0) == 0) {
      const std::size_t colon = line.find(": ");
      if (colon == std::string::npos) continue;
      parsed.positives.emplace_back(line.substr(colon + 2),
                                    std::numeric_limits<double>::quiet_NaN());
    } else if (line.rfind(limit_prefix, 0) == 0) {
      parsed.max_words =
          static_cast<int>(std::strtol(line.c_str() + limit_prefix.size(),
                                       nullptr, 10));
    }
  }
  return parsed;
}

namespace {

const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> words{
      "the", "a",  "an", "of",  "and", "to",  "in", "is", "it",
      "as",  "on", "at", "for", "by",  "with", "or", "be", "this"};
  return words;
}

bool is_content_word(const std::string& token) {
  return token.size() >= 3 && stopwords().count(token) == 0;
}

std::vector<std::string> content_words(const std::string& text) {
  std::vector<std::string> out;
  for (auto& token : tokenize(text))
    if (is_content_word(token)) out.push_back(std::move(token));
  return out;
}

/// The `count` most frequent content words, frequency ties broken
/// lexicographically.
std::vector<std::string> top_frequency_words(const std::string& text,
                                             std::size_t count) {
  std::map<std::string, int> freq;
  for (const auto& word : content_words(text)) ++freq[word];
  std::vector<std::pair<std::string, int>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > count) ranked.resize(count);
  std::vector<std::string> out;
  for (auto& [word, n] : ranked) out.push_back(std::move(word));
  return out;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words{
      "journey",  "overview", "notably",  "gathering", "quiet",
      "window",   "evening",  "passage",  "carried",   "beyond",
      "slowly",   "remained", "together", "morning",   "letters",
      "distant",  "figure",   "turning",  "weather",   "corner",
      "outline",  "measure",  "settled",  "crossing",  "further",
      "moment",   "balance",  "account",  "shadow",    "harbor"};
  return words;
}

std::string mock_generate(const PromptBundle& bundle, const GenParams& params) {
  const ParsedPrompt parsed = parse_user_prompt(bundle.user_text);

  std::set<std::string> banned;
  for (const auto& [text, sim] : parsed.negatives)
    for (auto& word : top_frequency_words(text, 5)) banned.insert(word);

  // Deduplicated per-positive pools, banned words removed.
  std::vector<std::vector<std::string>> positive_pools;
  for (const auto& [text, sim] : parsed.positives) {
    std::vector<std::string> pool = content_words(text);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    std::erase_if(pool,
                  [&](const std::string& w) { return banned.count(w) > 0; });
    if (!pool.empty()) positive_pools.push_back(std::move(pool));
  }
  std::vector<std::string> combined_pool;
  for (const auto& pool : positive_pools)
    combined_pool.insert(combined_pool.end(), pool.begin(), pool.end());
  std::sort(combined_pool.begin(), combined_pool.end());
  combined_pool.erase(std::unique(combined_pool.begin(), combined_pool.end()),
                      combined_pool.end());

  std::vector<std::string> filler;
  for (const auto& word : filler_words())
    if (banned.count(word) == 0) filler.push_back(word);

  Rng rng(mix_seed(params.seed,
                   fnv1a64(bundle.system_text + "\x1f" + bundle.user_text)));
  std::vector<std::string> words;
  const std::size_t target_length = static_cast<std::size_t>(std::max(
      1, std::min(bundle.max_words,
                  10 + 2 * static_cast<int>(parsed.positives.size()))));

  // One word from every positive example pool first.
  for (const auto& pool : positive_pools) {
    if (words.size() >= target_length) break;
    words.push_back(
        pool[static_cast<std::size_t>(rng.uniform_below(pool.size()))]);
  }
  while (words.size() < target_length) {
    const bool from_positive =
        !combined_pool.empty() && rng.bernoulli(0.6);
    const auto& pool = from_positive ? combined_pool : filler;
    if (pool.empty()) break;
    words.push_back(
        pool[static_cast<std::size_t>(rng.uniform_below(pool.size()))]);
  }
  if (words.size() > static_cast<std::size_t>(bundle.max_words))
    words.resize(static_cast<std::size_t>(bundle.max_words));

  std::string out;
  for (const auto& word : words) {
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

class RealHttpTransport : public HttpTransport {
 public:
  Response post(const std::string& endpoint, const std::string& body,
                const std::string& api_key, int timeout_ms) override {
    Response response;
    const std::size_t scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) {
      response.error = "endpoint must carry a scheme: " + endpoint;
      return response;
    }
    const std::size_t path_start = endpoint.find('/', scheme_end + 3);
    const std::string base = path_start == std::string::npos
                                 ? endpoint
                                 : endpoint.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/" : endpoint.substr(path_start);

    httplib::Client client(base);
    client.set_connection_timeout(0, timeout_ms * 1000);
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    httplib::Headers headers{{"Authorization", "Bearer " + api_key}};
    auto result = client.Post(path, headers, body, "application/json");
    if (!result) {
      response.error = "transport failure: " + httplib::to_string(result.error());
      return response;
    }
    response.transport_ok = true;
    response.status = result->status;
    response.body = result->body;
    return response;
  }
};

bool transient_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

std::string http_generate(const PromptBundle& bundle, const GenParams& params,
                          HttpTransport* transport) {
  if (params.endpoint.empty())
    throw std::runtime_error("http backend: no endpoint configured");
  const char* key = std::getenv(kApiKeyEnvVar);
  if (key == nullptr || *key == '\0')
    throw std::runtime_error(std::string("http backend: credential missing; "
                                         "set ") +
                             kApiKeyEnvVar);

  nlohmann::json body{
      {"model", params.model_name},
      {"messages",
       {{{"role", "system"}, {"content", bundle.system_text}},
        {{"role", "user"}, {"content", bundle.user_text}}}},
      {"temperature", params.temperature}};
  const std::string payload = body.dump();

  RealHttpTransport real;
  HttpTransport* wire = transport ? transport : &real;

  std::string last_error;
  for (int attempt = 0; attempt <= params.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(
          std::chrono::milliseconds(250LL << (attempt - 1)));
    const auto response =
        wire->post(params.endpoint, payload, key, params.timeout_ms);
    if (!response.transport_ok) {
      last_error = response.error;
      continue;
    }
    if (transient_status(response.status)) {
      last_error = "transient status " + std::to_string(response.status);
      continue;
    }
    if (response.status < 200 || response.status >= 300)
      throw std::runtime_error("http backend: " + params.endpoint +
                               " returned status " +
                               std::to_string(response.status));
    try {
      const auto parsed = nlohmann::json::parse(response.body);
      const std::string content = parsed.at("choices")
                                      .at(0)
                                      .at("message")
                                      .at("content")
                                      .get<std::string>();
      if (content.empty())
        throw std::runtime_error("http backend: empty completion from " +
                                 params.endpoint);
      return content;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("http backend: malformed completion from " +
                               params.endpoint + ": " + e.what());
    }
  }
  throw std::runtime_error("http backend: " + params.endpoint +
                           " unreachable after " +
                           std::to_string(params.max_retries + 1) +
                           " attempts: " + last_error);
}

}  // namespace

std::string generate(const PromptBundle& bundle, const GenParams& params,
                     HttpTransport* transport) {
  if (params.temperature < 0.0)
    throw std::invalid_argument("temperature must be >= 0");
  if (params.max_retries < 0)
    throw std::invalid_argument("max_retries must be >= 0");
  if (params.backend == GenBackend::mock) return mock_generate(bundle, params);
  return http_generate(bundle, params, transport);
}

}  // namespace tgia
