#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <regex>
#include <thread>
#include <unordered_map>

#include <httplib.h>

#include "ravenx/errors.hpp"
#include "ravenx/harness.hpp"
#include "ravenx/jsonl.hpp"

namespace ravenx {

using json = nlohmann::json;

void ProviderConfig::validate() const {
  if (max_concurrency < 1) throw ConfigError("max_concurrency must be >= 1");
  if (!(timeout_s > 0.0)) throw ConfigError("timeout must be positive");
  if (retry.max_attempts < 1) throw ConfigError("retry policy needs at least one attempt");
  if (retry.initial_backoff_ms < 0 || retry.backoff_multiplier < 1.0) {
    throw ConfigError("retry backoff must be non-negative and non-shrinking");
  }
  if (max_output_tokens < 1) throw ConfigError("max_output_tokens must be positive");
}

json build_chat_request(const ProviderConfig& provider, const std::string& prompt) {
  json body;
  body["model"] = provider.model;
  body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  body[provider.max_tokens_field] = provider.max_output_tokens;
  if (provider.temperature) body["temperature"] = *provider.temperature;
  if (provider.top_p) body["top_p"] = *provider.top_p;
  if (provider.reasoning_effort) body["reasoning_effort"] = *provider.reasoning_effort;
  return body;
}

ChatReply parse_chat_response(std::string_view body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw TransportError(std::string("chat response is not JSON: ") + e.what());
  }
  ChatReply reply;
  try {
    const auto& message = doc.at("choices").at(0).at("message");
    if (message.contains("content") && message["content"].is_string()) {
      reply.content = message["content"].get<std::string>();
    }
  } catch (const json::exception&) {
    throw TransportError("chat response has no choices[0].message");
  }
  if (doc.contains("usage") && doc["usage"].is_object()) {
    const auto& usage = doc["usage"];
    for (const char* key : {"completion_tokens", "output_tokens"}) {
      if (usage.contains(key) && usage[key].is_number_integer()) {
        reply.output_tokens = usage[key].get<long>();
        break;
      }
    }
  }
  return reply;
}

HttpChatTransport::HttpChatTransport(ProviderConfig provider) : provider_(std::move(provider)) {
  provider_.validate();
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch match;
  if (!std::regex_match(provider_.endpoint, match, url)) {
    throw ConfigError("endpoint must be an http(s) URL, got '" + provider_.endpoint + "'");
  }
  base_url_ = match[1].str();
  path_ = match[2].matched ? match[2].str() : "/";
  if (const char* key = std::getenv(provider_.api_key_env.c_str())) api_key_ = key;
}

ChatReply HttpChatTransport::complete(const std::string& prompt) {
  httplib::Client client(base_url_);
  const auto timeout = std::chrono::duration<double>(provider_.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const auto body = build_chat_request(provider_, prompt).dump();
  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) {
    throw TransportError("request to " + provider_.endpoint +
                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("endpoint returned HTTP " + std::to_string(res->status));
  }
  return parse_chat_response(res->body);
}

std::vector<EvalRecord> run_eval(std::span<const Puzzle> dataset, ChatTransport& transport,
                                 const ProviderConfig& provider, const EvalOptions& options) {
  provider.validate();
  auto prompt_for = [&](const Puzzle& p) {
    return render_prompt(p, options.style.value_or(style_for(p)));
  };

  if (options.dry_run_dir) {
    std::filesystem::create_directories(*options.dry_run_dir);
    for (const auto& p : dataset) {
      std::ofstream out(*options.dry_run_dir / (p.puzzle_id + ".txt"), std::ios::binary);
      out << prompt_for(p);
    }
    return {};
  }

  std::unordered_map<std::string, EvalRecord> done;
  if (options.journal && std::filesystem::exists(*options.journal)) {
    for (auto& r : read_records(*options.journal)) done.insert_or_assign(r.puzzle_id, std::move(r));
  }
  std::ofstream journal;
  if (options.journal) {
    if (options.journal->has_parent_path()) {
      std::filesystem::create_directories(options.journal->parent_path());
    }
    journal.open(*options.journal, std::ios::binary | std::ios::app);
    if (!journal) throw Error("cannot open journal " + options.journal->string());
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!done.contains(dataset[i].puzzle_id)) pending.push_back(i);
  }

  std::vector<std::optional<EvalRecord>> fresh(dataset.size());
  std::mutex sink;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr failure;

  auto evaluate = [&](const Puzzle& puzzle) {
    const auto prompt = prompt_for(puzzle);
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    std::optional<ChatReply> reply;
    double backoff = provider.retry.initial_backoff_ms;
    for (int attempt = 1; attempt <= provider.retry.max_attempts; ++attempt) {
      try {
        reply = transport.complete(prompt);
        break;
      } catch (const TransportError& e) {
        error = e.what();
        if (attempt < provider.retry.max_attempts) {
          std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(backoff));
          backoff *= provider.retry.backoff_multiplier;
        }
      }
    }
    const auto parsed = reply ? parse_answer(reply->content) : ParsedAnswer{};
    EvalRecord record = score_choice(puzzle, parsed.index);
    record.prompt_text = prompt;
    record.raw_response = reply ? reply->content : "";
    record.parse_failed = parsed.failed;
    record.output_tokens = reply ? reply->output_tokens : 0;
    record.error = reply ? "" : error;
    record.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    return record;
  };

  auto worker = [&] {
    while (!abort) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size()) return;
      const std::size_t i = pending[slot];
      try {
        auto record = evaluate(dataset[i]);
        std::lock_guard lock(sink);
        if (journal.is_open()) journal << serialize_record(record) << '\n' << std::flush;
        fresh[i] = std::move(record);
      } catch (...) {
        std::lock_guard lock(sink);
        if (!failure) failure = std::current_exception();
        abort = true;
      }
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(provider.max_concurrency),
                                              std::max<std::size_t>(pending.size(), 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<EvalRecord> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (fresh[i]) {
      out.push_back(std::move(*fresh[i]));
    } else {
      out.push_back(done.at(dataset[i].puzzle_id));
    }
  }
  return out;
}

std::vector<EvalRecord> run_eval(std::span<const Puzzle> dataset, const ProviderConfig& provider,
                                 const EvalOptions& options) {
  if (options.dry_run_dir) {
    // No transport (and no endpoint) is needed to write prompts.
    struct Offline : ChatTransport {
      ChatReply complete(const std::string&) override {
        throw TransportError("offline");
      }
    } offline;
    return run_eval(dataset, offline, provider, options);
  }
  HttpChatTransport transport(provider);
  return run_eval(dataset, transport, provider, options);
}

}  // namespace ravenx
