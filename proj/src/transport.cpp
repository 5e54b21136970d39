/*
 * Copyright 2026 The GraphReview Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "graphreview/transport.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <memory>
#include <thread>

#include "graphreview/error.hpp"
#include "graphreview/util.hpp"

namespace graphreview {

using util::Json;

HttpChatTransport::HttpChatTransport(HttpTransportOptions options)
    : options_(std::move(options)) {
  const std::string& url = options_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidParam, "endpoint must start with http:// or https://");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

ChatReply HttpChatTransport::send(const std::vector<ChatMessage>& messages) {
  ++calls_;
  Json body{{"model", options_.model}, {"temperature", 0}, {"messages", Json::array()}};
  for (const ChatMessage& m : messages) {
    body["messages"].push_back(Json{{"role", m.role}, {"content", m.content}});
  }
  if (options_.top_logprobs > 0) {
    body["logprobs"] = true;
    body["top_logprobs"] = options_.top_logprobs;
  }
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt < options_.retry.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(options_.retry.base_delay * (1 << (attempt - 1)));
    }
    httplib::Client client(scheme_host_port_);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    auto res = client.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      ChatReply reply;
      const Json parsed = Json::parse(res->body, nullptr, /*allow_exceptions=*/false);
      if (parsed.is_discarded() || !parsed.is_object()) {
        reply.text = res->body;
        return reply;
      }
      try {
        const Json& choice = parsed.at("choices").at(0);
        reply.text = choice.at("message").at("content").get<std::string>();
        if (choice.contains("logprobs") && choice["logprobs"].is_object()) {
          const Json& content = choice["logprobs"].value("content", Json::array());
          if (!content.empty()) {
            for (const Json& alt : content[0].value("top_logprobs", Json::array())) {
              reply.first_token_alternatives.push_back(
                  TokenProb{alt.at("token").get<std::string>(), alt.at("logprob").get<double>()});
            }
          }
        }
        return reply;
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::kMalformedResponse,
                    std::string("unexpected response body: ") + e.what());
      }
    }
    spdlog::warn("{}: attempt {}/{} failed: {}", id(), attempt + 1, options_.retry.attempts,
                 last_error);
  }
  throw Error(ErrorCode::kBackendUnavailable, id() + ": " + last_error);
}

ReplayTransport::ReplayTransport(std::map<std::string, std::string> responses,
                                 std::optional<std::string> fallback)
    : responses_(std::move(responses)), fallback_(std::move(fallback)) {}

std::shared_ptr<ReplayTransport> ReplayTransport::from_file(const std::filesystem::path& path) {
  std::map<std::string, std::string> responses;
  std::optional<std::string> fallback;
  util::read_jsonl(path, [&](const Json& r, std::size_t line) {
    if (!r.contains("response") || !r["response"].is_string()) {
      throw Error(ErrorCode::kParseError,
                  path.filename().string() + ":" + std::to_string(line) + ": missing 'response'");
    }
    if (r.value("default", false)) {
      fallback = r["response"].get<std::string>();
    } else {
      responses[r.value("prompt_sha256", std::string{})] = r["response"].get<std::string>();
    }
  });
  return std::make_shared<ReplayTransport>(std::move(responses), std::move(fallback));
}

std::string ReplayTransport::key_for(const std::vector<ChatMessage>& messages) {
  std::string blob;
  for (const ChatMessage& m : messages) {
    blob += m.role;
    blob.push_back('\0');
    blob += m.content;
    blob.push_back('\0');
  }
  return util::sha256_hex(blob);
}

ChatReply ReplayTransport::send(const std::vector<ChatMessage>& messages) {
  ++calls_;
  auto it = responses_.find(key_for(messages));
  if (it != responses_.end()) return ChatReply{it->second, {}};
  if (fallback_) return ChatReply{*fallback_, {}};
  throw Error(ErrorCode::kBackendUnavailable, "replay: no recorded response for prompt");
}

}  // namespace graphreview
