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
#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace graphreview {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct TokenProb {
  std::string token;
  double logprob = 0.0;
};

struct ChatReply {
  std::string text;
  // Top alternatives for the first generated token, when the backend exposes
  // them. Empty for text-only backends.
  std::vector<TokenProb> first_token_alternatives;
};

// A text model reachable by chat-style messages. Implementations must be safe
// to call concurrently.
class ChatTransport {
 public:
  virtual ~ChatTransport() = default;

  virtual ChatReply send(const std::vector<ChatMessage>& messages) = 0;
  // Identifies the model behind the transport; part of every cache key.
  virtual std::string id() const = 0;

  std::size_t calls() const { return calls_.load(); }

 protected:
  std::atomic<std::size_t> calls_{0};
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds base_delay{500};
};

struct HttpTransportOptions {
  std::string endpoint;  // http(s)://host[:port]/path
  std::string model = "default";
  std::string api_key;   // sent as a bearer token when non-empty
  RetryPolicy retry;
  std::chrono::seconds timeout{300};
  int top_logprobs = 0;  // > 0 asks the server for first-token alternatives
};

// POSTs {"model", "messages", "temperature": 0} and reads the reply from an
// OpenAI-style "choices[0].message.content" body, or from a plain-text body.
// Throws BackendUnavailable once every attempt has failed.
class HttpChatTransport final : public ChatTransport {
 public:
  explicit HttpChatTransport(HttpTransportOptions options);

  ChatReply send(const std::vector<ChatMessage>& messages) override;
  std::string id() const override { return "http:" + options_.model + "@" + options_.endpoint; }

 private:
  HttpTransportOptions options_;
  std::string scheme_host_port_;
  std::string path_;
};

// Serves recorded responses keyed by the SHA-256 of the rendered messages,
// falling back to a default response when one is configured.
class ReplayTransport final : public ChatTransport {
 public:
  ReplayTransport(std::map<std::string, std::string> responses,
                  std::optional<std::string> fallback = std::nullopt);

  // Records are {"prompt_sha256", "response"}; one record may instead carry
  // {"default": true, "response"}.
  static std::shared_ptr<ReplayTransport> from_file(const std::filesystem::path& path);
  static std::string key_for(const std::vector<ChatMessage>& messages);

  ChatReply send(const std::vector<ChatMessage>& messages) override;
  std::string id() const override { return "replay"; }

 private:
  std::map<std::string, std::string> responses_;
  std::optional<std::string> fallback_;
};

// Adapts a callable; handy for embedding an in-process model.
class CallbackTransport final : public ChatTransport {
 public:
  using Callback = std::function<ChatReply(const std::vector<ChatMessage>&)>;

  CallbackTransport(std::string id, Callback callback)
      : id_(std::move(id)), callback_(std::move(callback)) {}

  ChatReply send(const std::vector<ChatMessage>& messages) override {
    ++calls_;
    return callback_(messages);
  }
  std::string id() const override { return id_; }

 private:
  std::string id_;
  Callback callback_;
};

}  // namespace graphreview
