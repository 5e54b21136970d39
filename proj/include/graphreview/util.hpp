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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace graphreview::util {

using Json = nlohmann::json;

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// Stable 64-bit key derived from a seed and any number of string parts.
// Independent of std::hash so cached values and noise draws survive a
// toolchain change.
std::uint64_t stable_hash(std::uint64_t seed, std::initializer_list<std::string_view> parts);

// Maps a 64-bit key to [0, 1) using the top 53 bits.
double unit_interval(std::uint64_t key);

// Portable Fisher-Yates shuffle: std::shuffle and the std distributions are
// implementation-defined, which would make "deterministic given seed" a
// per-toolchain promise.
template <typename T>
void portable_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(engine() % i);
    std::swap(items[i - 1], items[j]);
  }
}

// Standard normal draw via Box-Muller on two stable uniforms.
double standard_normal(std::uint64_t key);

// Reads a line-delimited JSON file. `on_record` receives the parsed object and
// its 1-based line number. Blank lines are skipped. Throws kParseError with the
// line number on malformed input and kIoError when the file cannot be opened.
void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const Json&, std::size_t)>& on_record);

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

// Replaces every `{name}` occurrence for each supplied key. Unknown
// placeholders are left untouched so literal braces in templates survive.
std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& values);

// Runs body(i) for i in [0, count) on up to `max_in_flight` threads. The first
// exception thrown by any worker is rethrown on the caller's thread after all
// workers join.
void parallel_for(std::size_t count, std::size_t max_in_flight,
                  const std::function<void(std::size_t)>& body);

}  // namespace graphreview::util
