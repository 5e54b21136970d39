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
#include "graphreview/util.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "graphreview/error.hpp"

namespace graphreview::util {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0f]);
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stable_hash(std::uint64_t seed, std::initializer_list<std::string_view> parts) {
  // FNV-1a over the parts (length-prefixed so ("ab","c") != ("a","bc")),
  // finished with a splitmix round mixed with the seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (std::string_view part : parts) {
    std::uint64_t len = part.size();
    for (int i = 0; i < 8; ++i) feed(static_cast<unsigned char>(len >> (8 * i)));
    for (char c : part) feed(static_cast<unsigned char>(c));
  }
  return splitmix64(h ^ splitmix64(seed));
}

double unit_interval(std::uint64_t key) {
  return static_cast<double>(key >> 11) * 0x1.0p-53;
}

double standard_normal(std::uint64_t key) {
  double u1 = unit_interval(splitmix64(key ^ 0x5851f42d4c957f2dULL));
  const double u2 = unit_interval(splitmix64(key ^ 0x14057b7ef767814fULL));
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void read_jsonl(const std::filesystem::path& path,
                const std::function<void(const Json&, std::size_t)>& on_record) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kParseError,
                  path.filename().string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!record.is_object()) {
      throw Error(ErrorCode::kParseError,
                  path.filename().string() + ":" + std::to_string(line_no) + ": expected an object");
    }
    on_record(record, line_no);
  }
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records) {
  std::ostringstream out;
  for (const Json& r : records) out << r.dump() << '\n';
  write_text_file(path, out.str());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const std::size_t open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    const std::size_t close = tmpl.find('}', open + 1);
    bool replaced = false;
    if (close != std::string_view::npos) {
      const std::string_view key = tmpl.substr(open + 1, close - open - 1);
      for (const auto& [name, value] : values) {
        if (name == key) {
          out.append(value);
          pos = close + 1;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) {
      out.push_back('{');
      pos = open + 1;
    }
  }
  return out;
}

void parallel_for(std::size_t count, std::size_t max_in_flight,
                  const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  const std::size_t workers = std::max<std::size_t>(1, std::min(max_in_flight, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next.store(count);
            return;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace graphreview::util
