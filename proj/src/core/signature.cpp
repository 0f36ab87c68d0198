// Copyright 2026 The Ideatree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "ideatree/core/signature.hpp"

#include <cctype>

#include "ideatree/core/rng.hpp"

namespace ideatree {

namespace {

bool is_path_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '/' || c == '\\' || c == '.' || c == '_' || c == '-' ||
         c == '~' || c == ':';
}

}  // namespace

std::string normalize_error_message(std::string_view message) {
  std::string out;
  std::size_t i = 0;
  while (i < message.size()) {
    const char c = message[i];
    // A token containing a slash is a path: "/tmp/x.py", "./a/b", "C:\\d".
    if (is_path_char(c)) {
      std::size_t j = i;
      bool slash = false;
      while (j < message.size() && is_path_char(message[j])) {
        slash |= message[j] == '/' || message[j] == '\\';
        ++j;
      }
      if (slash) {
        out += "<path>";
        i = j;
        continue;
      }
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      out += '#';
      while (i < message.size() && std::isdigit(static_cast<unsigned char>(message[i]))) ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!out.empty() && out.back() != ' ') out += ' ';
      ++i;
      continue;
    }
    out += c;
    ++i;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::uint64_t error_signature(std::string_view error_class, std::string_view message) {
  std::string key(error_class);
  key += '\x1f';
  key += normalize_error_message(message);
  return fnv1a64(key);
}

}  // namespace ideatree
