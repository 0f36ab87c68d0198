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


#include "ideatree/evaluation/fast_mode.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace ideatree {

namespace {

bool is_ident(char c, bool first) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalpha(u) || c == '_' || (!first && std::isdigit(u));
}

std::string format_number(double v) {
  char buf[40];
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

// Rewrites one line (without its terminator) if it assigns a capped key.
bool cap_line(std::string& line, const std::map<std::string, double>& caps, std::string& key) {
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  const std::size_t key_begin = i;
  if (i >= line.size() || !is_ident(line[i], true)) return false;
  while (i < line.size() && is_ident(line[i], false)) ++i;
  key = line.substr(key_begin, i - key_begin);
  const auto cap = caps.find(key);
  if (cap == caps.end()) return false;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (i >= line.size() || line[i] != '=') return false;
  ++i;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  const std::size_t value_begin = i;
  const char* start = line.c_str() + value_begin;
  char* end = nullptr;
  const double value = std::strtod(start, &end);
  if (end == start) return false;
  const std::size_t value_end = value_begin + static_cast<std::size_t>(end - start);
  // Only a plain number, optionally followed by blanks or a comment.
  std::size_t rest = value_end;
  while (rest < line.size() && (line[rest] == ' ' || line[rest] == '\t' || line[rest] == '\r')) {
    ++rest;
  }
  if (rest < line.size() && line[rest] != '#') return false;
  if (!(value > cap->second)) return false;
  line.replace(value_begin, value_end - value_begin, format_number(cap->second));
  return true;
}

}  // namespace

std::map<std::string, double> default_fast_mode_caps() {
  return {{"epochs", 2},      {"num_epochs", 2}, {"max_epochs", 2},      {"iterations", 2},
          {"max_iter", 2},    {"n_iter", 2},     {"num_boost_round", 2}, {"n_estimators", 2},
          {"num_iterations", 2}};
}

FastModeResult apply_fast_mode(std::string_view code, const FastModeTransform& transform) {
  FastModeResult out{std::string(), RestoreToken(std::string(code)), transform.subset_fraction, {}};
  std::size_t pos = 0;
  while (pos < code.size()) {
    const auto nl = code.find('\n', pos);
    std::string line(code.substr(pos, nl == std::string_view::npos ? code.npos : nl - pos));
    std::string key;
    if (cap_line(line, transform.caps, key)) out.capped.push_back(key);
    out.code += line;
    if (nl == std::string_view::npos) break;
    out.code += '\n';
    pos = nl + 1;
  }
  return out;
}

}  // namespace ideatree
