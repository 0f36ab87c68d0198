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

#include "ideatree/generation/embedding.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ideatree/core/error.hpp"
#include "ideatree/core/rng.hpp"
#include "ideatree/generation/idea_vector.hpp"

namespace ideatree {

namespace {

void normalize(Embedding& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm <= 0.0) return;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
}

}  // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("embedding dimensions differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw std::invalid_argument("embedding dimension must be positive");
}

Embedding HashingEmbedder::embed(std::string_view text) const {
  Embedding v(dimension_, 0.0);
  for (const auto& tok : tokenize(text)) {
    const std::uint64_t h = fnv1a64(tok);
    v[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
  }
  normalize(v);
  return v;
}

IdeaVectorEmbedder::IdeaVectorEmbedder(std::size_t features, double length_scale,
                                       std::uint64_t seed)
    : features_(features), length_scale_(length_scale), seed_(seed) {
  if (features == 0 || !(length_scale > 0.0)) {
    throw std::invalid_argument("IdeaVectorEmbedder needs features > 0 and length_scale > 0");
  }
}

const IdeaVectorEmbedder::Projection& IdeaVectorEmbedder::projection(
    std::size_t input_dim) const {
  std::lock_guard lock(mu_);
  auto it = projections_.find(input_dim);
  if (it != projections_.end()) return it->second;
  Projection p;
  p.weights.resize(features_ * input_dim);
  p.phases.resize(features_);
  for (std::size_t i = 0; i < features_; ++i) {
    // One stream per feature, so the first k input coordinates get the same
    // weights whatever the total input dimension.
    Rng rng(splitmix64(seed_ + i));
    p.phases[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (std::size_t j = 0; j < input_dim; ++j) {
      p.weights[i * input_dim + j] = rng.normal() / length_scale_;
    }
  }
  return projections_.emplace(input_dim, std::move(p)).first->second;
}

Embedding IdeaVectorEmbedder::embed_vector(std::span<const double> x) const {
  if (x.empty()) throw Error(ErrorCode::kUnparseableIdea, "empty idea vector");
  const Projection& p = projection(x.size());
  Embedding z(features_);
  for (std::size_t i = 0; i < features_; ++i) {
    double dot = p.phases[i];
    for (std::size_t j = 0; j < x.size(); ++j) dot += p.weights[i * x.size() + j] * x[j];
    z[i] = std::cos(dot);
  }
  normalize(z);
  return z;
}

Embedding IdeaVectorEmbedder::embed(std::string_view text) const {
  const auto vectors = parse_all_idea_vectors(text);
  if (vectors.empty()) {
    throw Error(ErrorCode::kUnparseableIdea,
                "no idea vector in '" + std::string(text.substr(0, 80)) + "'");
  }
  std::vector<double> x;
  for (const auto& v : vectors) x.insert(x.end(), v.begin(), v.end());
  return embed_vector(x);
}

}  // namespace ideatree
