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

#ifndef IDEATREE_GENERATION_EMBEDDING_HPP_
#define IDEATREE_GENERATION_EMBEDDING_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ideatree {

using Embedding = std::vector<double>;

// Deterministic text embedding with a fixed output dimension. Implementations
// must be safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Embedding embed(std::string_view text) const = 0;
  virtual std::size_t dimension() const = 0;
};

// Cosine similarity; 0 when either vector is all zeros.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
inline double cosine_distance(std::span<const double> a, std::span<const double> b) {
  return 1.0 - cosine_similarity(a, b);
}

// Lowercased alphanumeric tokens.
std::vector<std::string> tokenize(std::string_view text);

// Signed feature hashing of the lowercased token multiset, L2-normalized.
// Text without tokens maps to the zero vector.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dimension = 64);
  Embedding embed(std::string_view text) const override;
  std::size_t dimension() const override { return dimension_; }

 private:
  std::size_t dimension_;
};

// Embeds texts that carry idea vectors (see idea_vector.hpp): every bracketed
// vector in the text is parsed and concatenated, then mapped through seeded
// random Fourier features so that the cosine similarity of two embeddings
// approximates a Gaussian kernel exp(-|x - y|^2 / (2 l^2)) of the underlying
// vectors. Throws UnparseableIdea for text without a vector.
class IdeaVectorEmbedder final : public EmbeddingProvider {
 public:
  explicit IdeaVectorEmbedder(std::size_t features = 256, double length_scale = 0.25,
                              std::uint64_t seed = 0x1dea);
  Embedding embed(std::string_view text) const override;
  std::size_t dimension() const override { return features_; }

  Embedding embed_vector(std::span<const double> x) const;

 private:
  struct Projection {
    std::vector<double> weights;  // features_ x input dimension, row-major
    std::vector<double> phases;
  };
  const Projection& projection(std::size_t input_dim) const;

  std::size_t features_;
  double length_scale_;
  std::uint64_t seed_;
  mutable std::mutex mu_;
  mutable std::map<std::size_t, Projection> projections_;
};

}  // namespace ideatree

#endif  // IDEATREE_GENERATION_EMBEDDING_HPP_
