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


#ifndef IDEATREE_GENERATION_RETRIEVAL_HPP_
#define IDEATREE_GENERATION_RETRIEVAL_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ideatree/generation/embedding.hpp"

namespace ideatree {

enum class DocumentSource { kCompetitions, kPapers, kLocal };

std::string_view to_string(DocumentSource source);
// Throws RetrievalFailure.
DocumentSource document_source_from_string(std::string_view s);

struct Document {
  DocumentSource source = DocumentSource::kLocal;
  std::string title;
  std::string body;
  // File name inside the corpus; the tie-breaker for equal scores.
  std::string key;
  bool operator==(const Document&) const = default;
};

class Retriever {
 public:
  virtual ~Retriever() = default;
  // At most k documents, best match first. Throws RetrievalFailure.
  virtual std::vector<Document> retrieve(std::string_view query, std::size_t k,
                                         std::optional<DocumentSource> source = {}) const = 0;
};

// A directory of text files. Each file starts with header lines
//
//   source: Papers
//   title: Target encoding for high-cardinality columns
//
// followed by a blank line and the body. Files are ranked by the cosine
// similarity between the query embedding and the embedding of title plus
// body; equal scores fall back to ascending file name. The corpus is read on
// construction, so results are a pure function of the directory content,
// the query and k.
class FileCorpusRetriever final : public Retriever {
 public:
  FileCorpusRetriever(const std::filesystem::path& dir, const EmbeddingProvider& embedder);

  std::vector<Document> retrieve(std::string_view query, std::size_t k,
                                 std::optional<DocumentSource> source = {}) const override;
  const std::vector<Document>& documents() const noexcept { return docs_; }

  // Parses one corpus file. Throws RetrievalFailure.
  static Document parse_document(std::string_view text, std::string key);

 private:
  const EmbeddingProvider& embedder_;
  std::vector<Document> docs_;
  std::vector<Embedding> embeddings_;
};

}  // namespace ideatree

#endif  // IDEATREE_GENERATION_RETRIEVAL_HPP_
