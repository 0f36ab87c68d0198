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


#include "ideatree/generation/retrieval.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ideatree/core/error.hpp"

namespace ideatree {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view to_string(DocumentSource source) {
  switch (source) {
    case DocumentSource::kCompetitions: return "Competitions";
    case DocumentSource::kPapers: return "Papers";
    case DocumentSource::kLocal: return "Local";
  }
  return "?";
}

DocumentSource document_source_from_string(std::string_view s) {
  if (s == "Competitions") return DocumentSource::kCompetitions;
  if (s == "Papers") return DocumentSource::kPapers;
  if (s == "Local") return DocumentSource::kLocal;
  throw Error(ErrorCode::kRetrievalFailure, "unknown document source '" + std::string(s) + "'");
}

Document FileCorpusRetriever::parse_document(std::string_view text, std::string key) {
  Document doc;
  doc.key = std::move(key);
  bool have_source = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = trim(text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line.empty()) break;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw Error(ErrorCode::kRetrievalFailure, doc.key + ": bad header line '" + line + "'");
    }
    const auto name = trim(std::string_view(line).substr(0, colon));
    const auto value = trim(std::string_view(line).substr(colon + 1));
    if (name == "source") {
      doc.source = document_source_from_string(value);
      have_source = true;
    } else if (name == "title") {
      doc.title = value;
    } else {
      throw Error(ErrorCode::kRetrievalFailure, doc.key + ": unknown header '" + name + "'");
    }
  }
  if (!have_source || doc.title.empty()) {
    throw Error(ErrorCode::kRetrievalFailure, doc.key + ": header needs source and title");
  }
  doc.body = trim(text.substr(pos));
  return doc;
}

FileCorpusRetriever::FileCorpusRetriever(const std::filesystem::path& dir,
                                         const EmbeddingProvider& embedder)
    : embedder_(embedder) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kRetrievalFailure, "corpus directory " + dir.string() + " not found");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    if (!in && !in.eof()) throw Error(ErrorCode::kRetrievalFailure, "cannot read " + f.string());
    docs_.push_back(parse_document(buf.str(), f.filename().string()));
    embeddings_.push_back(embedder_.embed(docs_.back().title + "\n" + docs_.back().body));
  }
}

std::vector<Document> FileCorpusRetriever::retrieve(std::string_view query, std::size_t k,
                                                    std::optional<DocumentSource> source) const {
  const Embedding q = embedder_.embed(query);
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < docs_.size(); ++i) {
    if (source && docs_[i].source != *source) continue;
    ranked.emplace_back(cosine_similarity(q, embeddings_[i]), i);
  }
  // docs_ is sorted by key, so the index is the file-name tie-breaker.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Document> out;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) out.push_back(docs_[ranked[i].second]);
  return out;
}

}  // namespace ideatree
