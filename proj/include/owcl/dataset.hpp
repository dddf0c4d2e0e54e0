#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "owcl/types.hpp"

namespace owcl {

struct DatasetError : std::runtime_error {
  explicit DatasetError(const std::string& what) : std::runtime_error(what) {}
};

/// Whitespace tokenization, lowercased. The only tokenizer in the project.
std::vector<std::string> tokenize(const std::string& text);

/// Token-id map. Id 0 is the padding token, id 1 the out-of-vocabulary token;
/// both are always present.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary();

  int add(const std::string& token);             // idempotent
  int id_of(const std::string& token) const;     // kUnk if unseen
  const std::string& token_of(int id) const;
  Index size() const { return static_cast<Index>(tokens_.size()); }

  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::map<std::string, int> index_;
  std::vector<std::string> tokens_;
};

/// The unit flowing through the whole pipeline: a token sequence plus its
/// dense representation. When `embedding` is present it is the document's
/// feature vector and the trainable token encoder is bypassed.
struct EmbeddedDocument {
  std::vector<int> token_ids;           // padded to the configured length
  std::vector<std::string> tokens;      // original tokens, for labeling
  std::optional<Vector> embedding;      // precomputed feature vector
  std::string gold_label;               // empty when unlabeled
};

/// One record of a newline-delimited dataset file.
struct RawRecord {
  std::string text;
  std::string label;
  std::optional<Vector> embedding;
  int line = 0;  // 1-based source line, for error messages
};

/// Reads a JSON-lines dataset: one object per line with fields
/// text (string), label (string), optional embedding (array of numbers).
/// Throws DatasetError with the offending line number on malformed input,
/// inconsistent embedding dimensions, or empty labels.
std::vector<RawRecord> load_jsonl_dataset(const std::string& path);

struct LabeledDataset {
  std::vector<EmbeddedDocument> docs;
  std::vector<std::string> class_labels;  // distinct gold labels, sorted
  Vocabulary vocab;
  Index embedding_dim = 0;  // 0 when documents carry no precomputed vectors
};

/// Builds documents and the vocabulary from raw records. Token ids are padded
/// or truncated to `padded_length`.
LabeledDataset build_dataset(const std::vector<RawRecord>& records, int padded_length);

}  // namespace owcl
