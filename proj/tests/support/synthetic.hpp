#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "owcl/dataset.hpp"
#include "owcl/types.hpp"

// Planted-class corpus used by the driver tests and the end-to-end runs.
// Every class owns a disjoint block of embedding dimensions (mean `magnitude`
// on the block, zero elsewhere, isotropic `noise` everywhere) and a keyword
// that appears twice per document with stopwords between all candidate
// positions. Clusters are therefore separable in feature space and nameable
// from text, and the gold label of each class is its keyword.
//
// With `interference > 0` each class also carries a negative lobe of that
// magnitude on the next class's block (a ring), so later arrivals do not train
// on inputs orthogonal to earlier classes. With `block_noise > 0` the noise is
// inflated on a document's own block, i.e. exactly along the discriminative
// directions: class boundaries then genuinely depend on sample size, so
// retraining from a small exemplar subset degrades them unless something
// anchors the original decision function. With `overlap > 0` the blocks widen
// and slide so adjacent classes share that fraction of their active
// dimensions; later arrivals then reshape features that earlier heads read,
// which is the regime where rehearsal alone stops being sufficient.

namespace synthetic {

inline const std::vector<std::string>& class_words() {
  static const std::vector<std::string> words = {
      "refund",   "transfer",  "invoice",   "deposit",  "balance",  "mortgage",
      "pension",  "voucher",   "rollover",  "statement", "overdraft", "dividend"};
  return words;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "amount", "account", "request", "number", "office", "yesterday", "letter",
      "question", "paperwork", "morning", "signature", "branch", "window",
      "afternoon", "copy", "detail"};
  return words;
}

inline std::vector<owcl::RawRecord> planted_records(int n_classes, owcl::Index dims,
                                                    int docs_per_class, std::uint64_t seed,
                                                    double magnitude = 3.0,
                                                    double noise = 0.3,
                                                    double interference = 0.0,
                                                    double block_noise = 0.0,
                                                    double overlap = 0.0) {
  if (n_classes < 1 || static_cast<std::size_t>(n_classes) > class_words().size())
    throw std::invalid_argument("planted_records: unsupported class count");
  if (dims < n_classes) throw std::invalid_argument("planted_records: too few dimensions");

  owcl::Rng rng(seed);
  // With overlap=0 each class owns dims/n; otherwise blocks widen and slide so
  // adjacent classes share `overlap` of their width (span still fits in dims).
  const owcl::Index block =
      overlap > 0.0 ? static_cast<owcl::Index>(std::lround(
                          static_cast<double>(dims) / (1.0 + (n_classes - 1) * (1.0 - overlap))))
                    : dims / n_classes;
  const auto block_start = [&](int cls) {
    owcl::Index start =
        overlap > 0.0
            ? static_cast<owcl::Index>(std::lround(cls * block * (1.0 - overlap)))
            : static_cast<owcl::Index>(cls) * block;
    return std::min(start, dims - block);
  };
  std::vector<owcl::RawRecord> records;
  for (int c = 0; c < n_classes; ++c) {
    const std::string& word = class_words()[static_cast<std::size_t>(c)];
    for (int d = 0; d < docs_per_class; ++d) {
      owcl::Vector embedding = rng.normal_vector(dims, 0.0, noise);
      embedding.segment(block_start(c), block).array() += magnitude;
      if (block_noise > 0.0) {
        embedding.segment(block_start(c), block) += rng.normal_vector(block, 0.0, block_noise);
      }
      if (interference > 0.0) {
        embedding.segment(block_start((c + 1) % n_classes), block).array() -= interference;
      }
      const auto& fillers = filler_words();
      const std::string f1 = fillers[rng.uniform_index(fillers.size())];
      const std::string f2 = fillers[rng.uniform_index(fillers.size())];
      owcl::RawRecord record;
      record.text = "the " + word + " is for " + word + " at " + f1 + " and " + f2;
      record.label = word;
      record.embedding = embedding;
      records.push_back(std::move(record));
    }
  }
  return records;
}

inline owcl::LabeledDataset planted_dataset(int n_classes, owcl::Index dims,
                                            int docs_per_class, std::uint64_t seed,
                                            double magnitude = 3.0, double noise = 0.3,
                                            double interference = 0.0,
                                            double block_noise = 0.0,
                                            double overlap = 0.0) {
  return owcl::build_dataset(planted_records(n_classes, dims, docs_per_class, seed, magnitude,
                                             noise, interference, block_noise, overlap),
                             16);
}

inline void write_jsonl(const std::string& path, const std::vector<owcl::RawRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const owcl::RawRecord& record : records) {
    nlohmann::ordered_json j;
    j["text"] = record.text;
    j["label"] = record.label;
    if (record.embedding) {
      std::vector<double> values(record.embedding->data(),
                                 record.embedding->data() + record.embedding->size());
      j["embedding"] = values;
    }
    out << j.dump() << "\n";
  }
}

}  // namespace synthetic
