#include "owcl/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace owcl {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) {
        out.push_back(current);
        current.clear();
      }
    } else {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

Vocabulary::Vocabulary() {
  tokens_ = {"<pad>", "<unk>"};
  index_["<pad>"] = kPad;
  index_["<unk>"] = kUnk;
}

int Vocabulary::add(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  index_[token] = id;
  return id;
}

int Vocabulary::id_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token_of(int id) const {
  if (id < 0 || id >= static_cast<int>(tokens_.size())) {
    throw DatasetError("token id out of vocabulary: " + std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<RawRecord> load_jsonl_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset file: " + path);

  std::vector<RawRecord> records;
  std::string line;
  int line_no = 0;
  Index embedding_dim = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DatasetError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) {
      throw DatasetError(path + ":" + std::to_string(line_no) + ": record is not an object");
    }
    RawRecord rec;
    rec.line = line_no;
    if (!j.contains("text") || !j["text"].is_string()) {
      throw DatasetError(path + ":" + std::to_string(line_no) + ": missing string field \"text\"");
    }
    rec.text = j["text"].get<std::string>();
    if (!j.contains("label") || !j["label"].is_string()) {
      throw DatasetError(path + ":" + std::to_string(line_no) + ": missing string field \"label\"");
    }
    rec.label = j["label"].get<std::string>();
    if (rec.label.empty()) {
      throw DatasetError(path + ":" + std::to_string(line_no) + ": empty label");
    }
    if (j.contains("embedding")) {
      if (!j["embedding"].is_array()) {
        throw DatasetError(path + ":" + std::to_string(line_no) + ": \"embedding\" is not an array");
      }
      const auto& arr = j["embedding"];
      Vector v(static_cast<Index>(arr.size()));
      for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) {
          throw DatasetError(path + ":" + std::to_string(line_no) + ": non-numeric embedding entry");
        }
        v[static_cast<Index>(i)] = arr[i].get<double>();
      }
      if (embedding_dim < 0) {
        embedding_dim = v.size();
      } else if (embedding_dim != v.size()) {
        throw DatasetError(path + ":" + std::to_string(line_no) +
                           ": embedding dimension " + std::to_string(v.size()) +
                           " differs from earlier records (" + std::to_string(embedding_dim) + ")");
      }
      rec.embedding = std::move(v);
    } else if (embedding_dim > 0) {
      throw DatasetError(path + ":" + std::to_string(line_no) +
                         ": record lacks \"embedding\" but earlier records carry one");
    } else {
      embedding_dim = 0;
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw DatasetError("dataset file is empty: " + path);
  return records;
}

LabeledDataset build_dataset(const std::vector<RawRecord>& records, int padded_length) {
  if (padded_length <= 0) throw DatasetError("padded_length must be positive");
  LabeledDataset ds;
  std::set<std::string> labels;
  for (const auto& rec : records) {
    EmbeddedDocument doc;
    doc.tokens = tokenize(rec.text);
    if (doc.tokens.empty()) {
      throw DatasetError("record at line " + std::to_string(rec.line) + " has no tokens");
    }
    for (const auto& tok : doc.tokens) ds.vocab.add(tok);
    doc.token_ids.reserve(static_cast<std::size_t>(padded_length));
    for (const auto& tok : doc.tokens) {
      if (static_cast<int>(doc.token_ids.size()) >= padded_length) break;
      doc.token_ids.push_back(ds.vocab.id_of(tok));
    }
    while (static_cast<int>(doc.token_ids.size()) < padded_length) {
      doc.token_ids.push_back(Vocabulary::kPad);
    }
    doc.embedding = rec.embedding;
    doc.gold_label = rec.label;
    labels.insert(rec.label);
    if (rec.embedding) ds.embedding_dim = rec.embedding->size();
    ds.docs.push_back(std::move(doc));
  }
  ds.class_labels.assign(labels.begin(), labels.end());
  return ds;
}

}  // namespace owcl
