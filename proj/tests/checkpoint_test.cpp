#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "owcl/checkpoint.hpp"
#include "owcl/classifier.hpp"
#include "owcl/memory.hpp"
#include "owcl/types.hpp"

using namespace owcl;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path(name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

bool bit_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

ClassInfo seed_class(const std::string& label) {
  ClassInfo info;
  info.label = label;
  info.provenance.kind = ClassProvenance::kSeed;
  return info;
}

ClassInfo discovered_class(const std::string& label, int iteration) {
  ClassInfo info;
  info.label = label;
  info.provenance.kind = ClassProvenance::kDiscovered;
  info.provenance.iteration = iteration;
  return info;
}

Checkpoint sample_checkpoint() {
  Rng rng(51);
  ModelState model = make_token_model(30, 8, {2, 3}, 12, 6, rng);
  model = add_heads(model, {seed_class("alpha"), seed_class("beta")}, rng);
  model = snapshot(model);
  model = add_heads(model, {discovered_class("gamma", 2)}, rng);

  Checkpoint cp;
  cp.model = std::move(model);
  cp.memory.budget = 40;
  for (int c = 0; c < 2; ++c) {
    std::vector<Exemplar> list;
    for (int i = 0; i < 3; ++i) {
      Exemplar e;
      e.doc.token_ids = {2, 3 + i, 5, 0};
      e.doc.tokens = {"word", "w" + std::to_string(i)};
      e.doc.gold_label = "class" + std::to_string(c);
      if (i == 1) e.doc.embedding = rng.normal_vector(6);
      e.feature = rng.normal_vector(6);
      list.push_back(std::move(e));
    }
    cp.memory.per_class.emplace(c, std::move(list));
  }
  cp.seed = 987654321;
  return cp;
}

EmbeddedDocument probe_doc(Rng& rng) {
  EmbeddedDocument doc;
  const int len = 4;
  for (int i = 0; i < len; ++i) doc.token_ids.push_back(2 + static_cast<int>(rng.uniform_index(28)));
  return doc;
}

}  // namespace

TEST_CASE("checkpoint round trip is bit exact") {
  const Checkpoint original = sample_checkpoint();
  TempFile file("checkpoint_roundtrip_tmp.json");
  save_checkpoint(original, file.path);
  const Checkpoint loaded = load_checkpoint(file.path);

  CHECK(loaded.seed == original.seed);
  CHECK(bit_equal(loaded.model.pack_params(), original.model.pack_params()));
  REQUIRE(loaded.model.snapshot != nullptr);
  ModelState snap_a, snap_b;
  snap_a.encoder = original.model.snapshot->encoder;
  snap_a.heads = original.model.snapshot->heads;
  snap_b.encoder = loaded.model.snapshot->encoder;
  snap_b.heads = loaded.model.snapshot->heads;
  CHECK(bit_equal(snap_a.pack_params(), snap_b.pack_params()));

  REQUIRE(loaded.model.heads.registry.size() == 3);
  CHECK(loaded.model.heads.registry[0].label == "alpha");
  CHECK(loaded.model.heads.registry[2].label == "gamma");
  CHECK(loaded.model.heads.registry[2].provenance.kind == ClassProvenance::kDiscovered);
  CHECK(loaded.model.heads.registry[2].provenance.iteration == 2);

  CHECK(loaded.memory.budget == original.memory.budget);
  REQUIRE(loaded.memory.class_count() == original.memory.class_count());
  for (const auto& [id, list] : original.memory.per_class) {
    const auto& other = loaded.memory.per_class.at(id);
    REQUIRE(other.size() == list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
      CHECK(bit_equal(other[i].feature, list[i].feature));
      CHECK(other[i].doc.token_ids == list[i].doc.token_ids);
      CHECK(other[i].doc.tokens == list[i].doc.tokens);
      CHECK(other[i].doc.gold_label == list[i].doc.gold_label);
      REQUIRE(other[i].doc.embedding.has_value() == list[i].doc.embedding.has_value());
      if (list[i].doc.embedding)
        CHECK(bit_equal(*other[i].doc.embedding, *list[i].doc.embedding));
    }
  }
}

TEST_CASE("checkpoint save-load-save produces identical bytes") {
  const Checkpoint original = sample_checkpoint();
  TempFile first("checkpoint_bytes_a_tmp.json");
  TempFile second("checkpoint_bytes_b_tmp.json");
  save_checkpoint(original, first.path);
  save_checkpoint(load_checkpoint(first.path), second.path);

  std::ifstream a(first.path), b(second.path);
  const std::string bytes_a((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  const std::string bytes_b((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(bytes_a == bytes_b);
  CHECK(!bytes_a.empty());
}

TEST_CASE("checkpoint reload scores documents bit-identically") {
  const Checkpoint original = sample_checkpoint();
  TempFile file("checkpoint_scores_tmp.json");
  save_checkpoint(original, file.path);
  const Checkpoint loaded = load_checkpoint(file.path);

  Rng rng(52);
  for (int i = 0; i < 25; ++i) {
    const EmbeddedDocument doc = probe_doc(rng);
    CHECK(bit_equal(score(doc, original.model), score(doc, loaded.model)));
  }
}

TEST_CASE("fresh checkpoint without snapshot or memory round trips") {
  Rng rng(53);
  Checkpoint cp;
  cp.model = make_external_model(5, 6, 4, rng);
  cp.model = add_heads(cp.model, {seed_class("only")}, rng);
  cp.memory.budget = 100;

  TempFile file("checkpoint_fresh_tmp.json");
  save_checkpoint(cp, file.path);
  const Checkpoint loaded = load_checkpoint(file.path);
  CHECK(loaded.model.snapshot == nullptr);
  CHECK(loaded.memory.per_class.empty());
  CHECK(loaded.memory.budget == 100);
  CHECK(bit_equal(loaded.model.pack_params(), cp.model.pack_params()));
}

TEST_CASE("checkpoint load rejects corrupt and mismatched files") {
  CHECK_THROWS_AS(load_checkpoint("no_such_checkpoint_file.json"), CheckpointError);

  TempFile garbage("checkpoint_garbage_tmp.json");
  {
    std::ofstream out(garbage.path);
    out << "this is not json {{{";
  }
  CHECK_THROWS_AS(load_checkpoint(garbage.path), CheckpointError);

  TempFile wrong("checkpoint_wrongformat_tmp.json");
  {
    std::ofstream out(wrong.path);
    out << R"({"format": "something-else", "version": 1})";
  }
  CHECK_THROWS_AS(load_checkpoint(wrong.path), CheckpointError);

  TempFile future("checkpoint_future_tmp.json");
  {
    std::ofstream out(future.path);
    out << R"({"format": "owcl-checkpoint", "version": 99})";
  }
  try {
    load_checkpoint(future.path);
    FAIL("expected CheckpointError");
  } catch (const CheckpointError& e) {
    CHECK(std::string(e.what()).find("version mismatch") != std::string::npos);
  }
}

TEST_CASE("checkpoint save refuses unwritable paths") {
  const Checkpoint cp = sample_checkpoint();
  CHECK_THROWS_AS(save_checkpoint(cp, "missing_dir_xyz/checkpoint.json"), CheckpointError);
}
