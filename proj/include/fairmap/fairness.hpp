#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairmap/vectorspace.hpp"

namespace fairmap {

// Two polarity sentences for one moral factor. The vectors are filled in once
// the sentences have been embedded.
struct ConceptPair {
  std::string name;
  std::string positive_text;
  std::string negative_text;
  std::optional<Vector> positive_vec;
  std::optional<Vector> negative_vec;

  bool resolved() const noexcept { return positive_vec.has_value() && negative_vec.has_value(); }
};

struct ProvenanceEntry {
  std::string concept_name;
  int sign;  // +1 or -1
  std::string text;

  friend bool operator==(const ProvenanceEntry&, const ProvenanceEntry&) = default;
};

struct FairnessDirection {
  Vector direction;  // unit norm
  std::vector<ProvenanceEntry> provenance;
  double raw_norm = 0.0;
  bool normalize_concepts = true;
};

enum class ConceptTable {
  kVerbatim,   // sentence strings exactly as published, typo included
  kCorrected,  // "respondible" spelled "responsible"
};

// The five polarity pairs: responsibility, joy, societal-benefit, reward, benefit.
std::vector<ConceptPair> default_concept_table(ConceptTable variant = ConceptTable::kVerbatim);

// raw = sum_i (pos_i - neg_i), each concept vector unit-normalized first when
// `normalize_concepts` is set; the result is raw / |raw|.
FairnessDirection build_fairness_direction(std::span<const ConceptPair> pairs,
                                           bool normalize_concepts = true);

// Cosine of `embedding` against the direction.
double fairness_score(const Vector& embedding, const FairnessDirection& fd);

LensValues score_corpus(const PointCloud& cloud, const FairnessDirection& fd);

// Looks up every sentence in `cloud` by record id == sentence text.
// Throws UnknownRecordError naming the first missing sentence.
std::vector<ConceptPair> resolve_concepts(std::vector<ConceptPair> pairs, const PointCloud& cloud);

// Concept table file: one JSON object per line with keys name, positive_text,
// negative_text. Blank lines are ignored.
std::vector<ConceptPair> parse_concept_table(std::string_view text);
std::vector<ConceptPair> load_concept_table(const std::filesystem::path& path);
std::string format_concept_table(std::span<const ConceptPair> pairs);

// Direction file (JSON). Provenance may be empty for directions that did not
// come from a concept table.
std::string format_direction(const FairnessDirection& fd);
FairnessDirection parse_direction(std::string_view text);
FairnessDirection load_direction(const std::filesystem::path& path);

}  // namespace fairmap
