#include "fairmap/fairness.hpp"

#include <cmath>

#include "fairmap/errors.hpp"
#include "fairmap/io_util.hpp"
#include "json.hpp"

namespace fairmap {

using nlohmann::json;

std::vector<ConceptPair> default_concept_table(ConceptTable variant) {
  std::vector<ConceptPair> table{
      {"responsibility", "it was very respondible", "it was very irresponsible", {}, {}},
      {"joy", "it was joyous", "it was sad", {}, {}},
      {"societal-benefit", "it was beneficial to society", "it was not beneficial to society", {}, {}},
      {"reward", "was free to and rewarded", "was sent to prison and punished", {}, {}},
      {"benefit", "it was beneficial", "it was harmful", {}, {}},
  };
  if (variant == ConceptTable::kCorrected) table[0].positive_text = "it was very responsible";
  return table;
}

FairnessDirection build_fairness_direction(std::span<const ConceptPair> pairs, bool normalize_concepts) {
  if (pairs.empty()) throw EmptyInputError("fairness direction needs at least one concept pair");
  for (const auto& p : pairs) {
    if (!p.resolved()) throw InvalidArgumentError("concept pair '" + p.name + "' is not resolved");
  }
  const std::size_t dim = pairs.front().positive_vec->dim();
  const auto& k = kernels::active();

  // Each difference is formed before it is added, so swapping every pair's
  // polarity negates the sum exactly.
  std::vector<double> raw(dim, 0.0);
  FairnessDirection fd;
  for (const auto& p : pairs) {
    const Vector& pos = *p.positive_vec;
    const Vector& neg = *p.negative_vec;
    if (pos.dim() != dim || neg.dim() != dim) {
      throw DimensionError("concept pair '" + p.name + "' does not match dimension " +
                           std::to_string(dim));
    }
    const Vector pos_term = normalize_concepts ? l2_normalize(pos) : pos;
    const Vector neg_term = normalize_concepts ? l2_normalize(neg) : neg;
    std::vector<double> diff(pos_term.values().begin(), pos_term.values().end());
    k.axpy(-1.0, neg_term.values().data(), diff.data(), dim);
    k.axpy(1.0, diff.data(), raw.data(), dim);
    fd.provenance.push_back({p.name, +1, p.positive_text});
    fd.provenance.push_back({p.name, -1, p.negative_text});
  }
  fd.raw_norm = norm(raw);
  if (fd.raw_norm == 0.0) {
    throw DegenerateDirectionError("concept differences cancel to the zero vector");
  }
  for (double& x : raw) x /= fd.raw_norm;
  fd.direction = Vector(std::move(raw));
  fd.normalize_concepts = normalize_concepts;
  return fd;
}

double fairness_score(const Vector& embedding, const FairnessDirection& fd) {
  return cosine_similarity(embedding, fd.direction);
}

LensValues score_corpus(const PointCloud& cloud, const FairnessDirection& fd) {
  return project_lens(cloud, fd.direction);
}

std::vector<ConceptPair> resolve_concepts(std::vector<ConceptPair> pairs, const PointCloud& cloud) {
  auto lookup = [&cloud](const std::string& text) {
    const auto idx = cloud.index_of(text);
    if (!idx) throw UnknownRecordError("no embedding for concept sentence \"" + text + "\"");
    return cloud.vector(*idx);
  };
  for (auto& p : pairs) {
    p.positive_vec = lookup(p.positive_text);
    p.negative_vec = lookup(p.negative_text);
  }
  return pairs;
}

std::vector<ConceptPair> parse_concept_table(std::string_view text) {
  std::vector<ConceptPair> pairs;
  std::size_t line_no = 0;
  for (const auto line : split_lines(text)) {
    ++line_no;
    if (is_blank(line)) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed concept line: ") + e.what(), line_no);
    }
    if (!j.is_object()) throw ParseError("concept line is not an object", line_no);
    ConceptPair p;
    try {
      p.name = j.at("name").get<std::string>();
      p.positive_text = j.at("positive_text").get<std::string>();
      p.negative_text = j.at("negative_text").get<std::string>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("concept line missing field: ") + e.what(), line_no);
    }
    if (p.positive_text.empty() || p.negative_text.empty()) {
      throw ParseError("concept texts must be nonempty", line_no);
    }
    if (p.positive_text == p.negative_text) {
      throw ParseError("concept '" + p.name + "' has identical polarity texts", line_no);
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<ConceptPair> load_concept_table(const std::filesystem::path& path) {
  return parse_concept_table(read_file(path));
}

std::string format_concept_table(std::span<const ConceptPair> pairs) {
  std::string out;
  for (const auto& p : pairs) {
    json j{{"name", p.name}, {"positive_text", p.positive_text}, {"negative_text", p.negative_text}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string format_direction(const FairnessDirection& fd) {
  json prov = json::array();
  for (const auto& e : fd.provenance) {
    prov.push_back({{"concept", e.concept_name}, {"sign", e.sign}, {"text", e.text}});
  }
  const auto v = fd.direction.values();
  json j{{"format", "fairmap.direction/1"},
         {"dim", fd.direction.dim()},
         {"direction", std::vector<double>(v.begin(), v.end())},
         {"raw_norm", fd.raw_norm},
         {"normalize_concepts", fd.normalize_concepts},
         {"provenance", std::move(prov)}};
  return j.dump(2) + "\n";
}

FairnessDirection parse_direction(std::string_view text) {
  FairnessDirection fd;
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "fairmap.direction/1") {
      throw ParseError("unsupported direction format");
    }
    const auto dim = j.at("dim").get<std::size_t>();
    auto values = j.at("direction").get<std::vector<double>>();
    if (values.size() != dim) throw ParseError("direction length does not match dim");
    fd.direction = Vector(std::move(values));
    fd.raw_norm = j.at("raw_norm").get<double>();
    fd.normalize_concepts = j.value("normalize_concepts", true);
    for (const auto& e : j.at("provenance")) {
      const int sign = e.at("sign").get<int>();
      if (sign != 1 && sign != -1) throw ParseError("provenance sign must be +1 or -1");
      fd.provenance.push_back(
          {e.at("concept").get<std::string>(), sign, e.at("text").get<std::string>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed direction file: ") + e.what());
  } catch (const InvalidArgumentError& e) {
    throw ParseError(std::string("malformed direction file: ") + e.what());
  }
  if (std::abs(norm(fd.direction) - 1.0) > 1e-9) throw ParseError("direction is not unit norm");
  return fd;
}

FairnessDirection load_direction(const std::filesystem::path& path) {
  return parse_direction(read_file(path));
}

}  // namespace fairmap
