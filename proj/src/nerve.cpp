#include "fairmap/nerve.hpp"

#include <algorithm>
#include <limits>
#include <thread>

#include "fairmap/errors.hpp"
#include "union_find.hpp"

namespace fairmap {
namespace {

using SimplexCounts = std::map<std::vector<std::size_t>, std::size_t>;

// Adds every subset of `nodes` with 2..max_dim+1 elements to `counts`.
void add_faces(std::span<const std::size_t> nodes, std::size_t max_dim, SimplexCounts& counts) {
  std::vector<std::size_t> picked;
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (picked.size() >= 2) counts[picked]++;
    if (picked.size() == max_dim + 1) return;
    for (std::size_t i = start; i < nodes.size(); ++i) {
      picked.push_back(nodes[i]);
      self(self, i + 1);
      picked.pop_back();
    }
  };
  recurse(recurse, 0);
}

SimplexCounts count_simplices(const std::vector<std::vector<std::size_t>>& incidence, std::size_t max_dim,
                              std::size_t threads) {
  threads = std::max<std::size_t>(1, std::min(threads, incidence.size()));
  std::vector<SimplexCounts> partial(threads);
  auto work = [&](std::size_t t) {
    for (std::size_t p = t; p < incidence.size(); p += threads) {
      if (incidence[p].size() >= 2) add_faces(incidence[p], max_dim, partial[t]);
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  SimplexCounts total = std::move(partial.front());
  for (std::size_t t = 1; t < threads; ++t) {
    for (auto& [key, n] : partial[t]) total[key] += n;
  }
  return total;
}

}  // namespace

const std::vector<Simplex>& SimplicialComplex::edges() const {
  static const std::vector<Simplex> kNone;
  return simplices.empty() ? kNone : simplices.front();
}

SimplicialComplex build_nerve_indexed(const std::vector<std::vector<std::vector<std::size_t>>>& clusters,
                                      std::span<const std::string> ids, std::size_t max_dim,
                                      std::size_t threads) {
  if (max_dim < 1 || max_dim > kMaxNerveDim) {
    throw InvalidArgumentError("nerve dimension must be between 1 and " + std::to_string(kMaxNerveDim));
  }
  SimplicialComplex complex;
  complex.max_dim = max_dim;
  std::vector<std::vector<std::size_t>> incidence(ids.size());
  for (std::size_t iv = 0; iv < clusters.size(); ++iv) {
    for (std::size_t c = 0; c < clusters[iv].size(); ++c) {
      MapperNode node;
      node.node_id = complex.nodes.size();
      node.interval_index = iv;
      node.cluster_index = c;
      auto members = clusters[iv][c];
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()), members.end());
      if (members.empty()) throw InvalidArgumentError("empty cluster in nerve input");
      node.members.reserve(members.size());
      for (std::size_t p : members) {
        if (p >= ids.size()) throw UnknownRecordError("cluster member index out of range");
        incidence[p].push_back(node.node_id);
        node.members.push_back(ids[p]);
      }
      complex.nodes.push_back(std::move(node));
    }
  }
  const SimplexCounts counts = count_simplices(incidence, max_dim, threads);
  complex.simplices.resize(max_dim);
  for (const auto& [verts, n] : counts) complex.simplices[verts.size() - 2].push_back({verts, n});
  return complex;
}

SimplicialComplex build_nerve(const std::vector<std::vector<Cluster>>& per_interval_clusters,
                              std::size_t max_dim, std::size_t threads) {
  std::vector<std::string> ids;
  for (const auto& interval : per_interval_clusters) {
    for (const auto& c : interval) ids.insert(ids.end(), c.members.begin(), c.members.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index = [&ids](const std::string& id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<std::vector<std::vector<std::size_t>>> indexed(per_interval_clusters.size());
  for (std::size_t iv = 0; iv < per_interval_clusters.size(); ++iv) {
    for (const auto& c : per_interval_clusters[iv]) {
      std::vector<std::size_t> members;
      members.reserve(c.members.size());
      for (const auto& id : c.members) members.push_back(index(id));
      indexed[iv].push_back(std::move(members));
    }
  }
  return build_nerve_indexed(indexed, ids, max_dim, threads);
}

void attach_mean_lens(SimplicialComplex& complex, const LensValues& lens) {
  for (auto& node : complex.nodes) {
    double sum = 0.0;
    for (const auto& id : node.members) sum += lens.at(id);
    node.mean_lens = sum / static_cast<double>(node.members.size());
  }
}

std::vector<std::vector<std::size_t>> connected_components(const SimplicialComplex& complex) {
  const std::size_t v = complex.nodes.size();
  UnionFind uf(v);
  for (const auto& e : complex.edges()) uf.unite(e.vertices[0], e.vertices[1]);
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> slot(v, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < v; ++i) {
    const std::size_t root = uf.find(i);
    if (slot[root] == std::numeric_limits<std::size_t>::max()) {
      slot[root] = components.size();
      components.emplace_back();
    }
    components[slot[root]].push_back(i);
  }
  return components;
}

BettiNumbers betti_numbers_1skeleton(const SimplicialComplex& complex) {
  BettiNumbers b;
  b.betti0 = connected_components(complex).size();
  b.betti1 = complex.edge_count() + b.betti0 - complex.nodes.size();
  return b;
}

SeparationReport separation_report(const SimplicialComplex& complex, const LabelMap& labels) {
  SeparationReport report;
  report.components = connected_components(complex);
  report.component_count = report.components.size();
  const auto betti = betti_numbers_1skeleton(complex);
  report.betti0 = betti.betti0;
  report.betti1 = betti.betti1;

  report.node_labels.resize(complex.nodes.size());
  for (const auto& node : complex.nodes) {
    LabelStats& s = report.node_labels[node.node_id];
    for (const auto& id : node.members) {
      const auto it = labels.find(id);
      if (it == labels.end()) {
        s.unlabeled++;
      } else if (it->second == 1) {
        s.positive++;
      } else if (it->second == -1) {
        s.negative++;
      } else {
        throw InvalidArgumentError("label for '" + id + "' must be +1 or -1");
      }
    }
    report.labeled_memberships += s.positive + s.negative;
    if (s.mixed()) report.shared_nodes.push_back(node.node_id);
  }

  for (const auto& component : report.components) {
    std::size_t pos = 0;
    std::size_t neg = 0;
    for (std::size_t n : component) {
      pos += report.node_labels[n].positive;
      neg += report.node_labels[n].negative;
    }
    if (pos + neg == 0) {
      report.per_component_purity.push_back(std::nullopt);
    } else {
      report.per_component_purity.push_back(static_cast<double>(std::max(pos, neg)) /
                                            static_cast<double>(pos + neg));
    }
  }

  for (const auto& e : complex.edges()) {
    const int a = report.node_labels[e.vertices[0]].majority();
    const int b = report.node_labels[e.vertices[1]].majority();
    if (a != 0 && b != 0 && a != b) report.cross_edges++;
  }
  return report;
}

}  // namespace fairmap
