#include "qc/taxonomy.hpp"

#include <algorithm>
#include <cstdio>

#include "qc/errors.hpp"
#include "qc/io.hpp"
#include "qc/rng.hpp"

namespace qc {

LabelPath truncate(const LabelPath& label, int level) {
  if (level < 1) throw DataError("truncation level must be >= 1");
  if (label.length() <= level) return label;
  return LabelPath(std::vector<std::string>(label.codes.begin(), label.codes.begin() + level));
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::vector<TaxonomyNode> nodes;
  for_each_tsv_row(path, [&](std::size_t line_no, const std::vector<std::string>& fields) {
    if (fields.size() < 3 || fields.size() > 4) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 4 tab-separated fields (code, parent, name, definition)");
    }
    TaxonomyNode n;
    n.code = fields[0];
    n.parent_code = fields[1] == "-" ? std::string{} : fields[1];
    n.name = fields[2];
    n.definition = fields.size() == 4 ? fields[3] : std::string{};
    if (n.code.empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": empty node code");
    }
    nodes.push_back(std::move(n));
  });
  return from_nodes(std::move(nodes));
}

Taxonomy Taxonomy::from_nodes(std::vector<TaxonomyNode> nodes) {
  Taxonomy tax;
  tax.nodes_ = std::move(nodes);
  for (std::size_t i = 0; i < tax.nodes_.size(); ++i) {
    auto [it, inserted] = tax.by_code_.emplace(tax.nodes_[i].code, i);
    if (!inserted) throw DataError("duplicate taxonomy code: " + tax.nodes_[i].code);
  }
  // Depth = walk to a root; the walk also surfaces missing parents and cycles.
  for (auto& n : tax.nodes_) {
    int depth = 1;
    const TaxonomyNode* cur = &n;
    while (!cur->parent_code.empty()) {
      auto it = tax.by_code_.find(cur->parent_code);
      if (it == tax.by_code_.end()) {
        throw DataError("missing parent '" + cur->parent_code + "' for code: " + n.code);
      }
      cur = &tax.nodes_[it->second];
      ++depth;
      if (depth > static_cast<int>(tax.nodes_.size())) {
        throw DataError("cycle detected in taxonomy at code: " + n.code);
      }
    }
    n.depth = depth;
    tax.max_depth_ = std::max(tax.max_depth_, depth);
  }
  return tax;
}

const TaxonomyNode& Taxonomy::node(const std::string& code) const {
  auto it = by_code_.find(code);
  if (it == by_code_.end()) throw DataError("unknown taxonomy code: " + code);
  return nodes_[it->second];
}

LabelPath Taxonomy::path_to(const std::string& code) const {
  std::vector<std::string> codes;
  const TaxonomyNode* cur = &node(code);
  codes.push_back(cur->code);
  while (!cur->parent_code.empty()) {
    cur = &node(cur->parent_code);
    codes.push_back(cur->code);
  }
  std::reverse(codes.begin(), codes.end());
  return LabelPath(std::move(codes));
}

bool Taxonomy::valid_path(const LabelPath& label) const {
  if (label.empty()) return false;
  for (std::size_t i = 0; i < label.codes.size(); ++i) {
    auto it = by_code_.find(label.codes[i]);
    if (it == by_code_.end()) return false;
    const TaxonomyNode& n = nodes_[it->second];
    const std::string& expected_parent = i == 0 ? std::string{} : label.codes[i - 1];
    if (n.parent_code != expected_parent) return false;
  }
  return true;
}

std::string Taxonomy::definition_chain(const LabelPath& label) const {
  std::string out;
  for (const auto& code : label.codes) {
    const TaxonomyNode& n = node(code);
    const std::string& segment = n.definition.empty() ? n.name : n.definition;
    if (!out.empty()) out += ' ';
    out += segment;
  }
  return out;
}

std::set<LabelPath> Taxonomy::labels_at_level(int level) const {
  if (level < 1) throw DataError("level must be >= 1");
  std::set<std::string> has_child;
  for (const auto& n : nodes_) {
    if (!n.parent_code.empty()) has_child.insert(n.parent_code);
  }
  std::vector<LabelPath> maximal;
  for (const auto& n : nodes_) {
    if (!has_child.count(n.code)) maximal.push_back(path_to(n.code));
  }
  return labels_at_level(maximal, level);
}

std::set<LabelPath> Taxonomy::labels_at_level(const std::vector<LabelPath>& inventory, int level) {
  std::set<LabelPath> out;
  for (const auto& label : inventory) out.insert(truncate(label, level));
  return out;
}

std::string Taxonomy::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& n : nodes_) {
    h = mix_seed(h, hash_str(n.code));
    h = mix_seed(h, hash_str(n.parent_code));
    h = mix_seed(h, hash_str(n.name));
    h = mix_seed(h, hash_str(n.definition));
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

void write_taxonomy(const std::filesystem::path& path, const std::vector<TaxonomyNode>& nodes) {
  std::string out = "# code\tparent\tname\tdefinition\n";
  for (const auto& n : nodes) {
    out += n.code + '\t' + (n.parent_code.empty() ? "-" : n.parent_code) + '\t' + n.name + '\t' +
           n.definition + '\n';
  }
  atomic_write(path, out);
}

}  // namespace qc
