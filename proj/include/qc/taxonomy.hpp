#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace qc {

struct TaxonomyNode {
  std::string code;
  std::string parent_code;  // empty for roots
  std::string name;
  std::string definition;   // may be empty; display falls back to name
  int depth = 1;
};

// An assigned label: node codes from a root down to the most specific node.
struct LabelPath {
  std::vector<std::string> codes;

  LabelPath() = default;
  explicit LabelPath(std::vector<std::string> c) : codes(std::move(c)) {}

  const std::string& leaf() const { return codes.back(); }
  int length() const { return static_cast<int>(codes.size()); }
  bool empty() const { return codes.empty(); }

  auto operator<=>(const LabelPath&) const = default;
};

// Returns the first min(level, len) codes. Idempotent; requires level >= 1.
LabelPath truncate(const LabelPath& label, int level);

// Hierarchical label inventory. Immutable after load; concurrent reads are safe.
class Taxonomy {
 public:
  // Reads the node TSV (code, parent or '-', name, definition). Validates
  // uniqueness, parent existence, and acyclicity; derives depths.
  static Taxonomy load(const std::filesystem::path& path);
  static Taxonomy from_nodes(std::vector<TaxonomyNode> nodes);

  std::size_t size() const { return nodes_.size(); }
  int max_depth() const { return max_depth_; }

  bool contains(const std::string& code) const { return by_code_.count(code) > 0; }
  const TaxonomyNode& node(const std::string& code) const;

  // Root-to-node code path for a known code.
  LabelPath path_to(const std::string& code) const;

  // Checks consecutive parent->child edges against the node table.
  bool valid_path(const LabelPath& label) const;

  // Per-level definition text (name when the definition is empty), root
  // first, joined with single spaces.
  std::string definition_chain(const LabelPath& label) const;

  // All maximal labels (root-to-leaf paths) truncated to `level`, deduplicated.
  std::set<LabelPath> labels_at_level(int level) const;

  // Same truncate-and-dedup over an observed label inventory (e.g. the gold
  // labels of a corpus); this is what the per-level category counts use.
  static std::set<LabelPath> labels_at_level(const std::vector<LabelPath>& inventory, int level);

  // Nodes in file order (stable across loads of the same file).
  const std::vector<TaxonomyNode>& nodes() const { return nodes_; }

  // Fingerprint of the node table; stored in model files to catch mismatches.
  std::string fingerprint() const;

 private:
  std::vector<TaxonomyNode> nodes_;
  std::map<std::string, std::size_t> by_code_;
  int max_depth_ = 0;
};

// Writes the node TSV ('-' for root parents), loadable by Taxonomy::load.
void write_taxonomy(const std::filesystem::path& path, const std::vector<TaxonomyNode>& nodes);

}  // namespace qc
