#include "rtio/schema.hpp"

#include <cctype>
#include <unordered_set>

namespace rtio {

bool valid_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto head = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto tail = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  if (!head(name[0])) return false;
  for (std::size_t i = 1; i < name.size(); ++i)
    if (!tail(name[i])) return false;
  return true;
}

Schema::Schema(std::vector<Leaf> leaves) : leaves_(std::move(leaves)) {
  std::unordered_set<std::string_view> seen;
  for (const auto& leaf : leaves_) {
    if (!valid_identifier(leaf.name))
      throw UsageError("invalid leaf name '" + leaf.name + "'");
    if (!seen.insert(leaf.name).second)
      throw UsageError("duplicate leaf name '" + leaf.name + "'");
    if (leaf.type.kind == LeafKind::QF64) leaf.type.quant.validate();
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < leaves_.size(); ++i)
    if (leaves_[i].name == name) return i;
  return std::nullopt;
}

std::size_t Schema::require(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw UsageError("unknown leaf '" + std::string(name) + "'");
}

}  // namespace rtio
