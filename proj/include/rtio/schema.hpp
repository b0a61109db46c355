#ifndef RTIO_SCHEMA_HPP
#define RTIO_SCHEMA_HPP

#include <optional>
#include <string>
#include <vector>

#include "rtio/codec.hpp"

namespace rtio {

struct Leaf {
  std::string name;
  LeafType type;

  bool operator==(const Leaf&) const = default;
};

bool valid_identifier(std::string_view name);

// Ordered, uniquely named, typed columns of one tree.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Leaf> leaves);

  const std::vector<Leaf>& leaves() const { return leaves_; }
  std::size_t size() const { return leaves_.size(); }
  bool empty() const { return leaves_.empty(); }
  const Leaf& at(std::size_t i) const { return leaves_.at(i); }

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t require(std::string_view name) const;  // throws UsageError

  bool operator==(const Schema&) const = default;

 private:
  std::vector<Leaf> leaves_;
};

using Row = std::vector<Value>;

}  // namespace rtio

#endif  // RTIO_SCHEMA_HPP
