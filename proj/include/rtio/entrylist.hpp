#ifndef RTIO_ENTRYLIST_HPP
#define RTIO_ENTRYLIST_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rtio/bytes.hpp"
#include "rtio/format.hpp"

namespace rtio {

// Entries per block. 16-bit local offsets are what make this span work.
inline constexpr std::uint32_t kBlockSpan = 64000;
// A block holds a sorted offset array up to this count and a bitmap above
// it: 4000 two-byte offsets and a 64000-bit bitmap both occupy 8000 bytes,
// and ties go to the array.
inline constexpr std::uint32_t kArrayMaxCount = 4000;
inline constexpr std::size_t kBitmapBytes = kBlockSpan / 8;

class Block {
 public:
  enum class Form : std::uint8_t { Array = 0, Bitmap = 1 };

  Form form() const { return form_; }
  std::uint32_t count() const { return count_; }
  std::size_t payload_bytes() const;

  bool contains(std::uint32_t local) const;
  void insert(std::uint32_t local);
  std::optional<std::uint32_t> first_at_or_after(std::uint32_t local) const;

  // Re-establish the representation rule after bulk changes.
  void normalize();

  const std::vector<std::uint16_t>& offsets() const { return offsets_; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  template <typename F>
  void for_each(F&& fn) const {
    if (form_ == Form::Array) {
      for (std::uint16_t o : offsets_) fn(static_cast<std::uint32_t>(o));
    } else {
      for (std::uint32_t local = 0; local < kBlockSpan; ++local)
        if (bits_[local >> 3] & (1u << (local & 7))) fn(local);
    }
  }

  static Block from_offsets(std::vector<std::uint16_t> sorted_unique);
  static Block from_bits(std::vector<std::uint8_t> bits, std::uint32_t count);

  bool operator==(const Block&) const = default;

 private:
  void to_bitmap();
  void to_array();

  Form form_ = Form::Array;
  std::uint32_t count_ = 0;
  std::vector<std::uint16_t> offsets_;  // Array form: sorted unique locals
  std::vector<std::uint8_t> bits_;      // Bitmap form: kBitmapBytes, LSB-first
};

// Sparse set of 64-bit entry numbers in 64000-entry blocks. Build is
// single-owner; once built the list is immutable and safe to share.
class EntryList {
 public:
  void add(std::uint64_t entry);
  bool contains(std::uint64_t entry) const;

  // Smallest member strictly greater than entry.
  std::optional<std::uint64_t> next_after(std::uint64_t entry) const;

  std::uint64_t count() const { return count_; }
  bool empty() const { return count_ == 0; }

  const std::map<std::uint64_t, Block>& blocks() const { return blocks_; }

  template <typename F>
  void for_each(F&& fn) const {
    for (const auto& [idx, block] : blocks_) {
      const std::uint64_t base = idx * kBlockSpan;
      block.for_each([&](std::uint32_t local) { fn(base + local); });
    }
  }

  // Partition by the half-open ranges the strictly ascending boundaries
  // induce; absolute entry numbers are preserved.
  std::vector<EntryList> split(std::span<const std::uint64_t> boundaries) const;

  Bytes serialize() const;
  static EntryList deserialize(std::span<const std::uint8_t> bytes);

  bool operator==(const EntryList&) const = default;

 private:
  friend EntryList list_union(const EntryList& a, const EntryList& b);

  std::map<std::uint64_t, Block> blocks_;
  std::uint64_t count_ = 0;
};

EntryList list_union(const EntryList& a, const EntryList& b);

// Container storage under the directory's entry_lists section.
void store_entry_list(FileWriter& file, const std::string& name, const EntryList& list);
EntryList load_entry_list(const FileReader& file, std::string_view name);

}  // namespace rtio

#endif  // RTIO_ENTRYLIST_HPP
