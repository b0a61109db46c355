#ifndef RTIO_FORMAT_HPP
#define RTIO_FORMAT_HPP

#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtio/bytes.hpp"
#include "rtio/histogram.hpp"
#include "rtio/schema.hpp"
#include "rtio/storage.hpp"

// Container layout (normative description in FORMAT.md):
//
//   [header 24B][basket payloads...][directory][crc32 u32]["OITR"]
//
// The header is written first with placeholder footer fields and patched at
// finalize, so the body is strictly append-only.

namespace rtio {

inline constexpr char kFileMagic[4] = {'R', 'T', 'I', 'O'};
inline constexpr char kTrailerMagic[4] = {'O', 'I', 'T', 'R'};
inline constexpr std::uint16_t kFormatVersion = 1;
inline constexpr std::uint64_t kHeaderSize = 24;
inline constexpr std::uint64_t kTrailerSize = 8;  // crc32 + trailer magic

struct FileHeader {
  std::uint16_t version = kFormatVersion;
  std::uint64_t footer_offset = 0;
  std::uint64_t footer_length = 0;
};

struct BasketIndexEntry {
  std::uint32_t branch_id = 0;
  std::uint64_t file_offset = 0;
  std::uint64_t first_entry = 0;
  std::uint32_t n_entries = 0;
  std::uint32_t raw_length = 0;
  std::uint32_t compressed_length = 0;
  std::uint8_t codec_id = 0;
  std::uint32_t checksum = 0;

  std::uint64_t end_entry() const { return first_entry + n_entries; }
  bool operator==(const BasketIndexEntry&) const = default;
};

struct BranchDesc {
  Leaf leaf;
  std::vector<BasketIndexEntry> baskets;

  bool operator==(const BranchDesc&) const = default;
};

struct TreeDesc {
  std::string name;
  std::uint64_t n_entries = 0;
  std::vector<BranchDesc> branches;

  Schema schema() const;
  bool operator==(const TreeDesc&) const = default;
};

struct NamedBlob {
  std::string name;
  Bytes bytes;

  bool operator==(const NamedBlob&) const = default;
};

struct Directory {
  std::vector<TreeDesc> trees;
  std::vector<Histogram1D> histograms;
  std::vector<NamedBlob> entry_lists;

  Bytes serialize() const;
  static Directory parse(std::span<const std::uint8_t> bytes);

  const TreeDesc* find_tree(std::string_view name) const;
  const Histogram1D* find_histogram(std::string_view name) const;
  const NamedBlob* find_entry_list(std::string_view name) const;

  bool operator==(const Directory&) const = default;
};

// Semantic checks shared by finalize and open: unique names, basket
// contiguity from entry 0, per-branch totals, ranges inside the body.
void validate_directory(const Directory& dir, std::uint64_t footer_offset);

namespace detail {
// Tree writers attach to the file so finalize can flush partial baskets.
struct Flushable {
  virtual ~Flushable() = default;
  virtual void flush_pending() = 0;
};
}  // namespace detail

// Writable container handle. Exclusively owned, single-threaded.
class FileWriter {
 public:
  explicit FileWriter(const std::string& path, bool overwrite = false);
  ~FileWriter();

  FileWriter(const FileWriter&) = delete;
  FileWriter& operator=(const FileWriter&) = delete;

  std::size_t add_tree(const std::string& name, const Schema& schema);

  BasketIndexEntry append_basket(std::size_t tree, std::size_t branch, std::uint64_t first_entry,
                                 std::uint32_t n_entries, std::span<const std::uint8_t> payload,
                                 std::uint32_t raw_length, std::uint8_t codec_id);

  void set_tree_entries(std::size_t tree, std::uint64_t n);
  void add_histogram(Histogram1D hist);
  void add_entry_list(const std::string& name, Bytes serialized);

  // Flushes attached writers, writes the directory and trailer, patches the
  // header and closes. The handle is unusable afterwards.
  void finalize();
  bool finalized() const { return finalized_; }

  const Directory& directory() const { return dir_; }
  const std::string& path() const { return path_; }

  void attach(std::shared_ptr<detail::Flushable> writer);

 private:
  void require_writable() const;

  std::string path_;
  std::ofstream out_;
  std::uint64_t offset_ = 0;  // next append position
  Directory dir_;
  std::vector<std::shared_ptr<detail::Flushable>> attached_;
  bool finalized_ = false;
};

// Read-only container handle. Immutable after open; lazily reads basket
// payloads through its adapter.
class FileReader {
 public:
  explicit FileReader(StorageAdapterPtr source);

  const FileHeader& header() const { return header_; }
  const Directory& directory() const { return dir_; }
  std::uint64_t file_size() const { return file_size_; }

  const TreeDesc& tree(std::string_view name) const;

  // Exactly compressed_length bytes from file_offset, checksum-verified,
  // never decompressed.
  Bytes read_basket_raw(const BasketIndexEntry& entry) const;

  StorageAdapterPtr adapter() const { return adapter_; }

  // Swap the data-read path (used to layer a prefetch cache on top). Only
  // valid before the reader is shared between threads.
  void set_adapter(StorageAdapterPtr adapter);

 private:
  StorageAdapterPtr adapter_;
  std::uint64_t file_size_ = 0;
  FileHeader header_;
  Directory dir_;
};

using FileReaderPtr = std::shared_ptr<FileReader>;

FileReaderPtr open_file(StorageAdapterPtr source);
FileReaderPtr open_file(const std::string& locator);

}  // namespace rtio

#endif  // RTIO_FORMAT_HPP
