#include "rtio/format.hpp"

#include <cstring>
#include <filesystem>
#include <unordered_set>

#include "rtio/codec.hpp"

namespace rtio {

namespace {

constexpr std::uint8_t kLeafF64 = 0;
constexpr std::uint8_t kLeafQF64 = 1;
constexpr std::uint8_t kLeafI64 = 2;
constexpr std::uint8_t kLeafStr = 3;

void write_leaf_type(ByteWriter& w, const LeafType& t) {
  switch (t.kind) {
    case LeafKind::F64:
      w.u8(kLeafF64);
      break;
    case LeafKind::QF64:
      w.u8(kLeafQF64);
      w.f64(t.quant.min);
      w.f64(t.quant.max);
      w.u8(static_cast<std::uint8_t>(t.quant.nbits));
      break;
    case LeafKind::I64:
      w.u8(kLeafI64);
      break;
    case LeafKind::Str:
      w.u8(kLeafStr);
      break;
  }
}

LeafType read_leaf_type(ByteReader& r) {
  std::uint8_t tag = r.u8();
  switch (tag) {
    case kLeafF64:
      return LeafType::f64();
    case kLeafQF64: {
      QuantSpec q;
      q.min = r.f64();
      q.max = r.f64();
      q.nbits = r.u8();
      return LeafType::qf64(q);
    }
    case kLeafI64:
      return LeafType::i64();
    case kLeafStr:
      return LeafType::str();
    default:
      throw DataError("unknown leaf type tag " + std::to_string(tag));
  }
}

void write_basket_entry(ByteWriter& w, const BasketIndexEntry& b) {
  w.u32(b.branch_id);
  w.u64(b.file_offset);
  w.u64(b.first_entry);
  w.u32(b.n_entries);
  w.u32(b.raw_length);
  w.u32(b.compressed_length);
  w.u8(b.codec_id);
  w.u32(b.checksum);
}

BasketIndexEntry read_basket_entry(ByteReader& r) {
  BasketIndexEntry b;
  b.branch_id = r.u32();
  b.file_offset = r.u64();
  b.first_entry = r.u64();
  b.n_entries = r.u32();
  b.raw_length = r.u32();
  b.compressed_length = r.u32();
  b.codec_id = r.u8();
  b.checksum = r.u32();
  return b;
}

void check_unique(std::unordered_set<std::string>& seen, const std::string& name,
                  const char* kind) {
  if (!seen.insert(name).second)
    throw DataError("duplicate " + std::string(kind) + " name '" + name + "'");
}

}  // namespace

Schema TreeDesc::schema() const {
  std::vector<Leaf> leaves;
  leaves.reserve(branches.size());
  for (const auto& b : branches) leaves.push_back(b.leaf);
  return Schema(std::move(leaves));
}

Bytes Directory::serialize() const {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(trees.size()));
  for (const auto& t : trees) {
    w.str(t.name);
    w.u64(t.n_entries);
    w.u32(static_cast<std::uint32_t>(t.branches.size()));
    for (const auto& br : t.branches) {
      w.str(br.leaf.name);
      write_leaf_type(w, br.leaf.type);
      w.u32(static_cast<std::uint32_t>(br.baskets.size()));
      for (const auto& b : br.baskets) write_basket_entry(w, b);
    }
  }
  w.u32(static_cast<std::uint32_t>(histograms.size()));
  for (const auto& h : histograms) {
    w.str(h.name);
    w.u32(h.n_bins);
    w.f64(h.lo);
    w.f64(h.hi);
    for (double c : h.counts) w.f64(c);
  }
  w.u32(static_cast<std::uint32_t>(entry_lists.size()));
  for (const auto& e : entry_lists) {
    w.str(e.name);
    w.u32(static_cast<std::uint32_t>(e.bytes.size()));
    w.raw(e.bytes);
  }
  return w.take();
}

Directory Directory::parse(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Directory dir;
  std::uint32_t n_trees = r.u32();
  dir.trees.reserve(n_trees);
  for (std::uint32_t i = 0; i < n_trees; ++i) {
    TreeDesc t;
    t.name = r.str();
    t.n_entries = r.u64();
    std::uint32_t n_branches = r.u32();
    t.branches.reserve(n_branches);
    for (std::uint32_t j = 0; j < n_branches; ++j) {
      BranchDesc br;
      br.leaf.name = r.str();
      br.leaf.type = read_leaf_type(r);
      std::uint32_t n_baskets = r.u32();
      br.baskets.reserve(n_baskets);
      for (std::uint32_t k = 0; k < n_baskets; ++k) br.baskets.push_back(read_basket_entry(r));
      t.branches.push_back(std::move(br));
    }
    dir.trees.push_back(std::move(t));
  }
  std::uint32_t n_hists = r.u32();
  dir.histograms.reserve(n_hists);
  for (std::uint32_t i = 0; i < n_hists; ++i) {
    Histogram1D h;
    h.name = r.str();
    h.n_bins = r.u32();
    h.lo = r.f64();
    h.hi = r.f64();
    if (h.n_bins < 1) throw DataError("histogram '" + h.name + "' has zero bins");
    if (!(h.lo < h.hi)) throw DataError("histogram '" + h.name + "' has empty axis range");
    h.counts.resize(static_cast<std::size_t>(h.n_bins) + 2);
    for (auto& c : h.counts) c = r.f64();
    dir.histograms.push_back(std::move(h));
  }
  std::uint32_t n_lists = r.u32();
  dir.entry_lists.reserve(n_lists);
  for (std::uint32_t i = 0; i < n_lists; ++i) {
    NamedBlob e;
    e.name = r.str();
    std::uint32_t len = r.u32();
    auto s = r.take(len);
    e.bytes.assign(s.begin(), s.end());
    dir.entry_lists.push_back(std::move(e));
  }
  if (r.remaining() != 0)
    throw DataError("directory has " + std::to_string(r.remaining()) + " trailing bytes");
  return dir;
}

const TreeDesc* Directory::find_tree(std::string_view name) const {
  for (const auto& t : trees)
    if (t.name == name) return &t;
  return nullptr;
}

const Histogram1D* Directory::find_histogram(std::string_view name) const {
  for (const auto& h : histograms)
    if (h.name == name) return &h;
  return nullptr;
}

const NamedBlob* Directory::find_entry_list(std::string_view name) const {
  for (const auto& e : entry_lists)
    if (e.name == name) return &e;
  return nullptr;
}

void validate_directory(const Directory& dir, std::uint64_t footer_offset) {
  std::unordered_set<std::string> tree_names, hist_names, list_names;
  for (const auto& t : dir.trees) {
    check_unique(tree_names, t.name, "tree");
    t.schema();  // validates leaf names and quant specs
    for (const auto& br : t.branches) {
      std::uint64_t next_entry = 0;
      for (const auto& b : br.baskets) {
        if (b.n_entries < 1)
          throw DataError("tree '" + t.name + "' branch '" + br.leaf.name + "' has empty basket");
        if (b.first_entry != next_entry)
          throw DataError("tree '" + t.name + "' branch '" + br.leaf.name +
                          "' baskets not contiguous: expected first entry " +
                          std::to_string(next_entry) + ", found " +
                          std::to_string(b.first_entry));
        next_entry = b.end_entry();
        if (b.codec_id != kCodecStore && b.codec_id != kCodecDeflate)
          throw DataError("unknown codec id " + std::to_string(b.codec_id));
        if (b.codec_id == kCodecDeflate && b.compressed_length > b.raw_length)
          throw DataError("deflate basket larger than raw in tree '" + t.name + "'");
        if (b.file_offset < kHeaderSize ||
            b.file_offset + b.compressed_length > footer_offset)
          throw DataError("basket range [" + std::to_string(b.file_offset) + ", +" +
                          std::to_string(b.compressed_length) + ") outside file body");
      }
      if (next_entry != t.n_entries)
        throw DataError("tree '" + t.name + "' branch '" + br.leaf.name + "' holds " +
                        std::to_string(next_entry) + " entries, tree declares " +
                        std::to_string(t.n_entries));
    }
  }
  for (const auto& h : dir.histograms) {
    check_unique(hist_names, h.name, "histogram");
    h.validate();
  }
  for (const auto& e : dir.entry_lists) check_unique(list_names, e.name, "entry list");
}

FileWriter::FileWriter(const std::string& path, bool overwrite) : path_(path) {
  if (!overwrite && std::filesystem::exists(path))
    throw UsageError("output '" + path + "' exists (pass overwrite to replace)");
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot create '" + path + "'");
  ByteWriter w;
  w.raw(reinterpret_cast<const std::uint8_t*>(kFileMagic), 4);
  w.u16(kFormatVersion);
  w.u16(0);  // reserved
  w.u64(0);  // footer_offset, patched at finalize
  w.u64(0);  // footer_length, patched at finalize
  out_.write(reinterpret_cast<const char*>(w.bytes().data()),
             static_cast<std::streamsize>(w.size()));
  if (!out_) throw IoError("write failed on '" + path + "'");
  offset_ = kHeaderSize;
}

FileWriter::~FileWriter() = default;

void FileWriter::require_writable() const {
  if (finalized_) throw UsageError("file '" + path_ + "' is already finalized");
}

std::size_t FileWriter::add_tree(const std::string& name, const Schema& schema) {
  require_writable();
  if (!valid_identifier(name)) throw UsageError("invalid tree name '" + name + "'");
  if (schema.empty()) throw UsageError("tree '" + name + "' needs at least one leaf");
  if (dir_.find_tree(name)) throw UsageError("duplicate tree name '" + name + "'");
  TreeDesc t;
  t.name = name;
  for (const auto& leaf : schema.leaves()) t.branches.push_back(BranchDesc{leaf, {}});
  dir_.trees.push_back(std::move(t));
  return dir_.trees.size() - 1;
}

BasketIndexEntry FileWriter::append_basket(std::size_t tree, std::size_t branch,
                                           std::uint64_t first_entry, std::uint32_t n_entries,
                                           std::span<const std::uint8_t> payload,
                                           std::uint32_t raw_length, std::uint8_t codec_id) {
  require_writable();
  if (tree >= dir_.trees.size()) throw UsageError("tree index out of range");
  auto& t = dir_.trees[tree];
  if (branch >= t.branches.size()) throw UsageError("branch index out of range");
  if (payload.empty()) throw UsageError("basket payload must not be empty");
  if (n_entries < 1) throw UsageError("basket must cover at least one entry");
  auto& baskets = t.branches[branch].baskets;
  if (!baskets.empty() && baskets.back().end_entry() != first_entry)
    throw UsageError("entry-number discontinuity on branch '" + t.branches[branch].leaf.name +
                     "': expected " + std::to_string(baskets.back().end_entry()) + ", got " +
                     std::to_string(first_entry));

  BasketIndexEntry b;
  b.branch_id = static_cast<std::uint32_t>(branch);
  b.file_offset = offset_;
  b.first_entry = first_entry;
  b.n_entries = n_entries;
  b.raw_length = raw_length;
  b.compressed_length = static_cast<std::uint32_t>(payload.size());
  b.codec_id = codec_id;
  b.checksum = crc32(payload);

  out_.write(reinterpret_cast<const char*>(payload.data()),
             static_cast<std::streamsize>(payload.size()));
  if (!out_) throw IoError("basket write failed on '" + path_ + "'");
  offset_ += payload.size();

  baskets.push_back(b);
  return b;
}

void FileWriter::set_tree_entries(std::size_t tree, std::uint64_t n) {
  require_writable();
  if (tree >= dir_.trees.size()) throw UsageError("tree index out of range");
  dir_.trees[tree].n_entries = n;
}

void FileWriter::add_histogram(Histogram1D hist) {
  require_writable();
  hist.validate();
  if (dir_.find_histogram(hist.name))
    throw UsageError("duplicate histogram name '" + hist.name + "'");
  dir_.histograms.push_back(std::move(hist));
}

void FileWriter::add_entry_list(const std::string& name, Bytes serialized) {
  require_writable();
  if (dir_.find_entry_list(name)) throw UsageError("duplicate entry list name '" + name + "'");
  dir_.entry_lists.push_back(NamedBlob{name, std::move(serialized)});
}

void FileWriter::attach(std::shared_ptr<detail::Flushable> writer) {
  require_writable();
  attached_.push_back(std::move(writer));
}

void FileWriter::finalize() {
  require_writable();
  for (auto& w : attached_) w->flush_pending();
  attached_.clear();

  const std::uint64_t footer_offset = offset_;
  validate_directory(dir_, footer_offset);
  Bytes dir_bytes = dir_.serialize();

  ByteWriter tail;
  tail.raw(dir_bytes);
  tail.u32(crc32(dir_bytes));
  tail.raw(reinterpret_cast<const std::uint8_t*>(kTrailerMagic), 4);
  out_.write(reinterpret_cast<const char*>(tail.bytes().data()),
             static_cast<std::streamsize>(tail.size()));

  ByteWriter patch;
  patch.u64(footer_offset);
  patch.u64(dir_bytes.size());
  out_.seekp(8);
  out_.write(reinterpret_cast<const char*>(patch.bytes().data()),
             static_cast<std::streamsize>(patch.size()));
  out_.flush();
  if (!out_) throw IoError("finalize write failed on '" + path_ + "'");
  out_.close();
  finalized_ = true;
}

FileReader::FileReader(StorageAdapterPtr source) : adapter_(std::move(source)) {
  if (!adapter_) throw UsageError("open needs a storage adapter");
  file_size_ = adapter_->size();
  if (file_size_ < kHeaderSize + kTrailerSize)
    throw DataError("file too small (" + std::to_string(file_size_) + " bytes) to be a container");

  Bytes hdr = adapter_->read_at(0, kHeaderSize);
  ByteReader r(hdr);
  auto magic = r.take(4);
  if (std::memcmp(magic.data(), kFileMagic, 4) != 0) throw DataError("bad magic");
  header_.version = r.u16();
  if (header_.version != kFormatVersion)
    throw DataError("unsupported version " + std::to_string(header_.version));
  r.u16();  // reserved
  header_.footer_offset = r.u64();
  header_.footer_length = r.u64();

  if (header_.footer_offset < kHeaderSize ||
      header_.footer_offset + header_.footer_length + kTrailerSize > file_size_)
    throw DataError("truncated footer: directory [" + std::to_string(header_.footer_offset) +
                    ", +" + std::to_string(header_.footer_length) + ") exceeds file size " +
                    std::to_string(file_size_));

  Bytes footer = adapter_->read_at(header_.footer_offset, header_.footer_length + kTrailerSize);
  std::span<const std::uint8_t> dir_bytes(footer.data(), header_.footer_length);
  ByteReader tail(std::span<const std::uint8_t>(footer.data() + header_.footer_length,
                                                kTrailerSize));
  std::uint32_t stored_crc = tail.u32();
  auto trailer = tail.take(4);
  if (std::memcmp(trailer.data(), kTrailerMagic, 4) != 0) throw DataError("missing trailer magic");
  if (crc32(dir_bytes) != stored_crc) throw DataError("footer checksum mismatch");

  dir_ = Directory::parse(dir_bytes);
  validate_directory(dir_, header_.footer_offset);
}

const TreeDesc& FileReader::tree(std::string_view name) const {
  if (const TreeDesc* t = dir_.find_tree(name)) return *t;
  throw UsageError("no tree named '" + std::string(name) + "'");
}

Bytes FileReader::read_basket_raw(const BasketIndexEntry& entry) const {
  if (entry.file_offset < kHeaderSize ||
      entry.file_offset + entry.compressed_length > header_.footer_offset)
    throw UsageError("basket entry does not belong to this file");
  Bytes payload = adapter_->read_at(entry.file_offset, entry.compressed_length);
  if (crc32(payload) != entry.checksum)
    throw DataError("basket checksum mismatch at offset " + std::to_string(entry.file_offset));
  return payload;
}

void FileReader::set_adapter(StorageAdapterPtr adapter) {
  if (!adapter) throw UsageError("adapter must not be null");
  adapter_ = std::move(adapter);
}

FileReaderPtr open_file(StorageAdapterPtr source) {
  return std::make_shared<FileReader>(std::move(source));
}

FileReaderPtr open_file(const std::string& locator) {
  return std::make_shared<FileReader>(open_adapter(locator));
}

}  // namespace rtio
