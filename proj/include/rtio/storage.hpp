#ifndef RTIO_STORAGE_HPP
#define RTIO_STORAGE_HPP

#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "rtio/bytes.hpp"

namespace rtio {

struct ByteRange {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;

  bool operator==(const ByteRange&) const = default;
};

// Random-access byte source. Every read_at or vectored_read call is exactly
// one transaction against the backend; size() is metadata and free.
// Counters are atomic, so one adapter may serve several reader threads.
class StorageAdapter {
 public:
  virtual ~StorageAdapter() = default;

  Bytes read_at(std::uint64_t offset, std::uint64_t length) {
    Bytes b = do_read(offset, length);
    transactions_.fetch_add(1, std::memory_order_relaxed);
    bytes_read_.fetch_add(b.size(), std::memory_order_relaxed);
    return b;
  }

  // One round trip serving many ranges; result is the concatenation of the
  // per-range reads in argument order.
  Bytes vectored_read(std::span<const ByteRange> ranges) {
    Bytes b = do_vectored(ranges);
    transactions_.fetch_add(1, std::memory_order_relaxed);
    bytes_read_.fetch_add(b.size(), std::memory_order_relaxed);
    return b;
  }

  virtual std::uint64_t size() const = 0;

  virtual std::uint64_t transactions() const {
    return transactions_.load(std::memory_order_relaxed);
  }
  virtual std::uint64_t bytes_read() const { return bytes_read_.load(std::memory_order_relaxed); }

 protected:
  virtual Bytes do_read(std::uint64_t offset, std::uint64_t length) = 0;

  virtual Bytes do_vectored(std::span<const ByteRange> ranges) {
    Bytes out;
    std::uint64_t total = 0;
    for (const auto& r : ranges) total += r.length;
    out.reserve(total);
    for (const auto& r : ranges) {
      Bytes part = do_read(r.offset, r.length);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

 private:
  std::atomic<std::uint64_t> transactions_{0};
  std::atomic<std::uint64_t> bytes_read_{0};
};

using StorageAdapterPtr = std::shared_ptr<StorageAdapter>;

// Local file via pread; safe to share across threads.
class LocalFileAdapter : public StorageAdapter {
 public:
  explicit LocalFileAdapter(const std::string& path);
  ~LocalFileAdapter() override;

  LocalFileAdapter(const LocalFileAdapter&) = delete;
  LocalFileAdapter& operator=(const LocalFileAdapter&) = delete;

  std::uint64_t size() const override { return size_; }
  const std::string& path() const { return path_; }

 protected:
  Bytes do_read(std::uint64_t offset, std::uint64_t length) override;

 private:
  std::string path_;
  int fd_ = -1;
  std::uint64_t size_ = 0;
};

// In-memory source for tests.
class MemoryAdapter : public StorageAdapter {
 public:
  explicit MemoryAdapter(Bytes data) : data_(std::move(data)) {}

  std::uint64_t size() const override { return data_.size(); }

 protected:
  Bytes do_read(std::uint64_t offset, std::uint64_t length) override;

 private:
  Bytes data_;
};

// Wraps another adapter and charges a fixed per-transaction delay plus an
// optional bandwidth cost, making latency effects measurable in tests.
class LatencySimAdapter : public StorageAdapter {
 public:
  LatencySimAdapter(StorageAdapterPtr inner, double latency_ms, double bandwidth_bytes_per_s = 0);

  std::uint64_t size() const override { return inner_->size(); }
  double latency_ms() const { return latency_ms_; }

 protected:
  Bytes do_read(std::uint64_t offset, std::uint64_t length) override;
  Bytes do_vectored(std::span<const ByteRange> ranges) override;

 private:
  void charge(std::uint64_t bytes) const;

  StorageAdapterPtr inner_;
  double latency_ms_;
  double bandwidth_;
};

// Locators: a plain filesystem path, or
//   sim://PATH?latency_ms=L&bandwidth=B
// for the latency simulator over a local file.
StorageAdapterPtr open_adapter(const std::string& locator);

}  // namespace rtio

#endif  // RTIO_STORAGE_HPP
