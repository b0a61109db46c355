#include "rtio/storage.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "rtio/errors.hpp"

namespace rtio {

LocalFileAdapter::LocalFileAdapter(const std::string& path) : path_(path) {
  fd_ = ::open(path.c_str(), O_RDONLY);
  if (fd_ < 0) throw IoError("cannot open '" + path + "': " + std::strerror(errno));
  struct stat st{};
  if (::fstat(fd_, &st) != 0) {
    int err = errno;
    ::close(fd_);
    fd_ = -1;
    throw IoError("cannot stat '" + path + "': " + std::strerror(err));
  }
  size_ = static_cast<std::uint64_t>(st.st_size);
}

LocalFileAdapter::~LocalFileAdapter() {
  if (fd_ >= 0) ::close(fd_);
}

Bytes LocalFileAdapter::do_read(std::uint64_t offset, std::uint64_t length) {
  if (offset + length > size_)
    throw IoError("read [" + std::to_string(offset) + ", +" + std::to_string(length) +
                  ") past end of '" + path_ + "' (size " + std::to_string(size_) + ")");
  Bytes out(length);
  std::uint64_t done = 0;
  while (done < length) {
    ssize_t n = ::pread(fd_, out.data() + done, length - done, static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("read failed on '" + path_ + "': " + std::strerror(errno));
    }
    if (n == 0) throw IoError("short read on '" + path_ + "'");
    done += static_cast<std::uint64_t>(n);
  }
  return out;
}

Bytes MemoryAdapter::do_read(std::uint64_t offset, std::uint64_t length) {
  if (offset + length > data_.size())
    throw IoError("read [" + std::to_string(offset) + ", +" + std::to_string(length) +
                  ") past end of memory source (size " + std::to_string(data_.size()) + ")");
  return Bytes(data_.begin() + static_cast<std::ptrdiff_t>(offset),
               data_.begin() + static_cast<std::ptrdiff_t>(offset + length));
}

LatencySimAdapter::LatencySimAdapter(StorageAdapterPtr inner, double latency_ms,
                                     double bandwidth_bytes_per_s)
    : inner_(std::move(inner)), latency_ms_(latency_ms), bandwidth_(bandwidth_bytes_per_s) {
  if (!inner_) throw UsageError("latency simulator needs an inner adapter");
  if (latency_ms_ < 0 || bandwidth_ < 0)
    throw UsageError("latency and bandwidth must be non-negative");
}

void LatencySimAdapter::charge(std::uint64_t bytes) const {
  double ms = latency_ms_;
  if (bandwidth_ > 0) ms += static_cast<double>(bytes) / bandwidth_ * 1000.0;
  if (ms > 0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

Bytes LatencySimAdapter::do_read(std::uint64_t offset, std::uint64_t length) {
  charge(length);
  return inner_->read_at(offset, length);
}

Bytes LatencySimAdapter::do_vectored(std::span<const ByteRange> ranges) {
  std::uint64_t total = 0;
  for (const auto& r : ranges) total += r.length;
  charge(total);
  return inner_->vectored_read(ranges);
}

namespace {

// key=value pairs after '?', '&'-separated
void parse_query(const std::string& q, double& latency_ms, double& bandwidth) {
  std::size_t pos = 0;
  while (pos < q.size()) {
    std::size_t amp = q.find('&', pos);
    if (amp == std::string::npos) amp = q.size();
    std::string kv = q.substr(pos, amp - pos);
    pos = amp + 1;
    std::size_t eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("bad locator parameter '" + kv + "'");
    std::string key = kv.substr(0, eq);
    std::string val = kv.substr(eq + 1);
    try {
      if (key == "latency_ms")
        latency_ms = std::stod(val);
      else if (key == "bandwidth")
        bandwidth = std::stod(val);
      else
        throw UsageError("unknown locator parameter '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw UsageError("bad numeric value for locator parameter '" + key + "'");
    }
  }
}

}  // namespace

StorageAdapterPtr open_adapter(const std::string& locator) {
  const std::string scheme = "sim://";
  if (locator.rfind(scheme, 0) == 0) {
    std::string rest = locator.substr(scheme.size());
    double latency_ms = 0, bandwidth = 0;
    std::size_t qmark = rest.find('?');
    std::string path = rest.substr(0, qmark);
    if (qmark != std::string::npos) parse_query(rest.substr(qmark + 1), latency_ms, bandwidth);
    return std::make_shared<LatencySimAdapter>(std::make_shared<LocalFileAdapter>(path),
                                               latency_ms, bandwidth);
  }
  return std::make_shared<LocalFileAdapter>(locator);
}

}  // namespace rtio
