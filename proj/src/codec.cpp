#include "rtio/codec.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <limits>

namespace rtio {

std::uint32_t crc32(std::span<const std::uint8_t> data) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt chunks; feed in slices so >4 GiB inputs stay correct.
  std::size_t pos = 0;
  while (pos < data.size()) {
    uInt chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - pos, 1u << 30));
    c = ::crc32(c, data.data() + pos, chunk);
    pos += chunk;
  }
  return static_cast<std::uint32_t>(c);
}

void QuantSpec::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max))
    throw UsageError("quantization range must be finite");
  if (!(min < max)) throw UsageError("quantization range requires min < max");
  if (nbits < 2 || nbits > 32)
    throw UsageError("quantization bits out of range [2, 32]: " + std::to_string(nbits));
}

std::size_t LeafType::fixed_width() const {
  switch (kind) {
    case LeafKind::F64:
    case LeafKind::I64:
      return 8;
    case LeafKind::QF64:
      return quantized_width(quant.nbits);
    case LeafKind::Str:
      return 0;
  }
  throw UsageError("unknown leaf kind");
}

std::string LeafType::describe() const {
  switch (kind) {
    case LeafKind::F64:
      return "f64";
    case LeafKind::QF64:
      return "qf64[" + std::to_string(quant.min) + "," + std::to_string(quant.max) + "," +
             std::to_string(quant.nbits) + "]";
    case LeafKind::I64:
      return "i64";
    case LeafKind::Str:
      return "str";
  }
  return "?";
}

std::size_t quantized_width(int nbits) {
  if (nbits <= 8) return 1;
  if (nbits <= 16) return 2;
  return 4;
}

std::uint64_t quantize(double v, const QuantSpec& spec) {
  spec.validate();
  if (std::isnan(v)) throw UsageError("cannot quantize NaN");
  if (std::isinf(v)) throw UsageError("cannot quantize infinity");
  double c = v;
  if (c < spec.min) c = spec.min;
  if (c > spec.max) c = spec.max;
  const double qmax = static_cast<double>(spec.qmax());
  // Ties round away from zero; the scaled value is non-negative here.
  double x = ((c - spec.min) * qmax) / (spec.max - spec.min);
  auto q = static_cast<std::uint64_t>(std::llround(x));
  if (q > spec.qmax()) q = spec.qmax();
  return q;
}

double dequantize(std::uint64_t q, const QuantSpec& spec) {
  spec.validate();
  if (q > spec.qmax())
    throw UsageError("quantized value " + std::to_string(q) + " exceeds 2^" +
                     std::to_string(spec.nbits) + " - 1");
  if (q == 0) return spec.min;
  if (q == spec.qmax()) return spec.max;  // endpoints round-trip exactly
  return spec.min + static_cast<double>(q) * (spec.max - spec.min) / static_cast<double>(spec.qmax());
}

namespace {

struct AtomicStats {
  std::atomic<std::uint64_t> compress_calls{0};
  std::atomic<std::uint64_t> decompress_calls{0};
  std::atomic<std::uint64_t> bytes_in{0};
  std::atomic<std::uint64_t> bytes_out{0};
};

AtomicStats& stats() {
  static AtomicStats s;
  return s;
}

bool utf8_valid_impl(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t need;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      need = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      need = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      need = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + need >= s.size()) return false;
    for (std::size_t k = 1; k <= need; ++k) {
      unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // reject overlong forms, surrogates and out-of-range code points
    if (need == 1 && cp < 0x80) return false;
    if (need == 2 && cp < 0x800) return false;
    if (need == 3 && cp < 0x10000) return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += need + 1;
  }
  return true;
}

void put_fixed(Bytes& out, std::uint64_t v, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_fixed(const std::uint8_t* p, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

bool utf8_valid(std::string_view s) { return utf8_valid_impl(s); }

CodecStats codec_stats() {
  auto& s = stats();
  return CodecStats{s.compress_calls.load(), s.decompress_calls.load(), s.bytes_in.load(),
                    s.bytes_out.load()};
}

Bytes encode_column(std::span<const Value> values, const LeafType& leaf) {
  Bytes out;
  switch (leaf.kind) {
    case LeafKind::F64: {
      out.reserve(values.size() * 8);
      for (const auto& v : values) {
        const double* d = std::get_if<double>(&v);
        if (!d) throw UsageError("value is not a float64");
        put_fixed(out, std::bit_cast<std::uint64_t>(*d), 8);
      }
      break;
    }
    case LeafKind::QF64: {
      const std::size_t w = quantized_width(leaf.quant.nbits);
      out.reserve(values.size() * w);
      for (const auto& v : values) {
        const double* d = std::get_if<double>(&v);
        if (!d) throw UsageError("value is not a float64");
        put_fixed(out, quantize(*d, leaf.quant), w);
      }
      break;
    }
    case LeafKind::I64: {
      out.reserve(values.size() * 8);
      for (const auto& v : values) {
        const std::int64_t* i = std::get_if<std::int64_t>(&v);
        if (!i) throw UsageError("value is not an int64");
        put_fixed(out, static_cast<std::uint64_t>(*i), 8);
      }
      break;
    }
    case LeafKind::Str: {
      for (const auto& v : values) {
        const std::string* s = std::get_if<std::string>(&v);
        if (!s) throw UsageError("value is not a string");
        if (!utf8_valid(*s)) throw UsageError("string is not valid UTF-8");
        put_fixed(out, s->size(), 4);
        out.insert(out.end(), s->begin(), s->end());
      }
      break;
    }
  }
  return out;
}

std::vector<Value> decode_column(std::span<const std::uint8_t> bytes, const LeafType& leaf,
                                 std::uint64_t n_values) {
  std::vector<Value> out;
  out.reserve(n_values);
  if (leaf.kind == LeafKind::Str) {
    ByteReader r(bytes);
    for (std::uint64_t i = 0; i < n_values; ++i) {
      std::string s;
      try {
        s = r.str();
      } catch (const DataError&) {
        throw DataError("malformed string column: truncated value " + std::to_string(i));
      }
      if (!utf8_valid(s)) throw DataError("string column value " + std::to_string(i) +
                                          " is not valid UTF-8");
      out.emplace_back(std::move(s));
    }
    if (r.remaining() != 0)
      throw DataError("string column has " + std::to_string(r.remaining()) + " trailing bytes");
    return out;
  }

  const std::size_t w = leaf.fixed_width();
  if (bytes.size() != w * n_values)
    throw DataError("column length mismatch: " + std::to_string(bytes.size()) + " bytes for " +
                    std::to_string(n_values) + " values of width " + std::to_string(w));
  const std::uint8_t* p = bytes.data();
  switch (leaf.kind) {
    case LeafKind::F64:
      for (std::uint64_t i = 0; i < n_values; ++i, p += 8)
        out.emplace_back(std::bit_cast<double>(get_fixed(p, 8)));
      break;
    case LeafKind::QF64:
      for (std::uint64_t i = 0; i < n_values; ++i, p += w)
        out.emplace_back(dequantize(get_fixed(p, w), leaf.quant));
      break;
    case LeafKind::I64:
      for (std::uint64_t i = 0; i < n_values; ++i, p += 8)
        out.emplace_back(static_cast<std::int64_t>(get_fixed(p, 8)));
      break;
    default:
      throw UsageError("unknown leaf kind");
  }
  return out;
}

Compressed compress(std::span<const std::uint8_t> bytes, int level) {
  if (level < 0 || level > 9) throw UsageError("compression level out of range 0-9");
  auto& s = stats();
  s.compress_calls.fetch_add(1, std::memory_order_relaxed);
  s.bytes_in.fetch_add(bytes.size(), std::memory_order_relaxed);

  Compressed result;
  if (level == 0) {
    result.payload.assign(bytes.begin(), bytes.end());
    result.codec_id = kCodecStore;
  } else {
    z_stream zs{};
    // negative window bits: raw DEFLATE, no zlib wrapper
    if (deflateInit2(&zs, level, Z_DEFLATED, -15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
      throw IoError("deflate init failed");
    Bytes out(deflateBound(&zs, static_cast<uLong>(bytes.size())));
    zs.next_in = const_cast<Bytef*>(bytes.data());
    zs.avail_in = static_cast<uInt>(bytes.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = deflate(&zs, Z_FINISH);
    std::size_t produced = zs.total_out;
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw IoError("deflate failed: rc=" + std::to_string(rc));
    if (produced >= bytes.size()) {
      result.payload.assign(bytes.begin(), bytes.end());
      result.codec_id = kCodecStore;
    } else {
      out.resize(produced);
      result.payload = std::move(out);
      result.codec_id = kCodecDeflate;
    }
  }
  s.bytes_out.fetch_add(result.payload.size(), std::memory_order_relaxed);
  return result;
}

Bytes decompress(std::span<const std::uint8_t> payload, std::uint8_t codec_id,
                 std::uint64_t raw_length) {
  auto& s = stats();
  s.decompress_calls.fetch_add(1, std::memory_order_relaxed);
  s.bytes_in.fetch_add(payload.size(), std::memory_order_relaxed);

  Bytes out;
  switch (codec_id) {
    case kCodecStore:
      if (payload.size() != raw_length)
        throw DataError("stored payload length " + std::to_string(payload.size()) +
                        " != raw length " + std::to_string(raw_length));
      out.assign(payload.begin(), payload.end());
      break;
    case kCodecDeflate: {
      z_stream zs{};
      if (inflateInit2(&zs, -15) != Z_OK) throw IoError("inflate init failed");
      out.resize(raw_length);
      zs.next_in = const_cast<Bytef*>(payload.data());
      zs.avail_in = static_cast<uInt>(payload.size());
      zs.next_out = out.data();
      zs.avail_out = static_cast<uInt>(out.size());
      int rc = inflate(&zs, Z_FINISH);
      std::size_t produced = zs.total_out;
      bool consumed_all = zs.avail_in == 0;
      inflateEnd(&zs);
      if (rc != Z_STREAM_END || !consumed_all)
        throw DataError("corrupt deflate stream (rc=" + std::to_string(rc) + ")");
      if (produced != raw_length)
        throw DataError("decompressed length " + std::to_string(produced) + " != raw length " +
                        std::to_string(raw_length));
      break;
    }
    default:
      throw DataError("unknown codec id " + std::to_string(codec_id));
  }
  s.bytes_out.fetch_add(out.size(), std::memory_order_relaxed);
  return out;
}

}  // namespace rtio
