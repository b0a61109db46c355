#ifndef RTIO_CODEC_HPP
#define RTIO_CODEC_HPP

#include <atomic>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rtio/bytes.hpp"
#include "rtio/errors.hpp"

namespace rtio {

// Maps a real-valued column onto [0, 2^nbits - 1] fixed-width integers on
// disk. min/max must be finite with min < max; nbits in [2, 32].
struct QuantSpec {
  double min = 0.0;
  double max = 1.0;
  int nbits = 16;

  void validate() const;
  std::uint64_t qmax() const { return (std::uint64_t{1} << nbits) - 1; }
  bool operator==(const QuantSpec&) const = default;
};

enum class LeafKind : std::uint8_t { F64 = 0, QF64 = 1, I64 = 2, Str = 3 };

struct LeafType {
  LeafKind kind = LeafKind::F64;
  QuantSpec quant;  // meaningful only when kind == QF64

  static LeafType f64() { return {LeafKind::F64, {}}; }
  static LeafType qf64(QuantSpec q) { return {LeafKind::QF64, q}; }
  static LeafType i64() { return {LeafKind::I64, {}}; }
  static LeafType str() { return {LeafKind::Str, {}}; }

  bool operator==(const LeafType& o) const {
    if (kind != o.kind) return false;
    return kind != LeafKind::QF64 || quant == o.quant;
  }

  // On-disk bytes per value; 0 for Str (variable).
  std::size_t fixed_width() const;
  std::string describe() const;
};

using Value = std::variant<double, std::int64_t, std::string>;

// Codec ids are part of the file format and frozen.
inline constexpr std::uint8_t kCodecStore = 0;
inline constexpr std::uint8_t kCodecDeflate = 1;

// Monotonic call/byte counters, safe to read and bump concurrently.
struct CodecStats {
  std::uint64_t compress_calls = 0;
  std::uint64_t decompress_calls = 0;
  std::uint64_t bytes_in = 0;
  std::uint64_t bytes_out = 0;
};

// Process-wide instrumented counters; snapshot before/after an operation to
// assert how many times the codec ran.
CodecStats codec_stats();

std::uint64_t quantize(double v, const QuantSpec& spec);
double dequantize(std::uint64_t q, const QuantSpec& spec);

// Smallest of {1, 2, 4} bytes holding nbits.
std::size_t quantized_width(int nbits);

Bytes encode_column(std::span<const Value> values, const LeafType& leaf);
std::vector<Value> decode_column(std::span<const std::uint8_t> bytes, const LeafType& leaf,
                                 std::uint64_t n_values);

struct Compressed {
  Bytes payload;
  std::uint8_t codec_id;
};

// level 0 stores verbatim; levels 1-9 run DEFLATE at that effort and fall
// back to store when the result would not shrink.
Compressed compress(std::span<const std::uint8_t> bytes, int level);
Bytes decompress(std::span<const std::uint8_t> payload, std::uint8_t codec_id,
                 std::uint64_t raw_length);

bool utf8_valid(std::string_view s);

}  // namespace rtio

#endif  // RTIO_CODEC_HPP
