#ifndef RTIO_HISTOGRAM_HPP
#define RTIO_HISTOGRAM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rtio/errors.hpp"

namespace rtio {

// Fixed-binning 1D histogram. counts has n_bins + 2 slots: [0] underflow,
// [1..n_bins] bins, [n_bins+1] overflow.
struct Histogram1D {
  std::string name;
  std::uint32_t n_bins = 1;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> counts;

  Histogram1D() : counts(3, 0.0) {}
  Histogram1D(std::string name_, std::uint32_t n_bins_, double lo_, double hi_);

  void validate() const;
  void fill(double v, double weight = 1.0);

  // Bin-wise addition including under/overflow; binning must match exactly.
  void add(const Histogram1D& other);

  double total() const;

  bool operator==(const Histogram1D&) const = default;
};

}  // namespace rtio

#endif  // RTIO_HISTOGRAM_HPP
