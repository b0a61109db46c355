#include "rtio/histogram.hpp"

#include <cmath>

namespace rtio {

Histogram1D::Histogram1D(std::string name_, std::uint32_t n_bins_, double lo_, double hi_)
    : name(std::move(name_)), n_bins(n_bins_), lo(lo_), hi(hi_), counts(n_bins_ + 2, 0.0) {
  validate();
}

void Histogram1D::validate() const {
  if (n_bins < 1) throw UsageError("histogram '" + name + "' needs at least one bin");
  if (!(lo < hi)) throw UsageError("histogram '" + name + "' requires lo < hi");
  if (counts.size() != static_cast<std::size_t>(n_bins) + 2)
    throw DataError("histogram '" + name + "' counts length " + std::to_string(counts.size()) +
                    " != n_bins + 2");
}

void Histogram1D::fill(double v, double weight) {
  if (std::isnan(v)) return;  // NaN lands nowhere, matching bin arithmetic
  std::size_t slot;
  if (v < lo) {
    slot = 0;
  } else if (v >= hi) {
    slot = n_bins + 1;
  } else {
    auto bin = static_cast<std::size_t>((v - lo) / (hi - lo) * n_bins);
    if (bin >= n_bins) bin = n_bins - 1;
    slot = bin + 1;
  }
  counts[slot] += weight;
}

void Histogram1D::add(const Histogram1D& other) {
  if (other.n_bins != n_bins || other.lo != lo || other.hi != hi)
    throw UsageError("histogram binning mismatch for '" + name + "': " +
                     std::to_string(n_bins) + "[" + std::to_string(lo) + "," +
                     std::to_string(hi) + ") vs " + std::to_string(other.n_bins) + "[" +
                     std::to_string(other.lo) + "," + std::to_string(other.hi) + ")");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

double Histogram1D::total() const {
  double t = 0.0;
  for (double c : counts) t += c;
  return t;
}

}  // namespace rtio
