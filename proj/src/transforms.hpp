#pragma once

// FFTW wrappers. Plans are created once per grid under a global lock and
// executed through the new-array interface, so concurrent use is safe.

#include <fftw3.h>

#include <complex>
#include <vector>

#include "nematic/operators.hpp"

namespace nematic {

using Spectrum = std::vector<std::complex<double>>;

class Transforms {
 public:
  explicit Transforms(const Grid& g);
  ~Transforms();
  Transforms(const Transforms&) = delete;
  Transforms& operator=(const Transforms&) = delete;

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nyc() const { return ny_ / 2 + 1; }  // complex extent of the last axis

  // Periodic r2c / c2r. `inverse` normalises.
  Spectrum forward(const Samples& a) const;
  Samples inverse(Spectrum s) const;

  // Real trigonometric transforms for the cell-centred mode: DCT-II (even)
  // or DST-II (odd) along both axes; `trig_inverse` normalises.
  Samples trig_forward(const Samples& a, Ghost ghost) const;
  Samples trig_inverse(Samples s, Ghost ghost) const;

 private:
  int nx_, ny_;
  bool periodic_;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;
  fftw_plan dct_fwd_ = nullptr, dct_inv_ = nullptr;
  fftw_plan dst_fwd_ = nullptr, dst_inv_ = nullptr;
};

}  // namespace nematic
