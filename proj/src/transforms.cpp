#include "transforms.hpp"

#include <mutex>

namespace nematic {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

}  // namespace

Transforms::Transforms(const Grid& g) : nx_(g.nx), ny_(g.ny), periodic_(g.bc == BcMode::periodic) {
  std::lock_guard<std::mutex> lock(planner_mutex());
  std::vector<double> real(g.size());
  std::vector<double> real2(g.size());
  if (periodic_) {
    Spectrum spec(static_cast<std::size_t>(nx_) * nyc());
    auto* c = reinterpret_cast<fftw_complex*>(spec.data());
    r2c_ = fftw_plan_dft_r2c_2d(nx_, ny_, real.data(), c, kPlanFlags);
    c2r_ = fftw_plan_dft_c2r_2d(nx_, ny_, c, real.data(), kPlanFlags);
  } else {
    dct_fwd_ = fftw_plan_r2r_2d(nx_, ny_, real.data(), real2.data(), FFTW_REDFT10, FFTW_REDFT10,
                                kPlanFlags);
    dct_inv_ = fftw_plan_r2r_2d(nx_, ny_, real.data(), real2.data(), FFTW_REDFT01, FFTW_REDFT01,
                                kPlanFlags);
    dst_fwd_ = fftw_plan_r2r_2d(nx_, ny_, real.data(), real2.data(), FFTW_RODFT10, FFTW_RODFT10,
                                kPlanFlags);
    dst_inv_ = fftw_plan_r2r_2d(nx_, ny_, real.data(), real2.data(), FFTW_RODFT01, FFTW_RODFT01,
                                kPlanFlags);
  }
}

Transforms::~Transforms() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  for (fftw_plan p : {r2c_, c2r_, dct_fwd_, dct_inv_, dst_fwd_, dst_inv_}) {
    if (p) fftw_destroy_plan(p);
  }
}

Spectrum Transforms::forward(const Samples& a) const {
  Spectrum out(static_cast<std::size_t>(nx_) * nyc());
  // r2c leaves its input untouched.
  fftw_execute_dft_r2c(r2c_, const_cast<double*>(a.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

Samples Transforms::inverse(Spectrum s) const {
  Samples out(static_cast<std::size_t>(nx_) * ny_);
  fftw_execute_dft_c2r(c2r_, reinterpret_cast<fftw_complex*>(s.data()), out.data());
  const double norm = 1.0 / (static_cast<double>(nx_) * ny_);
  for (double& v : out) v *= norm;
  return out;
}

Samples Transforms::trig_forward(const Samples& a, Ghost ghost) const {
  Samples out(a.size());
  fftw_execute_r2r(ghost == Ghost::even ? dct_fwd_ : dst_fwd_, const_cast<double*>(a.data()),
                   out.data());
  return out;
}

Samples Transforms::trig_inverse(Samples s, Ghost ghost) const {
  Samples out(s.size());
  fftw_execute_r2r(ghost == Ghost::even ? dct_inv_ : dst_inv_, s.data(), out.data());
  const double norm = 1.0 / (4.0 * static_cast<double>(nx_) * ny_);
  for (double& v : out) v *= norm;
  return out;
}

}  // namespace nematic
