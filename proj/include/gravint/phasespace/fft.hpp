#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace gravint::phasespace {

/// Batched 1D complex transforms over an n_q x n_p row-major array: along p
/// (contiguous rows) or along q (strided columns). Owns its buffer and
/// plans. Not copyable; planning is not thread-safe in FFTW, so construct
/// workspaces from one thread.
class SpectralWorkspace {
 public:
  SpectralWorkspace(std::size_t n_q, std::size_t n_p) : n_q_(n_q), n_p_(n_p) {
    buffer_.reset(static_cast<fftw_complex*>(
        fftw_malloc(sizeof(fftw_complex) * n_q * n_p)));
    if (!buffer_) throw std::bad_alloc();
    const int np = static_cast<int>(n_p);
    const int nq = static_cast<int>(n_q);
    auto* buf = buffer_.get();
    // Along p: n_q transforms of length n_p, stride 1, distance n_p.
    p_forward_.reset(fftw_plan_many_dft(1, &np, nq, buf, nullptr, 1, np, buf,
                                        nullptr, 1, np, FFTW_FORWARD,
                                        FFTW_ESTIMATE));
    p_backward_.reset(fftw_plan_many_dft(1, &np, nq, buf, nullptr, 1, np, buf,
                                         nullptr, 1, np, FFTW_BACKWARD,
                                         FFTW_ESTIMATE));
    // Along q: n_p transforms of length n_q, stride n_p, distance 1.
    q_forward_.reset(fftw_plan_many_dft(1, &nq, np, buf, nullptr, np, 1, buf,
                                        nullptr, np, 1, FFTW_FORWARD,
                                        FFTW_ESTIMATE));
    q_backward_.reset(fftw_plan_many_dft(1, &nq, np, buf, nullptr, np, 1, buf,
                                         nullptr, np, 1, FFTW_BACKWARD,
                                         FFTW_ESTIMATE));
    if (!p_forward_ || !p_backward_ || !q_forward_ || !q_backward_) {
      throw std::runtime_error("FFTW planning failed");
    }
  }

  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;
  SpectralWorkspace(SpectralWorkspace&&) noexcept = default;
  SpectralWorkspace& operator=(SpectralWorkspace&&) noexcept = default;

  std::size_t n_q() const { return n_q_; }
  std::size_t n_p() const { return n_p_; }

  std::span<std::complex<double>> data() {
    // fftw_complex is layout-compatible with std::complex<double>.
    return {reinterpret_cast<std::complex<double>*>(buffer_.get()),
            n_q_ * n_p_};
  }

  void load(std::span<const double> real_values) {
    auto d = data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = real_values[i];
  }

  /// Writes the real part, applying the 1/n normalisation of the inverse.
  void store_real(std::span<double> out, double scale) {
    auto d = data();
    for (std::size_t i = 0; i < d.size(); ++i) out[i] = scale * d[i].real();
  }

  void forward_p() { fftw_execute(p_forward_.get()); }
  void backward_p() { fftw_execute(p_backward_.get()); }
  void forward_q() { fftw_execute(q_forward_.get()); }
  void backward_q() { fftw_execute(q_backward_.get()); }

 private:
  struct BufferFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
  };
  struct PlanFree {
    void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
  };
  using PlanHandle = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanFree>;

  std::size_t n_q_;
  std::size_t n_p_;
  std::unique_ptr<fftw_complex, BufferFree> buffer_;
  PlanHandle p_forward_;
  PlanHandle p_backward_;
  PlanHandle q_forward_;
  PlanHandle q_backward_;
};

/// Angular wavenumbers of a length-n DFT with sample spacing h, in FFTW
/// order. The Nyquist entry (even n) is reported as zero: odd derivatives
/// cannot be represented there.
inline std::vector<double> wavenumbers(std::size_t n, double h) {
  std::vector<double> k(n);
  const double base = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);
  for (std::size_t i = 0; i < n; ++i) {
    const auto signed_index = static_cast<double>(i) -
                              (2 * i >= n ? static_cast<double>(n) : 0.0);
    k[i] = base * signed_index;
  }
  if (n % 2 == 0) k[n / 2] = 0.0;
  return k;
}

}  // namespace gravint::phasespace
