#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace coughband::fft {

using cplx = std::complex<double>;

// Precomputed transform of a fixed size. Power-of-two sizes run an iterative
// radix-2 FFT; other sizes (825 = 3*5^2*11, 275, ...) go through Bluestein's
// chirp-z reduction onto a padded power-of-two transform.
//
// Plans are immutable after construction; concurrent execute() calls are safe
// as long as each caller supplies its own Workspace.
class Plan {
public:
    struct Workspace {
        std::vector<cplx> a, b;
        std::vector<cplx> c;  // spare output buffer for callers
    };

    explicit Plan(std::size_t n);

    std::size_t size() const { return n_; }

    // out[k] = sum_n in[n] * exp(-2*pi*i*n*k / N)
    void forward(std::span<const cplx> in, std::span<cplx> out, Workspace& ws) const;

    // Real input convenience; out must hold n complex bins.
    void forward_real(std::span<const double> in, std::span<cplx> out, Workspace& ws) const;

private:
    std::size_t n_;
    bool pow2_;
    std::size_t m_ = 0;                  // padded size for Bluestein
    std::vector<cplx> twiddle_;          // radix-2 tables for size n_ (pow2) or m_
    std::vector<std::size_t> bitrev_;
    std::vector<cplx> chirp_;            // exp(-i*pi*k^2/n), k = 0..n-1
    std::vector<cplx> chirp_fft_;        // FFT_m of the zero-padded conjugate chirp

    void fft_pow2(std::span<cplx> x, bool inverse) const;
};

// One-shot naive DFT; O(n^2). Kept for oracle checks in tests.
std::vector<cplx> naive_dft(std::span<const cplx> in);

}  // namespace coughband::fft
