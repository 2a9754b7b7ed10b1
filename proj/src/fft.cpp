#include "coughband/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace coughband::fft {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

Plan::Plan(std::size_t n) : n_(n), pow2_(is_pow2(n)) {
    if (n == 0) throw std::invalid_argument("fft::Plan: size must be positive");

    std::size_t table_n = pow2_ ? n_ : (m_ = next_pow2(2 * n_ - 1));

    // bit-reversal permutation + per-stage twiddles for the radix-2 core
    bitrev_.resize(table_n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < table_n) ++log2n;
    for (std::size_t i = 0; i < table_n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        bitrev_[i] = r;
    }
    twiddle_.resize(table_n / 2);
    for (std::size_t k = 0; k < table_n / 2; ++k) {
        double ang = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(table_n);
        twiddle_[k] = {std::cos(ang), std::sin(ang)};
    }

    if (!pow2_) {
        // chirp[k] = exp(-i*pi*k^2/n); k^2 taken mod 2n to keep the angle exact
        chirp_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) {
            std::size_t k2 = (k * k) % (2 * n_);
            double ang = -kPi * static_cast<double>(k2) / static_cast<double>(n_);
            chirp_[k] = {std::cos(ang), std::sin(ang)};
        }
        // b[k] = conj(chirp[|k|]) wrapped onto [0, m)
        std::vector<cplx> b(m_, cplx{0.0, 0.0});
        b[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n_; ++k) {
            b[k] = std::conj(chirp_[k]);
            b[m_ - k] = std::conj(chirp_[k]);
        }
        fft_pow2(b, false);
        chirp_fft_ = std::move(b);
    }
}

void Plan::fft_pow2(std::span<cplx> x, bool inverse) const {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = bitrev_[i];
        if (j > i) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx w = twiddle_[k * step];
                if (inverse) w = std::conj(w);
                cplx u = x[i + k];
                cplx v = x[i + k + half] * w;
                x[i + k] = u + v;
                x[i + k + half] = u - v;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv;
    }
}

void Plan::forward(std::span<const cplx> in, std::span<cplx> out, Workspace& ws) const {
    if (in.size() != n_ || out.size() != n_)
        throw std::invalid_argument("fft::Plan::forward: size mismatch");

    if (pow2_) {
        for (std::size_t i = 0; i < n_; ++i) out[i] = in[i];
        fft_pow2(out, false);
        return;
    }

    // Bluestein: x[n]*chirp[n] convolved with conj(chirp), then chirp again
    ws.a.assign(m_, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n_; ++k) ws.a[k] = in[k] * chirp_[k];
    fft_pow2(ws.a, false);
    for (std::size_t k = 0; k < m_; ++k) ws.a[k] *= chirp_fft_[k];
    fft_pow2(ws.a, true);
    for (std::size_t k = 0; k < n_; ++k) out[k] = ws.a[k] * chirp_[k];
}

void Plan::forward_real(std::span<const double> in, std::span<cplx> out, Workspace& ws) const {
    if (in.size() != n_) throw std::invalid_argument("fft::Plan::forward_real: size mismatch");
    ws.b.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) ws.b[i] = cplx{in[i], 0.0};
    forward(ws.b, out, ws);
}

std::vector<cplx> naive_dft(std::span<const cplx> in) {
    const std::size_t n = in.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            double ang = -2.0 * kPi * static_cast<double>((t * k) % n) / static_cast<double>(n);
            acc += in[t] * cplx{std::cos(ang), std::sin(ang)};
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace coughband::fft
