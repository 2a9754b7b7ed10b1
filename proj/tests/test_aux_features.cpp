#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "coughband/aux_features.hpp"
#include "coughband/common.hpp"
#include "coughband/features.hpp"

using namespace coughband;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> sine_frame(double freq, double amp = 1.0, double phase = 0.0) {
    std::vector<double> f(825);
    for (std::size_t i = 0; i < 825; ++i)
        f[i] = amp * std::sin(2.0 * kPi * freq * i / 11025.0 + phase);
    return f;
}

std::vector<double> noise_frame(Rng& rng, double amp = 0.5) {
    std::vector<double> f(825);
    for (auto& v : f) v = amp * rng.normal();
    return f;
}

const AuxExtractor& extractor() {
    static const AuxExtractor ext(11025, 825);
    return ext;
}

}  // namespace

TEST_CASE("aux vector dimension is 56 and names line up") {
    const auto names = AuxExtractor::feature_names();
    CHECK(names.size() == kAuxFeatureDim);
    CHECK(names.front() == "hr");
    CHECK(names[1] == "rmfcc_1");
    CHECK(names[41] == "ti");
    CHECK(names[42] == "chroen");
    CHECK(names.back() == "ssch_13");

    AuxExtractor::Workspace ws;
    std::vector<double> out(kAuxFeatureDim);
    auto frame = sine_frame(1000.0);
    extractor().compute(frame, out, ws);
    for (double v : out) CHECK(std::isfinite(v));
}

TEST_CASE("harmonic ratio separates tone from noise") {
    CHECK(extractor().harmonic_ratio(sine_frame(200.0)) > 0.9);

    Rng rng(3);
    double acc = 0.0;
    for (int t = 0; t < 100; ++t) acc += extractor().harmonic_ratio(noise_frame(rng));
    CHECK(acc / 100.0 < 0.3);

    std::vector<double> zeros(825, 0.0);
    CHECK(extractor().harmonic_ratio(zeros) == 0.0);
}

TEST_CASE("root mfcc dimension, homogeneity and oracle") {
    auto frame = sine_frame(1000.0);
    auto c1 = extractor().root_mfcc(frame);
    CHECK(c1.size() == 13);

    // 2x amplitude -> exactly 2x coefficients (root 1/2 on power, DCT linear)
    auto c2 = extractor().root_mfcc(sine_frame(1000.0, 2.0));
    for (std::size_t i = 0; i < 13; ++i)
        CHECK(c2[i] == doctest::Approx(2.0 * c1[i]).epsilon(1e-9));

    // independent filterbank + DCT oracle on the same power spectrum
    AuxExtractor::Workspace ws;
    extractor().power_spectrum(frame, ws);
    const auto& power = ws.power;
    const auto& freqs = extractor().bin_freqs();

    const int nf = 30;
    const double mel_hi = hz_to_mel(4000.0);
    std::vector<double> edges(nf + 2);
    for (int i = 0; i < nf + 2; ++i) edges[i] = mel_to_hz(mel_hi * i / (nf + 1));
    std::vector<double> energies(nf, 0.0);
    for (int f = 0; f < nf; ++f) {
        for (std::size_t k = 0; k < power.size(); ++k) {
            const double fr = freqs[k];
            if (fr <= edges[f] || fr >= edges[f + 2]) continue;
            const double w = fr <= edges[f + 1] ? (fr - edges[f]) / (edges[f + 1] - edges[f])
                                                : (edges[f + 2] - fr) / (edges[f + 2] - edges[f + 1]);
            energies[f] += w * power[k];
        }
        energies[f] = std::sqrt(energies[f]);
    }
    std::vector<double> expected(13);
    for (int k = 1; k <= 13; ++k) {
        double acc = 0.0;
        for (int t = 0; t < nf; ++t)
            acc += energies[t] * std::cos(kPi * (2.0 * t + 1.0) * k / (2.0 * nf));
        expected[k - 1] = acc * std::sqrt(2.0 / nf);
    }
    for (std::size_t i = 0; i < 13; ++i)
        CHECK(c1[i] == doctest::Approx(expected[i]).epsilon(1e-9));

    std::vector<double> zeros(825, 0.0);
    for (double v : extractor().root_mfcc(zeros)) CHECK(v == 0.0);
}

TEST_CASE("audio spectrum flatness behaviour") {
    Rng rng(7);
    std::vector<double> acc(13, 0.0);
    for (int t = 0; t < 100; ++t) {
        auto vals = extractor().audio_spectrum_flatness(noise_frame(rng));
        REQUIRE(vals.size() == 13);
        for (std::size_t i = 0; i < 13; ++i) acc[i] += vals[i];
    }
    for (double v : acc) CHECK(v / 100.0 > 0.4);

    // a pure tone drives flatness near zero in its band
    auto tone = extractor().audio_spectrum_flatness(sine_frame(1000.0));
    double min_val = 1.0;
    for (double v : tone) min_val = std::min(min_val, v);
    CHECK(min_val < 0.05);
    for (double v : tone) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
    }
}

TEST_CASE("nase envelope is unit norm plus norm component") {
    auto frame = sine_frame(700.0, 0.8);
    auto v1 = extractor().nase(frame);
    REQUIRE(v1.size() == 14);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < 13; ++i) norm_sq += v1[i] * v1[i];
    CHECK(std::sqrt(norm_sq) == doctest::Approx(1.0).epsilon(1e-9));

    // scaling changes only the norm component
    auto v2 = extractor().nase(sine_frame(700.0, 1.6));
    for (std::size_t i = 0; i < 13; ++i) CHECK(v2[i] == doctest::Approx(v1[i]).epsilon(1e-9));
    CHECK(v2[13] == doctest::Approx(4.0 * v1[13]).epsilon(1e-6));

    std::vector<double> zeros(825, 0.0);
    for (double v : extractor().nase(zeros)) CHECK(v == 0.0);
}

TEST_CASE("tonal index ranks tones above noise") {
    Rng rng(11);
    double tone_acc = 0.0, noise_acc = 0.0;
    for (int t = 0; t < 100; ++t) {
        tone_acc += extractor().tonal_index(sine_frame(rng.uniform(300.0, 2000.0)));
        noise_acc += extractor().tonal_index(noise_frame(rng));
    }
    CHECK(tone_acc / 100.0 > noise_acc / 100.0);

    std::vector<double> zeros(825, 0.0);
    CHECK(extractor().tonal_index(zeros) == 0.0);
}

TEST_CASE("chroma entropy") {
    // a single pitched tone concentrates in one pitch class
    CHECK(extractor().chroma_entropy(sine_frame(440.0)) < 0.5);

    Rng rng(13);
    double acc = 0.0;
    for (int t = 0; t < 100; ++t) acc += extractor().chroma_entropy(noise_frame(rng));
    CHECK(acc / 100.0 > 0.8 * std::log(12.0));

    std::vector<double> zeros(825, 0.0);
    CHECK(extractor().chroma_entropy(zeros) == 0.0);
}

TEST_CASE("ssch histogram counting and oracle") {
    auto frame = sine_frame(1000.0);
    AuxExtractor::Workspace ws;
    extractor().power_spectrum(frame, ws);

    const auto centroids = extractor().ssch_centroids(ws.power);
    CHECK(centroids.size() == 30);  // one centroid per filter

    // independent histogram + DCT oracle over those centroids
    std::vector<double> hist(38, 0.0);
    for (double c : centroids) {
        auto bin = static_cast<long>(std::floor(c / 4000.0 * 38.0));
        if (bin < 0) bin = 0;
        if (bin > 37) bin = 37;
        hist[bin] += 1.0;
    }
    CHECK(std::accumulate(hist.begin(), hist.end(), 0.0) == doctest::Approx(30.0));

    std::vector<double> expected(13);
    for (int k = 1; k <= 13; ++k) {
        double acc = 0.0;
        for (int t = 0; t < 38; ++t)
            acc += hist[t] * std::cos(kPi * (2.0 * t + 1.0) * k / (2.0 * 38.0));
        expected[k - 1] = acc * std::sqrt(2.0 / 38.0);
    }
    auto got = extractor().ssch(frame);
    REQUIRE(got.size() == 13);
    for (std::size_t i = 0; i < 13; ++i)
        CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-9));

    std::vector<double> zeros(825, 0.0);
    for (double v : extractor().ssch(zeros)) CHECK(v == 0.0);
}

TEST_CASE("determinism: identical frames give bit-identical outputs") {
    auto frame = sine_frame(850.0, 0.7, 0.3);
    AuxExtractor::Workspace ws1, ws2;
    std::vector<double> a(kAuxFeatureDim), b(kAuxFeatureDim);
    extractor().compute(frame, a, ws1);
    extractor().compute(frame, b, ws2);
    for (std::size_t i = 0; i < kAuxFeatureDim; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("short-term vector is 117 with the documented column order") {
    const auto& names = short_term_feature_names();
    CHECK(names.size() == 117);
    CHECK(names[0] == "centroid_b1");
    CHECK(names[4] == "centroid_b5");
    CHECK(names[5] == "bandwidth_b1");
    CHECK(names[59] == "rel_power_b5");
    CHECK(names[60] == "spec_entropy");
    CHECK(names[61] == "hr");
    CHECK(names[116] == "ssch_13");
}

TEST_CASE("mel filter weights bounded within covered range") {
    // per-bin summed weight stays in (0, 2] between the first and last
    // filter peaks
    const auto sums = extractor().mel_weight_per_bin();
    const auto& freqs = extractor().bin_freqs();
    const double first_peak = mel_to_hz(hz_to_mel(4000.0) * 1.0 / 31.0);
    const double last_peak = mel_to_hz(hz_to_mel(4000.0) * 30.0 / 31.0);
    for (std::size_t k = 0; k < sums.size(); ++k) {
        if (freqs[k] <= first_peak || freqs[k] >= last_peak) continue;
        CHECK(sums[k] > 0.0);
        CHECK(sums[k] <= 2.0);
    }

    // scale helpers are monotone and invertible, which the layout relies on
    for (double hz : {100.0, 500.0, 1000.0, 2000.0, 3999.0}) {
        CHECK(mel_to_hz(hz_to_mel(hz)) == doctest::Approx(hz).epsilon(1e-9));
        CHECK(bark_to_hz(hz_to_bark(hz)) == doctest::Approx(hz).epsilon(1e-6));
    }
    CHECK(freqs.front() == 0.0);
    CHECK(freqs.back() <= 11025.0 / 2.0 + 1e-9);
}
