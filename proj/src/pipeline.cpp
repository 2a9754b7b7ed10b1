#include "coughband/pipeline.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace coughband {

ShortTermMatrix extract_short_term(const AudioSignal& signal, const ShortTermExtractor& extractor,
                                   int jobs) {
    ShortTermMatrix out;
    out.frames = frame_signal(signal, extractor.params().frame);
    const std::size_t n = out.frames.size();
    out.features = Matrix(n, kShortTermDim);
    out.start_times.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.start_times[i] = out.frames[i].start_time;
    if (n == 0) return out;

    std::vector<BandSpectrum> psds(n);

#ifdef _OPENMP
    if (jobs > 0) omp_set_num_threads(jobs);

    #pragma omp parallel
    {
        ShortTermExtractor::Workspace ws;
        #pragma omp for schedule(static)
        for (long i = 0; i < static_cast<long>(n); ++i)
            extractor.compute_psd(frame_samples(signal, out.frames[i], extractor.params().frame),
                                  psds[i], ws);

        #pragma omp for schedule(static)
        for (long i = 0; i < static_cast<long>(n); ++i) {
            const BandSpectrum* prev = i > 0 ? &psds[i - 1] : nullptr;
            extractor.compute(frame_samples(signal, out.frames[i], extractor.params().frame),
                              psds[i], prev, out.features.row_span(i), ws);
        }
    }
#else
    (void)jobs;
    ShortTermExtractor::Workspace ws;
    for (std::size_t i = 0; i < n; ++i)
        extractor.compute_psd(frame_samples(signal, out.frames[i], extractor.params().frame),
                              psds[i], ws);
    for (std::size_t i = 0; i < n; ++i) {
        const BandSpectrum* prev = i > 0 ? &psds[i - 1] : nullptr;
        extractor.compute(frame_samples(signal, out.frames[i], extractor.params().frame),
                          psds[i], prev, out.features.row_span(i), ws);
    }
#endif
    return out;
}

ShortTermMatrix extract_short_term_serial(const AudioSignal& signal,
                                          const ShortTermExtractor& extractor) {
    ShortTermMatrix out;
    out.frames = frame_signal(signal, extractor.params().frame);
    const std::size_t n = out.frames.size();
    out.features = Matrix(n, kShortTermDim);
    out.start_times.resize(n);
    if (n == 0) return out;

    ShortTermExtractor::Workspace ws;
    BandSpectrum prev, cur;
    for (std::size_t i = 0; i < n; ++i) {
        out.start_times[i] = out.frames[i].start_time;
        const auto samples = frame_samples(signal, out.frames[i], extractor.params().frame);
        extractor.compute_psd(samples, cur, ws);
        extractor.compute(samples, cur, i > 0 ? &prev : nullptr, out.features.row_span(i), ws);
        std::swap(prev, cur);
    }
    return out;
}

}  // namespace coughband
