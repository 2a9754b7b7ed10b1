#pragma once

// Independent direct-formula oracles for the spectral descriptors, coded
// straight from their definitions with no shared helpers, used to cross-check
// the library implementations. Deliberately naive.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

inline double centroid(const std::vector<double>& psd, const std::vector<double>& f) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < psd.size(); ++k) {
        num += f[k] * psd[k];
        den += psd[k];
    }
    return num / den;
}

inline double bandwidth(const std::vector<double>& psd, const std::vector<double>& f) {
    const double c = centroid(psd, f);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < psd.size(); ++k) {
        num += (f[k] - c) * (f[k] - c) * psd[k];
        den += psd[k];
    }
    return num / den;
}

inline double crest(const std::vector<double>& psd) {
    double mx = psd[0], sum = 0.0;
    for (double v : psd) {
        if (v > mx) mx = v;
        sum += v;
    }
    const double c = 1.0 / static_cast<double>(psd.size());
    return mx / (c * sum);
}

inline double flatness(const std::vector<double>& psd) {
    double logsum = 0.0, sum = 0.0;
    for (double v : psd) {
        logsum += std::log(v < 1e-12 ? 1e-12 : v);
        sum += v;
    }
    const double n = static_cast<double>(psd.size());
    return std::exp(logsum / n) / (sum / n);
}

inline double flux(const std::vector<double>& cur, const std::vector<double>& prev) {
    double acc = 0.0;
    for (std::size_t k = 0; k < cur.size(); ++k)
        acc += (cur[k] - prev[k]) * (cur[k] - prev[k]);
    return acc;
}

inline double rolloff(const std::vector<double>& psd, const std::vector<double>& f) {
    double total = 0.0;
    for (double v : psd) total += v;
    double cum = 0.0;
    for (std::size_t k = 0; k < psd.size(); ++k) {
        cum += psd[k];
        if (cum >= 0.85 * total) return f[k];
    }
    return f.back();
}

inline double f50f90(const std::vector<double>& psd, const std::vector<double>& f) {
    double total = 0.0;
    for (double v : psd) total += v;
    double cum = 0.0;
    double f50 = -1.0, f90 = -1.0;
    for (std::size_t k = 0; k < psd.size(); ++k) {
        cum += psd[k];
        if (f50 < 0 && cum >= 0.5 * total) f50 = f[k];
        if (f90 < 0 && cum >= 0.9 * total) f90 = f[k];
    }
    if (f90 <= 0.0) return 0.0;
    return f50 / f90;
}

inline double peak_entropy(const std::vector<double>& psd) {
    // strict interior local maxima; plateaus count once at their first bin
    std::vector<double> peaks;
    const std::size_t n = psd.size();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!(psd[k] > psd[k - 1])) continue;
        std::size_t end = k;
        while (end + 1 < n && psd[end + 1] == psd[k]) ++end;
        if (end + 1 < n && psd[end + 1] < psd[k]) peaks.push_back(psd[k]);
        k = end;
    }
    if (peaks.empty()) return 0.0;
    double total = 0.0;
    for (double p : peaks) total += p;
    double h = 0.0;
    for (double p : peaks) {
        const double q = p / total;
        h -= q * std::log10(q);
    }
    return h;
}

inline double renyi(const std::vector<double>& psd, double q = 4.0) {
    double total = 0.0;
    for (double v : psd) total += v;
    double s = 0.0;
    for (double v : psd) s += std::pow(v / total, q);
    return std::log(s) / (1.0 - q);
}

inline double kurtosis(const std::vector<double>& psd) {
    const double n = static_cast<double>(psd.size());
    double mu = 0.0;
    for (double v : psd) mu += v;
    mu /= n;
    double var = 0.0;
    for (double v : psd) var += (v - mu) * (v - mu);
    var /= n;
    const double sd = std::sqrt(var);
    double m4 = 0.0;
    for (double v : psd) m4 += std::pow((v - mu) / sd, 4.0);
    return m4 / n;
}

inline double skewness(const std::vector<double>& psd) {
    const double n = static_cast<double>(psd.size());
    double mu = 0.0;
    for (double v : psd) mu += v;
    mu /= n;
    double var = 0.0;
    for (double v : psd) var += (v - mu) * (v - mu);
    var /= n;
    const double sd = std::sqrt(var);
    double m3 = 0.0;
    for (double v : psd) m3 += std::pow((v - mu) / sd, 3.0);
    return m3 / n;
}

inline std::vector<double> relative_power(const std::vector<std::vector<double>>& bands) {
    double total = 0.0;
    for (const auto& b : bands)
        for (double v : b) total += v;
    std::vector<double> rp;
    for (const auto& b : bands) {
        double s = 0.0;
        for (double v : b) s += v;
        rp.push_back(s / total);
    }
    return rp;
}

inline double spectral_entropy(const std::vector<double>& rp) {
    double h = 0.0;
    for (double p : rp)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

// Mann-Whitney pair-counting AUC with half credit for score ties.
inline double auc_pairs(const std::vector<double>& scores, const std::vector<int>& labels) {
    double pairs = 0.0, correct = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            pairs += 1.0;
            if (scores[i] > scores[j]) correct += 1.0;
            else if (scores[i] == scores[j]) correct += 0.5;
        }
    }
    return correct / pairs;
}

}  // namespace oracle
