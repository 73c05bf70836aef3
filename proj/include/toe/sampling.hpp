#pragma once

// Inverse-integrated-hazard sampling of (W, Y) pairs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "toe/model.hpp"
#include "toe/philox.hpp"

namespace toe {

/// Standard-exponential latents that drive one draw.
struct LatentDraws {
    double e_w = 0.0;
    double e_y = 0.0;

    friend bool operator==(const LatentDraws&, const LatentDraws&) = default;
};

struct DurationPair {
    double w = 0.0;
    double y = 0.0;  // negative only for absurd flawed-mode draws
    bool absurd = false;
    LatentDraws draws;

    friend bool operator==(const DurationPair&, const DurationPair&) = default;
};

/// Latents for sample `index` of stream `seed`. E = -log(U), U in (0, 1).
inline LatentDraws latent_draws(std::uint64_t seed, std::uint64_t index) noexcept {
    const auto words = philox_words(seed, index);
    return {-std::log(open_unit_interval(words[0])), -std::log(open_unit_interval(words[1]))};
}

/// W = Lambda_W^{-1}(E_W), then Y from the conditional integrated hazard given W.
inline DurationPair sample_pair(const TreatmentModel& m, const LatentDraws& draws, InversionMode mode) {
    const double w = m.treatment.inverse_cumulative(draws.e_w);
    const auto y = invert_conditional(m, w, draws.e_y, mode);
    return {w, y.time, y.absurd, draws};
}

inline DurationPair sample_pair(const TreatmentModel& m, std::uint64_t seed, std::uint64_t index,
                                InversionMode mode) {
    return sample_pair(m, latent_draws(seed, index), mode);
}

namespace detail {

/// Runs body(i) for i in [0, n) over `workers` threads in contiguous blocks.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<std::size_t>(n, 1024))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([begin, end, &body] {
            for (std::size_t i = begin; i < end; ++i) {
                body(i);
            }
        });
    }
}

inline void require_count(std::size_t n, const char* op) {
    if (n == 0) {
        throw std::domain_error(std::string(op) + ": n must be >= 1");
    }
}

}  // namespace detail

/// n pairs from stream `seed`; element i depends only on (m, seed, i, mode),
/// so the result is identical for any worker count.
inline std::vector<DurationPair> sample_batch(const TreatmentModel& m, std::size_t n, std::uint64_t seed,
                                              InversionMode mode, unsigned workers = 1) {
    detail::require_count(n, "sample_batch");
    std::vector<DurationPair> out(n);
    detail::parallel_for(n, workers, [&](std::size_t i) { out[i] = sample_pair(m, seed, i, mode); });
    return out;
}

struct CoupledBatches {
    std::vector<DurationPair> first;
    std::vector<DurationPair> second;
};

/// Two correct-mode batches where pair i of each uses the same latents.
inline CoupledBatches coupled_sample(const TreatmentModel& m1, const TreatmentModel& m2, std::size_t n,
                                     std::uint64_t seed, unsigned workers = 1) {
    detail::require_count(n, "coupled_sample");
    CoupledBatches out{std::vector<DurationPair>(n), std::vector<DurationPair>(n)};
    detail::parallel_for(n, workers, [&](std::size_t i) {
        const auto draws = latent_draws(seed, i);
        out.first[i] = sample_pair(m1, draws, InversionMode::correct);
        out.second[i] = sample_pair(m2, draws, InversionMode::correct);
    });
    return out;
}

/// Same latents pushed through the correct and the flawed inversion.
inline CoupledBatches coupled_modes(const TreatmentModel& m, std::size_t n, std::uint64_t seed,
                                    unsigned workers = 1) {
    detail::require_count(n, "coupled_modes");
    CoupledBatches out{std::vector<DurationPair>(n), std::vector<DurationPair>(n)};
    detail::parallel_for(n, workers, [&](std::size_t i) {
        const auto draws = latent_draws(seed, i);
        out.first[i] = sample_pair(m, draws, InversionMode::correct);
        out.second[i] = sample_pair(m, draws, InversionMode::flawed);
    });
    return out;
}

}  // namespace toe
