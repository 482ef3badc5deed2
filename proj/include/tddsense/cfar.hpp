#pragma once

#include <cstddef>
#include <vector>

#include "tddsense/common.hpp"
#include "tddsense/config.hpp"
#include "tddsense/specest.hpp"

namespace tddsense {

/// Cell-averaging CFAR over the power periodogram. The training region is a
/// cross: `train` cells per side beyond `guard` guard cells, on each axis.
struct CfarConfig {
    std::size_t guard_range = 2;
    std::size_t train_range = 8;
    std::size_t guard_doppler = 2;
    std::size_t train_doppler = 8;
    double pfa = 1e-6;

    std::size_t training_count() const { return 2 * (train_range + train_doppler); }
};

/// CA-CFAR threshold multiplier alpha = N_t (P_FA^{-1/N_t} - 1).
double threshold_factor(std::size_t training_count, double pfa);

struct Candidate {
    std::size_t n = 0;      // range bin
    long long m = 0;        // signed Doppler bin
    double power = 0.0;
    double range_m = 0.0;
    double speed_mps = 0.0;
};

/// Returns bins that exceed alpha x (local training mean) and are strict
/// local maxima over their 3x3 neighborhood, sorted by descending power
/// (ties: lower range bin, then lower Doppler bin). The Doppler axis is
/// circular; range training indices clamp at the grid edge.
std::vector<Candidate> detect_candidates(const PowerPeriodogram& p, const CfarConfig& cfar,
                                         const SensingConfig& cfg);

}  // namespace tddsense
