#pragma once

#include <cstdint>
#include <vector>

#include "tddsense/common.hpp"
#include "tddsense/config.hpp"
#include "tddsense/rng.hpp"

namespace tddsense {

/// Point scatterer. Negative speed = receding from the system.
struct Target {
    double range_m = 0.0;     // r_p
    double speed_mps = 0.0;   // v_p
    cplx coeff{0.0, 0.0};     // alpha_p, linear amplitude
};

struct NoiseSpec {
    double power = 0.0;  // P_n, total over the bandwidth
    double element_variance(const SensingConfig& cfg) const {
        return power / static_cast<double>(cfg.num_subcarriers());
    }
};

/// N x M channel matrix with the TDD mask applied (UL columns are zero).
/// Rows are subcarriers, columns OFDM symbols, row-major.
struct CsiMatrix {
    std::size_t num_subcarriers = 0;       // N
    std::size_t num_symbols = 0;           // M
    std::vector<cplx> entries;             // row-major
    std::vector<std::uint8_t> mask;        // d, length M

    CsiMatrix() = default;
    CsiMatrix(std::size_t n, std::size_t m)
        : num_subcarriers(n), num_symbols(m), entries(n * m) {}

    cplx* row(std::size_t k) { return entries.data() + k * num_symbols; }
    const cplx* row(std::size_t k) const { return entries.data() + k * num_symbols; }
    cplx& at(std::size_t k, std::size_t l) { return entries[k * num_symbols + l]; }
    const cplx& at(std::size_t k, std::size_t l) const { return entries[k * num_symbols + l]; }
};

/// Range steering vector a(r): element k = exp(-j 4 pi k delta_f r / c).
std::vector<cplx> steering_range(double range_m, const SensingConfig& cfg);

/// Doppler steering vector b(v): element l = exp(+j 4 pi l T_0 f_c v / c).
std::vector<cplx> steering_doppler(double speed_mps, const SensingConfig& cfg);

/// Two-way free-space amplitude factor g(r) = (lambda / (4 pi r))^2.
double free_space_amplitude(double range_m, const SensingConfig& cfg);

/// Rician amplitude sample sqrt((nu + sigma X1)^2 + (sigma X2)^2).
double rice_sample(Rng& rng, double nu, double sigma);

/// H = (sum_p alpha_p a(r_p) b(v_p)^T + Z) diag(d). Z is circular complex
/// Gaussian with per-element variance P_n / N. Deterministic for a fixed seed.
CsiMatrix synthesize_csi(const std::vector<Target>& targets, const NoiseSpec& noise,
                         const SensingConfig& cfg, std::uint64_t rng_seed);

/// Draws `count` targets: r ~ U(10 m, 100 m), v ~ U(-5, 5) m/s, amplitude
/// g(r) * Rice(nu=2, sigma=1), phase ~ U(0, 2 pi).
std::vector<Target> sample_scene(std::size_t count, std::uint64_t rng_seed,
                                 const SensingConfig& cfg);
std::vector<Target> sample_scene(std::size_t count, Rng& rng, const SensingConfig& cfg);

}  // namespace tddsense
