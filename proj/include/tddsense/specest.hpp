#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "tddsense/common.hpp"
#include "tddsense/config.hpp"
#include "tddsense/scene.hpp"

namespace tddsense {

/// Range-Doppler grids. Row n is the range bin (0..N'-1); column j is the
/// center-shifted Doppler bin, i.e. signed bin m = j - M'/2. The complex
/// periodogram carries the 1/(N'M') normalization.
using ComplexPeriodogram = CGrid;
using PowerPeriodogram = RGrid;

inline std::size_t doppler_col(long long m, const SensingConfig& cfg) {
    return wrap_index(m + static_cast<long long>(cfg.doppler_bins() / 2), cfg.doppler_bins());
}
inline long long doppler_bin(std::size_t col, const SensingConfig& cfg) {
    return static_cast<long long>(col) - static_cast<long long>(cfg.doppler_bins() / 2);
}

/// CSI restricted to its DL columns, column-major; the working form of every
/// detector. UL columns are implicit zeros.
struct CompactCsi {
    std::size_t num_subcarriers = 0;
    std::vector<std::size_t> dl_cols;  // original symbol index per compact column
    std::vector<cplx> data;            // column-major, num_subcarriers x dl_cols.size()

    static CompactCsi from(const CsiMatrix& h, const SensingConfig& cfg);
    CsiMatrix expand(const SensingConfig& cfg) const;

    cplx* col(std::size_t i) { return data.data() + i * num_subcarriers; }
    const cplx* col(std::size_t i) const { return data.data() + i * num_subcarriers; }

    /// this -= coeff * a * b^T restricted to DL columns. a has length N,
    /// b length M (original symbol indexing).
    void subtract_rank1(cplx coeff, const std::vector<cplx>& a, const std::vector<cplx>& b);

    double total_power() const;
};

/// Reusable transform pipeline for one grid geometry. Owns FFT plans and
/// scratch buffers; one instance per worker thread. The range pass over the
/// DL columns is shared between the full-frame periodogram and the per-burst
/// periodograms of the Single-DL baseline.
class RdEngine {
  public:
    explicit RdEngine(const SensingConfig& cfg);
    ~RdEngine();
    RdEngine(const RdEngine&) = delete;
    RdEngine& operator=(const RdEngine&) = delete;

    /// Runs the range-axis pass and stages the Doppler rows.
    void prepare(const CompactCsi& h);

    /// Non-coherent average of the per-burst power periodograms, each burst
    /// zero-padded to the full Doppler grid. Call after prepare(), before
    /// finish_full(). avg is resized to N' x M'.
    void burst_average(PowerPeriodogram& avg);

    /// Completes the full-frame transform; fills C (and P when non-null).
    /// Invalidates the staged rows, so call at most once per prepare().
    void finish_full(ComplexPeriodogram& c, PowerPeriodogram* p);

    const SensingConfig& config() const { return cfg_; }

    /// Matches (rows, cols, DL layout) of a config.
    bool compatible(const SensingConfig& cfg) const;

  private:
    struct Impl;
    SensingConfig cfg_;
    std::unique_ptr<Impl> impl_;
};

/// Thread-local engine for the given config geometry.
RdEngine& shared_engine(const SensingConfig& cfg);

/// C[n,m] = 1/(N'M') sum_k sum_l H[k,l] e^{-j2pi l m/M'} e^{+j2pi k n/N'},
/// zero-padded to N' x M', Doppler axis center-shifted.
ComplexPeriodogram complex_periodogram(const CsiMatrix& h, const SensingConfig& cfg);
ComplexPeriodogram complex_periodogram(const CompactCsi& h, const SensingConfig& cfg);

/// Elementwise magnitude squared.
PowerPeriodogram power_periodogram(const ComplexPeriodogram& c);

/// Two-stage zoom of the focused Fourier search: +-1 coarse bin at 1/8-bin
/// steps, then +-1/8 bin at 1/64-bin steps around the first-stage maximum.
struct RefineConfig {
    double stage1_halfwidth = 1.0;
    double stage1_step = 1.0 / 8.0;
    double stage2_halfwidth = 1.0 / 8.0;
    double stage2_step = 1.0 / 64.0;
};

/// Refined peak. coeff is in periodogram normalization (direct C-value
/// scale); the CSI-domain coefficient is coeff * N'M' / (N M D_TDD).
struct PeakEstimate {
    long long coarse_n = 0;
    long long coarse_m = 0;   // signed Doppler bin
    double refined_n = 0.0;
    double refined_m = 0.0;   // signed fractional Doppler bin
    double range_m = 0.0;
    double speed_mps = 0.0;
    cplx coeff{0.0, 0.0};
    double power_db = 0.0;
};

/// Fine fractional-bin search of the raw transform W_r^T H W_s around a
/// coarse bin; returns the argmax with its complex value scaled by 1/(N'M').
PeakEstimate focused_fourier(const CompactCsi& h, long long coarse_n, long long coarse_m,
                             const SensingConfig& cfg, const RefineConfig& rc = {});
PeakEstimate focused_fourier(const CsiMatrix& h, long long coarse_n, long long coarse_m,
                             const SensingConfig& cfg, const RefineConfig& rc = {});

/// CSI-domain coefficient recovered from a refined peak:
/// alpha = coeff * N'M' / (N M D_TDD).
cplx csi_domain_coeff(const PeakEstimate& peak, const SensingConfig& cfg);

}  // namespace tddsense
