#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tddsense/common.hpp"

namespace tddsense {

/// RF-side parameters of the OFDM frame.
struct RadioConfig {
    double carrier_hz = 27.4e9;       // f_c
    double subcarrier_spacing_hz = 120.0e3;  // delta_f
    std::size_t num_subcarriers = 1584;      // N
    double cp_fraction = 0.0;         // symbol extension; 0 = no cyclic prefix

    double symbol_duration() const {  // T_0
        return (1.0 + cp_fraction) / subcarrier_spacing_hz;
    }
    double bandwidth() const { return num_subcarriers * subcarrier_spacing_hz; }
};

/// Downlink/uplink alternation pattern. A frame holds `repetitions` copies of
/// [dl_symbols DL, ul_symbols UL].
struct TddPattern {
    std::size_t dl_symbols = 104;   // M_DL
    std::size_t ul_symbols = 36;    // M_UL
    std::size_t repetitions = 8;    // R

    std::size_t pattern_symbols() const { return dl_symbols + ul_symbols; }  // M_TDD
    std::size_t frame_symbols() const { return repetitions * pattern_symbols(); }  // M
    double duty_cycle() const {  // D_TDD
        return static_cast<double>(dl_symbols) / static_cast<double>(pattern_symbols());
    }
};

/// Zero-padded DFT lengths of the range-Doppler map. Zero means "derive from
/// the radio/TDD block": range 2N rounded up to a power of two, Doppler the
/// next power of two >= M.
struct GridConfig {
    std::size_t range_fft_size = 0;    // N'
    std::size_t doppler_fft_size = 0;  // M'
};

/// Frozen, validated parameter set shared by every processing stage.
/// Immutable after construction; safe to share across parallel workers.
class SensingConfig {
  public:
    SensingConfig(const RadioConfig& radio, const TddPattern& tdd, const GridConfig& grid = {});

    /// Simulation default parameter set.
    static SensingConfig defaults() { return SensingConfig(RadioConfig{}, TddPattern{}); }

    /// Parses a JSON config file; missing keys keep their defaults.
    static SensingConfig from_json_file(const std::string& path);
    static SensingConfig from_json_text(const std::string& text);
    std::string to_json_text() const;

    const RadioConfig& radio() const { return radio_; }
    const TddPattern& tdd() const { return tdd_; }

    std::size_t num_subcarriers() const { return radio_.num_subcarriers; }
    std::size_t frame_symbols() const { return tdd_.frame_symbols(); }
    std::size_t range_bins() const { return range_fft_size_; }    // N'
    std::size_t doppler_bins() const { return doppler_fft_size_; }  // M'

    /// DL mask d over one frame: element m is 1 iff (m mod M_TDD) < M_DL.
    const std::vector<std::uint8_t>& mask() const { return mask_; }
    std::size_t dl_count() const { return dl_count_; }  // R * M_DL

    double symbol_duration() const { return radio_.symbol_duration(); }
    double pattern_duration() const { return t_tdd_; }  // T_TDD
    double frame_duration() const { return frame_symbols() * symbol_duration(); }
    double duty_cycle() const { return tdd_.duty_cycle(); }

    double range_resolution() const { return range_resolution_; }   // c / (2B)
    double speed_resolution() const { return speed_resolution_; }   // c / (2 f_c M T_0)
    double sidelobe_doppler_spacing_hz() const { return 1.0 / t_tdd_; }
    double sidelobe_speed_spacing() const { return sidelobe_speed_spacing_; }
    /// Impulsive sidelobe spacing measured in Doppler bins: M' / M_TDD.
    double sidelobe_bin_spacing() const {
        return static_cast<double>(doppler_fft_size_) / static_cast<double>(tdd_.pattern_symbols());
    }

    double max_unambiguous_speed() const {  // c / (4 f_c T_0)
        return kSpeedOfLight / (4.0 * radio_.carrier_hz * symbol_duration());
    }

    // Pure linear bin<->physical maps (no domain checks); used internally on
    // fractional and wrapped indices.
    double range_from_bin(double n) const { return n * range_bin_step_; }
    double speed_from_bin(double m) const { return m * speed_bin_step_; }
    double bin_from_range(double r) const { return r / range_bin_step_; }
    double bin_from_speed(double v) const { return v / speed_bin_step_; }

    /// Checked conversion: requires 0 <= n < N', -M'/2 <= m < M'/2.
    void bin_to_physical(double n, double m, double& range_m, double& speed_mps) const;
    void physical_to_bin(double range_m, double speed_mps, double& n, double& m) const;

  private:
    RadioConfig radio_;
    TddPattern tdd_;
    std::size_t range_fft_size_;
    std::size_t doppler_fft_size_;
    std::vector<std::uint8_t> mask_;
    std::size_t dl_count_;
    double t_tdd_;
    double range_resolution_;
    double speed_resolution_;
    double sidelobe_speed_spacing_;
    double range_bin_step_;
    double speed_bin_step_;
};

/// Builds the frame DL mask for a pattern (length M, 1 = DL symbol).
std::vector<std::uint8_t> make_mask(const TddPattern& tdd);

}  // namespace tddsense
