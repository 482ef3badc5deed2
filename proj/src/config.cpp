#include "tddsense/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace tddsense {

namespace {

std::size_t next_pow2(std::size_t v) {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

}  // namespace

std::vector<std::uint8_t> make_mask(const TddPattern& tdd) {
    if (tdd.dl_symbols < 1) throw std::invalid_argument("TddPattern: dl_symbols must be >= 1");
    if (tdd.repetitions < 1) throw std::invalid_argument("TddPattern: repetitions must be >= 1");
    std::vector<std::uint8_t> d(tdd.frame_symbols());
    for (std::size_t m = 0; m < d.size(); ++m) {
        d[m] = (m % tdd.pattern_symbols()) < tdd.dl_symbols ? 1 : 0;
    }
    return d;
}

SensingConfig::SensingConfig(const RadioConfig& radio, const TddPattern& tdd,
                             const GridConfig& grid)
    : radio_(radio), tdd_(tdd) {
    if (radio_.carrier_hz <= 0.0) throw std::invalid_argument("RadioConfig: carrier_hz must be > 0");
    if (radio_.subcarrier_spacing_hz <= 0.0)
        throw std::invalid_argument("RadioConfig: subcarrier_spacing_hz must be > 0");
    if (radio_.num_subcarriers < 1)
        throw std::invalid_argument("RadioConfig: num_subcarriers must be >= 1");
    if (radio_.cp_fraction < 0.0)
        throw std::invalid_argument("RadioConfig: cp_fraction must be >= 0");

    mask_ = make_mask(tdd_);
    dl_count_ = tdd_.repetitions * tdd_.dl_symbols;

    range_fft_size_ = grid.range_fft_size != 0 ? grid.range_fft_size
                                               : next_pow2(2 * radio_.num_subcarriers);
    doppler_fft_size_ =
        grid.doppler_fft_size != 0 ? grid.doppler_fft_size : next_pow2(tdd_.frame_symbols());
    if (range_fft_size_ < radio_.num_subcarriers)
        throw std::invalid_argument("GridConfig: range_fft_size must be >= N");
    if (doppler_fft_size_ < tdd_.frame_symbols())
        throw std::invalid_argument("GridConfig: doppler_fft_size must be >= M");
    if (range_fft_size_ % 2 != 0 || doppler_fft_size_ % 2 != 0)
        throw std::invalid_argument("GridConfig: FFT sizes must be even");

    const double t0 = radio_.symbol_duration();
    t_tdd_ = tdd_.pattern_symbols() * t0;
    range_resolution_ = kSpeedOfLight / (2.0 * radio_.bandwidth());
    speed_resolution_ =
        kSpeedOfLight / (2.0 * radio_.carrier_hz * tdd_.frame_symbols() * t0);
    sidelobe_speed_spacing_ = kSpeedOfLight / (2.0 * radio_.carrier_hz * t_tdd_);
    range_bin_step_ =
        kSpeedOfLight / (2.0 * radio_.subcarrier_spacing_hz * static_cast<double>(range_fft_size_));
    speed_bin_step_ = kSpeedOfLight /
                      (2.0 * radio_.carrier_hz * t0 * static_cast<double>(doppler_fft_size_));
}

void SensingConfig::bin_to_physical(double n, double m, double& range_m,
                                    double& speed_mps) const {
    const double mh = 0.5 * static_cast<double>(doppler_fft_size_);
    if (n < 0.0 || n >= static_cast<double>(range_fft_size_))
        throw std::out_of_range("bin_to_physical: range bin outside [0, N')");
    if (m < -mh || m >= mh)
        throw std::out_of_range("bin_to_physical: Doppler bin outside [-M'/2, M'/2)");
    range_m = range_from_bin(n);
    speed_mps = speed_from_bin(m);
}

void SensingConfig::physical_to_bin(double range_m, double speed_mps, double& n,
                                    double& m) const {
    n = bin_from_range(range_m);
    m = bin_from_speed(speed_mps);
    const double mh = 0.5 * static_cast<double>(doppler_fft_size_);
    if (n < 0.0 || n >= static_cast<double>(range_fft_size_))
        throw std::out_of_range("physical_to_bin: range outside unambiguous window");
    if (m < -mh || m >= mh)
        throw std::out_of_range("physical_to_bin: speed outside unambiguous window");
}

namespace {

template <typename T>
void read_key(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

SensingConfig SensingConfig::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    RadioConfig radio;
    TddPattern tdd;
    GridConfig grid;
    try {
        read_key(j, "carrier_frequency_hz", radio.carrier_hz);
        read_key(j, "subcarrier_spacing_hz", radio.subcarrier_spacing_hz);
        read_key(j, "num_subcarriers", radio.num_subcarriers);
        read_key(j, "cp_fraction", radio.cp_fraction);
        read_key(j, "dl_symbols", tdd.dl_symbols);
        read_key(j, "ul_symbols", tdd.ul_symbols);
        read_key(j, "tdd_repetitions", tdd.repetitions);
        read_key(j, "range_fft_size", grid.range_fft_size);
        read_key(j, "doppler_fft_size", grid.doppler_fft_size);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("config field error: ") + e.what());
    }
    return SensingConfig(radio, tdd, grid);
}

SensingConfig SensingConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string SensingConfig::to_json_text() const {
    nlohmann::json j;
    j["carrier_frequency_hz"] = radio_.carrier_hz;
    j["subcarrier_spacing_hz"] = radio_.subcarrier_spacing_hz;
    j["num_subcarriers"] = radio_.num_subcarriers;
    j["cp_fraction"] = radio_.cp_fraction;
    j["dl_symbols"] = tdd_.dl_symbols;
    j["ul_symbols"] = tdd_.ul_symbols;
    j["tdd_repetitions"] = tdd_.repetitions;
    j["range_fft_size"] = range_fft_size_;
    j["doppler_fft_size"] = doppler_fft_size_;
    return j.dump(2);
}

}  // namespace tddsense
