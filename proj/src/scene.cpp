#include "tddsense/scene.hpp"

#include <cmath>
#include <stdexcept>

namespace tddsense {

std::vector<cplx> steering_range(double range_m, const SensingConfig& cfg) {
    if (range_m < 0.0) throw std::invalid_argument("steering_range: range must be >= 0");
    const std::size_t n = cfg.num_subcarriers();
    const double step = -4.0 * kPi * cfg.radio().subcarrier_spacing_hz * range_m / kSpeedOfLight;
    std::vector<cplx> a(n);
    for (std::size_t k = 0; k < n; ++k) a[k] = std::polar(1.0, step * static_cast<double>(k));
    return a;
}

std::vector<cplx> steering_doppler(double speed_mps, const SensingConfig& cfg) {
    const std::size_t m = cfg.frame_symbols();
    const double step =
        4.0 * kPi * cfg.symbol_duration() * cfg.radio().carrier_hz * speed_mps / kSpeedOfLight;
    std::vector<cplx> b(m);
    for (std::size_t l = 0; l < m; ++l) b[l] = std::polar(1.0, step * static_cast<double>(l));
    return b;
}

double free_space_amplitude(double range_m, const SensingConfig& cfg) {
    const double lambda = kSpeedOfLight / cfg.radio().carrier_hz;
    const double x = lambda / (4.0 * kPi * range_m);
    return x * x;
}

double rice_sample(Rng& rng, double nu, double sigma) {
    double g0, g1;
    rng.gaussian_pair(g0, g1);
    const double re = nu + sigma * g0;
    const double im = sigma * g1;
    return std::sqrt(re * re + im * im);
}

CsiMatrix synthesize_csi(const std::vector<Target>& targets, const NoiseSpec& noise,
                         const SensingConfig& cfg, std::uint64_t rng_seed) {
    const std::size_t n = cfg.num_subcarriers();
    const std::size_t m = cfg.frame_symbols();
    const double v_max = cfg.max_unambiguous_speed();
    for (const auto& t : targets) {
        if (!(t.range_m > 0.0))
            throw std::invalid_argument("synthesize_csi: target range must be > 0");
        if (!(std::fabs(t.speed_mps) < v_max))
            throw std::invalid_argument("synthesize_csi: target speed outside unambiguous region");
    }
    if (noise.power < 0.0) throw std::invalid_argument("synthesize_csi: noise power must be >= 0");

    CsiMatrix h(n, m);
    h.mask = cfg.mask();

    // DL symbol indices; UL columns stay exactly zero.
    std::vector<std::size_t> dl;
    dl.reserve(cfg.dl_count());
    for (std::size_t l = 0; l < m; ++l)
        if (h.mask[l]) dl.push_back(l);

    for (const auto& t : targets) {
        const auto a = steering_range(t.range_m, cfg);
        const auto b = steering_doppler(t.speed_mps, cfg);
        for (std::size_t k = 0; k < n; ++k) {
            cplx* row = h.row(k);
            const cplx ak = t.coeff * a[k];
            for (std::size_t l : dl) row[l] += ak * b[l];
        }
    }

    if (noise.power > 0.0) {
        Rng rng(rng_seed);
        const double var = noise.element_variance(cfg);
        const double s = std::sqrt(0.5 * var);
        for (std::size_t k = 0; k < n; ++k) {
            cplx* row = h.row(k);
            for (std::size_t l : dl) {
                double g0, g1;
                rng.gaussian_pair(g0, g1);
                row[l] += cplx(s * g0, s * g1);
            }
        }
    }
    return h;
}

std::vector<Target> sample_scene(std::size_t count, Rng& rng, const SensingConfig& cfg) {
    std::vector<Target> targets(count);
    for (auto& t : targets) {
        t.range_m = rng.uniform(10.0, 100.0);
        t.speed_mps = rng.uniform(-5.0, 5.0);
        const double amp = free_space_amplitude(t.range_m, cfg) * rice_sample(rng, 2.0, 1.0);
        const double phase = rng.uniform(0.0, kTwoPi);
        t.coeff = std::polar(amp, phase);
    }
    return targets;
}

std::vector<Target> sample_scene(std::size_t count, std::uint64_t rng_seed,
                                 const SensingConfig& cfg) {
    if (count < 1) throw std::invalid_argument("sample_scene: count must be >= 1");
    Rng rng(rng_seed);
    return sample_scene(count, rng, cfg);
}

}  // namespace tddsense
