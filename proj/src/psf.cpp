#include "tddsense/psf.hpp"

#include <cmath>

namespace tddsense {

double dirichlet(std::size_t order, double x) {
    const double a = static_cast<double>(order);
    const double k = std::round(x);
    const double delta = x - k;
    // (-1)^{k(A-1)}
    double sign = 1.0;
    if (order % 2 == 0 && std::fabs(std::fmod(k, 2.0)) == 1.0) sign = -1.0;

    const double sd = std::sin(kPi * delta);
    if (std::fabs(sd) < 1e-9) {
        // removable singularity: series around the integer argument
        const double pd = kPi * delta;
        return sign * (1.0 - pd * pd * (a * a - 1.0) / 6.0);
    }
    return sign * std::sin(a * kPi * delta) / (a * sd);
}

double psf_doppler(double m_offset, const SensingConfig& cfg) {
    const auto& tdd = cfg.tdd();
    const double mp = static_cast<double>(cfg.doppler_bins());
    const double x = m_offset / mp;
    return static_cast<double>(tdd.dl_symbols) * dirichlet(tdd.dl_symbols, x) *
           static_cast<double>(tdd.repetitions) *
           dirichlet(tdd.repetitions, static_cast<double>(tdd.pattern_symbols()) * x);
}

double psf_rd(double n_offset, double m_offset, const SensingConfig& cfg) {
    const double np = static_cast<double>(cfg.range_bins());
    return psf_doppler(m_offset, cfg) * static_cast<double>(cfg.num_subcarriers()) *
           dirichlet(cfg.num_subcarriers(), n_offset / np);
}

cplx range_window_complex(double n_offset, const SensingConfig& cfg) {
    const double np = static_cast<double>(cfg.range_bins());
    const double n_sub = static_cast<double>(cfg.num_subcarriers());
    const double mag = n_sub * dirichlet(cfg.num_subcarriers(), n_offset / np);
    const double phase = kPi * n_offset * (n_sub - 1.0) / np;
    return std::polar(mag, phase);
}

cplx doppler_window_complex(double m_offset, const SensingConfig& cfg) {
    const auto& tdd = cfg.tdd();
    const double mp = static_cast<double>(cfg.doppler_bins());
    const double x = m_offset / mp;
    const double mag = static_cast<double>(tdd.dl_symbols) * dirichlet(tdd.dl_symbols, x) *
                       static_cast<double>(tdd.repetitions) *
                       dirichlet(tdd.repetitions, static_cast<double>(tdd.pattern_symbols()) * x);
    const double ramp = static_cast<double>((tdd.repetitions - 1) * tdd.pattern_symbols() +
                                            tdd.dl_symbols - 1);
    return std::polar(mag, -kPi * m_offset * ramp / mp);
}

StencilExtent StencilExtent::full_grid(const SensingConfig& cfg) {
    StencilExtent e;
    e.row_first = 0;
    e.num_rows = cfg.range_bins();
    e.col_first = -static_cast<long long>(cfg.doppler_bins() / 2);
    e.num_cols = cfg.doppler_bins();
    return e;
}

StencilExtent StencilExtent::doppler_band(double center_n, std::size_t range_halfwidth,
                                          const SensingConfig& cfg) {
    StencilExtent e;
    std::size_t width = 2 * range_halfwidth + 1;
    if (width >= cfg.range_bins()) return full_grid(cfg);
    e.row_first = static_cast<long long>(std::llround(center_n)) -
                  static_cast<long long>(range_halfwidth);
    e.num_rows = width;
    e.col_first = -static_cast<long long>(cfg.doppler_bins() / 2);
    e.num_cols = cfg.doppler_bins();
    return e;
}

Psf2dStencil psf_stencil(double center_n, double center_m, cplx coeff,
                         const StencilExtent& extent, const SensingConfig& cfg) {
    Psf2dStencil s;
    s.center_n = center_n;
    s.center_m = center_m;
    s.coeff = coeff;
    s.extent = extent;
    s.range_factor.resize(extent.num_rows);
    s.doppler_factor.resize(extent.num_cols);

    const double n_sub = static_cast<double>(cfg.num_subcarriers());
    for (std::size_t i = 0; i < extent.num_rows; ++i) {
        const double dn = static_cast<double>(extent.row_first + static_cast<long long>(i)) -
                          center_n;
        s.range_factor[i] = range_window_complex(dn, cfg) / n_sub;
    }
    const double peak_d = static_cast<double>(cfg.tdd().dl_symbols * cfg.tdd().repetitions);
    for (std::size_t j = 0; j < extent.num_cols; ++j) {
        const double dm = static_cast<double>(extent.col_first + static_cast<long long>(j)) -
                          center_m;
        s.doppler_factor[j] = coeff * doppler_window_complex(dm, cfg) / peak_d;
    }
    return s;
}

}  // namespace tddsense
