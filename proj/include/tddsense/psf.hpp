#pragma once

#include <cstddef>
#include <vector>

#include "tddsense/common.hpp"
#include "tddsense/config.hpp"

namespace tddsense {

/// Dirichlet kernel D_A(x) = sin(A pi x) / (A sin(pi x)).
/// Integer arguments are removable singularities; the limit value is
/// (-1)^{k(A-1)} at x = k. Evaluation reduces x to its nearest integer plus a
/// remainder so the kernel stays accurate for large |x|.
double dirichlet(std::size_t order, double x);

/// Doppler-axis PSF of the TDD window at fractional bin offset m:
/// W_D(m) = M_DL * D_{M_DL}(m/M') * R * D_R(M_TDD * m/M').
double psf_doppler(double m_offset, const SensingConfig& cfg);

/// Full range-Doppler PSF W_RD(n, m) = W_D(m) * N * D_N(n/N').
double psf_rd(double n_offset, double m_offset, const SensingConfig& cfg);

/// Complex range response of the periodogram to a point target, i.e. the
/// range PSF including the linear phase of the causal DFT window:
/// N * D_N(dn/N') * exp(+j pi dn (N-1)/N'). Periodic in dn with period N'.
cplx range_window_complex(double n_offset, const SensingConfig& cfg);

/// Complex Doppler response including the TDD window and DFT phase:
/// M_DL R D_{M_DL}(dm/M') D_R(M_TDD dm/M') * exp(-j pi dm ((R-1)M_TDD + M_DL - 1)/M').
/// Periodic in dm with period M'.
cplx doppler_window_complex(double m_offset, const SensingConfig& cfg);

/// Bin window covered by a stencil. Rows are absolute range bins (wrapped
/// modulo N'), columns are signed Doppler bins (wrapped modulo M').
struct StencilExtent {
    long long row_first = 0;
    std::size_t num_rows = 0;
    long long col_first = 0;
    std::size_t num_cols = 0;

    static StencilExtent full_grid(const SensingConfig& cfg);
    /// Full Doppler axis, range rows within +-range_halfwidth of the center.
    static StencilExtent doppler_band(double center_n, std::size_t range_halfwidth,
                                      const SensingConfig& cfg);
};

/// Separable complex 2D PSF translated to a fractional center and scaled so
/// that the value at the center equals `coeff`. value(i, j) is the stencil
/// sample at row_first + i, col_first + j.
struct Psf2dStencil {
    double center_n = 0.0;
    double center_m = 0.0;
    cplx coeff{0.0, 0.0};
    StencilExtent extent;
    std::vector<cplx> range_factor;    // unit magnitude-N-normalized, per row
    std::vector<cplx> doppler_factor;  // carries coeff, per column

    cplx value(std::size_t i, std::size_t j) const { return range_factor[i] * doppler_factor[j]; }

    std::size_t grid_row(std::size_t i, const SensingConfig& cfg) const {
        return wrap_index(extent.row_first + static_cast<long long>(i), cfg.range_bins());
    }
    /// Storage column of the center-shifted grid (column 0 is bin -M'/2).
    std::size_t grid_col(std::size_t j, const SensingConfig& cfg) const {
        long long half = static_cast<long long>(cfg.doppler_bins() / 2);
        return wrap_index(extent.col_first + static_cast<long long>(j) + half, cfg.doppler_bins());
    }
};

Psf2dStencil psf_stencil(double center_n, double center_m, cplx coeff,
                         const StencilExtent& extent, const SensingConfig& cfg);

}  // namespace tddsense
