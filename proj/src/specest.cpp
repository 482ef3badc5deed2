#include "tddsense/specest.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace tddsense {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

inline fftw_complex* fc(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

CompactCsi CompactCsi::from(const CsiMatrix& h, const SensingConfig& cfg) {
    if (h.num_subcarriers != cfg.num_subcarriers() || h.num_symbols != cfg.frame_symbols())
        throw std::invalid_argument("CompactCsi: CSI dimensions do not match config");
    CompactCsi c;
    c.num_subcarriers = h.num_subcarriers;
    const auto& mask = cfg.mask();
    for (std::size_t l = 0; l < mask.size(); ++l)
        if (mask[l]) c.dl_cols.push_back(l);
    c.data.resize(c.num_subcarriers * c.dl_cols.size());
    // blocked transpose from row-major CSI into column-major compact form
    const std::size_t bs = 64;
    const std::size_t n = c.num_subcarriers;
    const std::size_t kc = c.dl_cols.size();
    for (std::size_t k0 = 0; k0 < n; k0 += bs) {
        const std::size_t k1 = std::min(k0 + bs, n);
        for (std::size_t i0 = 0; i0 < kc; i0 += bs) {
            const std::size_t i1 = std::min(i0 + bs, kc);
            for (std::size_t k = k0; k < k1; ++k) {
                const cplx* row = h.row(k);
                for (std::size_t i = i0; i < i1; ++i) c.data[i * n + k] = row[c.dl_cols[i]];
            }
        }
    }
    return c;
}

CsiMatrix CompactCsi::expand(const SensingConfig& cfg) const {
    CsiMatrix h(num_subcarriers, cfg.frame_symbols());
    h.mask = cfg.mask();
    for (std::size_t i = 0; i < dl_cols.size(); ++i) {
        const cplx* src = col(i);
        const std::size_t l = dl_cols[i];
        for (std::size_t k = 0; k < num_subcarriers; ++k) h.at(k, l) = src[k];
    }
    return h;
}

void CompactCsi::subtract_rank1(cplx coeff, const std::vector<cplx>& a,
                                const std::vector<cplx>& b) {
    for (std::size_t i = 0; i < dl_cols.size(); ++i) {
        const cplx cb = coeff * b[dl_cols[i]];
        cplx* dst = col(i);
        for (std::size_t k = 0; k < num_subcarriers; ++k) dst[k] -= cb * a[k];
    }
}

double CompactCsi::total_power() const {
    double s = 0.0;
    for (const cplx& v : data) s += std::norm(v);
    return s;
}

struct RdEngine::Impl {
    std::size_t n_sub, n_pad, m_pad, dl_count;
    std::vector<std::size_t> dl_cols;
    std::vector<std::size_t> burst_start;  // compact column index of each burst
    std::size_t burst_len;

    cplx* gcols = nullptr;      // n_pad x dl_count, column-major, padded columns
    cplx* rows = nullptr;       // n_pad x m_pad, row-major staged Doppler rows
    cplx* chunk_in = nullptr;   // burst row chunk; pad region stays zero
    cplx* chunk_out = nullptr;
    static constexpr std::size_t kChunkRows = 32;

    fftw_plan plan_cols = nullptr;
    fftw_plan plan_rows = nullptr;
    fftw_plan plan_chunk = nullptr;

    bool staged = false;

    ~Impl() {
        std::lock_guard<std::mutex> lk(planner_mutex());
        if (plan_cols) fftw_destroy_plan(plan_cols);
        if (plan_rows) fftw_destroy_plan(plan_rows);
        if (plan_chunk) fftw_destroy_plan(plan_chunk);
        if (gcols) fftw_free(gcols);
        if (rows) fftw_free(rows);
        if (chunk_in) fftw_free(chunk_in);
        if (chunk_out) fftw_free(chunk_out);
    }
};

RdEngine::RdEngine(const SensingConfig& cfg) : cfg_(cfg), impl_(new Impl) {
    Impl& im = *impl_;
    im.n_sub = cfg.num_subcarriers();
    im.n_pad = cfg.range_bins();
    im.m_pad = cfg.doppler_bins();
    const auto& mask = cfg.mask();
    for (std::size_t l = 0; l < mask.size(); ++l)
        if (mask[l]) im.dl_cols.push_back(l);
    im.dl_count = im.dl_cols.size();
    im.burst_len = cfg.tdd().dl_symbols;
    for (std::size_t r = 0; r < cfg.tdd().repetitions; ++r)
        im.burst_start.push_back(r * im.burst_len);

    im.gcols = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * im.n_pad * im.dl_count));
    im.rows = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * im.n_pad * im.m_pad));
    im.chunk_in = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * Impl::kChunkRows * im.m_pad));
    im.chunk_out = static_cast<cplx*>(fftw_malloc(sizeof(cplx) * Impl::kChunkRows * im.m_pad));
    if (!im.gcols || !im.rows || !im.chunk_in || !im.chunk_out) throw std::bad_alloc();
    std::memset(im.chunk_in, 0, sizeof(cplx) * Impl::kChunkRows * im.m_pad);

    std::lock_guard<std::mutex> lk(planner_mutex());
    const int np = static_cast<int>(im.n_pad);
    const int mp = static_cast<int>(im.m_pad);
    // range axis: e^{+j2pi k n / N'}; deterministic plans only
    im.plan_cols = fftw_plan_many_dft(1, &np, static_cast<int>(im.dl_count), fc(im.gcols),
                                      nullptr, 1, np, fc(im.gcols), nullptr, 1, np,
                                      FFTW_BACKWARD, FFTW_ESTIMATE);
    // Doppler axis: e^{-j2pi l m / M'}
    im.plan_rows = fftw_plan_many_dft(1, &mp, static_cast<int>(im.n_pad), fc(im.rows), nullptr,
                                      1, mp, fc(im.rows), nullptr, 1, mp, FFTW_FORWARD,
                                      FFTW_ESTIMATE);
    im.plan_chunk = fftw_plan_many_dft(1, &mp, static_cast<int>(Impl::kChunkRows),
                                       fc(im.chunk_in), nullptr, 1, mp, fc(im.chunk_out),
                                       nullptr, 1, mp, FFTW_FORWARD, FFTW_ESTIMATE);
    if (!im.plan_cols || !im.plan_rows || !im.plan_chunk)
        throw std::runtime_error("RdEngine: FFT planning failed");
}

RdEngine::~RdEngine() = default;

bool RdEngine::compatible(const SensingConfig& cfg) const {
    return cfg.num_subcarriers() == impl_->n_sub && cfg.range_bins() == impl_->n_pad &&
           cfg.doppler_bins() == impl_->m_pad && cfg.mask() == cfg_.mask();
}

void RdEngine::prepare(const CompactCsi& h) {
    Impl& im = *impl_;
    if (h.num_subcarriers != im.n_sub || h.dl_cols.size() != im.dl_count)
        throw std::invalid_argument("RdEngine::prepare: CSI does not match engine geometry");

    // pad DL columns and run the range-axis transform
    for (std::size_t i = 0; i < im.dl_count; ++i) {
        cplx* dst = im.gcols + i * im.n_pad;
        std::memcpy(dst, h.col(i), sizeof(cplx) * im.n_sub);
        std::memset(dst + im.n_sub, 0, sizeof(cplx) * (im.n_pad - im.n_sub));
    }
    fftw_execute(im.plan_cols);

    // stage Doppler rows: rows[n][l] = gcols[i][n] for DL symbol l, else 0
    std::memset(im.rows, 0, sizeof(cplx) * im.n_pad * im.m_pad);
    const std::size_t bs = 64;
    for (std::size_t n0 = 0; n0 < im.n_pad; n0 += bs) {
        const std::size_t n1 = std::min(n0 + bs, im.n_pad);
        for (std::size_t i0 = 0; i0 < im.dl_count; i0 += bs) {
            const std::size_t i1 = std::min(i0 + bs, im.dl_count);
            for (std::size_t i = i0; i < i1; ++i) {
                const cplx* src = im.gcols + i * im.n_pad;
                const std::size_t l = im.dl_cols[i];
                for (std::size_t n = n0; n < n1; ++n) im.rows[n * im.m_pad + l] = src[n];
            }
        }
    }
    im.staged = true;
}

void RdEngine::burst_average(PowerPeriodogram& avg) {
    Impl& im = *impl_;
    if (!im.staged) throw std::logic_error("RdEngine::burst_average: prepare() required");
    avg = PowerPeriodogram(im.n_pad, im.m_pad);
    const double scale = 1.0 / (static_cast<double>(im.n_pad) * static_cast<double>(im.m_pad));
    const double s2 = scale * scale / static_cast<double>(im.burst_start.size());
    const std::size_t half = im.m_pad / 2;
    for (std::size_t n0 = 0; n0 < im.n_pad; n0 += Impl::kChunkRows) {
        const std::size_t nrows = std::min(Impl::kChunkRows, im.n_pad - n0);
        for (std::size_t b = 0; b < im.burst_start.size(); ++b) {
            // a burst occupies contiguous original symbols, so its staged row
            // segment is contiguous as well
            const std::size_t l0 = im.dl_cols[im.burst_start[b]];
            for (std::size_t r = 0; r < nrows; ++r) {
                const cplx* src = im.rows + (n0 + r) * im.m_pad + l0;
                std::memcpy(im.chunk_in + r * im.m_pad, src, sizeof(cplx) * im.burst_len);
            }
            for (std::size_t r = nrows; r < Impl::kChunkRows; ++r)
                std::memset(im.chunk_in + r * im.m_pad, 0, sizeof(cplx) * im.burst_len);
            fftw_execute(im.plan_chunk);
            for (std::size_t r = 0; r < nrows; ++r) {
                const cplx* src = im.chunk_out + r * im.m_pad;
                double* dst = avg.row(n0 + r);
                for (std::size_t j = 0; j < im.m_pad; ++j) {
                    dst[j] += std::norm(src[(j + half) % im.m_pad]) * s2;
                }
            }
        }
    }
}

void RdEngine::finish_full(ComplexPeriodogram& c, PowerPeriodogram* p) {
    Impl& im = *impl_;
    if (!im.staged) throw std::logic_error("RdEngine::finish_full: prepare() required");
    im.staged = false;
    fftw_execute(im.plan_rows);

    c = ComplexPeriodogram(im.n_pad, im.m_pad);
    if (p) *p = PowerPeriodogram(im.n_pad, im.m_pad);
    const double scale = 1.0 / (static_cast<double>(im.n_pad) * static_cast<double>(im.m_pad));
    const std::size_t half = im.m_pad / 2;
    for (std::size_t n = 0; n < im.n_pad; ++n) {
        const cplx* src = im.rows + n * im.m_pad;
        cplx* dst = c.row(n);
        double* pd = p ? p->row(n) : nullptr;
        for (std::size_t j = 0; j < im.m_pad; ++j) {
            const cplx v = src[(j + half) % im.m_pad] * scale;
            dst[j] = v;
            if (pd) pd[j] = std::norm(v);
        }
    }
}

RdEngine& shared_engine(const SensingConfig& cfg) {
    thread_local std::unique_ptr<RdEngine> engine;
    if (!engine || !engine->compatible(cfg)) engine = std::make_unique<RdEngine>(cfg);
    return *engine;
}

ComplexPeriodogram complex_periodogram(const CompactCsi& h, const SensingConfig& cfg) {
    RdEngine& eng = shared_engine(cfg);
    eng.prepare(h);
    ComplexPeriodogram c;
    eng.finish_full(c, nullptr);
    return c;
}

ComplexPeriodogram complex_periodogram(const CsiMatrix& h, const SensingConfig& cfg) {
    return complex_periodogram(CompactCsi::from(h, cfg), cfg);
}

PowerPeriodogram power_periodogram(const ComplexPeriodogram& c) {
    PowerPeriodogram p(c.rows, c.cols);
    for (std::size_t i = 0; i < c.data.size(); ++i) p.data[i] = std::norm(c.data[i]);
    return p;
}

namespace {

using EMat = Eigen::MatrixXcd;
using EMap = Eigen::Map<const EMat>;

/// Evaluates the raw fine transform on the offset grid (n_off x m_off) around
/// (base_n, base_m) and returns the argmax (first in scan order on ties).
void fine_search(const CompactCsi& h, const SensingConfig& cfg, double base_n, double base_m,
                 const std::vector<double>& offs, double& best_n, double& best_m, cplx& best_v) {
    const std::size_t n_sub = h.num_subcarriers;
    const std::size_t kc = h.dl_cols.size();
    const std::size_t nf = offs.size();
    const double np = static_cast<double>(cfg.range_bins());
    const double mp = static_cast<double>(cfg.doppler_bins());

    EMat ws(kc, nf);
    for (std::size_t t = 0; t < nf; ++t) {
        const double m_f = base_m + offs[t];
        const double step = -kTwoPi * m_f / mp;
        for (std::size_t i = 0; i < kc; ++i)
            ws(i, t) = std::polar(1.0, step * static_cast<double>(h.dl_cols[i]));
    }
    EMat wr(n_sub, nf);
    for (std::size_t u = 0; u < nf; ++u) {
        const double n_f = base_n + offs[u];
        const double step = kTwoPi * n_f / np;
        for (std::size_t k = 0; k < n_sub; ++k)
            wr(k, u) = std::polar(1.0, step * static_cast<double>(k));
    }

    EMap hm(h.data.data(), static_cast<Eigen::Index>(n_sub), static_cast<Eigen::Index>(kc));
    EMat v = hm * ws;                  // N x nf
    EMat fine = wr.transpose() * v;    // nf (range) x nf (Doppler)

    double best_p = -1.0;
    std::size_t bu = 0, bt = 0;
    for (std::size_t u = 0; u < nf; ++u) {
        for (std::size_t t = 0; t < nf; ++t) {
            const double pw = std::norm(fine(u, t));
            if (pw > best_p) {
                best_p = pw;
                bu = u;
                bt = t;
            }
        }
    }
    best_n = base_n + offs[bu];
    best_m = base_m + offs[bt];
    best_v = fine(bu, bt);
}

std::vector<double> offset_grid(double halfwidth, double step) {
    const long long half = std::llround(halfwidth / step);
    std::vector<double> offs;
    offs.reserve(2 * half + 1);
    for (long long i = -half; i <= half; ++i) offs.push_back(static_cast<double>(i) * step);
    return offs;
}

}  // namespace

PeakEstimate focused_fourier(const CompactCsi& h, long long coarse_n, long long coarse_m,
                             const SensingConfig& cfg, const RefineConfig& rc) {
    const long long half = static_cast<long long>(cfg.doppler_bins() / 2);
    if (coarse_n < 0 || coarse_n >= static_cast<long long>(cfg.range_bins()) ||
        coarse_m < -half || coarse_m >= half)
        throw std::out_of_range("focused_fourier: coarse bin outside grid");

    double n1, m1, n2, m2;
    cplx v1, v2;
    fine_search(h, cfg, static_cast<double>(coarse_n), static_cast<double>(coarse_m),
                offset_grid(rc.stage1_halfwidth, rc.stage1_step), n1, m1, v1);
    fine_search(h, cfg, n1, m1, offset_grid(rc.stage2_halfwidth, rc.stage2_step), n2, m2, v2);

    PeakEstimate pk;
    pk.coarse_n = coarse_n;
    pk.coarse_m = coarse_m;
    pk.refined_n = n2;
    pk.refined_m = m2;
    pk.range_m = cfg.range_from_bin(n2);
    pk.speed_mps = cfg.speed_from_bin(m2);
    pk.coeff = v2 / (static_cast<double>(cfg.range_bins()) * static_cast<double>(cfg.doppler_bins()));
    pk.power_db = power_db(std::norm(pk.coeff));
    return pk;
}

PeakEstimate focused_fourier(const CsiMatrix& h, long long coarse_n, long long coarse_m,
                             const SensingConfig& cfg, const RefineConfig& rc) {
    return focused_fourier(CompactCsi::from(h, cfg), coarse_n, coarse_m, cfg, rc);
}

cplx csi_domain_coeff(const PeakEstimate& peak, const SensingConfig& cfg) {
    const double np = static_cast<double>(cfg.range_bins());
    const double mp = static_cast<double>(cfg.doppler_bins());
    const double n = static_cast<double>(cfg.num_subcarriers());
    const double m = static_cast<double>(cfg.frame_symbols());
    return peak.coeff * (np * mp) / (n * m * cfg.duty_cycle());
}

}  // namespace tddsense
