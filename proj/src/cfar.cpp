#include "tddsense/cfar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tddsense {

double threshold_factor(std::size_t training_count, double pfa) {
    if (training_count < 1) throw std::invalid_argument("threshold_factor: N_t must be >= 1");
    if (!(pfa > 0.0) || pfa > 1.0) throw std::invalid_argument("threshold_factor: P_FA in (0, 1]");
    const double nt = static_cast<double>(training_count);
    return nt * (std::pow(pfa, -1.0 / nt) - 1.0);
}

namespace {

struct Scratch {
    std::vector<double> ext;       // doubled row for circular windows
    std::vector<double> prefix;    // prefix over the doubled row
    std::vector<double> dopp_sum;  // per-row Doppler training sums
    RGrid row_prefix;              // cumulative rows: row n = sum of P rows < n
};

Scratch& scratch() {
    thread_local Scratch s;
    return s;
}

}  // namespace

std::vector<Candidate> detect_candidates(const PowerPeriodogram& p, const CfarConfig& cfar,
                                         const SensingConfig& cfg) {
    const std::size_t rows = p.rows, cols = p.cols;
    if (rows != cfg.range_bins() || cols != cfg.doppler_bins())
        throw std::invalid_argument("detect_candidates: grid does not match config");
    const std::size_t wr = cfar.guard_range + cfar.train_range;
    const std::size_t wd = cfar.guard_doppler + cfar.train_doppler;
    if (rows < 2 * wr + 1 || cols < 2 * wd + 1)
        throw std::invalid_argument("detect_candidates: grid smaller than CFAR window");

    const double alpha = threshold_factor(cfar.training_count(), cfar.pfa);
    const double inv_nt = 1.0 / static_cast<double>(cfar.training_count());

    Scratch& s = scratch();
    s.ext.resize(2 * cols);
    s.prefix.resize(2 * cols + 1);
    s.dopp_sum.resize(rows * cols);
    if (s.row_prefix.rows != rows + 1 || s.row_prefix.cols != cols)
        s.row_prefix = RGrid(rows + 1, cols);

    // Doppler-axis training sums (circular)
    for (std::size_t n = 0; n < rows; ++n) {
        const double* src = p.row(n);
        std::copy(src, src + cols, s.ext.begin());
        std::copy(src, src + cols, s.ext.begin() + cols);
        s.prefix[0] = 0.0;
        for (std::size_t i = 0; i < 2 * cols; ++i) s.prefix[i + 1] = s.prefix[i] + s.ext[i];
        double* dst = s.dopp_sum.data() + n * cols;
        const std::size_t g = cfar.guard_doppler, t = cfar.train_doppler;
        for (std::size_t j = 0; j < cols; ++j) {
            // center the window at j + cols in the doubled row
            const std::size_t c = j + cols;
            const double right = s.prefix[std::min(c + g + t + 1, 2 * cols)] -
                                 s.prefix[std::min(c + g + 1, 2 * cols)];
            const double left = s.prefix[c - g] - s.prefix[c - g - t];
            dst[j] = left + right;
        }
    }

    // cumulative rows for the range-axis arms
    std::fill(s.row_prefix.row(0), s.row_prefix.row(0) + cols, 0.0);
    for (std::size_t n = 0; n < rows; ++n) {
        const double* src = p.row(n);
        const double* prev = s.row_prefix.row(n);
        double* dst = s.row_prefix.row(n + 1);
        for (std::size_t j = 0; j < cols; ++j) dst[j] = prev[j] + src[j];
    }

    std::vector<Candidate> out;
    const long long g = static_cast<long long>(cfar.guard_range);
    const long long t = static_cast<long long>(cfar.train_range);
    const long long nr = static_cast<long long>(rows);
    std::vector<double> rng_sum(cols);

    for (long long n = 0; n < nr; ++n) {
        // upper arm: rows n-g-t .. n-g-1, indices clamped to 0
        const long long u_hi = n - g;              // exclusive upper end
        const long long u_lo = n - g - t;
        const long long u_hi_c = std::max<long long>(u_hi, 0);
        const long long u_lo_c = std::max<long long>(u_lo, 0);
        const double ku = static_cast<double>(u_hi_c - u_lo_c < t ? t - (u_hi_c - u_lo_c) : 0);
        // lower arm: rows n+g+1 .. n+g+t, clamped to rows-1
        const long long d_lo = n + g + 1;
        const long long d_hi = n + g + t + 1;      // exclusive
        const long long d_lo_c = std::min<long long>(d_lo, nr);
        const long long d_hi_c = std::min<long long>(d_hi, nr);
        const double kd = static_cast<double>(d_hi_c - d_lo_c < t ? t - (d_hi_c - d_lo_c) : 0);

        const double* up_hi = s.row_prefix.row(static_cast<std::size_t>(u_hi_c));
        const double* up_lo = s.row_prefix.row(static_cast<std::size_t>(u_lo_c));
        const double* dn_hi = s.row_prefix.row(static_cast<std::size_t>(d_hi_c));
        const double* dn_lo = s.row_prefix.row(static_cast<std::size_t>(d_lo_c));
        const double* top = p.row(0);
        const double* bot = p.row(rows - 1);
        for (std::size_t j = 0; j < cols; ++j) {
            rng_sum[j] = (up_hi[j] - up_lo[j]) + (dn_hi[j] - dn_lo[j]) + ku * top[j] + kd * bot[j];
        }

        const double* cur = p.row(n);
        const double* dsum = s.dopp_sum.data() + static_cast<std::size_t>(n) * cols;
        const double* above = n > 0 ? p.row(n - 1) : nullptr;
        const double* below = n + 1 < nr ? p.row(n + 1) : nullptr;
        for (std::size_t j = 0; j < cols; ++j) {
            const double mean = (rng_sum[j] + dsum[j]) * inv_nt;
            const double v = cur[j];
            if (!(v > alpha * mean)) continue;
            const std::size_t jl = j == 0 ? cols - 1 : j - 1;
            const std::size_t jr = j + 1 == cols ? 0 : j + 1;
            bool is_max = v > cur[jl] && v > cur[jr];
            if (is_max && above)
                is_max = v > above[jl] && v > above[j] && v > above[jr];
            if (is_max && below)
                is_max = v > below[jl] && v > below[j] && v > below[jr];
            if (!is_max) continue;
            Candidate c;
            c.n = static_cast<std::size_t>(n);
            c.m = doppler_bin(j, cfg);
            c.power = v;
            c.range_m = cfg.range_from_bin(static_cast<double>(n));
            c.speed_mps = cfg.speed_from_bin(static_cast<double>(c.m));
            out.push_back(c);
        }
    }

    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.power != b.power) return a.power > b.power;
        if (a.n != b.n) return a.n < b.n;
        return a.m < b.m;
    });
    return out;
}

}  // namespace tddsense
