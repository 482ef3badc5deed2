#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace tddsense {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSpeedOfLight = 299792458.0;

/// Dense row-major grid. Row index is the range axis, column index the
/// Doppler axis throughout this library.
template <typename T>
struct Grid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    T* row(std::size_t r) { return data.data() + r * cols; }
    const T* row(std::size_t r) const { return data.data() + r * cols; }

    void fill(const T& v) { std::fill(data.begin(), data.end(), v); }
    std::size_t size() const { return data.size(); }
};

using CGrid = Grid<cplx>;
using RGrid = Grid<double>;

inline double power_db(double p) { return 10.0 * std::log10(p); }

/// Wraps x into [-half, half).
inline double wrap_signed(double x, double period) {
    double half = 0.5 * period;
    x = std::fmod(x + half, period);
    if (x < 0.0) x += period;
    return x - half;
}

/// Wraps an integer index into [0, n).
inline std::size_t wrap_index(long long i, std::size_t n) {
    long long nn = static_cast<long long>(n);
    long long r = i % nn;
    if (r < 0) r += nn;
    return static_cast<std::size_t>(r);
}

}  // namespace tddsense
