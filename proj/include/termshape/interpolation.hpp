#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "termshape/errors.hpp"

namespace termshape {

/// Monotone cubic Hermite interpolation (Fritsch-Carlson slope limiting).
/// Preserves monotonicity of the data on each interval and never
/// extrapolates: queries outside [x.front(), x.back()] throw.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw ConfigError("MonotoneCubic: need n >= 2 matching points");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1])) throw ConfigError("MonotoneCubic: x must increase");

        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

        m_.assign(n, 0.0);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            m_[i] = (d[i - 1] * d[i] > 0.0) ? 0.5 * (d[i - 1] + d[i]) : 0.0;

        // Fritsch-Carlson limiter
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m_[i] = m_[i + 1] = 0.0;
                continue;
            }
            const double a = m_[i] / d[i];
            const double b = m_[i + 1] / d[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double tau = 3.0 / std::sqrt(s);
                m_[i] = tau * a * d[i];
                m_[i + 1] = tau * b * d[i];
            }
        }
    }

    double operator()(double q) const {
        if (q < x_.front() || q > x_.back())
            throw ConfigError("MonotoneCubic: query outside data range (no extrapolation)");
        auto it = std::upper_bound(x_.begin(), x_.end(), q);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (i == 0) i = 1;
        if (i >= x_.size()) i = x_.size() - 1;
        --i;
        const double hx = x_[i + 1] - x_[i];
        const double s = (q - x_[i]) / hx;
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s * s * (3.0 - 2.0 * s);
        const double h11 = s * s * (s - 1.0);
        return h00 * y_[i] + h10 * hx * m_[i] + h01 * y_[i + 1] + h11 * hx * m_[i + 1];
    }

private:
    std::vector<double> x_, y_, m_;
};

}  // namespace termshape
