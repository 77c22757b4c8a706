#pragma once

#include "peerflow/config.hpp"
#include "peerflow/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace peerflow {

/// Lower end of the tabulated support. The eta^-b singularity is cut here.
inline constexpr double kEtaMin = 1e-6;

inline double quality_density(const QualityDistParams& p, double eta)
{
    return p.a * std::pow(eta, -p.b) * std::exp(-p.c * eta);
}

/// Tabulated, normalized CDF of the quality density on [kEtaMin, eta_max].
struct QualityCdfTable {
    std::vector<double> grid;
    std::vector<double> cdf_values;
    QualityDistParams params;
    double norm = 1.0; // integral of the unnormalized density over the grid

    double eta_min() const { return grid.front(); }
    double eta_max() const { return grid.back(); }

    /// F(eta), linearly interpolated; clamps outside the grid.
    double cdf(double eta) const
    {
        if (eta <= grid.front()) return 0.0;
        if (eta >= grid.back()) return 1.0;
        const auto it = std::upper_bound(grid.begin(), grid.end(), eta);
        const auto hi = static_cast<std::size_t>(it - grid.begin());
        const auto lo = hi - 1;
        const double t = (eta - grid[lo]) / (grid[hi] - grid[lo]);
        return cdf_values[lo] + t * (cdf_values[hi] - cdf_values[lo]);
    }

    /// F^-1(p) by linear interpolation between bracketing grid entries.
    double inverse(double p) const
    {
        if (p <= 0.0) return grid.front();
        if (p >= 1.0) return grid.back();
        // First entry with cdf >= p; flat stretches resolve to their left end.
        const auto it = std::lower_bound(cdf_values.begin(), cdf_values.end(), p);
        const auto hi = static_cast<std::size_t>(it - cdf_values.begin());
        const auto lo = hi - 1;
        const double span = cdf_values[hi] - cdf_values[lo];
        const double t = span > 0.0 ? (p - cdf_values[lo]) / span : 0.0;
        return grid[lo] + t * (grid[hi] - grid[lo]);
    }
};

/// Trapezoid-integrate the density into a normalized CDF table.
///
/// Grid nodes are spaced quadratically (dense near the origin) so the
/// integrable singularity of eta^-b is resolved without a special rule.
/// Throws std::invalid_argument when b >= 1 or when the mass cut off below
/// kEtaMin exceeds 1% of the total.
inline QualityCdfTable build_cdf(const QualityDistParams& params, int grid_points = 4096)
{
    if (grid_points < 256) {
        throw std::invalid_argument("build_cdf: grid_points must be >= 256");
    }
    if (!(params.a > 0.0 && params.c > 0.0 && params.b > 0.0 && params.eta_max > kEtaMin)) {
        throw std::invalid_argument("build_cdf: invalid density parameters");
    }
    if (params.b >= 1.0) {
        throw std::invalid_argument("non-integrable at origin under truncation tolerance");
    }

    QualityCdfTable table;
    table.params = params;
    table.grid.resize(static_cast<std::size_t>(grid_points));
    table.cdf_values.resize(table.grid.size());
    const double span = params.eta_max - kEtaMin;
    for (int i = 0; i < grid_points; ++i) {
        const double t = static_cast<double>(i) / (grid_points - 1);
        table.grid[i] = kEtaMin + span * t * t;
    }
    table.grid.back() = params.eta_max;

    // Integrate the shape with a = 1 so the scale cancels bit for bit.
    QualityDistParams shape = params;
    shape.a = 1.0;
    double acc = 0.0;
    double f_prev = quality_density(shape, table.grid[0]);
    table.cdf_values[0] = 0.0;
    for (std::size_t i = 1; i < table.grid.size(); ++i) {
        const double f = quality_density(shape, table.grid[i]);
        acc += 0.5 * (f + f_prev) * (table.grid[i] - table.grid[i - 1]);
        table.cdf_values[i] = acc;
        f_prev = f;
    }

    // Mass below kEtaMin, bounded above by the pure power-law integral.
    const double truncated = std::pow(kEtaMin, 1.0 - params.b) / (1.0 - params.b);
    if (truncated > 0.01 * (acc + truncated)) {
        throw std::invalid_argument("non-integrable at origin under truncation tolerance");
    }

    table.norm = params.a * acc;
    for (double& v : table.cdf_values) v /= acc;
    table.cdf_values.back() = 1.0;
    return table;
}

inline double sample_quality(const QualityCdfTable& table, RngStream& rng)
{
    return table.inverse(rng.uniform());
}

/// CSV rows of (eta, normalized pdf, cdf) on every `stride`-th grid node.
inline void write_cdf_csv(std::ostream& out, const QualityCdfTable& table, std::size_t stride = 1)
{
    out << "eta,pdf,cdf\n";
    char buf[96];
    for (std::size_t i = 0; i < table.grid.size(); i += std::max<std::size_t>(stride, 1)) {
        const double eta = table.grid[i];
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g\n", eta,
                      quality_density(table.params, eta) / table.norm, table.cdf_values[i]);
        out << buf;
    }
}

} // namespace peerflow
