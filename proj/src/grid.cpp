#include "grid.hpp"

#include "errors.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace critnls {

namespace {

constexpr std::size_t kMinNodes = 64;

// Derivative of the Lagrange polynomial through stencil points t[], taken at
// the evaluation point tau, written into w[].
void lagrange_derivative_weights(std::span<const double> t, double tau,
                                 std::span<double> w) {
    const std::size_t m = t.size();
    for (std::size_t j = 0; j < m; ++j) {
        double denom = 1.0;
        for (std::size_t k = 0; k < m; ++k)
            if (k != j) denom *= t[j] - t[k];
        double num = 0.0;
        for (std::size_t l = 0; l < m; ++l) {
            if (l == j) continue;
            double prod = 1.0;
            for (std::size_t k = 0; k < m; ++k)
                if (k != j && k != l) prod *= tau - t[k];
            num += prod;
        }
        w[j] = num / denom;
    }
}

} // namespace

RadialGrid::RadialGrid(int dim, std::vector<double> nodes, GridSpacing spacing)
    : dim_(dim), spacing_(spacing), nodes_(std::move(nodes)) {
    if (dim_ < 3) throw DomainError("RadialGrid: N must be >= 3");
    if (nodes_.size() < kMinNodes) throw DomainError("RadialGrid: need at least 64 nodes");
    if (nodes_.front() != 0.0) throw DomainError("RadialGrid: first node must be r = 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i] > nodes_[i - 1]))
            throw DomainError("RadialGrid: nodes must be strictly increasing");
    if (!(nodes_.back() > 0.0)) throw DomainError("RadialGrid: r_max must be positive");
    build_stencils();
}

std::shared_ptr<const RadialGrid> RadialGrid::uniform(int dim, double r_max,
                                                      std::size_t nodes) {
    std::vector<double> r(nodes);
    for (std::size_t i = 0; i < nodes; ++i)
        r[i] = r_max * static_cast<double>(i) / static_cast<double>(nodes - 1);
    return std::shared_ptr<const RadialGrid>(
        new RadialGrid(dim, std::move(r), GridSpacing::Uniform));
}

std::shared_ptr<const RadialGrid> RadialGrid::graded(int dim, double r_max,
                                                     std::size_t nodes,
                                                     double stretch) {
    if (!(stretch > 0.0)) throw DomainError("RadialGrid::graded: stretch must be positive");
    std::vector<double> r(nodes);
    const double denom = std::expm1(stretch);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(nodes - 1);
        r[i] = r_max * std::expm1(stretch * t) / denom;
    }
    r.front() = 0.0;
    r.back() = r_max;
    return std::shared_ptr<const RadialGrid>(
        new RadialGrid(dim, std::move(r), GridSpacing::Graded));
}

std::shared_ptr<const RadialGrid> RadialGrid::from_nodes(int dim,
                                                         std::vector<double> nodes,
                                                         GridSpacing spacing) {
    return std::shared_ptr<const RadialGrid>(
        new RadialGrid(dim, std::move(nodes), spacing));
}

void RadialGrid::build_stencils() {
    const std::size_t n = nodes_.size();
    d1_weights_.assign(5 * n, 0.0);
    d1_offsets_.assign(n, 0);
    // Node 0 keeps zero weights: u'(0) = 0 for radial profiles.
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t start = i >= 2 ? i - 2 : 0;
        start = std::min(start, n - 5);
        d1_offsets_[i] = start;
        lagrange_derivative_weights(std::span(nodes_).subspan(start, 5), nodes_[i],
                                    std::span(d1_weights_).subspan(5 * i, 5));
    }

    cell_volume_.assign(n, 0.0);
    half_face_.assign(n, 0.0);  // face between i and i+1, index i
    const int N = dim_;
    double lo = 0.0;  // r_{i-1/2}
    for (std::size_t i = 0; i < n; ++i) {
        const double hi = i + 1 < n ? 0.5 * (nodes_[i] + nodes_[i + 1])
                                    : nodes_[i];  // half-cell at the boundary
        cell_volume_[i] = (std::pow(hi, N) - std::pow(lo, N)) / N;
        if (i + 1 < n)
            half_face_[i] = std::pow(hi, N - 1) / (nodes_[i + 1] - nodes_[i]);
        lo = hi;
    }
}

double RadialGrid::integrate(std::span<const double> samples) const {
    if (samples.size() != nodes_.size())
        throw DomainError("RadialGrid::integrate: sample count mismatch");
    std::vector<double> weighted(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        weighted[i] = samples[i] * std::pow(nodes_[i], dim_ - 1);
    return unit_sphere_area(dim_) * simpson_nonuniform(nodes_, weighted);
}

std::vector<double> RadialGrid::derivative(std::span<const double> samples) const {
    const std::size_t n = nodes_.size();
    if (samples.size() != n) throw DomainError("RadialGrid::derivative: sample count mismatch");
    if (n < 5) throw DomainError("RadialGrid::derivative: need at least 5 nodes");
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t s = d1_offsets_[i];
        double acc = 0.0;
        for (std::size_t k = 0; k < 5; ++k)
            acc += d1_weights_[5 * i + k] * samples[s + k];
        d[i] = acc;
    }
    return d;
}

std::vector<double> RadialGrid::laplacian(std::span<const double> samples) const {
    const std::size_t n = nodes_.size();
    if (samples.size() != n) throw DomainError("RadialGrid::laplacian: sample count mismatch");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double flux_hi =
            i + 1 < n ? half_face_[i] * (samples[i + 1] - samples[i])
                      : -std::pow(nodes_[i], dim_ - 1) /
                            (nodes_[i] - nodes_[i - 1]) * samples[i];
        const double flux_lo = i > 0 ? half_face_[i - 1] * (samples[i] - samples[i - 1]) : 0.0;
        out[i] = (flux_hi - flux_lo) / cell_volume_[i];
    }
    return out;
}

void RadialGrid::laplacian_bands(std::vector<double>& lower, std::vector<double>& diag,
                                 std::vector<double>& upper) const {
    const std::size_t n = nodes_.size();
    lower.assign(n, 0.0);
    diag.assign(n, 0.0);
    upper.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double face_hi =
            i + 1 < n ? half_face_[i]
                      : std::pow(nodes_[i], dim_ - 1) / (nodes_[i] - nodes_[i - 1]);
        const double face_lo = i > 0 ? half_face_[i - 1] : 0.0;
        if (i + 1 < n) upper[i] = face_hi / cell_volume_[i];
        if (i > 0) lower[i] = face_lo / cell_volume_[i];
        diag[i] = -(face_hi + face_lo) / cell_volume_[i];
    }
}

} // namespace critnls
