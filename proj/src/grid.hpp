#pragma once

#include <memory>
#include <span>
#include <vector>

namespace critnls {

enum class GridSpacing { Uniform, Graded };

/// Immutable set of radial nodes 0 = r_0 < r_1 < ... < r_{n-1} = r_max in
/// R^N, with precomputed first-derivative stencils (5-point, u'(0) = 0 by
/// symmetry) and finite-volume cell data for the conservative Laplacian.
class RadialGrid {
public:
    static std::shared_ptr<const RadialGrid> uniform(int dim, double r_max,
                                                     std::size_t nodes);
    /// Geometrically stretched nodes, r_i = r_max (e^{b t} - 1)/(e^b - 1):
    /// spacing near the origin is ~e^b times finer than at r_max.
    static std::shared_ptr<const RadialGrid> graded(int dim, double r_max,
                                                    std::size_t nodes,
                                                    double stretch = 6.0);
    /// Takes ownership of explicit nodes (must start at 0, strictly increase).
    static std::shared_ptr<const RadialGrid> from_nodes(int dim,
                                                        std::vector<double> nodes,
                                                        GridSpacing spacing);

    int dim() const { return dim_; }
    GridSpacing spacing() const { return spacing_; }
    std::size_t size() const { return nodes_.size(); }
    double r(std::size_t i) const { return nodes_[i]; }
    double r_max() const { return nodes_.back(); }
    std::span<const double> nodes() const { return nodes_; }

    /// omega_N \int f(r) r^{N-1} dr over the grid by composite Simpson.
    double integrate(std::span<const double> samples) const;

    /// Sampled derivative f'(r_i) from the precomputed stencils.
    std::vector<double> derivative(std::span<const double> samples) const;

    /// Finite-volume cell measures w_i ~ \int_{cell_i} r^{N-1} dr (no omega_N
    /// factor); the conservative Laplacian is self-adjoint against these.
    std::span<const double> cell_volumes() const { return cell_volume_; }

    /// Conservative radial Laplacian (L f)_i = div(r^{N-1} grad f)/r^{N-1}
    /// in flux form, zero-flux at r = 0 and Dirichlet beyond r_max.
    std::vector<double> laplacian(std::span<const double> samples) const;

    /// Tridiagonal coefficients of the Laplacian: (lower, diag, upper).
    void laplacian_bands(std::vector<double>& lower, std::vector<double>& diag,
                         std::vector<double>& upper) const;

private:
    RadialGrid(int dim, std::vector<double> nodes, GridSpacing spacing);
    void build_stencils();

    int dim_;
    GridSpacing spacing_;
    std::vector<double> nodes_;
    std::vector<double> d1_weights_;       // 5 per node
    std::vector<std::size_t> d1_offsets_;  // stencil start index per node
    std::vector<double> cell_volume_;
    std::vector<double> half_face_;        // r_{i+1/2}^{N-1}/(r_{i+1}-r_i)
};

} // namespace critnls
