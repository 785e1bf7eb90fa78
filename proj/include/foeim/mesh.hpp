// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "foeim/quadrature.hpp"
#include "foeim/types.hpp"

namespace foeim {

enum class BCKind {
    NeumannHomogeneous,
    DirichletHomogeneous,
};

/// Structured axis-aligned mesh of intervals (1D) or quadrilaterals (2D).
struct Mesh {
    int dim = 2;
    std::array<std::array<double, 2>, 2> bounds{}; // per-axis {lo, hi}
    std::array<int, 2> cells{1, 1};                // cells per axis; cells[1] == 1 in 1D

    int cell_count() const { return cells[0] * (dim == 2 ? cells[1] : 1); }

    double cell_size(int axis) const {
        return (bounds[axis][1] - bounds[axis][0]) / cells[axis];
    }

    double cell_measure() const {
        double m = cell_size(0);
        if (dim == 2) m *= cell_size(1);
        return m;
    }

    double measure() const { return cell_measure() * cell_count(); }

    int vertex_count() const {
        int n = cells[0] + 1;
        if (dim == 2) n *= cells[1] + 1;
        return n;
    }

    Vector vertex_coord(int v) const {
        const int nvx = cells[0] + 1;
        Vector x(dim);
        x(0) = bounds[0][0] + (v % nvx) * cell_size(0);
        if (dim == 2) x(1) = bounds[1][0] + (v / nvx) * cell_size(1);
        return x;
    }

    /// Vertex ids of a cell, lexicographic (x fastest).
    std::vector<int> cell_vertices(int c) const {
        const int cx = c % cells[0];
        const int nvx = cells[0] + 1;
        if (dim == 1) return {cx, cx + 1};
        const int cy = c / cells[0];
        const int v0 = cx + nvx * cy;
        return {v0, v0 + 1, v0 + nvx, v0 + nvx + 1};
    }
};

inline Mesh make_mesh(int dim, const std::vector<std::array<double, 2>>& bounds,
                      const std::vector<int>& cells_per_axis) {
    FOEIM_REQUIRE(dim == 1 || dim == 2, "mesh dimension must be 1 or 2, got " << dim);
    FOEIM_REQUIRE(static_cast<int>(bounds.size()) == dim && static_cast<int>(cells_per_axis.size()) == dim,
                  "mesh: bounds/cells arity must match dim");
    Mesh mesh;
    mesh.dim = dim;
    for (int d = 0; d < dim; ++d) {
        FOEIM_REQUIRE(bounds[d][1] > bounds[d][0],
                      "mesh: degenerate bounds on axis " << d << ": [" << bounds[d][0] << ", "
                                                         << bounds[d][1] << "]");
        FOEIM_REQUIRE(cells_per_axis[d] >= 1, "mesh: need at least one cell per axis");
        mesh.bounds[d] = bounds[d];
        mesh.cells[d] = cells_per_axis[d];
    }
    if (dim == 1) {
        mesh.bounds[1] = {0.0, 1.0};
        mesh.cells[1] = 1;
    }
    return mesh;
}

/// Nodal tensor-product Lagrange space on a structured mesh, with the Gauss
/// quadrature rule and per-cell reference tables used by all assembly routines.
/// Dirichlet spaces eliminate boundary dofs; fields carry free dofs only.
class FESpace {
public:
    FESpace(Mesh mesh, int degree, BCKind bc)
        : mesh_(std::move(mesh)), degree_(degree), bc_(bc) {
        FOEIM_REQUIRE(degree_ >= 1, "FESpace: degree must be >= 1, got " << degree_);
        const int dim = mesh_.dim;
        for (int d = 0; d < 2; ++d)
            n_axis_[d] = (d < dim) ? degree_ * mesh_.cells[d] + 1 : 1;
        total_dofs_ = static_cast<Index>(n_axis_[0]) * n_axis_[1];

        free_of_global_.assign(total_dofs_, -1);
        global_of_free_.clear();
        for (Index g = 0; g < total_dofs_; ++g) {
            if (bc_ == BCKind::DirichletHomogeneous && on_boundary(g)) continue;
            free_of_global_[g] = static_cast<Index>(global_of_free_.size());
            global_of_free_.push_back(g);
        }

        build_quadrature();
        build_reference_tables();
        build_cell_dofs();
    }

    const Mesh& mesh() const { return mesh_; }
    int dim() const { return mesh_.dim; }
    int degree() const { return degree_; }
    BCKind bc() const { return bc_; }

    Index total_dofs() const { return total_dofs_; }
    Index free_dofs() const { return static_cast<Index>(global_of_free_.size()); }
    Index boundary_dof_count() const { return total_dofs_ - free_dofs(); }

    bool on_boundary(Index global) const {
        const int ix = static_cast<int>(global % n_axis_[0]);
        if (ix == 0 || ix == n_axis_[0] - 1) return true;
        if (mesh_.dim == 2) {
            const int iy = static_cast<int>(global / n_axis_[0]);
            if (iy == 0 || iy == n_axis_[1] - 1) return true;
        }
        return false;
    }

    Index free_index(Index global) const { return free_of_global_[global]; }
    Index global_index(Index free) const { return global_of_free_[free]; }

    Vector dof_coord(Index global) const {
        Vector x(mesh_.dim);
        const int ix = static_cast<int>(global % n_axis_[0]);
        x(0) = mesh_.bounds[0][0] + ix * mesh_.cell_size(0) / degree_;
        if (mesh_.dim == 2) {
            const int iy = static_cast<int>(global / n_axis_[0]);
            x(1) = mesh_.bounds[1][0] + iy * mesh_.cell_size(1) / degree_;
        }
        return x;
    }

    // --- quadrature ---

    Index quad_count() const { return quad_points_.rows(); }
    const Matrix& quad_points() const { return quad_points_; }
    const Vector& quad_weights() const { return quad_weights_; }

    /// (cell, local quadrature index) identity of a global quadrature point.
    std::pair<int, int> quad_identity(Index q) const {
        return {static_cast<int>(q / nq_cell_), static_cast<int>(q % nq_cell_)};
    }

    int nq_cell() const { return nq_cell_; }
    int nloc() const { return nloc_; }

    /// Local basis values at the reference quadrature points, nloc x nq_cell.
    const Matrix& ref_values() const { return ref_values_; }
    /// Physical-gradient table for one axis, nloc x nq_cell. Uniform cells share it.
    const Matrix& ref_gradients(int axis) const { return ref_gradients_[axis]; }
    /// Quadrature weights of one cell (identical for every cell).
    const Vector& cell_weights() const { return cell_weights_; }

    const std::vector<Index>& cell_dofs(int c) const { return cell_dofs_[c]; }

    // --- point location and evaluation ---

    int locate_cell(const Vector& x) const {
        int idx[2] = {0, 0};
        for (int d = 0; d < mesh_.dim; ++d) {
            const double lo = mesh_.bounds[d][0], hi = mesh_.bounds[d][1];
            const double tol = 1e-12 * (hi - lo);
            FOEIM_REQUIRE(x(d) >= lo - tol && x(d) <= hi + tol,
                          "point outside domain on axis " << d << ": " << x(d));
            const double t = (x(d) - lo) / mesh_.cell_size(d);
            idx[d] = std::min(std::max(static_cast<int>(std::floor(t)), 0), mesh_.cells[d] - 1);
        }
        return idx[0] + mesh_.cells[0] * idx[1];
    }

    /// Values (and optionally per-axis derivatives) of the local basis of the cell
    /// containing x. `dofs` receives the cell's global dof ids.
    void eval_basis_at(const Vector& x, int& cell, Vector& vals, Matrix* grads = nullptr) const {
        cell = locate_cell(x);
        const int p = degree_;
        std::array<std::vector<double>, 2> v1, d1;
        for (int d = 0; d < mesh_.dim; ++d) {
            const int cd = (d == 0) ? cell % mesh_.cells[0] : cell / mesh_.cells[0];
            const double h = mesh_.cell_size(d);
            double xi = (x(d) - (mesh_.bounds[d][0] + cd * h)) / h;
            xi = std::min(std::max(xi, 0.0), 1.0);
            v1[d].resize(p + 1);
            d1[d].resize(p + 1);
            lagrange_eval(p, xi, v1[d].data(), d1[d].data());
        }
        vals.resize(nloc_);
        if (grads) grads->resize(nloc_, mesh_.dim);
        for (int j = 0; j < nloc_; ++j) {
            const int jx = j % (p + 1);
            const int jy = j / (p + 1);
            if (mesh_.dim == 1) {
                vals(j) = v1[0][jx];
                if (grads) (*grads)(j, 0) = d1[0][jx] / mesh_.cell_size(0);
            } else {
                vals(j) = v1[0][jx] * v1[1][jy];
                if (grads) {
                    (*grads)(j, 0) = d1[0][jx] / mesh_.cell_size(0) * v1[1][jy];
                    (*grads)(j, 1) = v1[0][jx] * d1[1][jy] / mesh_.cell_size(1);
                }
            }
        }
    }

private:
    void build_quadrature() {
        const int q1 = degree_ + 2; // exact through degree 2*degree + 3
        rule1d_ = gauss_legendre(q1);
        const int dim = mesh_.dim;
        nq_cell_ = (dim == 2) ? q1 * q1 : q1;
        const int nc = mesh_.cell_count();
        quad_points_.resize(static_cast<Index>(nc) * nq_cell_, dim);
        quad_weights_.resize(static_cast<Index>(nc) * nq_cell_);
        cell_weights_.resize(nq_cell_);
        const double meas = mesh_.cell_measure();
        for (int lq = 0; lq < nq_cell_; ++lq) {
            const int qx = lq % q1;
            const int qy = lq / q1;
            double w = rule1d_.weights(qx) * meas;
            if (dim == 2) w *= rule1d_.weights(qy);
            cell_weights_(lq) = w;
        }
        for (int c = 0; c < nc; ++c) {
            const int cx = c % mesh_.cells[0];
            const int cy = c / mesh_.cells[0];
            for (int lq = 0; lq < nq_cell_; ++lq) {
                const Index q = static_cast<Index>(c) * nq_cell_ + lq;
                const int qx = lq % q1;
                quad_points_(q, 0) =
                    mesh_.bounds[0][0] + (cx + rule1d_.points(qx)) * mesh_.cell_size(0);
                if (dim == 2) {
                    const int qy = lq / q1;
                    quad_points_(q, 1) =
                        mesh_.bounds[1][0] + (cy + rule1d_.points(qy)) * mesh_.cell_size(1);
                }
                quad_weights_(q) = cell_weights_(lq);
            }
        }
    }

    void build_reference_tables() {
        const int p = degree_;
        const int q1 = degree_ + 2;
        nloc_ = (mesh_.dim == 2) ? (p + 1) * (p + 1) : (p + 1);
        Matrix val1(p + 1, q1), der1(p + 1, q1);
        std::vector<double> v(p + 1), d(p + 1);
        for (int q = 0; q < q1; ++q) {
            lagrange_eval(p, rule1d_.points(q), v.data(), d.data());
            for (int j = 0; j <= p; ++j) {
                val1(j, q) = v[j];
                der1(j, q) = d[j];
            }
        }
        ref_values_.resize(nloc_, nq_cell_);
        for (int dax = 0; dax < mesh_.dim; ++dax) ref_gradients_[dax].resize(nloc_, nq_cell_);
        for (int j = 0; j < nloc_; ++j) {
            const int jx = j % (p + 1);
            const int jy = j / (p + 1);
            for (int lq = 0; lq < nq_cell_; ++lq) {
                const int qx = lq % q1;
                const int qy = lq / q1;
                if (mesh_.dim == 1) {
                    ref_values_(j, lq) = val1(jx, qx);
                    ref_gradients_[0](j, lq) = der1(jx, qx) / mesh_.cell_size(0);
                } else {
                    ref_values_(j, lq) = val1(jx, qx) * val1(jy, qy);
                    ref_gradients_[0](j, lq) = der1(jx, qx) / mesh_.cell_size(0) * val1(jy, qy);
                    ref_gradients_[1](j, lq) = val1(jx, qx) * der1(jy, qy) / mesh_.cell_size(1);
                }
            }
        }
    }

    void build_cell_dofs() {
        const int p = degree_;
        const int nc = mesh_.cell_count();
        cell_dofs_.resize(nc);
        for (int c = 0; c < nc; ++c) {
            const int cx = c % mesh_.cells[0];
            const int cy = c / mesh_.cells[0];
            cell_dofs_[c].resize(nloc_);
            for (int j = 0; j < nloc_; ++j) {
                const int jx = j % (p + 1);
                const int jy = j / (p + 1);
                const Index gx = static_cast<Index>(cx) * p + jx;
                const Index gy = (mesh_.dim == 2) ? static_cast<Index>(cy) * p + jy : 0;
                cell_dofs_[c][j] = gx + static_cast<Index>(n_axis_[0]) * gy;
            }
        }
    }

    Mesh mesh_;
    int degree_;
    BCKind bc_;
    int n_axis_[2] = {1, 1};
    Index total_dofs_ = 0;
    std::vector<Index> free_of_global_;
    std::vector<Index> global_of_free_;

    QuadratureRule1D rule1d_;
    int nq_cell_ = 0;
    int nloc_ = 0;
    Matrix quad_points_;
    Vector quad_weights_;
    Vector cell_weights_;
    Matrix ref_values_;
    Matrix ref_gradients_[2];
    std::vector<std::vector<Index>> cell_dofs_;
};

inline FESpace build_space(int dim, const std::vector<std::array<double, 2>>& bounds,
                           const std::vector<int>& cells_per_axis, int degree, BCKind bc) {
    return FESpace(make_mesh(dim, bounds, cells_per_axis), degree, bc);
}

/// Coefficient vector over the free dofs of a space.
struct FEField {
    const FESpace* space = nullptr;
    Vector coeffs;

    FEField() = default;
    FEField(const FESpace& s, Vector c) : space(&s), coeffs(std::move(c)) {
        FOEIM_REQUIRE(coeffs.size() == s.free_dofs(),
                      "FEField: coefficient length " << coeffs.size() << " != free dof count "
                                                     << s.free_dofs());
    }
};

} // namespace foeim
