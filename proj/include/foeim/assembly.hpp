// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "foeim/mesh.hpp"
#include "foeim/types.hpp"

namespace foeim {

/// Scalar nonlinearity u -> value with its partial derivative in u.
/// Parameter dependence enters the weak form through the affine coefficients,
/// so nonlinearities are plain functions of the field value.
struct Nonlinearity {
    std::function<double(double)> value;
    std::function<double(double)> deriv;
};

struct LinearOperators {
    SparseMatrix mass;      // M_ij = int phi_i phi_j, SPD
    SparseMatrix stiffness; // A_ij = int grad phi_i . grad phi_j, PSD
};

namespace detail {

// Gather the local coefficients of a cell; eliminated boundary dofs read as zero.
inline void gather_local(const FESpace& space, const Vector& coeffs, int cell, Vector& local) {
    const auto& dofs = space.cell_dofs(cell);
    local.resize(static_cast<Index>(dofs.size()));
    for (std::size_t j = 0; j < dofs.size(); ++j) {
        const Index f = space.free_index(dofs[j]);
        local(static_cast<Index>(j)) = (f >= 0) ? coeffs(f) : 0.0;
    }
}

inline void scatter_matrix(const FESpace& space, int cell, const Matrix& local,
                           std::vector<Eigen::Triplet<double>>& out) {
    const auto& dofs = space.cell_dofs(cell);
    for (std::size_t j = 0; j < dofs.size(); ++j) {
        const Index fj = space.free_index(dofs[j]);
        if (fj < 0) continue;
        for (std::size_t n = 0; n < dofs.size(); ++n) {
            const Index fn = space.free_index(dofs[n]);
            if (fn < 0) continue;
            out.emplace_back(fj, fn, local(static_cast<Index>(j), static_cast<Index>(n)));
        }
    }
}

} // namespace detail

/// Mass and stiffness over the free dofs (Dirichlet rows/cols eliminated).
inline LinearOperators assemble_linear(const FESpace& space) {
    const Matrix& B = space.ref_values();
    const Vector& w = space.cell_weights();
    Matrix mass_loc = B * w.asDiagonal() * B.transpose();
    Matrix stiff_loc = Matrix::Zero(space.nloc(), space.nloc());
    for (int d = 0; d < space.dim(); ++d) {
        const Matrix& G = space.ref_gradients(d);
        stiff_loc += G * w.asDiagonal() * G.transpose();
    }
    std::vector<Eigen::Triplet<double>> tm, ta;
    const int nc = space.mesh().cell_count();
    tm.reserve(static_cast<std::size_t>(nc) * space.nloc() * space.nloc());
    ta.reserve(tm.capacity());
    for (int c = 0; c < nc; ++c) {
        detail::scatter_matrix(space, c, mass_loc, tm);
        detail::scatter_matrix(space, c, stiff_loc, ta);
    }
    LinearOperators ops;
    ops.mass.resize(space.free_dofs(), space.free_dofs());
    ops.stiffness.resize(space.free_dofs(), space.free_dofs());
    ops.mass.setFromTriplets(tm.begin(), tm.end());
    ops.stiffness.setFromTriplets(ta.begin(), ta.end());
    return ops;
}

/// rhs_j = int f phi_j by quadrature, over free dofs.
inline Vector l2_rhs(const FESpace& space, const std::function<double(const Vector&)>& f) {
    Vector rhs = Vector::Zero(space.free_dofs());
    const Matrix& B = space.ref_values();
    const Vector& w = space.cell_weights();
    const int nq = space.nq_cell();
    Vector fq(nq);
    for (int c = 0; c < space.mesh().cell_count(); ++c) {
        for (int lq = 0; lq < nq; ++lq) {
            const Index q = static_cast<Index>(c) * nq + lq;
            fq(lq) = f(space.quad_points().row(q).transpose());
        }
        const Vector local = B * (w.cwiseProduct(fq));
        const auto& dofs = space.cell_dofs(c);
        for (std::size_t j = 0; j < dofs.size(); ++j) {
            const Index fj = space.free_index(dofs[j]);
            if (fj >= 0) rhs(fj) += local(static_cast<Index>(j));
        }
    }
    return rhs;
}

/// L2 projection: solve M c = (f, phi_j). The mass matrix is SPD; a solver
/// failure here indicates an assembly bug and is raised as an Error.
inline Vector project_l2(const FESpace& space, const SparseMatrix& mass,
                         const std::function<double(const Vector&)>& f) {
    Eigen::SimplicialLDLT<SparseMatrix> solver(mass);
    FOEIM_REQUIRE(solver.info() == Eigen::Success, "project_l2: mass factorization failed");
    Vector c = solver.solve(l2_rhs(space, f));
    FOEIM_REQUIRE(solver.info() == Eigen::Success, "project_l2: mass solve failed");
    return c;
}

inline Vector project_l2(const FESpace& space, const std::function<double(const Vector&)>& f) {
    return project_l2(space, assemble_linear(space).mass, f);
}

struct NonlinearTerms {
    Vector g_vec; // int g(u_h) phi_j
    Vector f_vec; // sum_d int f^d(u_h) d phi_j / d x_d
    SparseMatrix dg; // int g'(u_h) phi_n phi_j
    SparseMatrix df; // sum_d int f^d'(u_h) phi_n d phi_j / d x_d
    bool has_jacobian = false;
};

/// Nonlinear vectors (and Jacobians on request) for the variational form
/// b(u, v) = int g(u) v + int f(u) . grad v, evaluated at the given field.
/// Non-finite evaluations are reported with the offending quadrature point.
inline NonlinearTerms assemble_nonlinear(const FESpace& space, const Vector& coeffs,
                                         const Nonlinearity* g,
                                         std::span<const Nonlinearity> flux,
                                         bool with_jacobian) {
    FOEIM_REQUIRE(coeffs.size() == space.free_dofs(), "assemble_nonlinear: field size mismatch");
    FOEIM_REQUIRE(flux.empty() || static_cast<int>(flux.size()) == space.dim(),
                  "assemble_nonlinear: flux must have one component per axis");
    NonlinearTerms out;
    out.g_vec = Vector::Zero(space.free_dofs());
    out.f_vec = Vector::Zero(space.free_dofs());
    out.has_jacobian = with_jacobian;

    const Matrix& B = space.ref_values();
    const Vector& w = space.cell_weights();
    const int nq = space.nq_cell();
    const int nloc = space.nloc();
    const int nc = space.mesh().cell_count();

    std::vector<Eigen::Triplet<double>> tg, tf;
    if (with_jacobian) {
        tg.reserve(static_cast<std::size_t>(nc) * nloc * nloc);
        if (!flux.empty()) tf.reserve(static_cast<std::size_t>(nc) * nloc * nloc);
    }

    auto check_finite = [&](double v, int c, int lq, const char* what) {
        if (!std::isfinite(v)) {
            const Index q = static_cast<Index>(c) * nq + lq;
            std::ostringstream os;
            os << "assemble_nonlinear: " << what << " is non-finite at quadrature point (";
            for (int d = 0; d < space.dim(); ++d)
                os << (d ? ", " : "") << space.quad_points()(q, d);
            os << ")";
            throw EvaluationError(os.str());
        }
    };

    Vector uloc, uq(nq), val(nq), der(nq);
    Matrix local(nloc, nloc);
    for (int c = 0; c < nc; ++c) {
        detail::gather_local(space, coeffs, c, uloc);
        uq.noalias() = B.transpose() * uloc;
        const auto& dofs = space.cell_dofs(c);

        if (g) {
            for (int lq = 0; lq < nq; ++lq) {
                val(lq) = g->value(uq(lq));
                check_finite(val(lq), c, lq, "g(u)");
            }
            const Vector gl = B * w.cwiseProduct(val);
            for (int j = 0; j < nloc; ++j) {
                const Index fj = space.free_index(dofs[j]);
                if (fj >= 0) out.g_vec(fj) += gl(j);
            }
            if (with_jacobian) {
                for (int lq = 0; lq < nq; ++lq) {
                    der(lq) = g->deriv(uq(lq));
                    check_finite(der(lq), c, lq, "g'(u)");
                }
                local.noalias() = B * (w.cwiseProduct(der)).asDiagonal() * B.transpose();
                detail::scatter_matrix(space, c, local, tg);
            }
        }

        for (std::size_t d = 0; d < flux.size(); ++d) {
            const Matrix& G = space.ref_gradients(static_cast<int>(d));
            for (int lq = 0; lq < nq; ++lq) {
                val(lq) = flux[d].value(uq(lq));
                check_finite(val(lq), c, lq, "f(u)");
            }
            const Vector fl = G * w.cwiseProduct(val);
            for (int j = 0; j < nloc; ++j) {
                const Index fj = space.free_index(dofs[j]);
                if (fj >= 0) out.f_vec(fj) += fl(j);
            }
            if (with_jacobian) {
                for (int lq = 0; lq < nq; ++lq) {
                    der(lq) = flux[d].deriv(uq(lq));
                    check_finite(der(lq), c, lq, "f'(u)");
                }
                local.noalias() = G * (w.cwiseProduct(der)).asDiagonal() * B.transpose();
                detail::scatter_matrix(space, c, local, tf);
            }
        }
    }

    if (with_jacobian) {
        out.dg.resize(space.free_dofs(), space.free_dofs());
        out.dg.setFromTriplets(tg.begin(), tg.end());
        out.df.resize(space.free_dofs(), space.free_dofs());
        out.df.setFromTriplets(tf.begin(), tf.end());
    }
    return out;
}

/// phi_n(x_m) for a list of points, rows = points, cols = free dofs.
struct BasisTrace {
    SparseMatrix values;
    std::vector<SparseMatrix> gradients; // one per axis when requested
};

inline BasisTrace trace_at_points(const FESpace& space, const Matrix& points,
                                  bool with_gradients = false) {
    FOEIM_REQUIRE(points.cols() == space.dim(), "trace_at_points: point dimension mismatch");
    const Index npts = points.rows();
    std::vector<Eigen::Triplet<double>> tv;
    std::vector<std::vector<Eigen::Triplet<double>>> tgrad(with_gradients ? space.dim() : 0);
    Vector vals;
    Matrix grads;
    for (Index m = 0; m < npts; ++m) {
        int cell = 0;
        space.eval_basis_at(points.row(m).transpose(), cell, vals,
                            with_gradients ? &grads : nullptr);
        const auto& dofs = space.cell_dofs(cell);
        for (std::size_t j = 0; j < dofs.size(); ++j) {
            const Index f = space.free_index(dofs[j]);
            if (f < 0) continue;
            tv.emplace_back(m, f, vals(static_cast<Index>(j)));
            for (std::size_t d = 0; d < tgrad.size(); ++d)
                tgrad[d].emplace_back(m, f, grads(static_cast<Index>(j), static_cast<Index>(d)));
        }
    }
    BasisTrace trace;
    trace.values.resize(npts, space.free_dofs());
    trace.values.setFromTriplets(tv.begin(), tv.end());
    for (auto& td : tgrad) {
        SparseMatrix gmat(npts, space.free_dofs());
        gmat.setFromTriplets(td.begin(), td.end());
        trace.gradients.push_back(std::move(gmat));
    }
    return trace;
}

/// Sparse evaluation operator from free-dof coefficients to values at all
/// quadrature points (row q = phi(x_q)). Shared by hyperreduction sampling
/// and the full-quadrature reduced operators.
inline SparseMatrix quad_eval_matrix(const FESpace& space) {
    std::vector<Eigen::Triplet<double>> tv;
    const int nq = space.nq_cell();
    tv.reserve(static_cast<std::size_t>(space.mesh().cell_count()) * nq * space.nloc());
    for (int c = 0; c < space.mesh().cell_count(); ++c) {
        const auto& dofs = space.cell_dofs(c);
        for (int lq = 0; lq < nq; ++lq) {
            const Index row = static_cast<Index>(c) * nq + lq;
            for (std::size_t j = 0; j < dofs.size(); ++j) {
                const Index f = space.free_index(dofs[j]);
                if (f >= 0) tv.emplace_back(row, f, space.ref_values()(static_cast<Index>(j), lq));
            }
        }
    }
    SparseMatrix E(space.quad_count(), space.free_dofs());
    E.setFromTriplets(tv.begin(), tv.end());
    return E;
}

/// Same as quad_eval_matrix but for one axis derivative.
inline SparseMatrix quad_grad_matrix(const FESpace& space, int axis) {
    std::vector<Eigen::Triplet<double>> tv;
    const int nq = space.nq_cell();
    tv.reserve(static_cast<std::size_t>(space.mesh().cell_count()) * nq * space.nloc());
    const Matrix& G = space.ref_gradients(axis);
    for (int c = 0; c < space.mesh().cell_count(); ++c) {
        const auto& dofs = space.cell_dofs(c);
        for (int lq = 0; lq < nq; ++lq) {
            const Index row = static_cast<Index>(c) * nq + lq;
            for (std::size_t j = 0; j < dofs.size(); ++j) {
                const Index f = space.free_index(dofs[j]);
                if (f >= 0) tv.emplace_back(row, f, G(static_cast<Index>(j), lq));
            }
        }
    }
    SparseMatrix E(space.quad_count(), space.free_dofs());
    E.setFromTriplets(tv.begin(), tv.end());
    return E;
}

/// Evaluate a field at arbitrary points by direct per-cell evaluation.
inline Vector sample_at_points(const FESpace& space, const Vector& coeffs, const Matrix& points) {
    Vector out(points.rows());
    Vector vals;
    for (Index m = 0; m < points.rows(); ++m) {
        int cell = 0;
        space.eval_basis_at(points.row(m).transpose(), cell, vals);
        const auto& dofs = space.cell_dofs(cell);
        double v = 0.0;
        for (std::size_t j = 0; j < dofs.size(); ++j) {
            const Index f = space.free_index(dofs[j]);
            if (f >= 0) v += vals(static_cast<Index>(j)) * coeffs(f);
        }
        out(m) = v;
    }
    return out;
}

} // namespace foeim
