#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <stdexcept>
#include <vector>

namespace disc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Halfspace {x : <normal, x> <= offset} with unit normal.
struct Hyperplane {
    Vector normal;
    double offset = 0.0;
};

inline bool is_finite(const Vector& x) { return x.allFinite(); }

/// Orthonormal basis of span(vectors) via SVD. Directions with singular
/// value below rank_tol * sigma_max are dropped.
inline std::vector<Vector> orthonormal_basis(const std::vector<Vector>& vectors,
                                             double rank_tol = 1e-10) {
    if (vectors.empty()) return {};
    const Eigen::Index n = vectors.front().size();
    Matrix a(n, static_cast<Eigen::Index>(vectors.size()));
    for (std::size_t j = 0; j < vectors.size(); ++j) {
        if (vectors[j].size() != n)
            throw std::invalid_argument("orthonormal_basis: dimension mismatch");
        a.col(static_cast<Eigen::Index>(j)) = vectors[j];
    }
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return {};
    std::vector<Vector> basis;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > rank_tol * sv(0)) basis.push_back(svd.matrixU().col(i));
    }
    return basis;
}

/// Subspace H of R^n, held as both the defining equations <v_i, x> = 0 and an
/// orthonormal basis of H itself.
class Subspace {
public:
    /// Null space of the given constraint normals (m may be 0 => all of R^n).
    static Subspace from_constraints(int n, const std::vector<Vector>& normals) {
        Subspace h;
        h.dim_ambient_ = n;
        h.normals_ = normals;
        if (normals.empty()) {
            h.basis_ = Matrix::Identity(n, n);
            return h;
        }
        Matrix a(static_cast<Eigen::Index>(normals.size()), n);
        for (std::size_t i = 0; i < normals.size(); ++i) {
            if (normals[i].size() != n)
                throw std::invalid_argument("Subspace: constraint dimension mismatch");
            a.row(static_cast<Eigen::Index>(i)) = normals[i].transpose();
        }
        Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        Eigen::Index rank = 0;
        const double cut = (sv.size() > 0 ? sv(0) : 0.0) * 1e-10;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > cut) ++rank;
        h.basis_ = svd.matrixV().rightCols(n - rank);
        return h;
    }

    /// Span of the given (not necessarily orthonormal) vectors.
    static Subspace from_span(int n, const std::vector<Vector>& spanning) {
        Subspace h;
        h.dim_ambient_ = n;
        auto basis = orthonormal_basis(spanning);
        h.basis_.resize(n, static_cast<Eigen::Index>(basis.size()));
        for (std::size_t j = 0; j < basis.size(); ++j)
            h.basis_.col(static_cast<Eigen::Index>(j)) = basis[j];
        return h;
    }

    static Subspace full(int n) { return from_constraints(n, {}); }

    /// Coordinates i in `zeroed` are pinned to 0; the rest span H.
    static Subspace axis_subspace(int n, const std::vector<int>& zeroed) {
        std::vector<Vector> normals;
        normals.reserve(zeroed.size());
        for (int i : zeroed) {
            Vector e = Vector::Zero(n);
            e(i) = 1.0;
            normals.push_back(std::move(e));
        }
        return from_constraints(n, normals);
    }

    int ambient_dim() const { return dim_ambient_; }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Matrix& basis() const { return basis_; }
    const std::vector<Vector>& constraint_normals() const { return normals_; }

    /// Orthogonal projection onto H.
    Vector project(const Vector& x) const { return basis_ * (basis_.transpose() * x); }

    bool contains(const Vector& x, double tol = 1e-10) const {
        return (x - project(x)).norm() <= tol * (1.0 + x.norm());
    }

private:
    int dim_ambient_ = 0;
    Matrix basis_;                 // n x dim, orthonormal columns
    std::vector<Vector> normals_;  // defining equations, possibly empty
};

}  // namespace disc
