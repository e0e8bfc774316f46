#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "disc/bodies.hpp"
#include "disc/gaussian.hpp"
#include "disc/partial_coloring.hpp"

namespace disc {

struct VectorFamily {
    Matrix v;  // n x m, column i is v_i

    static VectorFamily from_columns(const std::vector<Vector>& cols) {
        if (cols.empty()) throw std::invalid_argument("VectorFamily: no vectors");
        VectorFamily f;
        f.v.resize(cols.front().size(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (cols[i].size() != f.v.rows())
                throw std::invalid_argument("VectorFamily: dimension mismatch");
            f.v.col(static_cast<Eigen::Index>(i)) = cols[i];
        }
        return f;
    }

    int n() const { return static_cast<int>(v.rows()); }
    int m() const { return static_cast<int>(v.cols()); }

    /// beta = max_i ||v_i||^2
    double beta() const {
        double b = 0.0;
        for (Eigen::Index i = 0; i < v.cols(); ++i) b = std::max(b, v.col(i).squaredNorm());
        return b;
    }

    double max_column_norm() const { return std::sqrt(beta()); }
};

/// Q = {x in R^m : sum_i x_i v_i in K}. Membership forward-maps through V;
/// separation pulls back: if (a, b) separates Vx from K then (V^T a, b)
/// separates x from Q. The kernel of V is a lineality space of Q. Tolerances
/// passed to contains() are interpreted in the image (K-side) scale so that
/// the oracle-projection certificate stays paired with inner_radius().
class PreimageBody : public ConvexBody {
public:
    PreimageBody(VectorFamily family, BodyPtr target)
        : family_(std::move(family)), target_(std::move(target)) {
        if (!target_) throw std::invalid_argument("PreimageBody: null target");
        if (!target_->symmetric())
            throw std::invalid_argument("PreimageBody: target must be symmetric");
        if (target_->dim() != family_.n())
            throw std::invalid_argument("PreimageBody: target dimension mismatch");
        Eigen::JacobiSVD<Matrix> svd(family_.v);
        sigma_max_ = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    }

    int dim() const override { return family_.m(); }
    BodyKind kind() const override { return BodyKind::preimage; }
    bool symmetric() const override { return true; }

    bool contains(const Vector& x, double tol = kMembershipTol) const override {
        return target_->contains(family_.v * x, tol * std::max(sigma_max_, 1e-300));
    }

    std::optional<Hyperplane> separate(const Vector& x) const override {
        auto h = target_->separate(family_.v * x);
        if (!h) return std::nullopt;
        Vector a = family_.v.transpose() * h->normal;
        const double len = a.norm();
        if (len <= 1e-300) return std::nullopt;  // cannot happen for symmetric targets
        return Hyperplane{a / len, h->offset / len};
    }

    std::optional<double> inner_radius() const override {
        auto r = target_->inner_radius();
        if (!r || sigma_max_ <= 0.0) return std::nullopt;
        return *r / sigma_max_;
    }

    const VectorFamily& family() const { return family_; }
    const BodyPtr& target() const { return target_; }
    double sigma_max() const { return sigma_max_; }

private:
    VectorFamily family_;
    BodyPtr target_;
    double sigma_max_ = 0.0;
};

inline std::shared_ptr<const PreimageBody> build_preimage(VectorFamily family, BodyPtr target) {
    return std::make_shared<PreimageBody>(std::move(family), std::move(target));
}

/// Spectral decomposition of sum_i v_i v_i^T = sum_j u_j^2 b_j b_j^T with an
/// orthonormal basis b and scales u (descending). The total variance is
/// preserved: sum u_j^2 = sum ||v_i||^2.
struct PrincipalAxes {
    Matrix basis;   // n x n, column j is b_j
    Vector scales;  // u, descending, >= 0
};

inline PrincipalAxes principal_axes(const VectorFamily& family) {
    const Matrix gram = family.v * family.v.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    const int n = family.n();
    PrincipalAxes axes;
    axes.basis.resize(n, n);
    axes.scales.resize(n);
    // Eigen orders ascending; flip to descending.
    for (int j = 0; j < n; ++j) {
        const int src = n - 1 - j;
        axes.scales(j) = std::sqrt(std::max(0.0, eig.eigenvalues()(src)));
        axes.basis.col(j) = eig.eigenvectors().col(src);
    }
    return axes;
}

struct MeasureBound {
    double crude = 0.0;    // gamma_K * exp(-beta m)
    double sharper = 0.0;  // gamma_K / prod max(1, u_j)
};

/// Lower bounds on gamma_m(Q) from gamma_n(K): the e^{-beta m} form and the
/// sharper product form over the principal-axis scales.
inline MeasureBound measure_lower_bound(const VectorFamily& family, double gamma_k) {
    if (!(gamma_k > 0.0 && gamma_k <= 1.0))
        throw std::invalid_argument("measure_lower_bound: gamma_K must be in (0,1]");
    MeasureBound b;
    b.crude = gamma_k * std::exp(-family.beta() * family.m());
    const PrincipalAxes axes = principal_axes(family);
    double big_lambda = 1.0;
    for (Eigen::Index j = 0; j < axes.scales.size(); ++j)
        big_lambda *= std::max(1.0, axes.scales(j));
    b.sharper = gamma_k / big_lambda;
    return b;
}

struct BalanceResult {
    Vector y;             // in [-1,1]^m
    Vector image;         // sum_i y_i v_i
    PartialColoring coloring;
    bool in_target = false;
    bool norm_regime_ok = false;  // all ||v_i|| <= 1/40
};

/// Balance the family into K: run the partial coloring on the preimage body
/// Q in dimension m and push the result forward.
inline BalanceResult balance_vectors(const VectorFamily& family, BodyPtr K,
                                     const AlgorithmConfig& cfg) {
    BalanceResult out;
    out.norm_regime_ok = family.max_column_norm() <= 1.0 / 40.0 + 1e-12;
    auto q = build_preimage(family, K);
    out.coloring = partial_color(q, cfg);
    if (out.coloring.failure) return out;
    out.y = out.coloring.y;
    out.image = family.v * out.y;
    out.in_target = K->contains(out.image, cfg.membership_tol * std::max(1.0, q->sigma_max()));
    return out;
}

/// Pr[(l_1 x_1, ..., l_n x_n) in K] >= Pr[x in K] / prod max(1, |l_i|) for
/// symmetric convex K, on shared samples.
inline CheckReport check_scaling_lemma(const ConvexBody& K, const Vector& lambda,
                                       long long n_samples, const SeededRng& rng,
                                       int n_threads = 1) {
    if (!K.symmetric()) throw std::invalid_argument("check_scaling_lemma: K must be symmetric");
    const int n = K.dim();
    if (lambda.size() != n)
        throw std::invalid_argument("check_scaling_lemma: lambda dimension mismatch");
    struct Counts {
        long long scaled = 0, plain = 0;
        Counts& operator+=(const Counts& o) {
            scaled += o.scaled;
            plain += o.plain;
            return *this;
        }
    };
    const Counts total = detail::sharded_reduce<Counts>(
        n_samples, rng, n_threads, [&](SeededRng& shard, long long count) {
            Counts c;
            Vector x(n);
            for (long long i = 0; i < count; ++i) {
                for (int j = 0; j < n; ++j) x(j) = shard.gaussian();
                if (K.contains(lambda.cwiseProduct(x))) ++c.scaled;
                if (K.contains(x)) ++c.plain;
            }
            return c;
        });
    double big_lambda = 1.0;
    for (int i = 0; i < n; ++i) big_lambda *= std::max(1.0, std::abs(lambda(i)));
    const auto es = make_estimate(total.scaled, n_samples);
    const auto ep = make_estimate(total.plain, n_samples);
    CheckReport r;
    r.check = "scaling";
    r.estimate = es.p_hat;
    r.bound = ep.p_hat / big_lambda;
    r.std_err = std::sqrt(es.std_err * es.std_err +
                          (ep.std_err / big_lambda) * (ep.std_err / big_lambda));
    r.pass = r.estimate >= r.bound - 3.0 * r.std_err;
    r.seed = rng.seed();
    r.n_samples = n_samples;
    return r;
}

}  // namespace disc
