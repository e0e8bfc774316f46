#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "disc/errors.hpp"
#include "disc/linalg.hpp"
#include "disc/rng.hpp"

namespace disc {

inline constexpr double kMembershipTol = 1e-9;

enum class BodyKind {
    strip,
    box,
    ball,
    halfspace,
    subspace,
    polytope,
    intersection,
    scaled,
    translated,
    stretched,
    preimage,
};

/// A closed convex set given through capabilities: membership, separation,
/// and (for the closed-form shapes) exact Euclidean projection. Bodies are
/// immutable after construction.
class ConvexBody {
public:
    virtual ~ConvexBody() = default;

    virtual int dim() const = 0;
    virtual BodyKind kind() const = 0;
    virtual bool contains(const Vector& x, double tol = kMembershipTol) const = 0;

    /// Central symmetry (x in K <=> -x in K). Operations that rely on it
    /// check this flag and reject rather than misbehave.
    virtual bool symmetric() const { return true; }

    /// Hyperplane separating x from the body (unit normal, <a,z> <= b for all
    /// members, <a,x> > b), or nullopt when x is inside within tolerance.
    virtual std::optional<Hyperplane> separate(const Vector& x) const {
        if (!has_exact_project()) throw Error("body provides neither projection nor separation");
        Vector p = project(x);
        const double gap = (x - p).norm();
        if (gap <= kMembershipTol) return std::nullopt;
        Vector normal = (x - p) / gap;
        return Hyperplane{normal, normal.dot(p)};
    }

    virtual bool has_exact_project() const { return false; }

    /// argmin{ ||x - y|| : y in body }; only for has_exact_project() bodies.
    virtual Vector project(const Vector& x) const {
        (void)x;
        throw Error("body has no exact projection");
    }

    /// Radius of the largest origin-centered ball known to fit inside.
    virtual std::optional<double> inner_radius() const { return std::nullopt; }
};

using BodyPtr = std::shared_ptr<const ConvexBody>;

// ---------------------------------------------------------------------------
// Closed-form primitives
// ---------------------------------------------------------------------------

/// {x : |<v,x>| <= lambda} with unit v.
class Strip : public ConvexBody {
public:
    Strip(Vector normal, double half_width) : normal_(std::move(normal)), half_width_(half_width) {
        const double len = normal_.norm();
        if (!(len > 0.0) || !normal_.allFinite())
            throw std::invalid_argument("Strip: normal must be nonzero and finite");
        if (std::abs(len - 1.0) > 1e-12) normal_ /= len;
        if (!(half_width_ >= 0.0)) throw std::invalid_argument("Strip: half_width must be >= 0");
    }

    int dim() const override { return static_cast<int>(normal_.size()); }
    BodyKind kind() const override { return BodyKind::strip; }

    bool contains(const Vector& x, double tol = kMembershipTol) const override {
        return std::abs(normal_.dot(x)) <= half_width_ + tol;
    }

    bool has_exact_project() const override { return true; }

    Vector project(const Vector& x) const override {
        const double t = normal_.dot(x);
        if (t > half_width_) return x - (t - half_width_) * normal_;
        if (t < -half_width_) return x - (t + half_width_) * normal_;
        return x;
    }

    std::optional<Hyperplane> separate(const Vector& x) const override {
        const double t = normal_.dot(x);
        if (t > half_width_ + kMembershipTol) return Hyperplane{normal_, half_width_};
        if (t < -half_width_ - kMembershipTol) return Hyperplane{-normal_, half_width_};
        return std::nullopt;
    }

    std::optional<double> inner_radius() const override {
        if (half_width_ > 0.0) return half_width_;
        return std::nullopt;
    }

    const Vector& normal() const { return normal_; }
    double half_width() const { return half_width_; }

private:
    Vector normal_;
    double half_width_;
};

/// Axis-aligned box [lower, upper]; entries may be +-infinity.
class Box : public ConvexBody {
public:
    Box(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
        if (lower_.size() != upper_.size())
            throw std::invalid_argument("Box: bound dimension mismatch");
        for (Eigen::Index i = 0; i < lower_.size(); ++i)
            if (!(lower_(i) <= upper_(i))) throw std::invalid_argument("Box: lower > upper");
    }

    /// The canonical cube [-1,1]^n.
    static std::shared_ptr<const Box> cube(int n) {
        return std::make_shared<Box>(Vector::Constant(n, -1.0), Vector::Constant(n, 1.0));
    }

    int dim() const override { return static_cast<int>(lower_.size()); }
    BodyKind kind() const override { return BodyKind::box; }

    bool contains(const Vector& x, double tol = kMembershipTol) const override {
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x(i) < lower_(i) - tol || x(i) > upper_(i) + tol) return false;
        return true;
    }

    bool symmetric() const override {
        for (Eigen::Index i = 0; i < lower_.size(); ++i)
            if (lower_(i) != -upper_(i)) return false;
        return true;
    }

    bool has_exact_project() const override { return true; }

    Vector project(const Vector& x) const override {
        return x.cwiseMax(lower_).cwiseMin(upper_);
    }

    std::optional<double> inner_radius() const override {
        double r = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < lower_.size(); ++i)
            r = std::min(r, std::min(upper_(i), -lower_(i)));
        if (r > 0.0) return r;
        return std::nullopt;
    }

    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }

private:
    Vector lower_;
    Vector upper_;
};

/// Origin-centered Euclidean ball.
class Ball : public ConvexBody {
public:
    Ball(int n, double radius) : n_(n), radius_(radius) {
        if (!(radius >= 0.0)) throw std::invalid_argument("Ball: radius must be >= 0");
    }

    int dim() const override { return n_; }
    BodyKind kind() const override { return BodyKind::ball; }

    bool contains(const Vector& x, double tol = kMembershipTol) const override {
        return x.norm() <= radius_ + tol;
    }

    bool has_exact_project() const override { return true; }

    Vector project(const Vector& x) const override {
        const double len = x.norm();
        if (len <= radius_) return x;
        if (len == 0.0) return x;
        return (radius_ / len) * x;
    }

    std::optional<double> inner_radius() const override {
        if (radius_ > 0.0) return radius_;
        return std::nullopt;
    }

    double radius() const { return radius_; }

private:
    int n_;
    double radius_;
};

/// {x : <v,x> <= b}. Not centrally symmetric; used by the measure checks.
class HalfspaceBody : public ConvexBody {
public:
    HalfspaceBody(Vector normal, double offset) : normal_(std::move(normal)), offset_(offset) {
        const double len = normal_.norm();
        if (!(len > 0.0)) throw std::invalid_argument("HalfspaceBody: normal must be nonzero");
        if (std::abs(len - 1.0) > 1e-12) {
            normal_ /= len;
            offset_ /= len;
        }
    }

    int dim() const override { return static_cast<int>(normal_.size()); }
    BodyKind kind() const override { return BodyKind::halfspace; }
    bool symmetric() const override { return false; }

    bool contains(const Vector& x, double tol = kMembershipTol) const override {
        return normal_.dot(x) <= offset_ + tol;
    }

    bool has_exact_project() const override { return true; }

    Vector project(const Vector& x) const override {
        const double t = normal_.dot(x);
        if (t <= offset_) return x;
        return x - (t - offset_) * normal_;
    }

    const Vector& normal() const { return normal_; }
    double offset() const { return offset_; }

private:
    Vector normal_;
    double offset_;
};

/// A linear subspace as a degenerate convex body (exact projection, empty
/// interior). Also the home of intersection constraints with half_width 0.
class SubspaceBody : public ConvexBody {
public:
    explicit SubspaceBody(Subspace h) : h_(std::move(h)) {}

    int dim() const override { return h_.ambient_dim(); }
    BodyKind kind() const override { return BodyKind::subspace; }

    bool contains(const Vector& x, double tol = kMembershipTol) const override {
        return (x - h_.project(x)).norm() <= tol;
    }

    bool has_exact_project() const override { return true; }
    Vector project(const Vector& x) const override { return h_.project(x); }

    const Subspace& subspace() const { return h_; }

private:
    Subspace h_;
};

// ---------------------------------------------------------------------------
// Composite bodies
// ---------------------------------------------------------------------------

/// Intersection of finitely many strips. Kept flat (rather than as a generic
/// Intersection) so projection engines can exploit the strip structure.
class PolytopeBody : public ConvexBody {
public:
    PolytopeBody(int n, std::vector<Strip> strips) : n_(n), strips_(std::move(strips)) {
        for (const auto& s : strips_)
            if (s.dim() != n_) throw std::invalid_argument("PolytopeBody: strip dimension mismatch");
    }

    int dim() const override { return n_; }
    BodyKind kind() const override { return BodyKind::polytope; }

    bool contains(const Vector& x, double tol = kMembershipTol) const override {
        for (const auto& s : strips_)
            if (!s.contains(x, tol)) return false;
        return true;
    }

    std::optional<Hyperplane> separate(const Vector& x) const override {
        const Strip* worst = nullptr;
        double worst_violation = kMembershipTol;
        for (const auto& s : strips_) {
            const double v = std::abs(s.normal().dot(x)) - s.half_width();
            if (v > worst_violation) {
                worst_violation = v;
                worst = &s;
            }
        }
        if (!worst) return std::nullopt;
        const double t = worst->normal().dot(x);
        if (t > 0) return Hyperplane{worst->normal(), worst->half_width()};
        return Hyperplane{-worst->normal(), worst->half_width()};
    }

    std::optional<double> inner_radius() const override {
        double r = std::numeric_limits<double>::infinity();
        for (const auto& s : strips_) r = std::min(r, s.half_width());
        if (strips_.empty() || !(r > 0.0)) return std::nullopt;
        return r;
    }

    const std::vector<Strip>& strips() const { return strips_; }

private:
    int n_;
    std::vector<Strip> strips_;
};

/// Intersection of arbitrary member bodies. With no members this is all of
/// R^n (contains everything, projection is the identity).
class Intersection : public ConvexBody {
public:
    Intersection(int n, std::vector<BodyPtr> members) : n_(n), members_(std::move(members)) {
        for (const auto& m : members_) {
            if (!m) throw std::invalid_argument("Intersection: null member");
            if (m->dim() != n_) throw std::invalid_argument("Intersection: member dimension mismatch");
        }
    }

    int dim() const override { return n_; }
    BodyKind kind() const override { return BodyKind::intersection; }

    bool contains(const Vector& x, double tol = kMembershipTol) const override {
        for (const auto& m : members_)
            if (!m->contains(x, tol)) return false;
        return true;
    }

    bool symmetric() const override {
        for (const auto& m : members_)
            if (!m->symmetric()) return false;
        return true;
    }

    std::optional<Hyperplane> separate(const Vector& x) const override {
        for (const auto& m : members_)
            if (auto h = m->separate(x)) return h;
        return std::nullopt;
    }

    bool has_exact_project() const override { return members_.empty(); }

    Vector project(const Vector& x) const override {
        if (members_.empty()) return x;
        return ConvexBody::project(x);
    }

    std::optional<double> inner_radius() const override {
        if (members_.empty()) return std::nullopt;
        double r = std::numeric_limits<double>::infinity();
        for (const auto& m : members_) {
            auto mr = m->inner_radius();
            if (!mr) return std::nullopt;
            r = std::min(r, *mr);
        }
        return r;
    }

    const std::vector<BodyPtr>& members() const { return members_; }

private:
    int n_;
    std::vector<BodyPtr> members_;
};

/// alpha * K for alpha > 0.
class ScaledBody : public ConvexBody {
public:
    ScaledBody(double alpha, BodyPtr inner) : alpha_(alpha), inner_(std::move(inner)) {
        if (!(alpha_ > 0.0)) throw std::invalid_argument("ScaledBody: scale must be > 0");
        if (!inner_) throw std::invalid_argument("ScaledBody: null inner body");
    }

    int dim() const override { return inner_->dim(); }
    BodyKind kind() const override { return BodyKind::scaled; }
    bool symmetric() const override { return inner_->symmetric(); }

    bool contains(const Vector& x, double tol = kMembershipTol) const override {
        return inner_->contains(x / alpha_, tol / alpha_);
    }

    bool has_exact_project() const override { return inner_->has_exact_project(); }

    Vector project(const Vector& x) const override { return alpha_ * inner_->project(x / alpha_); }

    std::optional<Hyperplane> separate(const Vector& x) const override {
        auto h = inner_->separate(x / alpha_);
        if (!h) return std::nullopt;
        return Hyperplane{h->normal, alpha_ * h->offset};
    }

    std::optional<double> inner_radius() const override {
        auto r = inner_->inner_radius();
        if (!r) return std::nullopt;
        return alpha_ * *r;
    }

    double scale() const { return alpha_; }
    const BodyPtr& inner() const { return inner_; }

private:
    double alpha_;
    BodyPtr inner_;
};

/// c + K. Central symmetry is lost; symmetry-requiring operations reject it.
class TranslatedBody : public ConvexBody {
public:
    TranslatedBody(Vector center, BodyPtr inner) : c_(std::move(center)), inner_(std::move(inner)) {
        if (!inner_) throw std::invalid_argument("TranslatedBody: null inner body");
        if (c_.size() != inner_->dim())
            throw std::invalid_argument("TranslatedBody: center dimension mismatch");
    }

    int dim() const override { return inner_->dim(); }
    BodyKind kind() const override { return BodyKind::translated; }
    bool symmetric() const override { return false; }

    bool contains(const Vector& x, double tol = kMembershipTol) const override {
        return inner_->contains(x - c_, tol);
    }

    bool has_exact_project() const override { return inner_->has_exact_project(); }
    Vector project(const Vector& x) const override { return c_ + inner_->project(x - c_); }

    std::optional<Hyperplane> separate(const Vector& x) const override {
        auto h = inner_->separate(x - c_);
        if (!h) return std::nullopt;
        return Hyperplane{h->normal, h->offset + h->normal.dot(c_)};
    }

    const Vector& center() const { return c_; }
    const BodyPtr& inner() const { return inner_; }

private:
    Vector c_;
    BodyPtr inner_;
};

/// Image of K under an invertible diagonal map x -> diag(d) x. Exact
/// projection survives only when |d_i| is constant (scaling times a
/// reflection); otherwise the body is oracle-only.
class StretchedBody : public ConvexBody {
public:
    StretchedBody(Vector diag, BodyPtr inner) : d_(std::move(diag)), inner_(std::move(inner)) {
        if (!inner_) throw std::invalid_argument("StretchedBody: null inner body");
        if (d_.size() != inner_->dim())
            throw std::invalid_argument("StretchedBody: diag dimension mismatch");
        for (Eigen::Index i = 0; i < d_.size(); ++i)
            if (d_(i) == 0.0 || !std::isfinite(d_(i)))
                throw std::invalid_argument("StretchedBody: diag entries must be finite and nonzero");
        min_abs_ = d_.cwiseAbs().minCoeff();
        max_abs_ = d_.cwiseAbs().maxCoeff();
    }

    int dim() const override { return inner_->dim(); }
    BodyKind kind() const override { return BodyKind::stretched; }
    bool symmetric() const override { return inner_->symmetric(); }

    bool contains(const Vector& x, double tol = kMembershipTol) const override {
        return inner_->contains(x.cwiseQuotient(d_), tol / max_abs_);
    }

    bool has_exact_project() const override {
        return inner_->has_exact_project() && max_abs_ - min_abs_ <= 1e-14 * max_abs_;
    }

    Vector project(const Vector& x) const override {
        if (!has_exact_project()) return ConvexBody::project(x);
        return d_.cwiseProduct(inner_->project(x.cwiseQuotient(d_)));
    }

    std::optional<Hyperplane> separate(const Vector& x) const override {
        auto h = inner_->separate(x.cwiseQuotient(d_));
        if (!h) return std::nullopt;
        Vector a = h->normal.cwiseQuotient(d_);
        const double len = a.norm();
        return Hyperplane{a / len, h->offset / len};
    }

    std::optional<double> inner_radius() const override {
        auto r = inner_->inner_radius();
        if (!r) return std::nullopt;
        return min_abs_ * *r;
    }

    const Vector& diag() const { return d_; }
    const BodyPtr& inner() const { return inner_; }

private:
    Vector d_;
    BodyPtr inner_;
    double min_abs_ = 0.0;
    double max_abs_ = 0.0;
};

// ---------------------------------------------------------------------------
// Structural helpers
// ---------------------------------------------------------------------------

/// Image of `body` under x -> diag(d) x, rewritten structurally where the
/// image has closed form (strips, boxes, subspaces and their intersections)
/// so that projection engines keep their exact routes.
inline BodyPtr stretched_image(const BodyPtr& body, const Vector& d) {
    switch (body->kind()) {
        case BodyKind::strip: {
            const auto& s = static_cast<const Strip&>(*body);
            Vector a = s.normal().cwiseQuotient(d);
            const double len = a.norm();
            return std::make_shared<Strip>(a / len, s.half_width() / len);
        }
        case BodyKind::polytope: {
            const auto& p = static_cast<const PolytopeBody&>(*body);
            std::vector<Strip> strips;
            strips.reserve(p.strips().size());
            for (const auto& s : p.strips()) {
                Vector a = s.normal().cwiseQuotient(d);
                const double len = a.norm();
                strips.emplace_back(a / len, s.half_width() / len);
            }
            return std::make_shared<PolytopeBody>(p.dim(), std::move(strips));
        }
        case BodyKind::box: {
            const auto& b = static_cast<const Box&>(*body);
            Vector lo = b.lower().cwiseProduct(d), hi = b.upper().cwiseProduct(d);
            for (Eigen::Index i = 0; i < d.size(); ++i)
                if (d(i) < 0) std::swap(lo(i), hi(i));
            return std::make_shared<Box>(std::move(lo), std::move(hi));
        }
        case BodyKind::subspace: {
            const auto& sb = static_cast<const SubspaceBody&>(*body);
            std::vector<Vector> normals;
            for (const auto& v : sb.subspace().constraint_normals())
                normals.push_back(v.cwiseQuotient(d).normalized());
            if (normals.empty() && sb.subspace().dim() < sb.dim()) {
                // Basis-defined subspace: map the basis instead.
                std::vector<Vector> span;
                for (Eigen::Index j = 0; j < sb.subspace().basis().cols(); ++j)
                    span.push_back(d.cwiseProduct(sb.subspace().basis().col(j)));
                return std::make_shared<SubspaceBody>(Subspace::from_span(sb.dim(), span));
            }
            return std::make_shared<SubspaceBody>(
                Subspace::from_constraints(sb.dim(), normals));
        }
        case BodyKind::intersection: {
            const auto& ix = static_cast<const Intersection&>(*body);
            std::vector<BodyPtr> members;
            members.reserve(ix.members().size());
            for (const auto& m : ix.members()) members.push_back(stretched_image(m, d));
            return std::make_shared<Intersection>(ix.dim(), std::move(members));
        }
        case BodyKind::scaled: {
            const auto& sc = static_cast<const ScaledBody&>(*body);
            return std::make_shared<ScaledBody>(sc.scale(), stretched_image(sc.inner(), d));
        }
        default:
            return std::make_shared<StretchedBody>(d, body);
    }
}

/// Flattens `body` into a list of exact-projectable cells for alternating
/// projection, when the whole body is built from such cells. Returns nullopt
/// as soon as any part is oracle-only.
inline bool collect_projection_cells(const BodyPtr& body, std::vector<BodyPtr>& out) {
    if (!body) return false;
    switch (body->kind()) {
        case BodyKind::polytope: {
            const auto& p = static_cast<const PolytopeBody&>(*body);
            for (const auto& s : p.strips()) out.push_back(std::make_shared<Strip>(s));
            return true;
        }
        case BodyKind::intersection: {
            const auto& ix = static_cast<const Intersection&>(*body);
            for (const auto& m : ix.members())
                if (!collect_projection_cells(m, out)) return false;
            return true;
        }
        case BodyKind::scaled: {
            const auto& sc = static_cast<const ScaledBody&>(*body);
            if (sc.has_exact_project()) {
                out.push_back(body);
                return true;
            }
            // alpha * (A n B) = (alpha A) n (alpha B)
            std::vector<BodyPtr> innercells;
            if (!collect_projection_cells(sc.inner(), innercells)) return false;
            for (auto& c : innercells)
                out.push_back(std::make_shared<ScaledBody>(sc.scale(), std::move(c)));
            return true;
        }
        default:
            if (body->has_exact_project()) {
                out.push_back(body);
                return true;
            }
            return false;
    }
}

/// A point of a symmetric body drawn by shooting a ray from the origin in a
/// Gaussian direction and picking a uniform point on the inside segment.
/// Only membership is consulted, so samples are independent of any
/// projection code they are used to certify.
inline Vector random_member(const ConvexBody& body, SeededRng& rng, double reach = 0.0) {
    const int n = body.dim();
    Vector w(n);
    for (int i = 0; i < n; ++i) w(i) = rng.gaussian();
    const double len = w.norm();
    if (len == 0.0) return Vector::Zero(n);
    w /= len;
    double hi = (reach > 0.0) ? reach : 1.0;
    if (reach <= 0.0) {
        int doublings = 0;
        while (body.contains(hi * w) && doublings++ < 60) hi *= 2.0;
    }
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (body.contains(mid * w))
            lo = mid;
        else
            hi = mid;
    }
    return (rng.uniform() * lo) * w;
}

// ---------------------------------------------------------------------------
// Diagonal stretch maps
// ---------------------------------------------------------------------------

/// The invertible diagonal map F used to re-center a translated cube problem:
/// F(x)_i = s_i x_i / (1 - |c_i|) where s_i is the sign of c_i. F maps
/// {x : |x_i| <= 1 - c_i} (sign-normalized) onto the cube.
struct StretchMap {
    Vector scale;  // F(x)_i = scale_i * x_i

    Vector apply(const Vector& x) const { return scale.cwiseProduct(x); }
    Vector invert(const Vector& y) const { return y.cwiseQuotient(scale); }
};

inline StretchMap stretch_transform(const Vector& c) {
    Vector scale(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (!(std::abs(c(i)) < 1.0)) throw CenterOnBoundary(static_cast<int>(i), c(i));
        const double s = (c(i) < 0.0) ? -1.0 : 1.0;
        scale(i) = s / (1.0 - std::abs(c(i)));
    }
    return StretchMap{std::move(scale)};
}

}  // namespace disc
