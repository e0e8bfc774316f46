#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "disc/bodies.hpp"
#include "disc/gaussian.hpp"
#include "disc/projection.hpp"

using namespace disc;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

BodyPtr random_polytope(int n, int strips, SeededRng& rng, double lo = 0.8, double hi = 2.5) {
    std::vector<Strip> ss;
    for (int i = 0; i < strips; ++i) {
        Vector v = sample_gaussian(n, rng);
        v.normalize();
        ss.emplace_back(v, rng.uniform(lo, hi));
    }
    return std::make_shared<PolytopeBody>(n, std::move(ss));
}

}  // namespace

TEST_CASE("strip projection clips along the normal") {
    Strip s(vec2(1.0, 0.0), 1.0);
    CHECK(s.project(vec2(3.0, 4.0)) == vec2(1.0, 4.0));
    CHECK(s.project(vec2(-3.0, 4.0)) == vec2(-1.0, 4.0));
    CHECK(s.project(vec2(0.5, 9.0)) == vec2(0.5, 9.0));  // members are fixed
    CHECK(s.contains(vec2(0.5, 100.0)));
    CHECK_FALSE(s.contains(vec2(1.1, 0.0)));
}

TEST_CASE("box projection clamps componentwise") {
    auto cube = Box::cube(2);
    CHECK(cube->project(vec2(2.0, -0.5)) == vec2(1.0, -0.5));
    CHECK(cube->contains(vec2(1.0, 1.0)));
    CHECK_FALSE(cube->contains(vec2(1.1, 0.0)));
    CHECK(cube->symmetric());
    CHECK(Box(vec2(-0.5, 0.0), vec2(0.5, 1.0)).symmetric() == false);
    CHECK(*cube->inner_radius() == 1.0);
}

TEST_CASE("ball projection is radial") {
    Ball b(2, 1.0);
    CHECK((b.project(vec2(3.0, 4.0)) - vec2(0.6, 0.8)).norm() <= 1e-15);
    CHECK(b.project(vec2(0.1, 0.2)) == vec2(0.1, 0.2));
}

TEST_CASE("subspace body projects orthogonally and {0} is representable") {
    const int n = 4;
    std::vector<Vector> normals;
    for (int i = 0; i < n; ++i) {
        Vector e = Vector::Zero(n);
        e(i) = 1.0;
        normals.push_back(e);
    }
    SubspaceBody origin(Subspace::from_constraints(n, normals));
    SeededRng rng(5, 0);
    const Vector x = sample_gaussian(n, rng);
    CHECK(origin.project(x).norm() == 0.0);
    CHECK(origin.contains(Vector::Zero(n)));
    CHECK_FALSE(origin.contains(x));

    SubspaceBody plane(Subspace::axis_subspace(n, {0, 1}));
    const Vector p = plane.project(x);
    CHECK(p(0) == 0.0);
    CHECK(p(1) == 0.0);
    CHECK(p(2) == x(2));
}

TEST_CASE("projection properties on random primitive bodies") {
    SeededRng rng(17, 0);
    const int n = 6;
    std::vector<BodyPtr> bodies = {
        std::make_shared<Ball>(n, 1.3),
        Box::cube(n),
        std::make_shared<Strip>(sample_gaussian(n, rng).normalized(), 0.9),
        std::make_shared<SubspaceBody>(Subspace::axis_subspace(n, {1, 4})),
        std::make_shared<ScaledBody>(0.7, std::make_shared<Ball>(n, 2.0)),
    };
    for (const auto& body : bodies) {
        for (int t = 0; t < 50; ++t) {
            const Vector x = 3.0 * sample_gaussian(n, rng);
            const Vector y = 3.0 * sample_gaussian(n, rng);
            const Vector px = body->project(x);
            const Vector py = body->project(y);
            // idempotence
            CHECK((body->project(px) - px).norm() <= 1e-9);
            // nonexpansiveness
            CHECK((px - py).norm() <= (x - y).norm() + 1e-9);
            // symmetry of the projection map for symmetric bodies
            CHECK((body->project(-x) + px).norm() <= 1e-9);
            // membership of the projection
            CHECK(body->contains(px, 1e-9));
        }
    }
}

TEST_CASE("convexity of membership: midpoints of members are members") {
    SeededRng rng(23, 0);
    const int n = 5;
    auto poly = random_polytope(n, 4, rng);
    std::vector<BodyPtr> members = {poly, std::make_shared<Ball>(n, 1.4), Box::cube(n)};
    auto body = std::make_shared<Intersection>(n, members);
    for (int t = 0; t < 200; ++t) {
        const Vector a = random_member(*body, rng);
        const Vector b = random_member(*body, rng);
        CHECK(body->contains(0.5 * (a + b), 1e-9));
        CHECK(body->contains(-a, 1e-9));  // symmetry of the intersection
    }
}

TEST_CASE("separation returns valid cutting planes") {
    SeededRng rng(29, 0);
    const int n = 4;
    auto poly = random_polytope(n, 3, rng);
    for (int t = 0; t < 100; ++t) {
        const Vector x = 4.0 * sample_gaussian(n, rng);
        auto h = poly->separate(x);
        if (!poly->contains(x)) {
            REQUIRE(h.has_value());
            CHECK(h->normal.dot(x) > h->offset);
            for (int s = 0; s < 50; ++s) {
                const Vector z = random_member(*poly, rng);
                CHECK(h->normal.dot(z) <= h->offset + 1e-9);
            }
        } else {
            CHECK_FALSE(h.has_value());
        }
    }
}

TEST_CASE("scaled, translated, stretched wrappers") {
    SECTION("scaling commutes with projection") {
        ScaledBody half(0.5, std::make_shared<Ball>(2, 1.0));
        CHECK((half.project(vec2(3.0, 4.0)) - vec2(0.3, 0.4)).norm() <= 1e-12);
        CHECK(half.contains(vec2(0.3, 0.4)));
        CHECK(*half.inner_radius() == Catch::Approx(0.5));
    }
    SECTION("translation moves the body and drops the symmetry flag") {
        TranslatedBody t(vec2(1.0, 0.0), std::make_shared<Ball>(2, 1.0));
        CHECK_FALSE(t.symmetric());
        CHECK(t.contains(vec2(1.9, 0.0)));
        CHECK_FALSE(t.contains(vec2(-0.5, 0.0)));
        CHECK((t.project(vec2(3.0, 0.0)) - vec2(2.0, 0.0)).norm() <= 1e-12);
    }
    SECTION("stretching rescales membership coordinates") {
        Vector d = vec2(2.0, 1.0);
        StretchedBody st(d, std::make_shared<Ball>(2, 1.0));
        CHECK(st.contains(vec2(2.0, 0.0)));
        CHECK_FALSE(st.contains(vec2(0.0, 1.5)));
        CHECK_FALSE(st.has_exact_project());
        CHECK(*st.inner_radius() == Catch::Approx(1.0));
        auto h = st.separate(vec2(4.0, 0.0));
        REQUIRE(h.has_value());
        CHECK(h->normal.dot(vec2(4.0, 0.0)) > h->offset);
        CHECK(h->normal.dot(vec2(2.0, 0.0)) <= h->offset + 1e-9);
    }
}

TEST_CASE("stretched_image rewrites structural bodies exactly") {
    SeededRng rng(31, 0);
    const int n = 5;
    Vector d(n);
    for (int i = 0; i < n; ++i) d(i) = rng.uniform(0.5, 2.0) * (rng.uniform() < 0.5 ? -1.0 : 1.0);

    auto poly = random_polytope(n, 4, rng);
    auto image = stretched_image(poly, d);
    REQUIRE(image->kind() == BodyKind::polytope);
    for (int t = 0; t < 300; ++t) {
        const Vector x = 2.0 * sample_gaussian(n, rng);
        CHECK(image->contains(x, 1e-9) == poly->contains(x.cwiseQuotient(d), 1e-9));
    }

    auto ball = std::make_shared<Ball>(n, 1.0);
    auto ball_image = stretched_image(ball, d);
    CHECK(ball_image->kind() == BodyKind::stretched);  // no closed form; wrapper
}

TEST_CASE("minkowski norm: ball, origin, lineality") {
    Ball b(2, 1.0);
    CHECK(minkowski_norm(b, vec2(1.2, 1.6)) == Catch::Approx(2.0).epsilon(1e-8));
    CHECK(minkowski_norm(b, vec2(0.0, 0.0)) == 0.0);
    Strip s(vec2(1.0, 0.0), 1.0);
    CHECK(minkowski_norm(s, vec2(0.0, 5.0)) == 0.0);
    CHECK(minkowski_norm(s, vec2(3.0, 0.0)) == Catch::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("stretch transform matches the re-centering construction") {
    SECTION("zero center is the identity") {
        const auto f = stretch_transform(Vector::Zero(3));
        SeededRng rng(3, 0);
        const Vector x = sample_gaussian(3, rng);
        CHECK((f.apply(x) - x).norm() == 0.0);
    }
    SECTION("center 0.5 stretches by a factor of two") {
        Vector c = vec2(0.5, 0.0);
        const auto f = stretch_transform(c);
        CHECK(f.apply(vec2(1.0, 1.0)) == vec2(2.0, 1.0));
        // c + F^{-1} maps working +-1 coordinates onto the cube boundary
        CHECK(c + f.invert(vec2(1.0, -1.0)) == vec2(1.0, -1.0));
    }
    SECTION("round trip and boundary rejection") {
        SeededRng rng(37, 0);
        Vector c(6);
        for (int i = 0; i < 6; ++i) c(i) = rng.uniform(-0.95, 0.95);
        const auto f = stretch_transform(c);
        for (int t = 0; t < 50; ++t) {
            const Vector x = sample_gaussian(6, rng);
            CHECK((f.invert(f.apply(x)) - x).norm() <= 1e-12 * (1.0 + x.norm()));
        }
        Vector bad = c;
        bad(2) = 1.0;
        CHECK_THROWS_AS(stretch_transform(bad), CenterOnBoundary);
    }
    SECTION("negative centers map working +1 to the -1 face") {
        Vector c = vec2(-0.5, 0.25);
        const auto f = stretch_transform(c);
        const Vector mapped = c + f.invert(vec2(1.0, 1.0));
        CHECK(mapped(0) == Catch::Approx(-1.0));
        CHECK(mapped(1) == Catch::Approx(1.0));
    }
}

TEST_CASE("orthonormal basis via factorization") {
    SECTION("already orthonormal input is preserved in span") {
        Vector e1 = Vector::Zero(3), e2 = Vector::Zero(3);
        e1(0) = 1.0;
        e2(1) = 1.0;
        auto basis = orthonormal_basis({e1, e2});
        REQUIRE(basis.size() == 2);
        for (const auto& b : basis) {
            CHECK(std::abs(b(2)) <= 1e-12);
            CHECK(b.norm() == Catch::Approx(1.0).epsilon(1e-12));
        }
    }
    SECTION("gram matrix of the output is the identity") {
        Vector a(3), b(3);
        a << 1.0, 1.0, 0.0;
        b << 1.0, -1.0, 0.0;
        auto basis = orthonormal_basis({a, b});
        REQUIRE(basis.size() == 2);
        CHECK(std::abs(basis[0].dot(basis[1])) <= 1e-12);
        CHECK(basis[0].norm() == Catch::Approx(1.0).epsilon(1e-12));
        for (const auto& v : basis) CHECK(std::abs(v(2)) <= 1e-12);
    }
    SECTION("rank deficiency is detected") {
        Vector a = vec2(1.0, 0.0), b = vec2(2.0, 0.0);
        auto basis = orthonormal_basis({a, b});
        REQUIRE(basis.size() == 1);
        CHECK(std::abs(std::abs(basis[0](0)) - 1.0) <= 1e-12);
    }
}

TEST_CASE("subspace construction invariants") {
    SeededRng rng(41, 0);
    const int n = 9, m = 3;
    std::vector<Vector> normals;
    for (int i = 0; i < m; ++i) normals.push_back(sample_gaussian(n, rng));
    const Subspace h = Subspace::from_constraints(n, normals);
    CHECK(h.dim() == n - m);
    const Matrix gram = h.basis().transpose() * h.basis();
    CHECK((gram - Matrix::Identity(h.dim(), h.dim())).cwiseAbs().maxCoeff() <= 1e-10);
    for (const auto& v : normals)
        for (Eigen::Index j = 0; j < h.basis().cols(); ++j)
            CHECK(std::abs(v.dot(h.basis().col(j))) <= 1e-10 * v.norm());
}
