#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>

#include "helpers.hpp"
#include "pnmc/pseudo_euclidean.hpp"

using namespace pnmc;
using pnmc::testing::throws_kind;
using pnmc::testing::vec_close;

TEST_CASE("inner products by signature") {
    const Vector4 a{{1.0, 2.0, 3.0, 4.0}};
    const Vector4 b{{-2.0, 0.5, 1.0, 3.0}};
    CHECK(inner(a, b, Signature::euclidean()) == doctest::Approx(14.0));
    CHECK(inner(a, b, Signature::minkowski()) == doctest::Approx(-10.0));
    CHECK(dot(a, b) == doctest::Approx(14.0));
    CHECK(euclidean_norm(Vector4{{3.0, 0.0, 4.0, 0.0}}) == doctest::Approx(5.0));
}

TEST_CASE("causal character against the light cone") {
    const Signature s = Signature::minkowski();
    CHECK(causal_character(Vector4::basis(0), s) == CausalCharacter::spacelike);
    CHECK(causal_character(Vector4::basis(3), s) == CausalCharacter::timelike);
    CHECK(causal_character(Vector4{{0.0, 0.0, 1.0, 1.0}}, s) == CausalCharacter::lightlike);
    CHECK(causal_character(Vector4::zero(), s) == CausalCharacter::zero);
    // Scale invariance of the lightlike test.
    CHECK(causal_character(1e-8 * Vector4{{0.0, 1.0, 0.0, 1.0}}, s) ==
          CausalCharacter::lightlike);
    CHECK(causal_character(Vector4::basis(3), Signature::euclidean()) ==
          CausalCharacter::spacelike);
}

TEST_CASE("cross product in the E^3 slice") {
    const Vector4 e1 = Vector4::basis(0), e2 = Vector4::basis(1), e3 = Vector4::basis(2);
    CHECK(vec_close(cross3(e1, e2), e3, 0.0));
    CHECK(vec_close(cross3(e2, e3), e1, 0.0));
    CHECK(vec_close(cross3(e3, e1), e2, 0.0));
    const Vector4 a{{1.0, 2.0, 3.0, 9.0}};
    CHECK(cross3(a, a)[0] == 0.0);
    CHECK(cross3(a, a)[3] == 0.0);
}

TEST_CASE("determinant of column quadruples") {
    CHECK(det4(Vector4::basis(0), Vector4::basis(1), Vector4::basis(2), Vector4::basis(3)) ==
          doctest::Approx(1.0));
    CHECK(det4(Vector4::basis(1), Vector4::basis(0), Vector4::basis(2), Vector4::basis(3)) ==
          doctest::Approx(-1.0));
    // Block-diagonal example: 2x2 blocks with determinants 5 and -2.
    const Vector4 c0{{1.0, 2.0, 0.0, 0.0}};
    const Vector4 c1{{-3.0, -1.0, 0.0, 0.0}};
    const Vector4 c2{{0.0, 0.0, 2.0, 1.0}};
    const Vector4 c3{{0.0, 0.0, 3.0, 0.5}};
    CHECK(det4(c0, c1, c2, c3) == doctest::Approx(-10.0));
    // Linear dependence collapses the volume.
    CHECK(det4(c0, c0, c2, c3) == doctest::Approx(0.0));
}

TEST_CASE("orthonormalization in the euclidean signature") {
    const std::array<Vector4, 4> span = {Vector4{{2.0, 0.0, 0.0, 0.0}},
                                         Vector4{{1.0, 1.0, 0.0, 0.0}},
                                         Vector4{{0.5, -0.25, 3.0, 0.0}},
                                         Vector4{{1.0, 1.0, 1.0, -2.0}}};
    auto frame = orthonormalize(span, Signature::euclidean());
    REQUIRE(frame.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(frame[i].sign == 1);
        for (std::size_t j = 0; j <= i; ++j) {
            const double expected = i == j ? 1.0 : 0.0;
            CHECK(inner(frame[i].v, frame[j].v, Signature::euclidean()) ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
    // Orientation of the first vector is preserved.
    CHECK(frame[0].v[0] == doctest::Approx(1.0));
}

TEST_CASE("orthonormalization tracks timelike directions") {
    const std::array<Vector4, 2> span = {Vector4{{1.0, 0.0, 0.0, 0.5}},
                                         Vector4{{0.0, 0.0, 0.5, 2.0}}};
    auto frame = orthonormalize(span, Signature::minkowski());
    REQUIRE(frame.size() == 2);
    CHECK(frame[0].sign == 1);
    CHECK(frame[1].sign == -1);
    CHECK(inner(frame[0].v, frame[0].v, Signature::minkowski()) == doctest::Approx(1.0));
    CHECK(inner(frame[1].v, frame[1].v, Signature::minkowski()) == doctest::Approx(-1.0));
    CHECK(inner(frame[0].v, frame[1].v, Signature::minkowski()) ==
          doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("orthonormalization failure modes") {
    const std::array<Vector4, 2> dependent = {Vector4{{1.0, 1.0, 0.0, 0.0}},
                                              Vector4{{2.0, 2.0, 0.0, 0.0}}};
    CHECK(throws_kind(ErrorKind::degenerate_span, [&] {
        orthonormalize(dependent, Signature::euclidean());
    }));

    const std::array<Vector4, 1> lightlike = {Vector4{{0.0, 0.0, 1.0, 1.0}}};
    CHECK(throws_kind(ErrorKind::lightlike_step, [&] {
        orthonormalize(lightlike, Signature::minkowski());
    }));
}

TEST_CASE("matrix algebra") {
    Matrix4 a = Matrix4::identity();
    a(0, 1) = 2.0;
    a(3, 2) = -1.5;
    const Matrix4 b = a * Matrix4::identity();
    CHECK((b - a).max_abs() == doctest::Approx(0.0));
    CHECK(a.transposed()(1, 0) == doctest::Approx(2.0));
    CHECK(a.transposed()(2, 3) == doctest::Approx(-1.5));
    CHECK(a.max_abs() == doctest::Approx(2.0));

    const Vector4 v{{1.0, 1.0, 0.0, 0.0}};
    CHECK(vec_close(a * v, Vector4{{3.0, 1.0, 0.0, 0.0}}, 0.0));

    const Matrix4 sum = a + a - 2.0 * a;
    CHECK(sum.max_abs() == doctest::Approx(0.0));
}

TEST_CASE("plane rotations and boosts are isometries") {
    const Matrix4 r = pnmc::testing::plane_rotation(0, 2, 0.7);
    const Matrix4 h = pnmc::testing::boost(1, 0.4);
    const Vector4 a{{0.3, -1.2, 0.8, 2.0}};
    const Vector4 b{{1.0, 0.4, -0.6, 0.9}};
    CHECK(inner(r * a, r * b, Signature::euclidean()) ==
          doctest::Approx(inner(a, b, Signature::euclidean())));
    CHECK(inner(h * a, h * b, Signature::minkowski()) ==
          doctest::Approx(inner(a, b, Signature::minkowski())));
}

TEST_CASE("error kinds carry through what()") {
    try {
        fail(ErrorKind::mu_vanishes, "test message");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::mu_vanishes);
        CHECK(std::string(e.what()).find("mu_vanishes") != std::string::npos);
        CHECK(std::string(e.what()).find("test message") != std::string::npos);
    }
}
