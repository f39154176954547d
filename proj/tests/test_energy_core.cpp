#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "morrey/catalog.hpp"
#include "morrey/errors.hpp"
#include "test_support.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace morrey;
using morrey::test::rel_close;

namespace {

// Singular values through Eigen's Jacobi SVD, independent of the closed form.
std::pair<double, double> eigen_singular_values(const Matrix2& F)
{
    Eigen::Matrix2d M;
    M << F.f11, F.f12, F.f21, F.f22;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(M);
    return {svd.singularValues()(0), svd.singularValues()(1)};
}

} // namespace

TEST_CASE("singular values of reference matrices")
{
    const auto id = singular_values(Matrix2::identity());
    CHECK(id.lam_max == doctest::Approx(1.0));
    CHECK(id.lam_min == doctest::Approx(1.0));

    const auto d = singular_values(Matrix2::diag(3.0, 2.0));
    CHECK(d.lam_max == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(d.lam_min == doctest::Approx(2.0).epsilon(1e-15));

    // Shear [[1,1],[0,1]]: F^T F has eigenvalues (3 +- sqrt 5)/2, i.e. golden ratio squared.
    const auto s = singular_values({1.0, 1.0, 0.0, 1.0});
    CHECK(s.lam_max == doctest::Approx(1.6180339887498949).epsilon(1e-14));
    CHECK(s.lam_min == doctest::Approx(0.6180339887498949).epsilon(1e-14));
    const auto [emax, emin] = eigen_singular_values({1.0, 1.0, 0.0, 1.0});
    CHECK(s.lam_max == doctest::Approx(emax).epsilon(1e-13));
    CHECK(s.lam_min == doctest::Approx(emin).epsilon(1e-13));
}

TEST_CASE("singular values reject non-positive determinants")
{
    CHECK_THROWS_AS(singular_values(Matrix2::diag(1.0, -1.0)), Error);
    try {
        singular_values(Matrix2::diag(0.0, 1.0));
        FAIL("expected an exception");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonPositiveDeterminant);
    }
}

TEST_CASE("singular values agree with an SVD oracle and satisfy product and norm identities")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        Matrix2 F = test::random_matrix(rng);
        if (F.det() <= 1e-3)
            continue;
        const auto sv = singular_values(F);
        const auto [emax, emin] = eigen_singular_values(F);
        CHECK(rel_close(sv.lam_max, emax, 1e-12));
        CHECK(rel_close(sv.lam_min, emin, 1e-11));
        CHECK(std::abs(sv.product() - F.det()) <= 1e-12 * std::abs(F.det()));
        const double n2 = sv.lam_max * sv.lam_max + sv.lam_min * sv.lam_min;
        CHECK(std::abs(n2 - F.frobenius_sq()) <= 1e-10 * F.frobenius_sq());
    }
}

TEST_CASE("singular values are invariant under rotations on both sides")
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    for (int i = 0; i < 500; ++i) {
        const Matrix2 F = test::random_glplus(rng);
        const Matrix2 G = Matrix2::rotation(angle(rng)) * F * Matrix2::rotation(angle(rng));
        const auto a = singular_values(F);
        const auto b = singular_values(G);
        CHECK(std::abs(a.lam_max - b.lam_max) <= 1e-10);
        CHECK(std::abs(a.lam_min - b.lam_min) <= 1e-10);
    }
}

TEST_CASE("distortion functions")
{
    CHECK(distortion_K(Matrix2::identity()) == doctest::Approx(1.0));
    CHECK(distortion_K(Matrix2::diag(4.0, 1.0)) == doctest::Approx(4.0));
    CHECK(distortion_K({1.0, 1.0, 0.0, 1.0}) == doctest::Approx(2.6180339887498949).epsilon(1e-13));
    CHECK(distortion_nonlinear(Matrix2::identity()) == doctest::Approx(1.0));
    CHECK(distortion_nonlinear(Matrix2::diag(2.0, 1.0)) == doctest::Approx(1.25));
    CHECK(distortion_nonlinear(Matrix2::diag(4.0, 1.0)) == doctest::Approx(2.125));
    // (K + 1/K)/2 with K = 4
    CHECK(distortion_nonlinear(Matrix2::diag(4.0, 1.0)) == doctest::Approx((4.0 + 0.25) / 2.0));
    CHECK_THROWS_AS(distortion_K(Matrix2::diag(-1.0, 1.0)), Error);
}

TEST_CASE("catalog energies at reference matrices")
{
    CHECK(w_magic_plus().evaluate(Matrix2::identity()) == doctest::Approx(1.0));
    CHECK(w_magic_plus().evaluate(Matrix2::diag(2.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-15));
    // h(2) = 2 + log 2 and f(2) = -log 2
    CHECK(w_magic_minus().evaluate(Matrix2::diag(2.0, 1.0)) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(k_distortion().evaluate(Matrix2::diag(2.0, 1.0)) == doctest::Approx(1.25));
    CHECK(det_energy().evaluate(Matrix2::diag(2.0, 3.0)) == doctest::Approx(6.0));

    const auto cat = catalog();
    bool has_plus = false;
    for (const auto& e : cat) {
        if (e.name == "W_magic_plus") {
            has_plus = true;
            REQUIRE(e.split());
            CHECK(e.split()->h_source() == "t - log(t)");
            CHECK(e.split()->f_source() == "log(z)");
        }
        if (e.name == "W_smooth") {
            REQUIRE(e.split());
            CHECK(e.split()->h(3.0) == doctest::Approx(1.0 + 4.0 / 9.0 + std::log(3.0)));
            CHECK(e.split()->f().value(2.0) == doctest::Approx(-std::log(2.0)));
        }
    }
    CHECK(has_plus);
    CHECK(find_energy("K_distortion")->as_energy()(Matrix2::diag(2.0, 1.0)) == doctest::Approx(1.25));
    CHECK_FALSE(find_energy("no_such_energy").has_value());
}

TEST_CASE("W_3b closed form")
{
    // t = 2: Q = sqrt(17), h = (5 + 3 Q)/4 - log 2 + log(13 + 3 Q)
    const double Q = std::sqrt(17.0);
    const double expected = (5.0 + 3.0 * Q) / 4.0 - std::log(2.0) + std::log(13.0 + 3.0 * Q);
    CHECK(w_3b().h(2.0) == doctest::Approx(expected).epsilon(1e-14));
    // h'(1) = 0
    CHECK(std::abs(w_3b().h1(1.0)) < 1e-14);
    // The closed form is symmetric on its own.
    CHECK(w_3b().h_upper().value(0.25) == doctest::Approx(w_3b().h(4.0)).epsilon(1e-13));
}

TEST_CASE("isochoric part is scale invariant")
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ua(0.3, 3.0);
    for (const auto& e : catalog()) {
        const SplitEnergy* W = e.split();
        if (!W)
            continue;
        for (int i = 0; i < 50; ++i) {
            const Matrix2 F = test::random_glplus(rng);
            const double a = ua(rng);
            const double z = F.det();
            const double lhs = W->evaluate(a * F) - W->evaluate(F);
            const double rhs = W->f().value(a * a * z) - W->f().value(z);
            CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(W->evaluate(F))));
        }
    }
}

TEST_CASE("h symmetry and derivative reflection")
{
    for (const auto& e : catalog()) {
        const SplitEnergy* W = e.split();
        if (!W)
            continue;
        for (int i = 0; i < 1000; ++i) {
            const double t = std::pow(10.0, -4.0 + 8.0 * i / 999.0);
            const Jet2 a = W->h_jet(t);
            const Jet2 b = W->h_jet(1.0 / t);
            const double u = 1.0 / t;
            CHECK(std::abs(a.v - b.v) <= 1e-10 * (1.0 + std::abs(a.v)));
            // h'(t) = -h'(1/t)/t^2, h''(t) = 2 h'(1/t)/t^3 + h''(1/t)/t^4
            CHECK(rel_close(a.d1, -b.d1 * u * u, 1e-10));
            const double expect2 = 2.0 * b.d1 * u * u * u + b.d2 * u * u * u * u;
            CHECK(std::abs(a.d2 - expect2) <= 1e-9 * (std::abs(a.d2) + std::abs(2.0 * b.d1 * u * u * u)
                                                        + std::abs(b.d2 * u * u * u * u) + 1e-300));
        }
    }
}

TEST_CASE("analytic derivatives of built-ins match central differences")
{
    const double h = 1e-5;
    auto check_fn = [&](const ScalarFunction& f, double x) {
        const double fd1 = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
        const double fd2 = (f.d1(x + h) - f.d1(x - h)) / (2.0 * h);
        CHECK(std::abs(f.d1(x) - fd1) <= 1e-6 * std::max(1.0, std::abs(fd1)));
        CHECK(std::abs(f.d2(x) - fd2) <= 1e-6 * std::max(1.0, std::abs(fd2)));
    };
    for (const auto& e : catalog()) {
        const SplitEnergy* W = e.split();
        if (!W)
            continue;
        for (double t : {1.1, 1.5, 2.0, 3.0, 7.0, 20.0})
            check_fn(W->h_upper(), t);
        for (double z : {0.2, 0.5, 1.0, 2.0, 5.0})
            check_fn(W->f(), z);
    }
}

TEST_CASE("analytic partials of general energies match central differences and are symmetric")
{
    for (const auto& e : catalog()) {
        const GeneralIsotropicEnergy G = e.general();
        CHECK(G.symmetry_defect() <= 1e-10);
        for (double x : {0.5, 1.3, 2.0}) {
            for (double y : {0.4, 0.9, 1.7}) {
                if (std::abs(x - y) < 0.2 && (e.name == "W_magic_plus" || e.name == "W_magic_minus"))
                    continue;
                const IsotropicPartials p = G.partials(x, y);
                const double hx = 1e-5 * x, hy = 1e-5 * y;
                const double gx = (G.g(x + hx, y) - G.g(x - hx, y)) / (2 * hx);
                const double gy = (G.g(x, y + hy) - G.g(x, y - hy)) / (2 * hy);
                const double gxx = (G.partials(x + hx, y).gx - G.partials(x - hx, y).gx) / (2 * hx);
                const double gyy = (G.partials(x, y + hy).gy - G.partials(x, y - hy).gy) / (2 * hy);
                const double gxy = (G.partials(x, y + hy).gx - G.partials(x, y - hy).gx) / (2 * hy);
                CHECK(rel_close(p.gx, gx, 1e-6));
                CHECK(rel_close(p.gy, gy, 1e-6));
                CHECK(rel_close(p.gxx, gxx, 1e-6));
                CHECK(rel_close(p.gyy, gyy, 1e-6));
                CHECK(rel_close(p.gxy, gxy, 1e-6));
            }
        }
    }
}

TEST_CASE("builtin parameter bounds")
{
    BuiltinParams p;
    CHECK_NOTHROW(p.validate());
    p.p = 1.5;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.alpha = 4.0;
    CHECK_THROWS_AS(p.validate(), Error);
    CHECK_THROWS_AS(w_3b(0.0), Error);
}

TEST_CASE("finite-difference scalar functions")
{
    const auto f = ScalarFunction::from_values([](double x) { return x * x * x; }, "x^3");
    CHECK(f.derivative_source() == DerivativeSource::FiniteDifference);
    CHECK(f.d1(2.0) == doctest::Approx(12.0).epsilon(1e-8));
    CHECK(f.d2(2.0) == doctest::Approx(12.0).epsilon(1e-5));
}
