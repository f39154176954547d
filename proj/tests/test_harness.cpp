#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "morrey/catalog.hpp"
#include "morrey/errors.hpp"
#include "morrey/expression.hpp"
#include "morrey/harness.hpp"

#include <cmath>

using namespace morrey;

namespace {

Energy synthetic_concave()
{
    return Energy::from(make_split_energy("-(t + 1/t)", "-(z^2)", "concave_pair").energy);
}

std::vector<PerturbationFamily> all_families()
{
    return {PerturbationFamily::trig_bubble(2), PerturbationFamily::contracting_radial(3),
            PerturbationFamily::mollified_laminate(8), PerturbationFamily::packing()};
}

} // namespace

TEST_CASE("family parameter counts")
{
    CHECK(PerturbationFamily::trig_bubble(2).n_params() == 8);
    CHECK(PerturbationFamily::trig_bubble(4).n_params() == 32);
    CHECK(PerturbationFamily::contracting_radial(3).n_params() == 6);
    CHECK(PerturbationFamily::mollified_laminate().n_params() == 3);
    CHECK(PerturbationFamily::packing().n_params() == 18);
    CHECK(family_kind_from_string("Packing") == FamilyKind::Packing);
    CHECK_THROWS_AS(family_kind_from_string("Spiral"), Error);
    PerturbationFamily bad = PerturbationFamily::mollified_laminate();
    bad.delta = 0.6;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("zero parameters give zero excess")
{
    const Matrix2 F0{1.3, 0.2, -0.1, 0.8};
    for (const Energy& W : {Energy::from(w_magic_plus()), Energy::from(k_distortion()), Energy::from(hencky())}) {
        for (const PerturbationFamily& f : all_families()) {
            const std::vector<double> zero(f.n_params(), 0.0);
            const ExcessEnergy e = excess_energy(W, F0, f, zero);
            CHECK_MESSAGE(std::abs(e.value) <= 1e-12, W.name() << " " << to_string(f.kind));
        }
    }
    CHECK_THROWS_AS(excess_energy(Energy::from(k_distortion()), F0, PerturbationFamily::trig_bubble(2), {0.0}),
                    Error);
}

TEST_CASE("W_magic_plus is neutral along contracting radial maps")
{
    // One term with k = 2: tanh(b)^2 = 1/3.
    const ExcessEnergy e = excess_energy(Energy::from(w_magic_plus()), Matrix2::identity(),
                                         PerturbationFamily::contracting_radial(1), {0.0, std::atanh(1.0 / std::sqrt(3.0))});
    CHECK(std::abs(e.value) <= 1e-6);
    CHECK(std::abs(e.value) <= 10.0 * e.error);
    // The same maps cost energy for the outer distortion.
    const ExcessEnergy k = excess_energy(Energy::from(k_distortion()), Matrix2::identity(),
                                         PerturbationFamily::contracting_radial(1), {0.0, std::atanh(1.0 / std::sqrt(3.0))});
    CHECK(k.value == doctest::Approx(0.25 * M_PI).epsilon(1e-9));
}

TEST_CASE("TrigBubble quadrature")
{
    const PerturbationFamily f = PerturbationFamily::trig_bubble(2);
    const std::vector<double> p{0.01, -0.02, 0.015, 0.0, -0.01, 0.02, 0.005, 0.01};
    const ExcessEnergy k = excess_energy(Energy::from(k_distortion()), Matrix2::identity(), f, p);
    CHECK(k.value >= -1e-8);
    CHECK(k.resolution_gap < 1e-10);

    // |F|^2 is quadratic: the excess is int |grad theta|^2 = sum |a_k|^2 pi^2 (k1^2 + k2^2) / 4.
    const ExcessEnergy q = excess_energy(Energy::from(frobenius_sq()), Matrix2::identity(), f, p);
    double expect = 0.0;
    for (int k1 = 1; k1 <= 2; ++k1)
        for (int k2 = 1; k2 <= 2; ++k2) {
            const std::size_t m = static_cast<std::size_t>((k1 - 1) * 2 + (k2 - 1));
            expect += (p[2 * m] * p[2 * m] + p[2 * m + 1] * p[2 * m + 1]) * M_PI * M_PI * (k1 * k1 + k2 * k2) / 4.0;
        }
    CHECK(q.value == doctest::Approx(expect).epsilon(1e-12));

    // The determinant is a null Lagrangian.
    const ExcessEnergy d = excess_energy(Energy::from(det_energy()), Matrix2{1.2, 0.3, 0.1, 0.9}, f, p);
    CHECK(std::abs(d.value) <= 1e-13);

    const std::vector<double> big{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    try {
        excess_energy(Energy::from(k_distortion()), Matrix2::identity(), f, big);
        FAIL("expected LeftGLPlus");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::LeftGLPlus);
    }
}

TEST_CASE("laminate second variation")
{
    const Matrix2 I = Matrix2::identity();
    const LaminateResult q = laminate_second_variation(Energy::from(frobenius_sq()), I, {1, 0}, {1, 0}, 8, 0.2);
    CHECK(q.excess > 0.0);
    CHECK(q.interior > 0.0);

    for (double a : {0.0, 0.7, 1.9}) {
        const LaminateResult d = laminate_second_variation(Energy::from(det_energy()), Matrix2{1.1, 0.2, -0.3, 0.9},
                                                           {std::cos(a), std::sin(a)}, {std::cos(2 * a), std::sin(2 * a)},
                                                           6, 0.3);
        CHECK(std::abs(d.excess) <= 1e-8);
    }

    // Rank-one convex energy: the interior is a Jensen average along a rank-one line.
    const Energy W = Energy::from(w_magic_plus());
    for (int i = 0; i < 16; ++i) {
        const double a = M_PI * i / 16.0;
        const LaminateResult r = laminate_second_variation(W, I, {std::cos(a), std::sin(a)},
                                                           {std::cos(a + 0.4), std::sin(a + 0.4)}, 8, 0.3);
        CHECK(r.interior >= -1e-8);
        CHECK(r.excess >= -std::abs(r.layer) - 1e-8);
        CHECK(r.error < 1e-6);
    }

    const LaminateResult s = laminate_second_variation(synthetic_concave(), I, {1, 0}, {1, 0}, 8, 0.3);
    CHECK(s.interior < -0.01);
}

TEST_CASE("search on W_magic_plus with contracting radial maps is energy neutral")
{
    SearchOptions o;
    o.budget = 300;
    const QCResult r = search_violation(Energy::from(w_magic_plus()), Matrix2::identity(),
                                        PerturbationFamily::contracting_radial(3), o);
    CHECK(r.verdict == QCVerdict::EnergyNeutralFamily);
    CHECK(r.neutral_ratio <= 1.0);
    CHECK(r.evaluations == 300);
    CHECK(r.converged);
}

TEST_CASE("null Lagrangian stays at zero excess")
{
    SearchOptions o;
    o.budget = 60;
    const Matrix2 F0{1.2, 0.3, -0.2, 0.8};
    for (const PerturbationFamily& f : all_families()) {
        const QCResult r = search_violation(Energy::from(det_energy()), F0, f, o);
        CHECK_MESSAGE(std::abs(r.min_excess) <= 10.0 * r.error, to_string(f.kind));
        CHECK(r.verdict != QCVerdict::CandidateViolation);
    }
}

TEST_CASE("synthetic non-rank-one-convex energy gives a candidate violation")
{
    SearchOptions o;
    o.budget = 300;
    const QCResult r = search_violation(synthetic_concave(), Matrix2::identity(),
                                        PerturbationFamily::mollified_laminate(8), o);
    CHECK(r.verdict == QCVerdict::CandidateViolation);
    CHECK(r.refined_excess < -10.0 * r.refined_error);
    CHECK(r.converged);
    CHECK_FALSE(r.requires_verification);
}

TEST_CASE("polyconvex energies never yield candidates")
{
    SearchOptions o;
    o.budget = 150;
    for (const Energy& W : {Energy::from(w_magic_minus()), Energy::from(k_distortion()), Energy::from(det_energy())})
        for (const PerturbationFamily& f : all_families()) {
            const QCResult r = search_violation(W, Matrix2::identity(), f, o);
            CHECK_MESSAGE(r.verdict != QCVerdict::CandidateViolation, W.name() << " " << to_string(f.kind));
        }
    const QCResult k = search_violation(Energy::from(k_distortion()), Matrix2::identity(),
                                        PerturbationFamily::trig_bubble(2), o);
    CHECK(k.verdict == QCVerdict::NoViolationFound);
    CHECK(k.min_excess >= -1e-8);
}

TEST_CASE("search is reproducible")
{
    SearchOptions o;
    o.budget = 120;
    o.seed = 77;
    const Energy W = Energy::from(k_distortion());
    const auto a = to_json(search_violation(W, Matrix2::identity(), PerturbationFamily::trig_bubble(2), o)).dump();
    const auto b = to_json(search_violation(W, Matrix2::identity(), PerturbationFamily::trig_bubble(2), o)).dump();
    CHECK(a == b);
    o.seed = 78;
    const auto c = to_json(search_violation(W, Matrix2::identity(), PerturbationFamily::trig_bubble(2), o)).dump();
    CHECK(a != c);
}
