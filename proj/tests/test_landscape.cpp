#include <gtest/gtest.h>

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "radgreen/landscape.hpp"

using namespace radgreen;

namespace {

constexpr double pi = std::numbers::pi;

GridPtr grid3() {
    static auto g = make_grid(3, 2001, 1e-6);
    return g;
}

const GreenPair& const_neumann() {
    static auto p = build_green_pair(grid3(), PotentialSpec::constant(1.0), Boundary::Neumann);
    return p;
}

const GreenPair& const_dirichlet() {
    static auto p = build_green_pair(grid3(), PotentialSpec::constant(1.0), Boundary::Dirichlet);
    return p;
}

PotentialSpec bump_fixture() { return PotentialSpec::bump(10, 300, 0.3, 0.05); }

// interior critical point of F for V = 1, n = 3, Neumann: 2/r = 1 + coth r
double closed_form_critical() {
    auto f = [](double r) { return 2 / r - 1 - 1 / std::tanh(r); };
    boost::math::tools::eps_tolerance<double> tol(50);
    auto [a, b] = boost::math::tools::bisect(f, 0.79, 0.81, tol);
    return 0.5 * (a + b);
}

}  // namespace

TEST(EvalF, ClosedForms) {
    const double F1 = 4 * pi / (std::sinh(1.0) * std::exp(1.0));
    EXPECT_NEAR(F1, 3.93373, 5e-5);
    EXPECT_NEAR(eval_F(const_neumann(), 1.0), F1, 1e-4);
    const double F5 = 4 * pi * 0.25 / (std::sinh(0.5) * std::exp(0.5));
    EXPECT_NEAR(F5, 3.65667, 1e-5);
    EXPECT_NEAR(eval_F(const_neumann(), 0.5), F5, 1e-4);
    const double F5d = 4 * pi * 0.25 * std::sinh(1.0) / (std::sinh(0.5) * std::sinh(0.5));
    EXPECT_NEAR(F5d, 13.5966, 1e-4);
    EXPECT_NEAR(eval_F(const_dirichlet(), 0.5), F5d, 1e-3);
    EXPECT_TRUE(std::isinf(eval_F(const_dirichlet(), 1.0)));
}

TEST(EvalF, EnergyIdentity) {
    auto V = PotentialSpec::constant(1.0);
    EXPECT_LE(check_F_energy_identity(const_neumann(), V, 0.5), 1e-4);
    EXPECT_LE(check_F_energy_identity(const_neumann(), V, 1.0), 1e-4);
    EXPECT_LE(check_F_energy_identity(const_dirichlet(), V, 0.5), 1e-4);
    auto u = green_profile(const_neumann(), 0.37);
    EXPECT_DOUBLE_EQ(u.at(0.37), 1.0);
}

TEST(EvalF, ScaleCovariance) {
    auto pair = const_neumann();
    auto scaled = pair;
    for (auto& x : scaled.xi.values) x *= 3.0;
    for (auto& x : scaled.xi.derivatives) x *= 3.0;
    for (auto& x : scaled.zeta.values) x /= 3.0;
    for (auto& x : scaled.zeta.derivatives) x /= 3.0;
    for (double r : {0.1, 0.33, 0.8, 1.0}) {
        EXPECT_NEAR(eval_F(scaled, r), eval_F(pair, r), 1e-13 * eval_F(pair, r));
        EXPECT_NEAR(eval_F_derivative(scaled, r), eval_F_derivative(pair, r), 1e-12);
    }
    auto a = find_local_minima(pair), b = find_local_minima(scaled);
    ASSERT_EQ(a.minima.size(), b.minima.size());
    for (std::size_t i = 0; i < a.minima.size(); ++i) EXPECT_NEAR(a.minima[i].r, b.minima[i].r, 1e-12);
}

TEST(EvalF, VanishesTowardOrigin) {
    std::vector<PotentialSpec> pots{PotentialSpec::constant(1.0), bump_fixture(), PotentialSpec::bump(0, 5, 0.3, 0.1)};
    for (const auto& V : pots)
        for (auto bc : {Boundary::Neumann, Boundary::Dirichlet}) {
            auto pair = build_green_pair(grid3(), V, bc);
            EXPECT_LT(eval_F(pair, 0.05), eval_F(pair, 0.2));
        }
}

TEST(EvalFp, Examples) {
    const auto& pn = const_neumann();
    double prev_gap = INFINITY;
    for (double p : {10.0, 100.0, 1000.0}) {
        const double gap = std::abs(eval_Fp_scaled(pn, 0.8, p) - eval_F(pn, 0.8));
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
    }
    EXPECT_LE(prev_gap, 0.005 * eval_F(pn, 0.8));
    // p = 5, n = 3: exponent is 1
    EXPECT_NEAR(eval_Fp(pn, 0.6, 5.0), 0.6 / pn.green_diagonal(0.6), 1e-14);
    const double g55 = std::sinh(0.5) * std::sinh(0.5) / std::sinh(1.0);
    EXPECT_NEAR(g55, 0.231058, 1e-6);
    EXPECT_NEAR(eval_Fp(const_dirichlet(), 0.5, 5.0), 0.5 / g55, 1e-3);
    EXPECT_NEAR(0.5 / g55, 2.16396, 1e-5);
    EXPECT_THROW(eval_Fp(pn, 0.5, 1.0), DomainError);
}

TEST(Minima, ConstantNeumann) {
    auto rep = find_local_minima(const_neumann());
    ASSERT_EQ(rep.minima.size(), 1u);
    EXPECT_TRUE(rep.minima[0].boundary);
    EXPECT_EQ(rep.minima[0].r, 1.0);
    ASSERT_EQ(rep.critical_points.size(), 1u);
    EXPECT_EQ(rep.critical_points[0].kind, CriticalKind::Maximum);
    EXPECT_NEAR(rep.critical_points[0].r, closed_form_critical(), 1e-6);
    EXPECT_GT(rep.critical_points[0].r, 0.79);
    EXPECT_LT(rep.critical_points[0].r, 0.81);
}

TEST(Minima, ConstantDirichletIsIncreasing) {
    auto rep = find_local_minima(const_dirichlet());
    EXPECT_TRUE(rep.minima.empty());
    EXPECT_TRUE(rep.critical_points.empty());
    for (std::size_t i = 1; i < rep.F.size(); ++i) EXPECT_GT(rep.F[i], rep.F[i - 1]);
    // closed-form slope of ln F: 2/r - coth r + coth(1 - r) > 0
    for (double r = 0.05; r < 0.999; r += 0.001) EXPECT_GT(2 / r - 1 / std::tanh(r) + 1 / std::tanh(1 - r), 0.0);
}

TEST(Minima, BumpFixture) {
    auto V = bump_fixture();
    auto pn = build_green_pair(grid3(), V, Boundary::Neumann);
    auto rep = find_local_minima(pn);
    ASSERT_EQ(rep.minima.size(), 2u);
    EXPECT_FALSE(rep.minima[0].boundary);
    EXPECT_GT(rep.minima[0].r, 0.4);
    EXPECT_LT(rep.minima[0].r, 0.7);
    EXPECT_TRUE(rep.minima[1].boundary);
    for (const auto& m : rep.minima) {
        EXPECT_LT(m.F, eval_F(pn, m.a));
        if (!m.boundary) {
            EXPECT_LT(m.F, eval_F(pn, m.b));
        }
        EXPECT_NEAR(eval_F_derivative(pn, m.r), 0.0, m.boundary ? INFINITY : 1e-6);
    }
    EXPECT_LT(rep.minima[0].b, rep.minima[1].a);  // disjoint brackets

    auto pd = build_green_pair(grid3(), V, Boundary::Dirichlet);
    auto rd = find_local_minima(pd);
    ASSERT_EQ(rd.minima.size(), 1u);
    EXPECT_GT(rd.minima[0].r, 0.4);
    EXPECT_LT(rd.minima[0].r, 0.7);
}

TEST(Minima, NeumannBoundaryAlwaysMinimum) {
    std::vector<PotentialSpec> pots{PotentialSpec::constant(0.2), PotentialSpec::constant(9.0), bump_fixture(),
                                    PotentialSpec::bump(0, 5, 0.3, 0.1), PotentialSpec::bump(1, 3, 0.6, 0.15)};
    for (const auto& V : pots)
        for (int n : {2, 3, 4}) {
            auto rep = find_local_minima(build_green_pair(make_grid(n, 2001, 1e-6), V, Boundary::Neumann));
            ASSERT_FALSE(rep.minima.empty());
            EXPECT_TRUE(rep.minima.back().boundary) << V.describe() << " n=" << n;
        }
}

TEST(Minima, RejectsSmallCutoff) {
    LandscapeOptions opt;
    opt.r_lo = 0.01;
    EXPECT_THROW(find_local_minima(const_neumann(), opt), DomainError);
}

TEST(Minima, PlateauIsError) {
    // a pair whose product xi zeta is constant makes F flat
    auto pair = const_neumann();
    for (std::size_t i = 0; i < pair.grid->size(); ++i) {
        const double r = pair.grid->node(i);
        pair.xi.values[i] = 1.0;
        pair.xi.derivatives[i] = 0.0;
        pair.zeta.values[i] = 2.0 + 0.0 * r;
        pair.zeta.derivatives[i] = 0.0;
    }
    EXPECT_THROW(find_local_minima(pair), NumericalError);
}

TEST(BoundaryDescent, ConstantPotential) {
    auto bd = boundary_descent_check(const_neumann());
    const double ratio = 1 / std::tanh(1.0) - 1;
    EXPECT_NEAR(ratio, 0.313035, 1e-6);
    EXPECT_NEAR(-4 * pi * ratio * ratio, -1.23139, 1e-5);
    EXPECT_NEAR(bd.analytic, -1.23139, 0.01 * 1.23139);
    EXPECT_TRUE(bd.consistent(0.05));
    EXPECT_THROW(boundary_descent_check(const_dirichlet()), DomainError);
}

TEST(BoundaryDescent, BumpNegative) {
    for (int n : {2, 3}) {
        auto pair = build_green_pair(make_grid(n, 2001, 1e-6), PotentialSpec::bump(0, 5, 0.3, 0.1), Boundary::Neumann);
        auto bd = boundary_descent_check(pair);
        EXPECT_TRUE(bd.negative());
        EXPECT_TRUE(bd.consistent(0.05)) << bd.finite_difference << " " << bd.analytic;
    }
}

TEST(Reflection, ConstantPotentialCriticalPoint) {
    const double rc = closed_form_critical();
    auto rr = reflection_check(const_neumann(), rc);
    EXPECT_NEAR(rr.left, 0.5, 1e-3);
    EXPECT_NEAR(rr.right, -0.5, 1e-3);
    EXPECT_THROW(reflection_check(const_neumann(), 0.5), DomainError);
}

TEST(Reflection, SumIdentityEverywhere) {
    for (auto V : {PotentialSpec::constant(1.0), bump_fixture()}) {
        auto pair = build_green_pair(grid3(), V, Boundary::Neumann);
        for (int k = 0; k < 20; ++k) {
            const double r = 0.03 + 0.0487 * k;
            EXPECT_NEAR(reflection_values(pair, r).sum(), 1.0, 1e-6);
        }
    }
}

TEST(Reflection, BumpMinimum) {
    auto pair = build_green_pair(grid3(), bump_fixture(), Boundary::Neumann);
    auto rep = find_local_minima(pair);
    auto rr = reflection_check(pair, rep.minima.front().r);
    EXPECT_NEAR(rr.left, 0.5, 1e-3);
    EXPECT_NEAR(rr.right, -0.5, 1e-3);
}

TEST(Catrina, ConstantDirichletRaised) {
    std::vector<double> ps{6, 10, 50};
    for (const auto& v : catrina_flag(const_dirichlet(), ps)) {
        EXPECT_TRUE(v.increasing) << v.p;
        EXPECT_TRUE(v.no_solution_expected());
    }
    EXPECT_THROW(catrina_flag(const_neumann(), ps), DomainError);
}

TEST(Catrina, BumpNotRaised) {
    auto pair = build_green_pair(grid3(), bump_fixture(), Boundary::Dirichlet);
    std::vector<double> ps{10, 100, 1000};
    for (const auto& v : catrina_flag(pair, ps)) EXPECT_FALSE(v.no_solution_expected()) << v.p;
}

TEST(Catrina, ConstantMapIsRejected) {
    auto pair = const_dirichlet();
    // G(r, r) = r^{(p-1)(n-1)/(p+3)} makes F_p == 1; with p = 5, n = 3 that is G = r
    for (std::size_t i = 0; i < pair.grid->size(); ++i) {
        const double r = pair.grid->node(i);
        pair.xi.values[i] = 1.0 / r;
        pair.xi.derivatives[i] = -1.0 / (r * r);
        pair.zeta.values[i] = 1.0;
        pair.zeta.derivatives[i] = 0.0;
    }
    std::vector<double> ps{5};
    EXPECT_THROW(catrina_flag(pair, ps), NumericalError);
}

TEST(ConstraintBox, ClosedFormR1Half) {
    auto box = make_constraint_box(const_neumann(), 1.0, 0.5, 1.0);
    const double m = (std::sinh(0.5) / 0.5) / std::sinh(1.0);
    EXPECT_NEAR(box.m, m, 1e-6);
    EXPECT_NEAR(box.m, 0.886818, 1e-5);
    EXPECT_NEAR(box.c, 0.943409, 1e-5);
    EXPECT_FALSE(box.outer_obstacle);
    // F(0.5) < F(1): this box does not isolate r_bar = 1
    EXPECT_FALSE(box_isolates_minimum(const_neumann(), box));
}

TEST(ConstraintBox, FromMinimumRecords) {
    auto pn = build_green_pair(grid3(), bump_fixture(), Boundary::Neumann);
    auto rep = find_local_minima(pn);
    for (const auto& m : rep.minima) {
        auto box = build_constraint_box(pn, m);
        EXPECT_LT(box.m, box.c);
        EXPECT_LT(box.c, 1.0);
        EXPECT_GT(box.R1, pn.grid->epsilon());
        EXPECT_LE(box.R1, m.r);
        EXPECT_GE(box.R2, m.r);
        EXPECT_TRUE(box_isolates_minimum(pn, box));
        const double gdiag = pn.green(m.r, m.r);
        EXPECT_GT(box.c, pn.green(box.R1, m.r) / gdiag);
        if (!m.boundary) {
            EXPECT_GT(box.c, pn.green(box.R2, m.r) / gdiag);
        }
    }
    auto rc = find_local_minima(const_neumann());
    auto box = build_constraint_box(const_neumann(), rc.minima.back());
    EXPECT_TRUE(box_isolates_minimum(const_neumann(), box));
    EXPECT_FALSE(box.outer_obstacle);
}

TEST(ConstraintBox, BrokenPairDetected) {
    auto pair = const_neumann();
    // make xi decreasing so that G(R1, 1) > G(1, 1)
    for (std::size_t i = 0; i < pair.grid->size(); ++i) pair.xi.values[i] = 2.0 - pair.grid->node(i);
    EXPECT_THROW(make_constraint_box(pair, 1.0, 0.5, 1.0), NumericalError);
}
