#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace stdwr;

namespace {

class Constant final : public ManufacturedSolution {
public:
    explicit Constant(double c) : c_(c) {}
    double value(Point, double) const override { return c_; }
    double time_derivative(Point, double) const override { return 0.0; }
    std::array<double, 2> gradient(Point, double) const override { return {0.0, 0.0}; }
    double laplacian(Point, double) const override { return 0.0; }

private:
    double c_;
};

/// Trajectory equal to `value` at every node, on `stm` with Q_p / dG(r).
Trajectory filled(AssemblyContext& ctx, const SpaceTimeMesh& stm, int p, int r, double value)
{
    Trajectory t;
    t.partition = stm.partition;
    t.space_degree = p;
    t.time_degree = r;
    for (std::size_t n = 0; n < stm.n_slabs(); ++n) {
        auto dofs = ctx.dofs(stm.meshes[n], p);
        const Vector v = Vector::Constant(static_cast<Eigen::Index>(dofs->n_nodes()), value);
        t.slabs.push_back(SlabPolynomial::from_function(stm.partition.start(n), stm.partition.end(n), r,
                                                        [&](double) { return v; }));
        t.dofs.push_back(std::move(dofs));
    }
    t.initial = t.slabs.front().nodal.front();
    return t;
}

/// Nodal view of a free-indexed block (the free nodes of a uniform mesh are unconstrained).
Vector nodal(const DofHandler& dofs, const Vector& free_block)
{
    return dofs.free_to_nodal() * free_block;
}

Eigen::Index node_at(const DofHandler& dofs, Point x)
{
    for (std::size_t i = 0; i < dofs.n_nodes(); ++i) {
        const Point y = dofs.position(i);
        if (std::abs(y.x - x.x) < 1e-12 && std::abs(y.y - x.y) < 1e-12) {
            return static_cast<Eigen::Index>(i);
        }
    }
    throw std::logic_error("no node at point");
}

}  // namespace

TEST(FinalTimeGoal, ZeroDiscreteSolutionMeasuresTheExactFinalState)
{
    const auto data = make_problem(Preset::MovingHump, 1.0);
    AssemblyContext ctx(data, 1.0, QuadratureConfig::for_degrees(1, 0, 2, 1));
    const auto stm = SpaceTimeMesh::uniform(Rectangle::unit_square(), 4, 4, 0.5, 2);
    const auto zero = filled(ctx, stm, 1, 0, 0.0);

    // composite 3-point Gauss on a 64x64 grid, independent of the cell tables
    const auto g = gauss_legendre(3);
    const int M = 64;
    double sq = 0.0;
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            for (std::size_t a = 0; a < 3; ++a) {
                for (std::size_t b = 0; b < 3; ++b) {
                    const Point x{(i + g.points[a]) / M, (j + g.points[b]) / M};
                    const double u = exact_u_ex2(x, 0.5, 1.0);
                    sq += g.weights[a] * g.weights[b] * u * u / (M * M);
                }
            }
        }
    }
    EXPECT_NEAR(goal_error(GoalKind::FinalTime, ctx, zero), std::sqrt(sq), 1e-7);
}

TEST(FinalTimeGoal, RightHandSideVanishesBeforeTheLastSlab)
{
    const auto data = make_problem(Preset::MovingHump, 1.0);
    AssemblyContext ctx(data, 1.0, QuadratureConfig::for_degrees(1, 0, 2, 1));
    const auto stm = SpaceTimeMesh::uniform(Rectangle::unit_square(), 4, 4, 0.5, 3);
    const auto u = solve_primal(ctx, stm, 1, 0);
    const GoalFunctional goal(GoalKind::FinalTime, ctx, u);
    for (std::size_t n = 0; n < 2; ++n) {
        EXPECT_EQ(assemble_dual_rhs(goal, ctx, n, ctx.dofs(stm.meshes[n], 2), 0).cwiseAbs().maxCoeff(), 0.0);
    }
    EXPECT_GT(assemble_dual_rhs(goal, ctx, 2, ctx.dofs(stm.meshes[2], 2), 0).cwiseAbs().maxCoeff(), 0.0);
}

TEST(L2L2Goal, ConstantErrorTestsQuadraticNodeIntegrals)
{
    const double c = 0.8;
    const double T = 0.5;
    const auto data = ProblemData::manufactured(std::make_shared<Constant>(c), 1.0, {2.0, 3.0}, 1.0, T);
    AssemblyContext ctx(data, 0.0, QuadratureConfig::for_degrees(1, 0, 2, 1));
    const auto stm = SpaceTimeMesh::uniform(Rectangle::unit_square(), 4, 4, T, 2);
    const auto zero = filled(ctx, stm, 1, 0, 0.0);
    const GoalFunctional goal(GoalKind::L2L2, ctx, zero);
    EXPECT_NEAR(goal.normalization(), c * std::sqrt(T), 1e-13);

    const auto dofs = ctx.dofs(stm.meshes[0], 2);
    const Vector v = nodal(*dofs, assemble_dual_rhs(goal, ctx, 0, dofs, 0));
    const double h = 0.25;
    const double tau = 0.25;
    const double scale = c * tau / goal.normalization();
    // cell-centre bubble integrates to (2h/3)^2, an interior vertex to 4 (h/6)^2
    EXPECT_NEAR(v[node_at(*dofs, {0.125, 0.125})], scale * std::pow(2 * h / 3, 2), 1e-14);
    EXPECT_NEAR(v[node_at(*dofs, {0.5, 0.5})], scale * 4 * std::pow(h / 6, 2), 1e-14);
}

TEST(L2L2Goal, RightHandSideIsInvariantUnderErrorScaling)
{
    const auto stm = SpaceTimeMesh::uniform(Rectangle::unit_square(), 4, 4, 0.5, 2);
    Vector first;
    for (const double c : {0.3, 3.0}) {
        const auto data = ProblemData::manufactured(std::make_shared<Constant>(c), 1.0, {2.0, 3.0}, 1.0, 0.5);
        AssemblyContext ctx(data, 0.0, QuadratureConfig::for_degrees(1, 0, 2, 1));
        const auto zero = filled(ctx, stm, 1, 0, 0.0);
        const GoalFunctional goal(GoalKind::L2L2, ctx, zero);
        const Vector rhs = assemble_dual_rhs(goal, ctx, 1, ctx.dofs(stm.meshes[1], 2), 1);
        if (first.size() == 0) {
            first = rhs;
        } else {
            EXPECT_LT((rhs - first).cwiseAbs().maxCoeff(), 1e-14);
        }
    }
}

TEST(DualSolver, SingleInteriorDofFollowsBackwardEulerRecursion)
{
    const double eps = 0.3;
    const double alpha = 2.0;
    const double T = 0.6;
    const auto data = ProblemData::manufactured(std::make_shared<Constant>(1.0), eps, {2.0, 3.0}, alpha, T);
    AssemblyContext ctx(data, 0.0, QuadratureConfig::for_degrees(1, 0, 1, 0));
    const auto stm = SpaceTimeMesh::uniform(Rectangle::unit_square(), 2, 2, T, 3);
    const auto zero = filled(ctx, stm, 1, 0, 0.0);
    const GoalFunctional goal(GoalKind::L2L2, ctx, zero);
    const auto z = solve_dual(ctx, stm, 1, 0, goal);

    const double m = 1.0 / 9.0;
    const double a = eps * 8.0 / 3.0 + alpha * m;
    const double tau = 0.2;
    const double load = tau * 0.25 / std::sqrt(T);
    double Z = 0.0;
    for (std::size_t n = 3; n-- > 0;) {
        Z = (m * Z + load) / (m + tau * a);
        EXPECT_NEAR(z.dofs[n]->evaluate(z.slabs[n].nodal[0], {0.5, 0.5}), Z, 1e-13) << "slab " << n;
    }
}

TEST(DualSolver, BlockOperatorIsThePrimalTranspose)
{
    for (const double delta0 : {0.0, 1.0}) {
        for (const int r : {0, 1}) {
            EXPECT_LT(oracles::transposition_defect(delta0, 1, r), 1e-12) << delta0 << ' ' << r;
            EXPECT_LT(oracles::transposition_defect(delta0, 2, r, oracles::hanging_mesh()), 1e-12)
                << delta0 << ' ' << r;
        }
    }
}

TEST(DualSolver, FinalTimeInformationTravelsBackward)
{
    // J_T only loads the last slab; the dual still reaches the first slab
    const auto data = make_problem(Preset::MovingHump, 1e-1);
    AssemblyContext ctx(data, 1.0, QuadratureConfig::for_degrees(1, 0, 2, 0));
    const auto stm = SpaceTimeMesh::uniform(Rectangle::unit_square(), 4, 4, 0.5, 4);
    const auto u = solve_primal(ctx, stm, 1, 0);
    const GoalFunctional goal(GoalKind::FinalTime, ctx, u);
    const auto z = solve_dual(ctx, stm, 2, 0, goal);
    for (std::size_t n = 0; n < 4; ++n) {
        EXPECT_GT(z.slabs[n].nodal[0].norm(), 0.0) << "slab " << n;
    }
}

TEST(DualSolver, ExactGoalIsRejected)
{
    const auto data = ProblemData::manufactured(std::make_shared<Constant>(0.5), 1.0, {2.0, 3.0}, 1.0, 0.5);
    AssemblyContext ctx(data, 0.0, QuadratureConfig::for_degrees(1, 0, 2, 1));
    const auto stm = SpaceTimeMesh::uniform(Rectangle::unit_square(), 2, 2, 0.5, 2);
    const auto exact = filled(ctx, stm, 1, 0, 0.5);
    const GoalFunctional goal(GoalKind::L2L2, ctx, exact);
    EXPECT_TRUE(goal.exact());
    EXPECT_THROW((void)assemble_dual_rhs(goal, ctx, 0, ctx.dofs(stm.meshes[0], 2), 0), std::domain_error);
}

TEST(Goal, NamesRoundTrip)
{
    for (const auto k : {GoalKind::L2L2, GoalKind::FinalTime}) {
        EXPECT_EQ(parse_goal(goal_name(k)), k);
    }
    EXPECT_THROW((void)parse_goal("energy"), std::invalid_argument);
}
