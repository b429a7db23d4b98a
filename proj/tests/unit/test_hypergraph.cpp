#include <qtmpc/hypergraph/derivatives.h>
#include <qtmpc/hypergraph/generic_edge.h>
#include <qtmpc/hypergraph/hypergraph.h>
#include <qtmpc/hypergraph/sparsity.h>

#include <cmath>
#include <limits>
#include <random>

#include "gtest/gtest.h"

using namespace qtmpc;

namespace {

VectorXd vec(std::initializer_list<double> v)
{
    VectorXd out(v.size());
    int i = 0;
    for (double d : v) out[i++] = d;
    return out;
}

Edge::Ptr square_edge(int v)
{
    return std::make_shared<FunctionEdge>(EdgeKind::equality, std::vector<int>{v}, 1, [](const VertexValues& x) {
        return VectorXd::Constant(1, (*x[0])[0] * (*x[0])[0]);
    });
}

// Coupling term over two vertices: r = a0 * b1 + sin(a1).
Edge::Ptr coupling_edge(int a, int b, EdgeKind kind = EdgeKind::equality)
{
    return std::make_shared<FunctionEdge>(kind, std::vector<int>{a, b}, 1, [](const VertexValues& x) {
        return VectorXd::Constant(1, (*x[0])[0] * (*x[1])[1] + std::sin((*x[0])[1]));
    });
}

}  // namespace

class HypergraphTest : public testing::Test
{
 protected:
    void SetUp() override
    {
        a = graph.add_vertex(Vertex::make(VertexKind::state, 0, vec({1.0, 2.0})));
        b = graph.add_vertex(Vertex::make(VertexKind::control, 0, vec({-1.0, 0.5})));
        c = graph.add_vertex(Vertex::make(VertexKind::state, 1, vec({3.0})));
        f = graph.add_vertex(Vertex::make(VertexKind::state, 2, vec({7.0}), true));
    }

    Hypergraph graph;
    int a = -1, b = -1, c = -1, f = -1;
};

TEST_F(HypergraphTest, FixedVerticesHaveNoColumns)
{
    graph.add_edge(coupling_edge(a, b));
    graph.finalize();
    EXPECT_EQ(graph.parameter_count(), 5);
    EXPECT_EQ(graph.parameter_offset(a), 0);
    EXPECT_EQ(graph.parameter_offset(b), 2);
    EXPECT_EQ(graph.parameter_offset(c), 4);
    EXPECT_EQ(graph.parameter_offset(f), -1);
}

TEST_F(HypergraphTest, InvalidBoundsRejected)
{
    graph.vertex(a).lower[0] = 2.0;
    graph.vertex(a).upper[0] = 1.0;
    EXPECT_THROW(graph.finalize(), std::invalid_argument);
}

TEST_F(HypergraphTest, UnknownVertexRejected)
{
    EXPECT_THROW(graph.add_edge(coupling_edge(a, 42)), std::invalid_argument);
}

TEST_F(HypergraphTest, ParametersRoundTrip)
{
    graph.finalize();
    const VectorXd p = vec({0.1, 0.2, 0.3, 0.4, 0.5});
    graph.set_parameters(p);
    EXPECT_EQ(graph.parameters(), p);
    EXPECT_THROW(graph.set_parameters(vec({1.0})), std::invalid_argument);
}

TEST_F(HypergraphTest, PolynomialDerivative)
{
    graph.add_edge(square_edge(c));
    graph.finalize();
    const NlpEvaluation ev = evaluate_derivatives(graph, graph.parameters());
    EXPECT_NEAR(ev.equality_jacobian.coeff(0, 4), 6.0, 1e-5);
    EXPECT_DOUBLE_EQ(ev.equality[0], 9.0);
}

TEST_F(HypergraphTest, CentralDifferences)
{
    graph.add_edge(square_edge(c));
    graph.finalize();
    DerivativeOptions opt;
    opt.central = true;
    opt.step    = 1e-6;
    const NlpEvaluation ev = evaluate_derivatives(graph, graph.parameters(), opt);
    EXPECT_NEAR(ev.equality_jacobian.coeff(0, 4), 6.0, 1e-8);
}

TEST_F(HypergraphTest, LocalityOfResiduals)
{
    graph.add_edge(coupling_edge(a, b));
    graph.add_edge(square_edge(c));
    graph.finalize();
    VectorXd p             = graph.parameters();
    const NlpResiduals r0  = evaluate_residuals(graph, p);
    p[4] += 0.37;  // c is not connected to the first edge
    const NlpResiduals r1  = evaluate_residuals(graph, p);
    EXPECT_EQ(r0.equality[0], r1.equality[0]);
    EXPECT_NE(r0.equality[1], r1.equality[1]);
}

TEST_F(HypergraphTest, ResidualDependsOnlyOnListedVertices)
{
    graph.add_edge(coupling_edge(a, b));
    graph.finalize();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unit(-1, 1);
    for (int trial = 0; trial < 20; ++trial)
    {
        VectorXd p = graph.parameters();
        for (int i = 0; i < p.size(); ++i) p[i] = unit(rng);
        const double base = evaluate_residuals(graph, p).equality[0];
        p[4] += unit(rng);
        EXPECT_EQ(evaluate_residuals(graph, p).equality[0], base);
    }
}

TEST_F(HypergraphTest, JacobianMatchesClosedForm)
{
    graph.add_edge(coupling_edge(a, b));
    graph.finalize();
    const VectorXd p       = graph.parameters();  // a = (1, 2), b = (-1, 0.5)
    const NlpEvaluation ev = evaluate_derivatives(graph, p);
    EXPECT_NEAR(ev.equality_jacobian.coeff(0, 0), 0.5, 1e-6);           // d/da0 = b1
    EXPECT_NEAR(ev.equality_jacobian.coeff(0, 1), std::cos(2.0), 1e-6);  // d/da1
    EXPECT_NEAR(ev.equality_jacobian.coeff(0, 2), 0.0, 1e-6);
    EXPECT_NEAR(ev.equality_jacobian.coeff(0, 3), 1.0, 1e-6);  // d/db1 = a0
}

TEST_F(HypergraphTest, NonFiniteResidualNamesEdge)
{
    graph.add_edge(square_edge(c));
    graph.add_edge(std::make_shared<FunctionEdge>(EdgeKind::equality, std::vector<int>{a}, 1, [](const VertexValues& x) {
        return VectorXd::Constant(1, std::log(-std::abs((*x[0])[0])));
    }));
    graph.finalize();
    try
    {
        evaluate_residuals(graph, graph.parameters());
        FAIL() << "expected EvaluationError";
    }
    catch (const EvaluationError& e)
    {
        EXPECT_EQ(e.edge_id(), 1);
    }
}

TEST_F(HypergraphTest, DisjointEdgesGiveBlockDiagonalHessian)
{
    graph.add_edge(std::make_shared<FunctionEdge>(EdgeKind::equality, std::vector<int>{a}, 1, [](const VertexValues& x) {
        return VectorXd::Constant(1, (*x[0])[0] * (*x[0])[1]);
    }));
    graph.add_edge(square_edge(c));
    graph.finalize();
    const GraphSparsity s = derive_sparsity(graph);
    for (const auto& [r, col] : s.hessian.entries)
    {
        const bool block_a = r < 2 && col < 2;
        EXPECT_TRUE(block_a || r == col) << r << "," << col;
    }
    EXPECT_EQ(s.hessian.nonzeros(), 4 + 2 + 1);
}

TEST_F(HypergraphTest, LinearEdgesAddOnlyJacobianEntries)
{
    auto lin = std::make_shared<FunctionEdge>(
        EdgeKind::equality, std::vector<int>{a, c}, 1,
        [](const VertexValues& x) { return VectorXd::Constant(1, (*x[0])[0] - (*x[1])[0]); }, true);
    graph.add_edge(lin);
    graph.finalize();
    const GraphSparsity s = derive_sparsity(graph);
    EXPECT_EQ(s.hessian.nonzeros(), graph.parameter_count());
    EXPECT_EQ(s.jacobian.nonzeros(), 3);
}

TEST_F(HypergraphTest, PatternAfterEditEqualsFreshBuild)
{
    graph.add_edge(coupling_edge(a, b));
    graph.finalize();
    derive_sparsity(graph);
    graph.add_edge(coupling_edge(b, c, EdgeKind::inequality));
    graph.finalize();
    const GraphSparsity edited = derive_sparsity(graph);

    Hypergraph fresh;
    fresh.add_vertex(graph.vertex(a));
    fresh.add_vertex(graph.vertex(b));
    fresh.add_vertex(graph.vertex(c));
    fresh.add_vertex(graph.vertex(f));
    fresh.add_edge(coupling_edge(a, b));
    fresh.add_edge(coupling_edge(b, c, EdgeKind::inequality));
    fresh.finalize();
    const GraphSparsity built = derive_sparsity(fresh);
    EXPECT_EQ(edited.hessian.entries, built.hessian.entries);
    EXPECT_EQ(edited.jacobian.entries, built.jacobian.entries);
}

TEST_F(HypergraphTest, JacobianValuesOnlyOnStructuralNonzeros)
{
    graph.add_edge(coupling_edge(a, b));
    graph.add_edge(coupling_edge(b, c, EdgeKind::inequality));
    graph.finalize();
    const GraphSparsity s  = derive_sparsity(graph);
    const NlpEvaluation ev = evaluate_derivatives(graph, graph.parameters());
    for (int k = 0; k < ev.equality_jacobian.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(ev.equality_jacobian, k); it; ++it)
            EXPECT_TRUE(s.jacobian.contains(it.row(), it.col()));
    for (int k = 0; k < ev.inequality_jacobian.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(ev.inequality_jacobian, k); it; ++it)
            EXPECT_TRUE(s.jacobian.contains(graph.equality_count() + it.row(), it.col()));
}

TEST_F(HypergraphTest, ObjectiveGradientAccumulates)
{
    auto obj = std::make_shared<FunctionEdge>(EdgeKind::objective, std::vector<int>{c}, 1, [](const VertexValues& x) {
        return VectorXd::Constant(1, 2.0 * (*x[0])[0]);
    });
    graph.add_edge(obj);
    graph.add_edge(obj);
    graph.finalize();
    const NlpEvaluation ev = evaluate_derivatives(graph, graph.parameters());
    EXPECT_DOUBLE_EQ(ev.objective, 12.0);
    EXPECT_NEAR(ev.gradient[4], 4.0, 1e-5);
}

TEST(Hypergraph, ObjectiveEdgesMustBeScalar)
{
    Hypergraph g;
    const int v = g.add_vertex(Vertex::make(VertexKind::state, 0, vec({1.0, 1.0})));
    auto bad    = std::make_shared<FunctionEdge>(EdgeKind::objective, std::vector<int>{v}, 2,
                                              [](const VertexValues& x) { return *x[0]; });
    EXPECT_THROW(g.add_edge(bad), std::invalid_argument);
}

TEST(Hypergraph, UnfinalizedUseThrows)
{
    Hypergraph g;
    g.add_vertex(Vertex::make(VertexKind::state, 0, vec({1.0})));
    EXPECT_THROW(g.parameters(), std::logic_error);
    EXPECT_THROW(derive_sparsity(g), std::logic_error);
}
