#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "test_support.hpp"

#include "weakmeas/hilbert.hpp"

#include <numbers>

using namespace weakmeas;
using weakmeas::testing::Random;

namespace
{

const StateVector e1 = StateVector::basis(2, 0);
const StateVector e2 = StateVector::basis(2, 1);

bool close(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double tol)
{
	return a.rows() == b.rows() && a.cols() == b.cols() && max_abs(a - b) <= tol;
}

} // namespace

TEST_CASE("state vectors normalize on construction")
{
	const StateVector v{Complex{3.0, 0.0}, Complex{0.0, 4.0}};
	CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-15));
	CHECK(std::abs(v[0] - Complex{0.6, 0.0}) < 1e-15);

	const StateVector raw = StateVector::raw(Eigen::VectorXcd::Constant(2, 2.0));
	CHECK(raw.norm() == doctest::Approx(std::sqrt(8.0)));
	CHECK_FALSE(raw.is_normalized());

	CHECK_THROWS_AS(StateVector(Eigen::VectorXcd::Zero(3)), StateError);
	CHECK_THROWS_AS(StateVector(Eigen::VectorXcd()), StateError);
}

TEST_CASE("observables reject non-Hermitian input and symmetrize")
{
	Eigen::MatrixXcd m(2, 2);
	m << 1.0, Complex{0.0, 1.0}, Complex{0.0, 1.0}, 1.0;
	CHECK_THROWS_AS(Observable{m}, HermiticityError);
	CHECK_THROWS_AS(Observable{Eigen::MatrixXcd(2, 3)}, DimensionError);

	Eigen::MatrixXcd nearly = testing::pauli_y();
	nearly(0, 1) += Complex{1e-13, 0.0};
	const Observable y(nearly);
	CHECK(max_abs(y.matrix() - y.matrix().adjoint()) == 0.0);
}

TEST_CASE("inner product")
{
	CHECK(inner(e1, e1) == Complex{1.0, 0.0});
	CHECK(inner(e1, e2) == Complex{0.0, 0.0});

	// (conj(1)·1 + conj(i)·(-i))/2 = (1 - 1)/2
	const StateVector plus_i{Complex{1.0, 0.0}, Complex{0.0, 1.0}};
	const StateVector minus_i{Complex{1.0, 0.0}, Complex{0.0, -1.0}};
	CHECK(std::abs(inner(plus_i, minus_i)) < 1e-15);

	CHECK_THROWS_AS(inner(e1, StateVector::basis(3, 0)), DimensionError);

	SUBCASE("conjugate-linear on the left, linear on the right")
	{
		Random rng(11);
		const Eigen::VectorXcd v = rng.vector(5);
		const Eigen::VectorXcd w = rng.vector(5);
		const Complex c{0.3, -1.7};
		const Complex lhs = inner(StateVector::raw(c * v), StateVector::raw(w));
		const Complex rhs = inner(StateVector::raw(v), StateVector::raw(c * w));
		CHECK(std::abs(lhs - std::conj(c) * inner(StateVector::raw(v), StateVector::raw(w))) < 1e-12);
		CHECK(std::abs(rhs - c * inner(StateVector::raw(v), StateVector::raw(w))) < 1e-12);
		const Complex self = inner(StateVector::raw(v), StateVector::raw(v));
		CHECK(self.real() > 0.0);
		CHECK(std::abs(self.imag()) < 1e-14);
	}
}

TEST_CASE("tensor products are system-major")
{
	const StateVector product = tensor_state(e1, e2);
	REQUIRE(product.dim() == 4);
	CHECK(product.amps().isApprox(Eigen::VectorXcd::Unit(4, 1)));

	CHECK(close(tensor_op(Observable::identity(2), Observable::identity(2)).matrix(),
		Eigen::MatrixXcd::Identity(4, 4), 0.0));

	const Observable z_i = tensor_op(Observable(testing::pauli_z()), Observable::identity(2));
	CHECK(z_i.apply(product).amps().isApprox(product.amps()));

	Random rng(3);
	for(int trial = 0; trial < 20; ++trial)
	{
		const Index ds = rng.integer(1, 5);
		const Index dm = rng.integer(1, 5);
		const StateVector s = StateVector::raw(rng.vector(ds));
		const StateVector m = StateVector::raw(rng.vector(dm));
		const StateVector s2 = StateVector::raw(rng.vector(ds));
		const StateVector m2 = StateVector::raw(rng.vector(dm));
		const Observable x = rng.hermitian(ds);
		const Observable y = rng.hermitian(dm);

		CHECK(tensor_state(s, m).norm() == doctest::Approx(s.norm() * m.norm()).epsilon(1e-12));
		CHECK(std::abs(inner(tensor_state(s, m), tensor_state(s2, m2)) - inner(s, s2) * inner(m, m2))
			< 1e-10);

		// (X ⊗ Y)(s ⊗ m) = Xs ⊗ Ym, through both the dense Kronecker and the
		// reshaped product.
		const StateVector expected = tensor_state(x.apply(s), y.apply(m));
		CHECK((tensor_op(x, y).apply(tensor_state(s, m)).amps() - expected.amps()).norm() < 1e-10);
		CHECK((apply_product(x.matrix(), y.matrix(), tensor_state(s, m)).amps() - expected.amps()).norm()
			< 1e-10);
		CHECK(close(tensor_op(x, y).matrix(), testing::kron(x.matrix(), y.matrix()), 1e-14));

		// tensor factorization of matrix elements
		const Complex element = inner(tensor_state(s, m), tensor_op(x, y).apply(tensor_state(s2, m2)));
		CHECK(std::abs(element - inner(s, x.apply(s2)) * inner(m, y.apply(m2))) < 1e-10);
	}
}

TEST_CASE("eig_hermitian")
{
	SUBCASE("sigma_z")
	{
		const SpectralDecomposition d = eig_hermitian(Observable(testing::pauli_z()));
		CHECK(d.eigenvalues()[0] == doctest::Approx(-1.0));
		CHECK(d.eigenvalues()[1] == doctest::Approx(1.0));
		CHECK(std::abs(std::abs(inner(d.eigenvector(0), e2)) - 1.0) < 1e-14);
		CHECK(std::abs(std::abs(inner(d.eigenvector(1), e1)) - 1.0) < 1e-14);
		CHECK(d.groups().size() == 2);
	}
	SUBCASE("sigma_x")
	{
		const SpectralDecomposition d = eig_hermitian(Observable(testing::pauli_x()));
		CHECK(d.eigenvalues()[0] == doctest::Approx(-1.0));
		CHECK(d.eigenvalues()[1] == doctest::Approx(1.0));
		const StateVector minus{Complex{1.0, 0.0}, Complex{-1.0, 0.0}};
		const StateVector plus{Complex{1.0, 0.0}, Complex{1.0, 0.0}};
		CHECK(std::abs(std::abs(inner(d.eigenvector(0), minus)) - 1.0) < 1e-14);
		CHECK(std::abs(std::abs(inner(d.eigenvector(1), plus)) - 1.0) < 1e-14);
	}
	SUBCASE("random Hermitian reconstruction and orthonormality up to dim 64")
	{
		Random rng(8);
		for(Index n : {1, 2, 3, 8, 17, 64})
		{
			const Observable a = rng.hermitian(n, 3.0);
			const SpectralDecomposition d = eig_hermitian(a);
			CHECK(max_abs(d.reconstruct() - a.matrix()) <= 1e-10);
			const Eigen::MatrixXcd gram = d.eigenvectors().adjoint() * d.eigenvectors();
			CHECK(max_abs(gram - Eigen::MatrixXcd::Identity(n, n)) <= 1e-10);
			for(Index j = 1; j < n; ++j)
			{
				CHECK(d.eigenvalues()[j - 1] <= d.eigenvalues()[j]);
			}
		}
	}
	SUBCASE("degenerate eigenvalues are grouped")
	{
		Random rng(21);
		const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(
			testing::Random(5).hermitian_matrix(4) + Eigen::MatrixXcd::Identity(4, 4))
									   .householderQ();
		Eigen::VectorXd values(4);
		values << 2.0, -1.0, 2.0, 2.0;
		const Observable a(q * values.cast<Complex>().asDiagonal() * q.adjoint());
		const SpectralDecomposition d = eig_hermitian(a);
		REQUIRE(d.groups().size() == 2);
		CHECK(d.groups()[0].count == 1);
		CHECK(d.groups()[1].count == 3);
		CHECK(d.groups()[1].value == doctest::Approx(2.0));
		const Eigen::MatrixXcd p = d.projector(d.groups()[1]);
		CHECK(max_abs(p * p - p) < 1e-12);
		CHECK(p.trace().real() == doctest::Approx(3.0));
	}
	SUBCASE("diagonal input keeps eigenvectors on the basis")
	{
		Eigen::VectorXd values(3);
		values << 0.5, -2.0, 0.5;
		const SpectralDecomposition d = eig_hermitian(Observable::diagonal(values));
		CHECK(d.eigenvalues()[0] == -2.0);
		CHECK(d.groups().size() == 2);
		CHECK(std::abs(d.eigenvectors()(1, 0) - 1.0) == 0.0);
	}
}

TEST_CASE("evolve")
{
	Random rng(5);
	SUBCASE("zero time is the identity")
	{
		const Observable h = rng.hermitian(4);
		const StateVector v = rng.state(4);
		CHECK(evolve(h, 0.0, v).amps() == v.amps());
	}
	SUBCASE("eigenvector phase")
	{
		const StateVector out = evolve(Observable(testing::pauli_z()), std::numbers::pi, e1);
		CHECK(std::abs(out[0] - Complex{-1.0, 0.0}) < 1e-14);
		CHECK(std::abs(out[1]) < 1e-14);
	}
	SUBCASE("agrees with the Pade exponential and preserves norms")
	{
		for(int trial = 0; trial < 20; ++trial)
		{
			const Index n = rng.integer(1, 9);
			const Observable h = rng.hermitian(n, 2.0);
			const double eps = rng.uniform(0.0, 1.0);
			const StateVector v = rng.state(n);
			const StateVector out = evolve(h, eps, v);
			CHECK(std::abs(out.norm() - 1.0) <= 1e-12);
			const Eigen::VectorXcd expected = testing::dense_propagator(h.matrix(), eps) * v.amps();
			CHECK((out.amps() - expected).cwiseAbs().maxCoeff() < 1e-12);
		}
	}
	SUBCASE("group property")
	{
		const Observable h = rng.hermitian(6);
		const StateVector v = rng.state(6);
		const StateVector two_steps = evolve(h, 0.3, evolve(h, 0.45, v));
		CHECK((two_steps.amps() - evolve(h, 0.75, v).amps()).cwiseAbs().maxCoeff() <= 1e-10);
	}
	CHECK_THROWS_AS(evolve(Observable::identity(2), 0.1, StateVector::basis(3, 0)), DimensionError);
}

TEST_CASE("evolve_coupling")
{
	Random rng(17);
	SUBCASE("eps = 0 is the identity")
	{
		const StateVector v = rng.state(6);
		CHECK(evolve_coupling(rng.hermitian(2), rng.hermitian(3), 0.0, v).amps() == v.amps());
	}
	SUBCASE("identity system factor acts on the meter only")
	{
		const Observable g = rng.hermitian(3);
		const StateVector s = rng.state(2);
		const StateVector m = rng.state(3);
		const StateVector out = evolve_coupling(Observable::identity(2), g, 0.2, tensor_state(s, m));
		const StateVector expected = tensor_state(s, evolve(g, 0.2, m));
		CHECK((out.amps() - expected.amps()).cwiseAbs().maxCoeff() < 1e-12);
	}
	SUBCASE("factored evolution equals dense composite evolution")
	{
		for(int trial = 0; trial < 20; ++trial)
		{
			const Index ds = rng.integer(1, 5);
			const Index dm = rng.integer(1, 5);
			const Observable a = rng.hermitian(ds);
			const Observable g = rng.hermitian(dm);
			const StateVector v = rng.state(ds * dm);
			const double eps = trial == 0 ? 0.1 : rng.uniform(0.0, 1.0);
			const StateVector factored = evolve_coupling(a, g, eps, v);
			const StateVector dense = evolve(tensor_op(a, g), eps, v);
			CHECK((factored.amps() - dense.amps()).cwiseAbs().maxCoeff() <= 1e-10);
			const Eigen::VectorXcd pade
				= testing::dense_propagator(testing::kron(a.matrix(), g.matrix()), eps) * v.amps();
			CHECK((factored.amps() - pade).cwiseAbs().maxCoeff() <= 1e-10);
		}
	}
	SUBCASE("degenerate system observable")
	{
		Eigen::VectorXd values(3);
		values << 1.0, 1.0, -0.5;
		const Observable a = Observable::diagonal(values);
		const Observable g = rng.hermitian(2);
		const StateVector v = rng.state(6);
		CHECK((evolve_coupling(a, g, 0.4, v).amps() - evolve(tensor_op(a, g), 0.4, v).amps())
				  .cwiseAbs()
				  .maxCoeff()
			< 1e-12);
	}
	CHECK_THROWS_AS(evolve_coupling(Observable::identity(2), Observable::identity(2), 0.1,
						StateVector::basis(3, 0)),
		DimensionError);
}

TEST_CASE("projector")
{
	CHECK(close(projector(e1).matrix(), Eigen::Vector2cd(1.0, 0.0).asDiagonal().toDenseMatrix(), 0.0));
	CHECK(close(projector(StateVector::raw(2.0 * e1.amps())).matrix(), projector(e1).matrix(), 1e-15));
	const StateVector diag{Complex{1.0, 0.0}, Complex{1.0, 0.0}};
	CHECK(close(projector(diag).matrix(), Eigen::MatrixXcd::Constant(2, 2, 0.5), 1e-15));

	Random rng(2);
	const Eigen::MatrixXcd p = projector(StateVector::raw(rng.vector(5))).matrix();
	CHECK(max_abs(p * p - p) <= 1e-12);
	CHECK(p.trace().real() == doctest::Approx(1.0));

	CHECK_THROWS_AS(projector(StateVector::raw(Eigen::VectorXcd::Zero(2))), StateError);
}

TEST_CASE("partial trace over the meter")
{
	Random rng(9);
	const StateVector s = rng.state(3);
	const StateVector m = rng.state(4);

	const DensityMatrix product = DensityMatrix::pure(tensor_state(s, m));
	CHECK(close(partial_trace_meter(product, 3, 4).matrix(), projector(s).matrix(), 1e-12));

	// P_s ⊗ ρ_M with a random mixed ρ_M
	const Eigen::MatrixXcd x = rng.hermitian_matrix(4);
	Eigen::MatrixXcd rho_m = x * x.adjoint();
	rho_m /= rho_m.trace();
	const DensityMatrix factorized(testing::kron(projector(s).matrix(), rho_m));
	CHECK(close(partial_trace_meter(factorized, 3, 4).matrix(), projector(s).matrix(), 1e-12));

	// Bell state (e1⊗e1 + e2⊗e2)/√2 by direct summation: the reduced state has
	// entries Σ_k ψ(i,k) conj(ψ(j,k)) = δ_ij / 2.
	const StateVector bell{Complex{1.0, 0.0}, 0.0, 0.0, Complex{1.0, 0.0}};
	const DensityMatrix reduced = partial_trace_meter(DensityMatrix::pure(bell), 2, 2);
	CHECK(close(reduced.matrix(), 0.5 * Eigen::MatrixXcd::Identity(2, 2), 1e-15));

	SUBCASE("random mixed states reduce to valid density matrices")
	{
		for(int trial = 0; trial < 10; ++trial)
		{
			const Eigen::MatrixXcd y = rng.hermitian_matrix(6) + Complex{0.0, 1.0} * rng.hermitian_matrix(6);
			Eigen::MatrixXcd rho = y * y.adjoint();
			rho /= rho.trace();
			const DensityMatrix reduced_random = partial_trace_meter(DensityMatrix(rho), 2, 3);
			CHECK(reduced_random.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
		}
	}

	CHECK_THROWS_AS(partial_trace_meter(product, 2, 4), DimensionError);
}

TEST_CASE("density matrix validation")
{
	CHECK_THROWS_AS(DensityMatrix(Eigen::MatrixXcd::Identity(2, 2)), StateError);
	Eigen::MatrixXcd negative(2, 2);
	negative << 1.5, 0.0, 0.0, -0.5;
	CHECK_THROWS_AS(DensityMatrix{negative}, StateError);
}

TEST_CASE("expectation")
{
	CHECK(expectation(Observable(testing::pauli_z()), e1) == doctest::Approx(1.0));
	const StateVector plus{Complex{1.0, 0.0}, Complex{1.0, 0.0}};
	CHECK(std::abs(expectation(Observable(testing::pauli_z()), plus)) < 1e-15);
	// ⟨s,σx s⟩ = (conj(1)·i + conj(i)·1)/2 = 0
	CHECK(std::abs(expectation(Observable(testing::pauli_x()), testing::plus_i_state())) < 1e-15);

	CHECK_THROWS_AS(expectation(Observable::identity(2), StateVector::raw(2.0 * e1.amps())), StateError);
	CHECK_THROWS_AS(expectation(Observable::identity(3), e1), DimensionError);
}

TEST_CASE("trace distance")
{
	CHECK(trace_distance(projector(e1).matrix(), projector(e2).matrix()) == doctest::Approx(1.0));
	CHECK(trace_distance(projector(e1).matrix(), projector(e1).matrix()) == doctest::Approx(0.0));
	const StateVector plus{Complex{1.0, 0.0}, Complex{1.0, 0.0}};
	// pure states: sqrt(1 - |⟨u,v⟩|²) = sqrt(1/2)
	CHECK(trace_distance(projector(e1).matrix(), projector(plus).matrix())
		== doctest::Approx(std::sqrt(0.5)));
}
