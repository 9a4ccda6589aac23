#include "weakmeas/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace weakmeas
{

namespace
{

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void require_same_dim(Index a, Index b, const char* what)
{
	if(a != b)
	{
		throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a)
			+ " vs " + std::to_string(b) + ")");
	}
}

bool is_diagonal(const Eigen::MatrixXcd& m)
{
	for(Index j = 0; j < m.cols(); ++j)
	{
		for(Index i = 0; i < m.rows(); ++i)
		{
			if(i != j && m(i, j) != Complex{0.0, 0.0})
			{
				return false;
			}
		}
	}
	return true;
}

} // namespace

double max_abs(const Eigen::MatrixXcd& m)
{
	return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(RawTag, Eigen::VectorXcd amps)
	: amps_(std::move(amps))
{
	if(amps_.size() == 0)
	{
		throw StateError("state vector must have positive dimension");
	}
}

StateVector::StateVector(Eigen::VectorXcd amps)
	: StateVector(RawTag{}, std::move(amps))
{
	const double n = amps_.norm();
	if(!(n > 0.0) || !std::isfinite(n))
	{
		throw StateError("cannot normalize a zero or non-finite vector");
	}
	amps_ /= n;
}

StateVector::StateVector(std::initializer_list<Complex> amps)
	: StateVector(Eigen::VectorXcd::Map(amps.begin(), static_cast<Index>(amps.size())))
{
}

StateVector StateVector::raw(Eigen::VectorXcd amps)
{
	return StateVector(RawTag{}, std::move(amps));
}

StateVector StateVector::basis(Index dim, Index k)
{
	if(k < 0 || k >= dim)
	{
		throw DimensionError("basis index out of range");
	}
	Eigen::VectorXcd e = Eigen::VectorXcd::Zero(dim);
	e[k] = 1.0;
	return StateVector(RawTag{}, std::move(e));
}

bool StateVector::is_normalized() const
{
	return std::abs(amps_.norm() - 1.0) <= state_norm_tolerance;
}

// ----------------------------------------------------------------- Observable

Observable::Observable(const Eigen::MatrixXcd& entries)
{
	if(entries.rows() == 0 || entries.rows() != entries.cols())
	{
		throw DimensionError("observable must be a non-empty square matrix");
	}
	const double scale = max_abs(entries);
	const double asym = max_abs(entries - entries.adjoint());
	if(asym > hermiticity_tolerance * scale)
	{
		throw HermiticityError("matrix is not Hermitian (max |M - M^dagger| = "
			+ std::to_string(asym) + ")");
	}
	entries_ = (entries + entries.adjoint()) / 2.0;
}

Observable Observable::identity(Index dim)
{
	return Observable(Eigen::MatrixXcd::Identity(dim, dim));
}

Observable Observable::diagonal(const Eigen::VectorXd& values)
{
	return Observable(values.cast<Complex>().asDiagonal().toDenseMatrix());
}

StateVector Observable::apply(const StateVector& v) const
{
	require_same_dim(dim(), v.dim(), "Observable::apply");
	return StateVector::raw(entries_ * v.amps());
}

// ------------------------------------------------------ SpectralDecomposition

SpectralDecomposition::SpectralDecomposition(Eigen::VectorXd eigenvalues,
	Eigen::MatrixXcd eigenvectors)
	: eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors))
{
	const Index n = eigenvalues_.size();
	if(n == 0 || eigenvectors_.rows() != n || eigenvectors_.cols() != n)
	{
		throw DimensionError("spectral decomposition: inconsistent shapes");
	}
	const double scale = eigenvalues_.cwiseAbs().maxCoeff();
	const double tol = degeneracy_tolerance * scale;
	Index first = 0;
	for(Index j = 1; j <= n; ++j)
	{
		if(j == n || eigenvalues_[j] - eigenvalues_[first] > tol)
		{
			const double mean = eigenvalues_.segment(first, j - first).mean();
			groups_.push_back(Eigenspace{mean, first, j - first});
			first = j;
		}
	}
}

StateVector SpectralDecomposition::eigenvector(Index k) const
{
	return StateVector::raw(eigenvectors_.col(k));
}

Eigen::MatrixXcd SpectralDecomposition::projector(const Eigenspace& group) const
{
	const auto cols = eigenvectors_.middleCols(group.first, group.count);
	return cols * cols.adjoint();
}

Eigen::MatrixXcd SpectralDecomposition::reconstruct() const
{
	return eigenvectors_ * eigenvalues_.cast<Complex>().asDiagonal() * eigenvectors_.adjoint();
}

// -------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(const Eigen::MatrixXcd& entries)
{
	if(entries.rows() == 0 || entries.rows() != entries.cols())
	{
		throw DimensionError("density matrix must be a non-empty square matrix");
	}
	if(max_abs(entries - entries.adjoint()) > density_tolerance)
	{
		throw StateError("density matrix is not Hermitian");
	}
	entries_ = (entries + entries.adjoint()) / 2.0;
	const double tr = entries_.trace().real();
	if(std::abs(tr - 1.0) > density_tolerance)
	{
		throw StateError("density matrix trace " + std::to_string(tr) + " differs from 1");
	}
	Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
	if(solver.eigenvalues().minCoeff() < -density_tolerance)
	{
		throw StateError("density matrix is not positive");
	}
}

DensityMatrix DensityMatrix::pure(const StateVector& v)
{
	const Eigen::VectorXcd u = v.amps() / v.norm();
	return DensityMatrix(u * u.adjoint());
}

// ----------------------------------------------------------------- operations

Complex inner(const StateVector& v, const StateVector& w)
{
	require_same_dim(v.dim(), w.dim(), "inner");
	return v.amps().dot(w.amps()); // Eigen's dot conjugates the left operand
}

StateVector tensor_state(const StateVector& s, const StateVector& m)
{
	Eigen::VectorXcd out(s.dim() * m.dim());
	for(Index i = 0; i < s.dim(); ++i)
	{
		out.segment(i * m.dim(), m.dim()) = s[i] * m.amps();
	}
	return StateVector::raw(std::move(out));
}

Observable tensor_op(const Observable& x, const Observable& y)
{
	const Index dx = x.dim();
	const Index dy = y.dim();
	Eigen::MatrixXcd out(dx * dy, dx * dy);
	for(Index i = 0; i < dx; ++i)
	{
		for(Index k = 0; k < dx; ++k)
		{
			out.block(i * dy, k * dy, dy, dy) = x(i, k) * y.matrix();
		}
	}
	return Observable(out);
}

Eigen::MatrixXcd coefficient_matrix(const StateVector& v, Index dim_s, Index dim_m)
{
	require_same_dim(v.dim(), dim_s * dim_m, "coefficient_matrix");
	return Eigen::Map<const RowMajorMatrix>(v.amps().data(), dim_s, dim_m);
}

StateVector apply_product(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y,
	const StateVector& v)
{
	const Eigen::MatrixXcd coeffs = coefficient_matrix(v, x.cols(), y.cols());
	const RowMajorMatrix image = x * coeffs * y.transpose();
	return StateVector::raw(Eigen::Map<const Eigen::VectorXcd>(image.data(), image.size()));
}

SpectralDecomposition eig_hermitian(const Observable& a)
{
	const Eigen::MatrixXcd& m = a.matrix();
	const Index n = a.dim();
	if(is_diagonal(m))
	{
		std::vector<Index> order(static_cast<std::size_t>(n));
		std::iota(order.begin(), order.end(), Index{0});
		std::stable_sort(order.begin(), order.end(),
			[&](Index p, Index q) { return m(p, p).real() < m(q, q).real(); });
		Eigen::VectorXd values(n);
		Eigen::MatrixXcd vectors = Eigen::MatrixXcd::Zero(n, n);
		for(Index j = 0; j < n; ++j)
		{
			const Index src = order[static_cast<std::size_t>(j)];
			values[j] = m(src, src).real();
			vectors(src, j) = 1.0;
		}
		return SpectralDecomposition(std::move(values), std::move(vectors));
	}
	Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
	if(solver.info() != Eigen::Success)
	{
		throw Error("Hermitian eigensolver did not converge");
	}
	return SpectralDecomposition(solver.eigenvalues(), solver.eigenvectors());
}

StateVector evolve(const SpectralDecomposition& h, double eps, const StateVector& v)
{
	require_same_dim(h.dim(), v.dim(), "evolve");
	return StateVector::raw(h.apply_function(
		[eps](double lambda) { return std::polar(1.0, -eps * lambda); }, v.amps()));
}

StateVector evolve(const Observable& h, double eps, const StateVector& v)
{
	require_same_dim(h.dim(), v.dim(), "evolve");
	if(eps == 0.0)
	{
		return v;
	}
	return evolve(eig_hermitian(h), eps, v);
}

// --------------------------------------------------------- CouplingPropagator

CouplingPropagator::CouplingPropagator(std::shared_ptr<const SpectralDecomposition> system,
	std::shared_ptr<const SpectralDecomposition> coupling)
	: system_(std::move(system)), coupling_(std::move(coupling))
{
}

StateVector CouplingPropagator::apply(double eps, const StateVector& v) const
{
	const Index ds = dim_system();
	const Index dm = dim_meter();
	require_same_dim(v.dim(), ds * dm, "evolve_coupling");
	if(eps == 0.0)
	{
		return v;
	}

	const Eigen::MatrixXcd coeffs = coefficient_matrix(v, ds, dm);
	const Eigen::MatrixXcd& u = coupling_->eigenvectors();
	const Eigen::VectorXd& g_values = coupling_->eigenvalues();
	// Rows of coeffs are meter vectors; move them into G's eigenbasis once.
	const Eigen::MatrixXcd rows_in_g_basis = coeffs * u.conjugate();

	RowMajorMatrix out = RowMajorMatrix::Zero(ds, dm);
	for(const Eigenspace& group : system_->groups())
	{
		const Eigen::MatrixXcd p = system_->projector(group);
		Eigen::MatrixXcd block = p * rows_in_g_basis;
		for(Index k = 0; k < dm; ++k)
		{
			block.col(k) *= std::polar(1.0, -eps * group.value * g_values[k]);
		}
		out.noalias() += block * u.transpose();
	}
	return StateVector::raw(Eigen::Map<const Eigen::VectorXcd>(out.data(), out.size()));
}

StateVector evolve_coupling(const Observable& a, const Observable& g, double eps,
	const StateVector& v)
{
	require_same_dim(v.dim(), a.dim() * g.dim(), "evolve_coupling");
	if(eps == 0.0)
	{
		return v;
	}
	const CouplingPropagator propagator(std::make_shared<const SpectralDecomposition>(eig_hermitian(a)),
		std::make_shared<const SpectralDecomposition>(eig_hermitian(g)));
	return propagator.apply(eps, v);
}

Observable projector(const StateVector& w)
{
	const double n = w.norm();
	if(!(n > 0.0))
	{
		throw StateError("projector onto the zero vector");
	}
	const Eigen::VectorXcd u = w.amps() / n;
	return Observable(u * u.adjoint());
}

DensityMatrix partial_trace_meter(const DensityMatrix& rho, Index dim_s, Index dim_m)
{
	require_same_dim(rho.dim(), dim_s * dim_m, "partial_trace_meter");
	const Eigen::MatrixXcd& r = rho.matrix();
	Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim_s, dim_s);
	for(Index i = 0; i < dim_s; ++i)
	{
		for(Index k = 0; k < dim_s; ++k)
		{
			out(i, k) = r.block(i * dim_m, k * dim_m, dim_m, dim_m).trace();
		}
	}
	return DensityMatrix(out);
}

double expectation(const Observable& a, const StateVector& v)
{
	require_same_dim(a.dim(), v.dim(), "expectation");
	if(!v.is_normalized())
	{
		throw StateError("expectation requires a normalized state");
	}
	const Complex value = v.amps().dot(a.matrix() * v.amps());
	if(std::abs(value.imag()) > hermiticity_tolerance)
	{
		throw HermiticityError("expectation has imaginary residue "
			+ std::to_string(value.imag()));
	}
	return value.real();
}

double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma)
{
	if(rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
	{
		throw DimensionError("trace_distance: dimension mismatch");
	}
	const Eigen::MatrixXcd diff = rho - sigma;
	Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver((diff + diff.adjoint()) / 2.0,
		Eigen::EigenvaluesOnly);
	return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

} // namespace weakmeas
