#pragma once

// Finite-dimensional Hilbert-space algebra: pure states, Hermitian
// observables, spectral decompositions, density matrices and the
// tensor-product operations used by the measurement protocol.
//
// Tensor products are system-major: amplitude index = i_S * dim_M + i_M.
// A composite vector therefore reshapes (row-major) into a dim_S x dim_M
// coefficient matrix V, and (X ⊗ Y) v corresponds to X V Yᵀ.

#include "weakmeas/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <memory>
#include <vector>

namespace weakmeas
{

using Complex = std::complex<double>;
using Index = Eigen::Index;

inline constexpr double state_norm_tolerance = 1e-12;
inline constexpr double hermiticity_tolerance = 1e-10;
inline constexpr double degeneracy_tolerance = 1e-9;
inline constexpr double density_tolerance = 1e-10;

class StateVector
{
public:
	/// Normalizes; throws StateError on an empty or zero vector.
	explicit StateVector(Eigen::VectorXcd amps);
	StateVector(std::initializer_list<Complex> amps);

	/// Unnormalized intermediate result (e.g. a projected state).
	static StateVector raw(Eigen::VectorXcd amps);
	static StateVector basis(Index dim, Index k);

	Index dim() const { return amps_.size(); }
	const Eigen::VectorXcd& amps() const { return amps_; }
	Complex operator[](Index i) const { return amps_[i]; }
	double norm() const { return amps_.norm(); }
	bool is_normalized() const;

private:
	struct RawTag {};
	StateVector(RawTag, Eigen::VectorXcd amps);

	Eigen::VectorXcd amps_;
};

class Observable
{
public:
	/// Checks Hermiticity (relative tolerance 1e-10) and stores (M + M†)/2.
	explicit Observable(const Eigen::MatrixXcd& entries);

	static Observable identity(Index dim);
	static Observable diagonal(const Eigen::VectorXd& values);

	Index dim() const { return entries_.rows(); }
	const Eigen::MatrixXcd& matrix() const { return entries_; }
	Complex operator()(Index i, Index j) const { return entries_(i, j); }

	/// Raw (unnormalized) image X v.
	StateVector apply(const StateVector& v) const;

private:
	Eigen::MatrixXcd entries_;
};

/// A maximal run of (numerically) equal eigenvalues. Eigenvectors of the
/// group occupy columns [first, first + count) of the eigenvector matrix.
struct Eigenspace
{
	double value;
	Index first;
	Index count;
};

class SpectralDecomposition
{
public:
	SpectralDecomposition(Eigen::VectorXd eigenvalues, Eigen::MatrixXcd eigenvectors);

	Index dim() const { return eigenvalues_.size(); }
	/// Ascending.
	const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
	/// Orthonormal columns.
	const Eigen::MatrixXcd& eigenvectors() const { return eigenvectors_; }
	const std::vector<Eigenspace>& groups() const { return groups_; }

	StateVector eigenvector(Index k) const;
	Eigen::MatrixXcd projector(const Eigenspace& group) const;
	/// Σ λ_j P_{v_j}.
	Eigen::MatrixXcd reconstruct() const;
	/// f applied through the spectral calculus: Σ_j f(λ_j) P_{v_j} v.
	template <class F>
	Eigen::VectorXcd apply_function(F&& f, const Eigen::VectorXcd& v) const
	{
		Eigen::VectorXcd coeffs = eigenvectors_.adjoint() * v;
		for(Index j = 0; j < coeffs.size(); ++j)
		{
			coeffs[j] *= f(eigenvalues_[j]);
		}
		return eigenvectors_ * coeffs;
	}

private:
	Eigen::VectorXd eigenvalues_;
	Eigen::MatrixXcd eigenvectors_;
	std::vector<Eigenspace> groups_;
};

class DensityMatrix
{
public:
	/// Validates Hermiticity, unit trace and positivity (all within 1e-10).
	explicit DensityMatrix(const Eigen::MatrixXcd& entries);

	static DensityMatrix pure(const StateVector& v);

	Index dim() const { return entries_.rows(); }
	const Eigen::MatrixXcd& matrix() const { return entries_; }

private:
	Eigen::MatrixXcd entries_;
};

Complex inner(const StateVector& v, const StateVector& w);

StateVector tensor_state(const StateVector& s, const StateVector& m);
Observable tensor_op(const Observable& x, const Observable& y);

/// (X ⊗ Y) v without forming the Kronecker product.
StateVector apply_product(const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y,
	const StateVector& v);

/// Row-major reshape of a composite vector into its dim_S x dim_M
/// coefficient matrix.
Eigen::MatrixXcd coefficient_matrix(const StateVector& v, Index dim_s, Index dim_m);

SpectralDecomposition eig_hermitian(const Observable& a);

/// e^{-i eps H} v via the spectral calculus.
StateVector evolve(const Observable& h, double eps, const StateVector& v);
StateVector evolve(const SpectralDecomposition& h, double eps, const StateVector& v);

/// e^{-i eps (A ⊗ G)} evaluated as Σ_j P_{a_j} ⊗ e^{-i eps α_j G}, so only
/// dim_M-sized exponentials are ever formed. Holds both spectral
/// decompositions, so repeated evaluations at different eps are cheap.
class CouplingPropagator
{
public:
	CouplingPropagator(std::shared_ptr<const SpectralDecomposition> system,
		std::shared_ptr<const SpectralDecomposition> coupling);

	Index dim_system() const { return system_->dim(); }
	Index dim_meter() const { return coupling_->dim(); }

	StateVector apply(double eps, const StateVector& v) const;

private:
	std::shared_ptr<const SpectralDecomposition> system_;
	std::shared_ptr<const SpectralDecomposition> coupling_;
};

StateVector evolve_coupling(const Observable& a, const Observable& g, double eps,
	const StateVector& v);

/// Rank-one projector onto span{w}; P_w = P_{w/|w|}.
Observable projector(const StateVector& w);

DensityMatrix partial_trace_meter(const DensityMatrix& rho, Index dim_s, Index dim_m);

/// ⟨v, A v⟩; throws HermiticityError if the imaginary residue exceeds 1e-10.
double expectation(const Observable& a, const StateVector& v);

/// Half the sum of absolute eigenvalues of (rho - sigma).
double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

/// max |entry|.
double max_abs(const Eigen::MatrixXcd& m);

} // namespace weakmeas
