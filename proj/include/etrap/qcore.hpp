#ifndef ETRAP_QCORE_HPP
#define ETRAP_QCORE_HPP

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "etrap/errors.hpp"

namespace etrap {

/// Dense operator on a truncated tensor-product Hilbert space.
/// `dims` lists the tensor-factor dimensions; the matrix side is prod(dims).
/// Factor 0 is the slowest-varying index of the product basis.
struct HilbertOp {
    std::vector<int> dims;
    Eigen::MatrixXcd mat;

    HilbertOp() = default;
    HilbertOp(std::vector<int> d, Eigen::MatrixXcd m);

    int total_dim() const;

    /// max|M - M^dag| <= tol * max|M|
    bool is_hermitian(double rel_tol = 1e-12) const;

    static HilbertOp identity(const std::vector<int>& dims);
};

HilbertOp operator+(const HilbertOp& a, const HilbertOp& b);
HilbertOp operator-(const HilbertOp& a, const HilbertOp& b);
HilbertOp operator*(const HilbertOp& a, const HilbertOp& b);
HilbertOp operator*(double s, const HilbertOp& a);
HilbertOp dagger(const HilbertOp& a);
HilbertOp commutator(const HilbertOp& a, const HilbertOp& b);

/// Annihilation / creation pair on a dim-level truncated oscillator,
/// a[n-1,n] = sqrt(n). Throws invalid_dimension_error for dim < 2.
std::pair<HilbertOp, HilbertOp> ladder(int dim);

/// a^dag a on a truncated oscillator.
HilbertOp number_op(int dim);

/// Two-level operators in the basis {|g> = 0, |e> = 1}.
HilbertOp sigma_z();
HilbertOp sigma_plus();
HilbertOp sigma_minus();

/// I x ... x op x ... x I with op placed at `slot`; result.dims = dims.
HilbertOp embed(const HilbertOp& op, int slot, const std::vector<int>& dims);

/// Spectrum of a Hermitian operator with bare-basis bookkeeping.
/// assignments[b] is the eigenvector index of maximal overlap with bare
/// basis state b; the label is flagged ambiguous when that maximal overlap
/// (amplitude) falls below 1/sqrt(2).
struct EigenResult {
    Eigen::VectorXd eigenvalues;   // ascending, units of the input operator
    Eigen::MatrixXcd eigenvectors; // column k <-> eigenvalue k
    std::vector<int> assignments;
    std::vector<double> overlaps;  // |<bare_b | eigvec_assignments[b]>|
    std::vector<int> ambiguous;    // bare indices with overlap < 1/sqrt(2)
    std::vector<std::string> labels;

    bool any_ambiguous() const { return !ambiguous.empty(); }
};

/// Full Hermitian eigendecomposition. Throws contract_violation when the
/// input fails the Hermiticity check. `bare_labels`, when given, must
/// enumerate the product basis and is echoed into the result.
EigenResult eig_hermitian(const HilbertOp& H,
                          const std::vector<std::string>& bare_labels = {});

} // namespace etrap

#endif
