#include "etrap/qcore.hpp"

#include <cmath>
#include <numeric>

namespace etrap {

namespace {

int checked_total_dim(const std::vector<int>& dims) {
    if (dims.empty())
        throw invalid_dimension_error("empty dimension list");
    long long n = 1;
    for (int d : dims) {
        if (d < 1)
            throw invalid_dimension_error("tensor-factor dimension must be >= 1, got " +
                                          std::to_string(d));
        n *= d;
        if (n > (1 << 20))
            throw invalid_dimension_error("Hilbert space dimension too large: " +
                                          std::to_string(n));
    }
    return static_cast<int>(n);
}

} // namespace

HilbertOp::HilbertOp(std::vector<int> d, Eigen::MatrixXcd m)
    : dims(std::move(d)), mat(std::move(m)) {
    int n = checked_total_dim(dims);
    if (mat.rows() != n || mat.cols() != n)
        throw shape_error("matrix side " + std::to_string(mat.rows()) +
                          " does not match prod(dims) = " + std::to_string(n));
}

int HilbertOp::total_dim() const {
    long long n = 1;
    for (int d : dims) n *= d;
    return static_cast<int>(n);
}

bool HilbertOp::is_hermitian(double rel_tol) const {
    double scale = mat.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    double dev = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
    return dev <= rel_tol * scale;
}

HilbertOp HilbertOp::identity(const std::vector<int>& dims) {
    int n = checked_total_dim(dims);
    return HilbertOp(dims, Eigen::MatrixXcd::Identity(n, n));
}

namespace {

void require_same_dims(const HilbertOp& a, const HilbertOp& b) {
    if (a.dims != b.dims)
        throw shape_error("operands live on different tensor spaces");
}

} // namespace

HilbertOp operator+(const HilbertOp& a, const HilbertOp& b) {
    require_same_dims(a, b);
    return HilbertOp(a.dims, a.mat + b.mat);
}

HilbertOp operator-(const HilbertOp& a, const HilbertOp& b) {
    require_same_dims(a, b);
    return HilbertOp(a.dims, a.mat - b.mat);
}

HilbertOp operator*(const HilbertOp& a, const HilbertOp& b) {
    require_same_dims(a, b);
    return HilbertOp(a.dims, a.mat * b.mat);
}

HilbertOp operator*(double s, const HilbertOp& a) {
    return HilbertOp(a.dims, s * a.mat);
}

HilbertOp dagger(const HilbertOp& a) {
    return HilbertOp(a.dims, a.mat.adjoint());
}

HilbertOp commutator(const HilbertOp& a, const HilbertOp& b) {
    require_same_dims(a, b);
    return HilbertOp(a.dims, a.mat * b.mat - b.mat * a.mat);
}

std::pair<HilbertOp, HilbertOp> ladder(int dim) {
    if (dim < 2)
        throw invalid_dimension_error("ladder operators need dim >= 2, got " +
                                      std::to_string(dim));
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 1; n < dim; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    HilbertOp op({dim}, a);
    return {op, dagger(op)};
}

HilbertOp number_op(int dim) {
    auto [a, adag] = ladder(dim);
    return adag * a;
}

HilbertOp sigma_z() {
    Eigen::MatrixXcd m(2, 2);
    m << -1, 0, 0, 1;
    return HilbertOp({2}, m);
}

HilbertOp sigma_plus() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(1, 0) = 1.0;
    return HilbertOp({2}, m);
}

HilbertOp sigma_minus() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 1) = 1.0;
    return HilbertOp({2}, m);
}

HilbertOp embed(const HilbertOp& op, int slot, const std::vector<int>& dims) {
    if (slot < 0 || slot >= static_cast<int>(dims.size()))
        throw shape_error("embed slot " + std::to_string(slot) + " out of range");
    if (op.dims.size() != 1 || op.dims[0] != dims[slot])
        throw shape_error("operator dimension does not match dims[slot]");

    int n = checked_total_dim(dims);
    int d = dims[slot];
    int after = 1;
    for (size_t k = slot + 1; k < dims.size(); ++k) after *= dims[k];
    int before = n / (d * after);

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    // index = (ib * d + i) * after + ia ; identity on ib and ia
    for (int ib = 0; ib < before; ++ib)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                std::complex<double> v = op.mat(i, j);
                if (v == 0.0) continue;
                int row0 = (ib * d + i) * after;
                int col0 = (ib * d + j) * after;
                for (int ia = 0; ia < after; ++ia)
                    out(row0 + ia, col0 + ia) = v;
            }
    return HilbertOp(dims, std::move(out));
}

EigenResult eig_hermitian(const HilbertOp& H, const std::vector<std::string>& bare_labels) {
    if (!H.is_hermitian())
        throw contract_violation("eig_hermitian: input is not Hermitian within tolerance");

    int n = H.total_dim();
    if (!bare_labels.empty() && static_cast<int>(bare_labels.size()) != n)
        throw shape_error("bare_labels must enumerate the product basis");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(H.mat);
    if (solver.info() != Eigen::Success)
        throw error("eig_hermitian: eigensolver failed to converge");

    EigenResult r;
    r.eigenvalues = solver.eigenvalues();
    r.eigenvectors = solver.eigenvectors();
    r.labels = bare_labels;

    const double thresh = 1.0 / std::sqrt(2.0);
    r.assignments.resize(n);
    r.overlaps.resize(n);
    for (int b = 0; b < n; ++b) {
        int best = 0;
        double best_amp = -1.0;
        for (int k = 0; k < n; ++k) {
            double amp = std::abs(r.eigenvectors(b, k));
            if (amp > best_amp) {
                best_amp = amp;
                best = k;
            }
        }
        r.assignments[b] = best;
        r.overlaps[b] = best_amp;
        if (best_amp < thresh)
            r.ambiguous.push_back(b);
    }
    return r;
}

} // namespace etrap
