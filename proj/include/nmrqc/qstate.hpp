#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nmrqc {

using cd = std::complex<double>;

// Default comparison tolerance; everything here is plain algebra in double.
inline constexpr double kTol = 1e-12;

// Basis convention: qubit 1 is the most significant bit of the basis index,
// |b1 b2 .. bN>  ->  index  b1*2^(N-1) + .. + bN.
inline std::size_t dim_for(int n_qubits) { return std::size_t{1} << n_qubits; }

inline int qubit_bit(std::size_t index, int qubit, int n_qubits) {
    return static_cast<int>((index >> (n_qubits - qubit)) & std::size_t{1});
}

inline std::size_t qubit_mask(int qubit, int n_qubits) {
    return std::size_t{1} << (n_qubits - qubit);
}

// Dense row-major complex matrix. Values are immutable by convention once built:
// operations return new matrices.
class ComplexMatrix {
  public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(const std::vector<cd>& d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cd& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cd& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    ComplexMatrix operator*(const ComplexMatrix& rhs) const {
        if (cols_ != rhs.rows_) throw std::invalid_argument("matrix product: dimension mismatch");
        ComplexMatrix out(rows_, rhs.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < cols_; ++k) {
                const cd a = (*this)(i, k);
                if (a == cd{}) continue;
                for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
            }
        }
        return out;
    }

    ComplexMatrix operator+(const ComplexMatrix& rhs) const {
        check_same_shape(rhs, "matrix sum");
        ComplexMatrix out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
        return out;
    }

    ComplexMatrix operator-(const ComplexMatrix& rhs) const {
        check_same_shape(rhs, "matrix difference");
        ComplexMatrix out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
        return out;
    }

    ComplexMatrix operator*(cd scale) const {
        ComplexMatrix out = *this;
        for (auto& v : out.data_) v *= scale;
        return out;
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    cd trace() const {
        cd t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    bool is_unitary(double tol = kTol) const {
        if (rows_ != cols_) return false;
        return (adjoint() * (*this) - identity(rows_)).max_abs() <= tol;
    }

    bool is_hermitian(double tol = kTol) const {
        if (rows_ != cols_) return false;
        return ((*this) - adjoint()).max_abs() <= tol;
    }

    bool is_diagonal(double tol = kTol) const {
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                if (r != c && std::abs((*this)(r, c)) > tol) return false;
        return true;
    }

  private:
    void check_same_shape(const ComplexMatrix& rhs, const char* what) const {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw std::invalid_argument(std::string(what) + ": dimension mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cd> data_;
};

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const cd v = a(ar, ac);
            if (v == cd{}) continue;
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    out(ar * b.rows() + br, ac * b.cols() + bc) = v * b(br, bc);
        }
    return out;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

// Global-phase alignment: theta is read off the largest-modulus entry of v,
// which keeps the estimate away from near-zero denominators.
struct PhaseAlignment {
    bool defined = false;  // false when v is (numerically) all zero
    double phase = 0.0;    // theta with u ~ e^{i theta} v
    double max_err = 0.0;  // || u - e^{i theta} v ||_max
};

inline PhaseAlignment align_global_phase(const ComplexMatrix& u, const ComplexMatrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw std::invalid_argument("align_global_phase: dimension mismatch");
    std::size_t br = 0, bc = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < v.rows(); ++r)
        for (std::size_t c = 0; c < v.cols(); ++c)
            if (std::abs(v(r, c)) > best) { best = std::abs(v(r, c)); br = r; bc = c; }
    PhaseAlignment out;
    if (best <= 0.0) { out.max_err = u.max_abs(); return out; }
    out.defined = true;
    out.phase = std::arg(u(br, bc) / v(br, bc));
    const cd rot = std::polar(1.0, out.phase);
    double err = 0.0;
    for (std::size_t r = 0; r < u.rows(); ++r)
        for (std::size_t c = 0; c < u.cols(); ++c) err = std::max(err, std::abs(u(r, c) - rot * v(r, c)));
    out.max_err = err;
    return out;
}

struct PhaseMatch {
    bool equal = false;
    double phase = 0.0;
};

inline PhaseMatch equal_up_to_global_phase(const ComplexMatrix& u, const ComplexMatrix& v, double tol = kTol) {
    const PhaseAlignment a = align_global_phase(u, v);
    return {a.defined && a.max_err <= tol, a.phase};
}

struct StateVector {
    int n_qubits = 0;
    std::vector<cd> amps;

    StateVector() = default;
    explicit StateVector(int n) : n_qubits(n), amps(dim_for(n)) {}

    static StateVector basis(int n, std::size_t index) {
        StateVector s(n);
        if (index >= s.amps.size()) throw std::invalid_argument("basis index out of range");
        s.amps[index] = 1.0;
        return s;
    }

    std::size_t dim() const { return amps.size(); }

    double norm() const {
        double n2 = 0.0;
        for (const auto& a : amps) n2 += std::norm(a);
        return std::sqrt(n2);
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps.size());
        for (std::size_t i = 0; i < amps.size(); ++i) p[i] = std::norm(amps[i]);
        return p;
    }
};

struct DensityMatrix {
    int n_qubits = 0;
    bool deviation = false;  // traceless thermal-deviation matrix
    ComplexMatrix mat;

    DensityMatrix() = default;
    DensityMatrix(int n, bool dev = false) : n_qubits(n), deviation(dev), mat(dim_for(n), dim_for(n)) {}

    static DensityMatrix pure(const StateVector& s) {
        DensityMatrix rho(s.n_qubits, false);
        for (std::size_t r = 0; r < s.dim(); ++r)
            for (std::size_t c = 0; c < s.dim(); ++c) rho.mat(r, c) = s.amps[r] * std::conj(s.amps[c]);
        return rho;
    }

    static DensityMatrix from_diagonal(int n, const std::vector<double>& pops, bool dev) {
        DensityMatrix rho(n, dev);
        if (pops.size() != dim_for(n)) throw std::invalid_argument("diagonal length != 2^N");
        for (std::size_t i = 0; i < pops.size(); ++i) rho.mat(i, i) = pops[i];
        return rho;
    }

    std::size_t dim() const { return mat.rows(); }
};

// Cholesky-based positive-semidefiniteness test of a Hermitian matrix:
// succeeds iff the smallest eigenvalue is >= -tol (up to roundoff slack).
inline bool is_positive_semidefinite(const ComplexMatrix& m, double tol = 1e-10) {
    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    const double shift = tol + 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, m.max_abs());
    for (std::size_t i = 0; i < n; ++i) a(i, i) += shift;
    for (std::size_t j = 0; j < n; ++j) {
        cd d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * std::conj(a(j, k));
        if (d.real() <= 0.0) return false;
        const double l = std::sqrt(d.real());
        a(j, j) = l;
        for (std::size_t i = j + 1; i < n; ++i) {
            cd v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= a(i, k) * std::conj(a(j, k));
            a(i, j) = v / l;
        }
    }
    return true;
}

inline void validate_density(const DensityMatrix& rho, double tol = kTol) {
    if (rho.mat.rows() != rho.mat.cols() || rho.mat.rows() != dim_for(rho.n_qubits))
        throw std::invalid_argument("density matrix: dimension is not 2^N");
    if (!rho.mat.is_hermitian(tol)) throw std::invalid_argument("density matrix: not Hermitian");
    const double tr = rho.mat.trace().real();
    const double tr_im = rho.mat.trace().imag();
    if (std::abs(tr_im) > tol) throw std::invalid_argument("density matrix: complex trace");
    if (rho.deviation) {
        if (std::abs(tr) > tol) throw std::invalid_argument("deviation matrix: trace not 0");
    } else {
        if (std::abs(tr - 1.0) > tol) throw std::invalid_argument("density matrix: trace not 1");
        if (!is_positive_semidefinite(rho.mat)) throw std::invalid_argument("density matrix: negative eigenvalue");
    }
}

inline StateVector apply(const ComplexMatrix& u, const StateVector& s) {
    if (u.rows() != u.cols() || u.cols() != s.dim()) throw std::invalid_argument("apply: dimension mismatch");
    StateVector out(s.n_qubits);
    for (std::size_t r = 0; r < u.rows(); ++r) {
        cd acc = 0.0;
        for (std::size_t c = 0; c < u.cols(); ++c) acc += u(r, c) * s.amps[c];
        out.amps[r] = acc;
    }
    return out;
}

// U rho U^dagger
inline DensityMatrix conjugate(const ComplexMatrix& u, const DensityMatrix& rho) {
    if (u.rows() != u.cols() || u.cols() != rho.dim()) throw std::invalid_argument("conjugate: dimension mismatch");
    DensityMatrix out = rho;
    out.mat = u * rho.mat * u.adjoint();
    return out;
}

// Idealized z-gradient crusher: kills every coherence, keeps populations.
inline DensityMatrix crush(const DensityMatrix& rho) {
    DensityMatrix out(rho.n_qubits, rho.deviation);
    for (std::size_t i = 0; i < rho.dim(); ++i) out.mat(i, i) = rho.mat(i, i);
    return out;
}

inline std::vector<double> populations(const DensityMatrix& rho) {
    std::vector<double> p(rho.dim());
    for (std::size_t i = 0; i < rho.dim(); ++i) p[i] = rho.mat(i, i).real();
    return p;
}

}  // namespace nmrqc
