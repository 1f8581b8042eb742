#include "dossim/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "dossim/errors.hpp"
#include "dossim/tolerances.hpp"

namespace dossim {

Matrix::Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {
    if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix dimension");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = static_cast<int>(init.size());
    cols_ = rows_ > 0 ? static_cast<int>(init.begin()->size()) : 0;
    data_.reserve(static_cast<size_t>(rows_) * cols_);
    for (const auto& row : init) {
        if (static_cast<int>(row.size()) != cols_)
            throw DimensionMismatch("ragged initializer list");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::zeros(int rows, int cols) { return Matrix(rows, cols); }

Matrix Matrix::diagonal(std::span<const double> entries) {
    Matrix m(static_cast<int>(entries.size()), static_cast<int>(entries.size()));
    for (size_t i = 0; i < entries.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = entries[i];
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionMismatch("matrix add");
    Matrix out = *this;
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] += rhs.data_[i];
    return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionMismatch("matrix subtract");
    Matrix out = *this;
    for (size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
    return out;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw DimensionMismatch("matrix multiply");
    Matrix out(rows_, rhs.cols_);
    for (int r = 0; r < rows_; ++r)
        for (int k = 0; k < cols_; ++k) {
            const double v = (*this)(r, k);
            if (v == 0.0) continue;
            for (int c = 0; c < rhs.cols_; ++c) out(r, c) += v * rhs(k, c);
        }
    return out;
}

Matrix Matrix::operator*(double s) const {
    Matrix out = *this;
    for (double& v : out.data_) v *= s;
    return out;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionMismatch("matrix add");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

std::vector<double> Matrix::apply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != cols_) throw DimensionMismatch("matrix-vector product");
    std::vector<double> y(rows_, 0.0);
    for (int r = 0; r < rows_; ++r) {
        double acc = 0.0;
        for (int c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
        y[r] = acc;
    }
    return y;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool Matrix::is_symmetric(double rel_tol) const {
    if (!is_square()) return false;
    const double scale = std::max(max_abs(), 1e-300);
    for (int r = 0; r < rows_; ++r)
        for (int c = r + 1; c < cols_; ++c)
            if (std::abs((*this)(r, c) - (*this)(c, r)) > rel_tol * scale) return false;
    return true;
}

bool Matrix::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Matrix operator*(double s, const Matrix& m) { return m * s; }

double vec_norm(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    if (!a.is_square() || static_cast<int>(b.size()) != a.rows())
        throw DimensionMismatch("linear solve");
    const int n = a.rows();
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (a(pivot, col) == 0.0) throw SingularSystem("singular linear system");
        if (pivot != col) {
            for (int c = col; c < n; ++c) std::swap(a(pivot, c), a(col, c));
            std::swap(b[pivot], b[col]);
        }
        const double d = a(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = a(r, col) / d;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= a(r, c) * x[c];
        x[r] = acc / a(r, r);
    }
    return x;
}

namespace {

using cplx = std::complex<double>;

std::vector<cplx> roots_quadratic(double b, double c) {
    // lambda^2 + b lambda + c
    const cplx disc = std::sqrt(cplx(b * b - 4.0 * c, 0.0));
    return {(-b + disc) / 2.0, (-b - disc) / 2.0};
}

std::vector<cplx> roots_cubic(double a2, double a1, double a0) {
    // lambda^3 + a2 lambda^2 + a1 lambda + a0, Cardano with complex arithmetic
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    const cplx disc = std::sqrt(cplx(q * q / 4.0 + p * p * p / 27.0, 0.0));
    cplx u = std::pow(-q / 2.0 + disc, 1.0 / 3.0);
    if (std::abs(u) < 1e-100) u = std::pow(-q / 2.0 - disc, 1.0 / 3.0);
    std::vector<cplx> out;
    if (std::abs(u) < 1e-100) {
        out.assign(3, cplx(-a2 / 3.0, 0.0));
        return out;
    }
    const cplx omega(-0.5, std::sqrt(3.0) / 2.0);
    cplx w = u;
    for (int k = 0; k < 3; ++k) {
        const cplx t = w - p / (3.0 * w);
        out.push_back(t - a2 / 3.0);
        w *= omega;
    }
    return out;
}

// Householder reduction to upper Hessenberg form, in place.
void hessenberg(Matrix& a) {
    const int n = a.rows();
    for (int k = 0; k < n - 2; ++k) {
        double scale = 0.0;
        for (int i = k + 1; i < n; ++i) scale += std::abs(a(i, k));
        if (scale == 0.0) continue;
        std::vector<double> v(n, 0.0);
        double norm2 = 0.0;
        for (int i = k + 1; i < n; ++i) {
            v[i] = a(i, k) / scale;
            norm2 += v[i] * v[i];
        }
        double alpha = std::sqrt(norm2);
        if (v[k + 1] > 0) alpha = -alpha;
        v[k + 1] -= alpha;
        double vnorm2 = 0.0;
        for (int i = k + 1; i < n; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 == 0.0) continue;
        // A <- (I - 2 v v'/v'v) A (I - 2 v v'/v'v)
        for (int c = 0; c < n; ++c) {
            double dot = 0.0;
            for (int i = k + 1; i < n; ++i) dot += v[i] * a(i, c);
            const double f = 2.0 * dot / vnorm2;
            for (int i = k + 1; i < n; ++i) a(i, c) -= f * v[i];
        }
        for (int r = 0; r < n; ++r) {
            double dot = 0.0;
            for (int i = k + 1; i < n; ++i) dot += a(r, i) * v[i];
            const double f = 2.0 * dot / vnorm2;
            for (int i = k + 1; i < n; ++i) a(r, i) -= f * v[i];
        }
    }
}

// Shifted QR iteration on a complex Hessenberg matrix; returns eigenvalues.
std::vector<cplx> qr_eigenvalues(const Matrix& m) {
    const int n = m.rows();
    Matrix hr = m;
    hessenberg(hr);
    std::vector<std::vector<cplx>> h(n, std::vector<cplx>(n));
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) h[r][c] = cplx(hr(r, c), 0.0);

    std::vector<cplx> eigs;
    int hi = n - 1;
    int iter_guard = 0;
    const int max_iter = 200 * n;
    while (hi >= 0) {
        if (++iter_guard > max_iter) throw ConvergenceFailure("QR iteration failed to converge");
        // deflate trivially small subdiagonals
        int lo = hi;
        while (lo > 0) {
            const double off = std::abs(h[lo][lo - 1]);
            const double diag = std::abs(h[lo - 1][lo - 1]) + std::abs(h[lo][lo]);
            if (off <= tol::kEigen * std::max(diag, 1e-300)) {
                h[lo][lo - 1] = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            eigs.push_back(h[hi][hi]);
            --hi;
            continue;
        }
        // Wilkinson shift from the trailing 2x2 of the active block
        const cplx a = h[hi - 1][hi - 1], b = h[hi - 1][hi], c = h[hi][hi - 1], d = h[hi][hi];
        const cplx tr2 = (a - d) / 2.0;
        const cplx disc = std::sqrt(tr2 * tr2 + b * c);
        cplx shift = (std::abs(tr2 + disc) > std::abs(tr2 - disc)) ? d - b * c / (tr2 + disc)
                                                                   : d - b * c / (tr2 - disc);
        if (!std::isfinite(shift.real()) || !std::isfinite(shift.imag())) shift = d;

        // explicit QR step on the active block via complex Givens rotations
        const int sz = hi - lo + 1;
        std::vector<cplx> cs(sz - 1), sn(sz - 1);
        for (int i = lo; i <= hi; ++i) h[i][i] -= shift;
        for (int i = lo; i < hi; ++i) {
            const cplx x = h[i][i];
            const cplx y = h[i + 1][i];
            const double r = std::sqrt(std::norm(x) + std::norm(y));
            cplx cv(1.0, 0.0), sv(0.0, 0.0);
            if (r > 0.0) {
                cv = x / r;
                sv = y / r;
            }
            cs[i - lo] = cv;
            sn[i - lo] = sv;
            for (int col = i; col <= hi; ++col) {
                const cplx t1 = h[i][col];
                const cplx t2 = h[i + 1][col];
                h[i][col] = std::conj(cv) * t1 + std::conj(sv) * t2;
                h[i + 1][col] = -sv * t1 + cv * t2;
            }
        }
        for (int i = lo; i < hi; ++i) {
            const cplx cv = cs[i - lo];
            const cplx sv = sn[i - lo];
            const int top = lo;
            for (int row = top; row <= std::min(i + 1, hi); ++row) {
                const cplx t1 = h[row][i];
                const cplx t2 = h[row][i + 1];
                h[row][i] = t1 * cv + t2 * sv;
                h[row][i + 1] = -t1 * std::conj(sv) + t2 * std::conj(cv);
            }
        }
        for (int i = lo; i <= hi; ++i) h[i][i] += shift;
    }
    return eigs;
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
    if (!m.is_square()) throw DimensionMismatch("eigenvalues need a square matrix");
    const int n = m.rows();
    switch (n) {
        case 1:
            return {cplx(m(0, 0), 0.0)};
        case 2: {
            const double tr = m(0, 0) + m(1, 1);
            const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
            return roots_quadratic(-tr, det);
        }
        case 3: {
            const double tr = m(0, 0) + m(1, 1) + m(2, 2);
            const double c1 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                              m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
            const double det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                               m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
            return roots_cubic(-tr, c1, -det);
        }
        default:
            return qr_eigenvalues(m);
    }
}

std::vector<double> symmetric_eigenvalues(const Matrix& m) {
    if (!m.is_square()) throw DimensionMismatch("symmetric eigenvalues need a square matrix");
    const int n = m.rows();
    Matrix a = m;
    const double scale = std::max(a.max_abs(), 1e-300);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= tol::kEigen * scale) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eigs(n);
    for (int i = 0; i < n; ++i) eigs[i] = a(i, i);
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

Matrix solve_lyapunov(const Matrix& phi, const Matrix& q) {
    if (!phi.is_square()) throw DimensionMismatch("phi must be square");
    if (phi.rows() != q.rows() || phi.cols() != q.cols())
        throw DimensionMismatch("phi and q dimensions differ");
    if (!q.is_symmetric(tol::kSymmetry)) throw NotSymmetric("q must be symmetric");
    const auto q_eigs = symmetric_eigenvalues(q);
    if (q_eigs.front() <= 0.0) throw NotPositiveDefinite("q must be positive definite");
    if (!is_hurwitz(phi)) throw NotHurwitz("phi has an eigenvalue with nonnegative real part");

    // vec form (column-major): (I (x) Phi' + Phi' (x) I) vec(P) = -vec(Q)
    const int n = phi.rows();
    const Matrix pt = phi.transpose();
    Matrix k(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) {
                    // I (x) Phi' block (j==c picks the diagonal blocks)
                    if (j == c) k(j * n + i, c * n + r) += pt(i, r);
                    // Phi' (x) I block
                    if (i == r) k(j * n + i, c * n + r) += pt(j, c);
                }
    std::vector<double> rhs(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) rhs[static_cast<size_t>(j) * n + i] = -q(i, j);
    const auto sol = solve_linear(k, std::move(rhs));
    Matrix p(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p(i, j) = sol[static_cast<size_t>(j) * n + i];
    // symmetrize away round-off
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (p(i, j) + p(j, i));
            p(i, j) = avg;
            p(j, i) = avg;
        }
    return p;
}

double spectral_radius(const Matrix& m) {
    if (!m.is_square()) throw DimensionMismatch("spectral radius needs a square matrix");
    double r = 0.0;
    for (const auto& ev : eigenvalues(m)) r = std::max(r, std::abs(ev));
    return r;
}

double spectral_norm(const Matrix& m) {
    if (m.empty()) return 0.0;
    // largest eigenvalue of M'M (Gram form keeps the problem symmetric)
    const Matrix gram = m.transpose() * m;
    const auto eigs = symmetric_eigenvalues(gram);
    return std::sqrt(std::max(0.0, eigs.back()));
}

double log_norm(const Matrix& m) {
    if (!m.is_square()) throw DimensionMismatch("log norm needs a square matrix");
    const Matrix sym = (m + m.transpose()) * 0.5;
    return symmetric_eigenvalues(sym).back();
}

std::pair<double, double> eig_extremes_symmetric(const Matrix& m) {
    if (!m.is_square()) throw DimensionMismatch("need a square matrix");
    if (!m.is_symmetric(tol::kSymmetry)) throw NotSymmetric("matrix is not symmetric");
    const auto eigs = symmetric_eigenvalues(m);
    return {eigs.front(), eigs.back()};
}

bool is_hurwitz(const Matrix& m) {
    if (!m.is_square()) throw DimensionMismatch("Hurwitz test needs a square matrix");
    for (const auto& ev : eigenvalues(m))
        if (ev.real() >= -tol::kHurwitzMargin) return false;
    return true;
}

}  // namespace dossim
