#include "parhyb/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace parhyb {

void ensure_finite(const Vector& v, const std::string& what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument(what + ": non-finite entry");
        }
    }
}

void ensure_same_dim(const Vector& a, const Vector& b, const std::string& where) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(where + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
}

double inner(const Vector& a, const Vector& b) {
    ensure_same_dim(a, b, "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_sq(const Vector& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return s;
}

double norm(const Vector& a) { return std::sqrt(norm_sq(a)); }

double dist(const Vector& a, const Vector& b) {
    ensure_same_dim(a, b, "dist");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

Vector add(const Vector& a, const Vector& b) {
    ensure_same_dim(a, b, "add");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Vector sub(const Vector& a, const Vector& b) {
    ensure_same_dim(a, b, "sub");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vector scaled(const Vector& a, double s) {
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
    return out;
}

Vector lin_comb(double alpha, const Vector& a, double beta, const Vector& b) {
    ensure_same_dim(a, b, "lin_comb");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i] + beta * b[i];
    return out;
}

Vector zeros(std::size_t dim) { return Vector(dim, 0.0); }

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double x : data) m = std::max(m, std::abs(x));
    return m;
}

Vector matvec(const Matrix& m, const Vector& x) {
    if (m.cols != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
    Vector out(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        out[i] = s;
    }
    return out;
}

namespace {

// One elimination pass; x is overwritten with the solution.
bool eliminate(Matrix a, Vector b, double pivot_floor, Vector& x) {
    const std::size_t n = a.rows;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        double best_abs = std::abs(a(perm[col], col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a(perm[r], col));
            if (v > best_abs) {
                best_abs = v;
                best = r;
            }
        }
        if (best_abs <= pivot_floor) return false;
        std::swap(perm[col], perm[best]);

        const std::size_t p = perm[col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const std::size_t q = perm[r];
            const double f = a(q, col) / a(p, col);
            if (f == 0.0) continue;
            a(q, col) = 0.0;
            for (std::size_t j = col + 1; j < n; ++j) a(q, j) -= f * a(p, j);
            b[q] -= f * b[p];
        }
    }

    x.assign(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        const std::size_t p = perm[ri];
        double s = b[p];
        for (std::size_t j = ri + 1; j < n; ++j) s -= a(p, j) * x[j];
        x[ri] = s / a(p, ri);
    }
    return true;
}

}  // namespace

std::optional<Vector> solve_dense(const Matrix& a, const Vector& b) {
    if (a.rows != a.cols) throw std::invalid_argument("solve_dense: matrix not square");
    if (a.rows != b.size()) throw std::invalid_argument("solve_dense: rhs size mismatch");
    if (a.rows == 0) return Vector{};

    const double pivot_floor = 1e-12 * a.max_abs();
    Vector x;
    if (!eliminate(a, b, pivot_floor, x)) return std::nullopt;

    // One refinement pass tightens the residual for moderately conditioned
    // systems (degenerate half-space normals show up near convergence).
    Vector r(b.size());
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = b[i];
        for (std::size_t j = 0; j < a.cols; ++j) s -= a(i, j) * x[j];
        r[i] = s;
    }
    Vector dx;
    if (eliminate(a, r, pivot_floor, dx)) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    }
    return x;
}

std::optional<Vector> solve_small(const SmallLinearSystem& sys) {
    if (sys.matrix.rows > 8) throw std::invalid_argument("solve_small: m > 8");
    return solve_dense(sys.matrix, sys.rhs);
}

}  // namespace parhyb
