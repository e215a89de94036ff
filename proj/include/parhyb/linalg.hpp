#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace parhyb {

// Element of the ambient space R^d. Length is fixed per problem instance;
// every operation checks dimensions and rejects mismatches.
using Vector = std::vector<double>;

void ensure_finite(const Vector& v, const std::string& what);
void ensure_same_dim(const Vector& a, const Vector& b, const std::string& where);

double inner(const Vector& a, const Vector& b);
double norm_sq(const Vector& a);
double norm(const Vector& a);
double dist(const Vector& a, const Vector& b);

Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
Vector scaled(const Vector& a, double s);
// alpha*a + beta*b
Vector lin_comb(double alpha, const Vector& a, double beta, const Vector& b);
Vector zeros(std::size_t dim);

// Small dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    static Matrix identity(std::size_t n);
    Matrix transposed() const;
    double max_abs() const;
};

Vector matvec(const Matrix& m, const Vector& x);

struct SmallLinearSystem {
    Matrix matrix;
    Vector rhs;
};

// Partial-pivot elimination with one refinement pass. Returns nullopt when a
// pivot falls below 1e-12 times the matrix's largest absolute entry; the
// caller decides the fallback. No size cap: shared by solve_small and the
// resolvent engine's whole-space solves.
std::optional<Vector> solve_dense(const Matrix& a, const Vector& b);

// Same solver restricted to the m <= 8 systems the projector needs.
std::optional<Vector> solve_small(const SmallLinearSystem& sys);

}  // namespace parhyb
