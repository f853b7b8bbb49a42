#include "univex/harmonics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace univex {

namespace {

void require_index(int n, HarmonicIndex idx)
{
    if (idx.order < 0 || idx.index < 1 || idx.index > harmonic_dimension(n, idx.order))
        throw std::out_of_range("harmonic index (" + std::to_string(idx.order) + ", " + std::to_string(idx.index)
                                + ") out of range for dimension " + std::to_string(n));
}

} // namespace

double eval_harmonic(int n, HarmonicIndex idx, const Vector& u)
{
    require_dimension(n);
    require_index(n, idx);
    return eval_harmonics_upto<double>(n, idx.order, u)[harmonic_offset(n, idx.order) + idx.index - 1];
}

Vector eval_order(int n, int m, const Vector& u)
{
    require_dimension(n);
    if (m < 0) throw std::out_of_range("negative harmonic order");
    return eval_harmonics_upto<double>(n, m, u).segment(harmonic_offset(n, m), harmonic_dimension(n, m));
}

Matrix harmonic_block(int n, int m, const Matrix& directions)
{
    Matrix out(harmonic_dimension(n, m), directions.cols());
    for (Eigen::Index k = 0; k < directions.cols(); ++k) out.col(k) = eval_order(n, m, directions.col(k));
    return out;
}

// ---------------------------------------------------------------------------

HarmonicExpansion::HarmonicExpansion(int dimension, int max_order) : dimension_(dimension)
{
    require_dimension(dimension);
    if (max_order < 0) throw std::invalid_argument("max_order must be non-negative");
    for (int m = 0; m <= max_order; ++m) blocks_.push_back(Vector::Zero(harmonic_dimension(dimension, m)));
}

HarmonicExpansion::HarmonicExpansion(int dimension, std::vector<Vector> blocks)
    : dimension_(dimension), blocks_(std::move(blocks))
{
    require_dimension(dimension);
    if (blocks_.empty()) throw std::invalid_argument("expansion needs at least the order-0 block");
    for (std::size_t m = 0; m < blocks_.size(); ++m)
        if (blocks_[m].size() != harmonic_dimension(dimension, static_cast<int>(m)))
            throw std::invalid_argument("coefficient block " + std::to_string(m) + " has wrong size");
}

const Vector& HarmonicExpansion::block(int m) const
{
    if (m < 0 || m > max_order()) throw std::out_of_range("order " + std::to_string(m) + " not in expansion");
    return blocks_[static_cast<std::size_t>(m)];
}

Vector& HarmonicExpansion::block(int m)
{
    if (m < 0 || m > max_order()) throw std::out_of_range("order " + std::to_string(m) + " not in expansion");
    return blocks_[static_cast<std::size_t>(m)];
}

double HarmonicExpansion::coefficient(HarmonicIndex idx) const
{
    require_index(dimension_, idx);
    if (idx.order > max_order()) return 0.0;
    return blocks_[static_cast<std::size_t>(idx.order)][idx.index - 1];
}

void HarmonicExpansion::set_coefficient(HarmonicIndex idx, double value)
{
    require_index(dimension_, idx);
    while (max_order() < idx.order)
        blocks_.push_back(Vector::Zero(harmonic_dimension(dimension_, max_order() + 1)));
    blocks_[static_cast<std::size_t>(idx.order)][idx.index - 1] = value;
}

double HarmonicExpansion::order_norm(int m) const
{
    if (m < 0) throw std::out_of_range("negative harmonic order");
    if (m > max_order()) return 0.0;
    return blocks_[static_cast<std::size_t>(m)].norm();
}

double HarmonicExpansion::evaluate(const Vector& u) const
{
    const Vector basis = eval_harmonics_upto<double>(dimension_, max_order(), u);
    double sum = 0.0;
    for (int m = 0; m <= max_order(); ++m)
        sum += basis.segment(harmonic_offset(dimension_, m), harmonic_dimension(dimension_, m)).dot(block(m));
    return sum;
}

Vector HarmonicExpansion::evaluate(const Matrix& directions) const
{
    Vector out(directions.cols());
    for (Eigen::Index k = 0; k < directions.cols(); ++k) out[k] = evaluate(Vector(directions.col(k)));
    return out;
}

HarmonicExpansion HarmonicExpansion::truncated(int new_max_order) const
{
    HarmonicExpansion out(dimension_, new_max_order);
    for (int m = 0; m <= std::min(new_max_order, max_order()); ++m) out.block(m) = block(m);
    return out;
}

HarmonicExpansion& HarmonicExpansion::operator*=(double factor)
{
    for (auto& b : blocks_) b *= factor;
    return *this;
}

bool operator==(const HarmonicExpansion& a, const HarmonicExpansion& b)
{
    if (a.dimension_ != b.dimension_ || a.blocks_.size() != b.blocks_.size()) return false;
    for (std::size_t m = 0; m < a.blocks_.size(); ++m)
        if (a.blocks_[m] != b.blocks_[m]) return false;
    return true;
}

// ---------------------------------------------------------------------------

void require_rotation(const Matrix& rotation, int dimension)
{
    if (rotation.rows() != dimension || rotation.cols() != dimension)
        throw std::invalid_argument("rotation must be " + std::to_string(dimension) + "x" + std::to_string(dimension));
    const double orth = (rotation * rotation.transpose() - Matrix::Identity(dimension, dimension)).cwiseAbs().maxCoeff();
    if (orth > 1e-9) throw std::invalid_argument("rotation matrix is not orthogonal");
    if (rotation.determinant() < 0.0) throw std::invalid_argument("rotation matrix has determinant -1");
}

RotationRepresentation::RotationRepresentation(int dimension, int max_order)
    : dimension_(dimension), max_order_(max_order)
{
    require_dimension(dimension);
    if (max_order < 0) throw std::invalid_argument("max_order must be non-negative");
    if (dimension == 3) {
        quadrature_ = build_sphere_quadrature(3, 2 * max_order);
        weighted_basis_.resize(harmonic_count(3, max_order), quadrature_.size());
        for (Eigen::Index k = 0; k < quadrature_.size(); ++k)
            weighted_basis_.col(k) = quadrature_.weights[k]
                                     * eval_harmonics_upto<double>(3, max_order, Vector(quadrature_.nodes.col(k)));
    }
}

Matrix RotationRepresentation::rotated_basis(int m, const Matrix& rotation) const
{
    // Y(θ⁻¹u_k) for every node, orders <= m.
    const Matrix pulled = rotation.transpose() * quadrature_.nodes;
    Matrix out(harmonic_count(3, m), pulled.cols());
    for (Eigen::Index k = 0; k < pulled.cols(); ++k)
        out.col(k) = eval_harmonics_upto<double>(3, m, Vector(pulled.col(k)));
    return out;
}

Matrix RotationRepresentation::matrix(int m, const Matrix& rotation) const
{
    if (m < 0 || m > max_order_) throw std::out_of_range("order outside representation range");
    require_rotation(rotation, dimension_);
    if (dimension_ == 2) {
        if (m == 0) return Matrix::Identity(1, 1);
        return rotation_2d(m * std::atan2(rotation(1, 0), rotation(0, 0)));
    }
    const int offset = harmonic_offset(3, m), size = harmonic_dimension(3, m);
    const Matrix pulled = rotated_basis(m, rotation).middleRows(offset, size);
    return weighted_basis_.middleRows(offset, size) * pulled.transpose();
}

Vector RotationRepresentation::column(int m, int j, const Matrix& rotation) const
{
    if (j < 1 || j > harmonic_dimension(dimension_, m)) throw std::out_of_range("column index out of range");
    if (dimension_ == 2) return matrix(m, rotation).col(j - 1);
    if (m < 0 || m > max_order_) throw std::out_of_range("order outside representation range");
    require_rotation(rotation, 3);
    const Matrix pulled = rotation.transpose() * quadrature_.nodes;
    Vector values(pulled.cols());
    const int flat = harmonic_offset(3, m) + j - 1;
    for (Eigen::Index k = 0; k < pulled.cols(); ++k)
        values[k] = eval_harmonics_upto<double>(3, m, Vector(pulled.col(k)))[flat];
    return weighted_basis_.middleRows(harmonic_offset(3, m), harmonic_dimension(3, m)) * values;
}

std::vector<Matrix> RotationRepresentation::matrices(const Matrix& rotation) const
{
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(max_order_ + 1));
    if (dimension_ == 2) {
        for (int m = 0; m <= max_order_; ++m) out.push_back(matrix(m, rotation));
        return out;
    }
    require_rotation(rotation, 3);
    const Matrix pulled = rotated_basis(max_order_, rotation);
    for (int m = 0; m <= max_order_; ++m) {
        const int offset = harmonic_offset(3, m), size = harmonic_dimension(3, m);
        out.push_back(weighted_basis_.middleRows(offset, size) * pulled.middleRows(offset, size).transpose());
    }
    return out;
}

Matrix rotation_matrix(int n, int m, const Matrix& rotation)
{
    require_dimension(n);
    if (m < 0) throw std::out_of_range("negative harmonic order");
    return RotationRepresentation(n, m).matrix(m, rotation);
}

HarmonicExpansion rotate_expansion(const HarmonicExpansion& e, const Matrix& rotation)
{
    const RotationRepresentation rep(e.dimension(), e.max_order());
    const std::vector<Matrix> t = rep.matrices(rotation);
    HarmonicExpansion out = e;
    for (int m = 0; m <= e.max_order(); ++m) out.block(m) = t[static_cast<std::size_t>(m)] * e.block(m);
    return out;
}

void write_coefficients_csv(std::ostream& out, const HarmonicExpansion& e)
{
    out << "m,j,a\n";
    const auto precision = out.precision(17);
    for (int m = 0; m <= e.max_order(); ++m)
        for (int j = 1; j <= harmonic_dimension(e.dimension(), m); ++j)
            out << m << ',' << j << ',' << e.block(m)[j - 1] << '\n';
    out.precision(precision);
}

} // namespace univex
