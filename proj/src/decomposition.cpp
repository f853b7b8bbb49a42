#include "univex/decomposition.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <string>

namespace univex {

namespace {

Residuals residuals_of(const Vector& target_values, const ConvexBody& t1, const ConvexBody& t2,
                       const SphereQuadrature& grid)
{
    const Vector r = target_values + support(t1, grid.nodes) - support(t2, grid.nodes);
    return {r.cwiseAbs().maxCoeff(), std::sqrt(grid.weights.dot(r.cwiseAbs2()))};
}

double block_tolerance(const HarmonicExpansion& target)
{
    double total = 0.0;
    for (int m = 0; m <= target.max_order(); ++m) total += target.block(m).squaredNorm();
    return 1e-12 * (1.0 + std::sqrt(total));
}

} // namespace

GeneratorProfile profile_generator(const ConvexBody& generator, int m_max, double threshold,
                                   const SphereQuadrature& q, ProfileMode mode)
{
    if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be positive");
    const HarmonicExpansion c = expand(generator, m_max, q);
    GeneratorProfile p;
    p.generator = std::make_shared<const ConvexBody>(generator);
    p.dimension = generator.dimension();
    p.m_max = m_max;
    p.threshold = threshold;
    p.mode = mode;
    for (int m = 0; m <= m_max; ++m) {
        const Vector& block = c.block(m);
        Eigen::Index best = 0;
        const double largest = block.cwiseAbs().maxCoeff(&best);
        const bool usable = largest > threshold && (mode == ProfileMode::universal || m % 2 == 0 || m == 1);
        const bool required = mode == ProfileMode::universal || m % 2 == 0;
        if (required && !usable)
            throw GeneratorError(m, "generator has no coefficient above " + std::to_string(threshold) + " at order "
                                        + std::to_string(m) + ": not "
                                        + (mode == ProfileMode::universal ? "universal" : "centrally universal")
                                        + " enough");
        p.coefficients.push_back(block);
        p.selected.push_back(usable ? static_cast<int>(best) + 1 : 0);
        p.conditioning.push_back(usable ? largest : 0.0);
    }
    return p;
}

RotationDensity::RotationDensity(int dimension, std::vector<Term> terms) : dimension_(dimension), terms_(std::move(terms))
{
    int top = 0;
    for (const auto& t : terms_) top = std::max(top, t.order);
    representation_ = std::make_shared<const RotationRepresentation>(dimension, top);
}

double RotationDensity::operator()(const Matrix& rotation) const
{
    double g = 0.0;
    for (const auto& t : terms_)
        g += harmonic_dimension(dimension_, t.order) * t.weights.dot(representation_->column(t.order, t.column, rotation));
    return g;
}

RotationDensity synthesize_g(const GeneratorProfile& profile, const HarmonicExpansion& target)
{
    if (target.dimension() != profile.dimension) throw std::invalid_argument("target and generator dimensions differ");
    const int n = profile.dimension;
    const double tol = block_tolerance(target);
    std::vector<RotationDensity::Term> terms;
    for (int m = 0; m <= target.max_order(); ++m) {
        const Vector& a = target.block(m);
        if (a.norm() <= tol) continue;
        if (!profile.has_order(m))
            throw GeneratorError(m, "target has a non-zero order-" + std::to_string(m)
                                        + " component that the generator profile does not carry");
        const int j = profile.selected[static_cast<std::size_t>(m)];
        const Vector& c = profile.coefficients[static_cast<std::size_t>(m)];
        Vector b(a.size());
        if (n == 3 || m == 0) {
            b = a / c[j - 1];
        } else {
            const std::complex<double> quotient = std::complex<double>(a[0], a[1]) / std::complex<double>(c[0], c[1]);
            // Columns of t^m: (cos, sin) for j = 1 and (-sin, cos) for j = 2.
            if (j == 1) b << quotient.real(), quotient.imag();
            else b << -quotient.imag(), quotient.real();
        }
        terms.push_back({m, j, std::move(b)});
    }
    return RotationDensity(n, std::move(terms));
}

double g_condition(const GeneratorProfile& profile, const HarmonicExpansion& target)
{
    const int n = profile.dimension;
    const double tol = block_tolerance(target);
    double sum = 0.0;
    for (int m = 0; m <= target.max_order(); ++m) {
        const Vector& a = target.block(m);
        if (a.norm() <= tol || !profile.has_order(m)) continue;
        const double denom = (n == 2) ? profile.coefficients[static_cast<std::size_t>(m)].norm()
                                      : profile.conditioning[static_cast<std::size_t>(m)];
        sum += harmonic_dimension(n, m) * a.cwiseAbs().sum() / denom;
    }
    return sum;
}

DecompositionResult decompose(const GeneratorProfile& profile, const HarmonicExpansion& target,
                              const RotationQuadrature& rq, const SphereQuadrature& test_grid)
{
    const int n = profile.dimension;
    if (rq.dimension != n || test_grid.dimension != n) throw std::invalid_argument("quadrature dimension mismatch");
    const RotationDensity g = synthesize_g(profile, target);

    std::vector<MinkowskiPart> positive, negative;
    std::vector<RotationNode> nodes;
    nodes.reserve(static_cast<std::size_t>(rq.size()));
    for (Eigen::Index r = 0; r < rq.size(); ++r) {
        const Matrix& theta = rq.elements[static_cast<std::size_t>(r)];
        const double value = g(theta);
        const double w = rq.weights[r];
        nodes.push_back({rq.parameters[static_cast<std::size_t>(r)], theta, w, value});
        // Node-wise split g = g⁺ - g⁻ with g± >= 0.
        if (value > 0.0) positive.push_back({w * value, theta, profile.generator});
        else if (value < 0.0) negative.push_back({-w * value, theta, profile.generator});
    }
    const Matrix identity = Matrix::Identity(n, n);
    const auto origin = std::make_shared<const ConvexBody>(ConvexBody::point(Vector::Zero(n)));
    if (positive.empty()) positive.push_back({0.0, identity, origin});
    if (negative.empty()) negative.push_back({0.0, identity, origin});

    DecompositionResult result{ConvexBody::minkowski(n, std::move(negative)),
                               ConvexBody::minkowski(n, std::move(positive)),
                               target,
                               std::move(nodes)};
    result.rotation_count = static_cast<int>(rq.size());
    result.g_condition = g_condition(profile, target);
    const Residuals res = residuals_of(target.evaluate(test_grid.nodes), result.t1, result.t2, test_grid);
    result.residual_sup = res.sup;
    result.residual_l2 = res.l2;
    return result;
}

Residuals residual_report(const DecompositionResult& result, const ConvexBody& target_body, const SphereQuadrature& grid)
{
    return residuals_of(support(target_body, grid.nodes), result.t1, result.t2, grid);
}

void require_residual(const DecompositionResult& result, double sup_tolerance)
{
    if (result.residual_sup > sup_tolerance) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "decomposition residual " << result.residual_sup << " exceeds tolerance " << sup_tolerance
            << " (l2 " << result.residual_l2 << ", rotations " << result.rotation_count << ", g_condition "
            << result.g_condition << ")";
        throw ToleranceError(msg.str());
    }
}

Form1Check check_form1(const ConvexBody& body, int m, const RotationQuadrature& rq, const Matrix& grid,
                       const SphereQuadrature& q)
{
    const int n = body.dimension();
    if (rq.dimension != n || grid.rows() != n) throw std::invalid_argument("check_form1: dimension mismatch");
    const int size = harmonic_dimension(n, m);
    const RotationRepresentation rep(n, m);

    // lhs[(i, j)] at every grid point.
    std::vector<Vector> lhs(static_cast<std::size_t>(size * size), Vector::Zero(grid.cols()));
    for (Eigen::Index r = 0; r < rq.size(); ++r) {
        const Matrix& theta = rq.elements[static_cast<std::size_t>(r)];
        const Vector h = support(body, Matrix(theta.transpose() * grid));
        const Matrix t = rep.matrix(m, theta);
        for (int j = 0; j < size; ++j)
            for (int i = 0; i < size; ++i) lhs[static_cast<std::size_t>(j * size + i)] += rq.weights[r] * t(i, j) * h;
    }

    const Vector c = project(body, m, q);
    const Matrix y = harmonic_block(n, m, grid);  // size x points
    const bool planar_block = n == 2 && m >= 1;
    Matrix quarter = Matrix::Zero(size, size);  // column j: coefficients of JY_j
    if (planar_block) quarter << 0.0, -1.0, 1.0, 0.0;
    const Vector jc = quarter.transpose() * c;  // (h_K, JY_j)
    const Matrix jy = quarter.transpose() * y;  // (JY_i)(u)

    Form1Check out;
    for (int j = 0; j < size; ++j)
        for (int i = 0; i < size; ++i) {
            const Vector& l = lhs[static_cast<std::size_t>(j * size + i)];
            const Vector stated = c[j] * y.row(i).transpose() / size;
            const Vector corrected =
                planar_block ? Vector(0.5 * (c[j] * y.row(i).transpose() + jc[j] * jy.row(i).transpose())) : stated;
            out.stated_error = std::max(out.stated_error, (l - stated).cwiseAbs().maxCoeff());
            out.corrected_error = std::max(out.corrected_error, (l - corrected).cwiseAbs().maxCoeff());
            out.scale = std::max(out.scale, stated.cwiseAbs().maxCoeff());
        }
    return out;
}

} // namespace univex
