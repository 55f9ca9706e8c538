#include "toposq/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace toposq {

namespace {

void require_measure_poset(const Measure& mu, const ContextPoset& poset) {
    if (mu.poset()->id() != poset.id()) throw Error(ErrorKind::PosetMismatch, "measure lives on another poset");
}

Vector basis_vector(int dim, int k) {
    Vector v = Vector::Zero(dim);
    v(k) = 1.0;
    return v;
}

/// Generator with one distinct eigenvalue per rank-1 projection of the basis.
HermitianMatrix basis_generator(const std::vector<Vector>& basis) {
    const int n = static_cast<int>(basis.front().size());
    Matrix g = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < basis.size(); ++i)
        g += static_cast<double>(i + 1) * Projection::onto(basis[i]).matrix();
    return HermitianMatrix::from(g);
}

}  // namespace

ExtractedValue extract_m_detailed(const Measure& mu, const Projection& p, const ContextPoset& poset) {
    require_measure_poset(mu, poset);
    ExtractedValue out;
    out.contexts = poset.containing(p);
    if (out.contexts.empty()) throw Error(ErrorKind::NoContainingContext, "no context of the poset contains the projection");
    const auto delta = daseinise(p, mu.poset());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0;
    for (std::size_t v : out.contexts) {
        const double x = mu.evaluate_at(delta, v);
        out.values.push_back(x);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        sum += x;
    }
    out.value = sum / static_cast<double>(out.values.size());
    out.spread = hi - lo;
    return out;
}

double extract_m(const Measure& mu, const Projection& p, const ContextPoset& poset, const Tolerances& tol) {
    const auto detail = extract_m_detailed(mu, p, poset);
    if (detail.spread > tol.order) {
        std::ostringstream os;
        os << "values across containing contexts spread by " << detail.spread;
        throw Error(ErrorKind::WellDefinednessViolation, os.str());
    }
    return detail.value;
}

WellDefinednessReport verify_well_definedness(const Measure& mu, const Projection& p,
                                              const std::vector<ClopenSubobject>& pool, const ContextPoset& poset,
                                              const Tolerances& tol) {
    require_measure_poset(mu, poset);
    WellDefinednessReport report;
    std::vector<std::optional<Mask>> target(poset.size());
    for (std::size_t v = 0; v < poset.size(); ++v) target[v] = poset.context(v).mask_of(p, tol);

    for (std::size_t k = 0; k < pool.size(); ++k)
        for (std::size_t v = 0; v < poset.size(); ++v)
            if (target[v] && pool[k].mask(v) == *target[v])
                report.witnesses.push_back({k, v, mu.evaluate_at(pool[k], v)});
    if (report.witnesses.empty())
        throw Error(ErrorKind::EmptyWitnessSet, "no pool member has a component equal to the projection");

    auto [lo, hi] = std::minmax_element(report.witnesses.begin(), report.witnesses.end(),
                                        [](const Witness& a, const Witness& b) { return a.value < b.value; });
    report.spread = hi->value - lo->value;
    report.passed = report.spread <= tol.order;
    return report;
}

std::vector<Projection> default_frame(int dim) {
    std::vector<Projection> frame;
    frame.reserve(static_cast<std::size_t>(dim * dim));
    for (int k = 0; k < dim; ++k) frame.push_back(Projection::onto(basis_vector(dim, k)));
    const Complex i_unit(0.0, 1.0);
    for (int j = 0; j < dim; ++j)
        for (int k = j + 1; k < dim; ++k) {
            frame.push_back(Projection::onto(basis_vector(dim, j) + basis_vector(dim, k)));
            frame.push_back(Projection::onto(basis_vector(dim, j) + i_unit * basis_vector(dim, k)));
        }
    return frame;
}

std::vector<std::vector<HermitianMatrix>> frame_generator_sets(int dim) {
    std::vector<std::vector<HermitianMatrix>> sets;
    std::vector<double> diag(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) diag[static_cast<std::size_t>(k)] = k + 1.0;
    sets.push_back({HermitianMatrix::diagonal(diag)});

    for (const auto& p : default_frame(dim)) sets.push_back({HermitianMatrix::from(p.matrix())});

    const Complex i_unit(0.0, 1.0);
    for (int j = 0; j < dim; ++j)
        for (int l = j + 1; l < dim; ++l)
            for (Complex phase : {Complex(1.0, 0.0), i_unit}) {
                std::vector<Vector> basis;
                for (int m = 0; m < dim; ++m)
                    if (m != j && m != l) basis.push_back(basis_vector(dim, m));
                basis.push_back((basis_vector(dim, j) + phase * basis_vector(dim, l)) / std::sqrt(2.0));
                basis.push_back((basis_vector(dim, j) - phase * basis_vector(dim, l)) / std::sqrt(2.0));
                sets.push_back({basis_generator(basis)});
            }
    return sets;
}

Eigen::VectorXd hermitian_coordinates(const Matrix& h) {
    const int n = static_cast<int>(h.rows());
    Eigen::VectorXd x(n * n);
    int idx = 0;
    for (int k = 0; k < n; ++k) x(idx++) = h(k, k).real();
    const double s = std::sqrt(2.0);
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            x(idx++) = s * h(j, k).real();
            x(idx++) = s * h(j, k).imag();
        }
    return x;
}

Matrix from_hermitian_coordinates(const Eigen::VectorXd& x, int dim) {
    Matrix h = Matrix::Zero(dim, dim);
    int idx = 0;
    for (int k = 0; k < dim; ++k) h(k, k) = x(idx++);
    const double s = std::sqrt(2.0);
    for (int j = 0; j < dim; ++j)
        for (int k = j + 1; k < dim; ++k) {
            const Complex z(x(idx) / s, x(idx + 1) / s);
            idx += 2;
            h(j, k) = z;
            h(k, j) = std::conj(z);
        }
    return h;
}

int pool_rank(const std::vector<Projection>& pool) {
    if (pool.empty()) return 0;
    const int n = pool.front().dim();
    Eigen::MatrixXd a(static_cast<Eigen::Index>(pool.size()), n * n);
    for (std::size_t k = 0; k < pool.size(); ++k)
        a.row(static_cast<Eigen::Index>(k)) = hermitian_coordinates(pool[k].matrix()).transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-9);
    return static_cast<int>(qr.rank());
}

ReconstructionReport reconstruct_state(const Measure& mu, const std::vector<Projection>& pool,
                                       const ContextPoset& poset, const Tolerances& tol) {
    require_measure_poset(mu, poset);
    const int n = poset.dim();
    const int needed = n * n;
    std::vector<std::string> warnings;
    if (n == 2)
        warnings.emplace_back(
            "TypeI2Warning: dimension 2 is the type I_2 case; an abstract measure need not extend to a unique state");

    const int rank = pool_rank(pool);
    if (rank < needed) {
        std::ostringstream os;
        os << "pool spans rank " << rank << ", needs " << needed;
        throw Error(ErrorKind::PoolRankDeficient, os.str());
    }

    const auto rows = static_cast<Eigen::Index>(pool.size());
    Eigen::MatrixXd a(rows, needed);
    Eigen::VectorXd b(rows);
    std::vector<double> m_values;
    for (std::size_t k = 0; k < pool.size(); ++k) {
        require_same_dim(n, pool[k].dim(), "reconstruct_state");
        a.row(static_cast<Eigen::Index>(k)) = hermitian_coordinates(pool[k].matrix()).transpose();
        m_values.push_back(extract_m(mu, pool[k], poset, tol));
        b(static_cast<Eigen::Index>(k)) = m_values.back();
    }

    // minimise |Ax − b|² subject to <c, x> = tr ρ = 1
    const Eigen::VectorXd c = hermitian_coordinates(Matrix::Identity(n, n));
    const Eigen::MatrixXd gram = a.transpose() * a;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const Eigen::VectorXd unconstrained = ldlt.solve(a.transpose() * b);
    const Eigen::VectorXd correction = ldlt.solve(c);
    const Eigen::VectorXd x = unconstrained - correction * ((c.dot(unconstrained) - 1.0) / c.dot(correction));
    const double residual_ls = (a * x - b).cwiseAbs().maxCoeff();

    Matrix rho = from_hermitian_coordinates(x, n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
    Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
    clipped /= clipped.sum();
    rho = es.eigenvectors() * clipped.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    rho = (rho + rho.adjoint()) / 2.0;

    double residual = 0;
    for (std::size_t k = 0; k < pool.size(); ++k)
        residual = std::max(residual, std::abs((rho * pool[k].matrix()).trace().real() - m_values[k]));
    if (residual > 100.0 * tol.order) {
        std::ostringstream os;
        os << "residual after positivity projection " << residual;
        throw Error(ErrorKind::InfeasibleMeasure, os.str());
    }

    return ReconstructionReport{DensityState::from_matrix(rho, tol), residual_ls, residual, rank, std::move(m_values),
                                std::move(warnings)};
}

}  // namespace toposq
