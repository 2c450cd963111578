#include "unijadi/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "unijadi/prng.hpp"

namespace unijadi {

namespace {

// exp(Omega) for skew-Hermitian Omega, via the spectrum of the Hermitian
// matrix -i*Omega.
Eigen::MatrixXcd skew_exp(const Eigen::MatrixXcd& Omega) {
    const Eigen::MatrixXcd H = cplx(0, -1) * Omega;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    Eigen::VectorXcd phases(H.rows());
    for (Eigen::Index k = 0; k < H.rows(); ++k)
        phases(k) = std::exp(cplx(0, es.eigenvalues()(k)));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd random_horizontal(int n, CounterRng& rng) {
    Eigen::MatrixXcd Omega = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const cplx v = rng.complex_gaussian(1.0);
            Omega(i, j) = v;
            Omega(j, i) = -std::conj(v);
        }
    const double norm = Omega.norm();
    if (norm > 0.0) Omega /= norm;
    return Omega;
}

}  // namespace

GradCheckResult finite_diff_gradient_check(const CostFunction& cost,
                                           const Eigen::MatrixXcd& U, int num_directions,
                                           double step, std::uint64_t seed) {
    if (num_directions < 1) throw std::invalid_argument("need at least one direction");
    if (step <= 0.0) throw std::invalid_argument("step must be positive");

    const auto state = rotate_full(cost, U);
    CounterRng rng(seed, 0x67726164u);
    GradCheckResult res;
    res.per_direction.reserve(static_cast<std::size_t>(num_directions));
    for (int k = 0; k < num_directions; ++k) {
        const Eigen::MatrixXcd Omega = random_horizontal(cost.n(), rng);
        const double analytic = (Omega.adjoint() * state.lambda).trace().real();
        const double plus = evaluate(cost, U * skew_exp(step * Omega));
        const double minus = evaluate(cost, U * skew_exp(-step * Omega));
        const double numeric = (plus - minus) / (2.0 * step);
        const double rel = std::abs(analytic - numeric) /
                           std::max({1.0, std::abs(analytic), std::abs(numeric)});
        res.per_direction.push_back(rel);
        res.max_rel_err = std::max(res.max_rel_err, rel);
    }
    return res;
}

RegularityReport regularity_check(const CostFunction& cost, const RotatedState& state,
                                  double singular_tol) {
    RegularityReport report;
    report.gradient_small = state.lambda.norm() <= 1e-6;
    report.near_diagonal =
        off_diagonal_energy(cost, state) <= 1e-8 * (1.0 + std::abs(state.f_value));
    for (int i = 0; i < cost.n(); ++i) {
        for (int j = i + 1; j < cost.n(); ++j) {
            PairRegularity pr;
            pr.pair = IndexPair(i, j);
            auto G = build_gamma(cost, state, pr.pair);
            pr.gap = leading_eigvec3(G.gamma).gap;
            const Eigen::Matrix2d H = hessian_block(G);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
            pr.hessian_eigs = es.eigenvalues();
            pr.negative_definite = pr.hessian_eigs.maxCoeff() < -singular_tol;
            pr.singular = pr.hessian_eigs.cwiseAbs().minCoeff() <= singular_tol;
            if (!pr.singular) report.rank_estimate += 2;
            report.pairs.push_back(pr);
        }
    }
    return report;
}

RateEstimate convergence_rate_fit(const std::vector<IterationRecord>& trace,
                                  double tail_fraction) {
    if (trace.size() < 20)
        throw std::invalid_argument("rate fit needs at least 20 trace records");
    if (tail_fraction <= 0.0 || tail_fraction > 1.0)
        throw std::invalid_argument("tail_fraction must be in (0, 1]");
    if (trace.back().grad_norm >= trace.front().grad_norm)
        throw std::invalid_argument("gradient did not decrease over the trace");

    const std::size_t tail_len = std::max<std::size_t>(
        10, static_cast<std::size_t>(std::ceil(tail_fraction * trace.size())));
    const std::size_t begin = trace.size() - std::min(tail_len, trace.size());

    std::vector<double> xs, ys;
    for (std::size_t k = begin; k < trace.size(); ++k) {
        if (trace[k].grad_norm > 0.0) {
            xs.push_back(static_cast<double>(trace[k].iter));
            ys.push_back(std::log(trace[k].grad_norm));
        }
    }
    if (xs.size() < 5)
        throw std::invalid_argument("tail has too few positive gradient norms");

    RateEstimate est;
    est.tail_fraction = tail_fraction;

    const std::size_t m = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        mx += xs[k];
        my += ys[k];
    }
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("tail spans a single iteration index");
    est.log_slope = sxy / sxx;

    double ss = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double fit = my + est.log_slope * (xs[k] - mx);
        ss += (ys[k] - fit) * (ys[k] - fit);
    }
    est.residual = std::sqrt(ss / static_cast<double>(m)) / std::log(10.0);

    std::vector<double> ratios;
    for (std::size_t k = 1; k < m; ++k) ratios.push_back(std::exp(ys[k] - ys[k - 1]));
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    est.rho = ratios[ratios.size() / 2];

    est.linear = est.rho < 1.0 && est.residual < 0.5;
    return est;
}

HessianCheckResult hessian_closed_form_check(DiagonalFamily family,
                                             const std::vector<std::vector<cplx>>& spectra,
                                             IndexPair pair, double tol) {
    if (spectra.empty()) throw std::invalid_argument("need at least one spectrum");
    const int n = static_cast<int>(spectra.front().size());
    if (n < 2) throw std::invalid_argument("spectra must have length >= 2");
    for (const auto& s : spectra)
        if (static_cast<int>(s.size()) != n)
            throw std::invalid_argument("spectra must all have the same length");
    if (pair.j >= n) throw std::invalid_argument("pair outside the spectrum range");

    CostFunction cost = [&] {
        switch (family) {
            case DiagonalFamily::Matrices: {
                std::vector<SquaredTerm> terms;
                for (const auto& s : spectra) {
                    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
                    for (int p = 0; p < n; ++p) A(p, p) = s[p];
                    terms.push_back({ComplexDenseTensor::from_matrix(A), 1, 1.0});
                }
                return CostFunction::squared_moduli(n, std::move(terms));
            }
            case DiagonalFamily::Tensor3: {
                std::vector<SquaredTerm> terms;
                for (const auto& s : spectra) {
                    ComplexDenseTensor D({n, n, n});
                    for (int p = 0; p < n; ++p) D.at({p, p, p}) = s[p];
                    terms.push_back({std::move(D), 1, 1.0});
                }
                return CostFunction::squared_moduli(n, std::move(terms));
            }
            case DiagonalFamily::Trace4: {
                ComplexDenseTensor B({n, n, n, n});
                for (const auto& s : spectra)
                    for (int p = 0; p < n; ++p) {
                        if (std::abs(s[p].imag()) > 1e-12)
                            throw std::invalid_argument(
                                "trace-form diagonal entries must be real");
                        B.at({p, p, p, p}) += s[p];
                    }
                return CostFunction::trace_form(n, std::move(B), 2);
            }
        }
        throw std::logic_error("unknown diagonal family");
    }();

    const auto state = rotate_full(cost, Eigen::MatrixXcd::Identity(n, n));
    HessianCheckResult res;
    res.numeric = hessian_block(build_gamma(cost, state, pair));

    double coeff = 0.0;
    for (const auto& s : spectra) {
        const cplx di = s[static_cast<std::size_t>(pair.i)];
        const cplx dj = s[static_cast<std::size_t>(pair.j)];
        switch (family) {
            case DiagonalFamily::Matrices:
                coeff -= std::norm(di - dj);
                break;
            case DiagonalFamily::Tensor3:
                coeff -= 1.5 * (std::norm(di) + std::norm(dj));
                break;
            case DiagonalFamily::Trace4:
                coeff -= (di + dj).real();
                break;
        }
    }
    res.closed_form = coeff * Eigen::Matrix2d::Identity();
    res.max_abs_dev = (res.numeric - res.closed_form).cwiseAbs().maxCoeff();
    res.pass = res.max_abs_dev <= tol;
    return res;
}

InvarianceResult invariance_check(const CostFunction& cost, const Eigen::MatrixXcd& U,
                                  int trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("need at least one trial");
    const auto base = rotate_full(cost, U);
    const Eigen::MatrixXcd base_grad = U * base.lambda;

    CounterRng rng(seed, 0x70686173u);
    InvarianceResult res;
    for (int trial = 0; trial < trials; ++trial) {
        Eigen::VectorXcd z(cost.n());
        for (int p = 0; p < cost.n(); ++p) z(p) = rng.unit_phase();
        const Eigen::MatrixXcd US = U * z.asDiagonal();
        const auto scaled = rotate_full(cost, US);
        res.max_f_dev = std::max(res.max_f_dev, std::abs(scaled.f_value - base.f_value));
        const Eigen::MatrixXcd grad_scaled = US * scaled.lambda;
        res.max_grad_dev =
            std::max(res.max_grad_dev, (grad_scaled - base_grad * z.asDiagonal()).norm());
    }
    res.pass = res.max_f_dev <= 1e-10 * (1.0 + std::abs(base.f_value)) &&
               res.max_grad_dev <= 1e-10 * (1.0 + base_grad.norm());
    return res;
}

}  // namespace unijadi
