#include "brlab/families.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace brlab {

namespace {

double binomial(int n, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
    return out;
}

void require_eps_positive(double eps) {
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
}

}  // namespace

DenseTensor w_state(int n) {
    if (n < 2) throw ValidationError("w_state: n must be at least 2");
    DenseTensor t(std::vector<std::int64_t>(static_cast<std::size_t>(n), 2));
    for (int i = 0; i < n; ++i) {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
        idx[static_cast<std::size_t>(i)] = 1;
        t.set(idx, 1.0);
    }
    return t;
}

UnconstrainedDecomposition w_eps_unconstrained(int n, double eps) {
    if (n < 3) throw ValidationError("w_eps_unconstrained: n must be at least 3");
    require_eps_positive(eps);
    if (eps < 1e-8)
        std::fprintf(stderr,
                     "brlab warning: w_eps_unconstrained at eps=%.3g cancels two O(1/eps) terms; "
                     "errors below the noise floor are not meaningful\n",
                     eps);
    const double scale = std::pow(eps, -1.0 / n);
    Matrix rep(2, 2);
    rep(0, 0) = scale;
    rep(1, 0) = scale * eps;
    rep(0, 1) = scale * std::exp(Cplx(0.0, M_PI / n));
    rep(1, 1) = 0.0;
    return unconstrained_from_orbit(symmetric_action(make_simplex(n)), 2,
                                    std::vector<int>(static_cast<std::size_t>(n), 2), {rep});
}

double w_eps_unconstrained_error(int n, double eps) {
    double sum = 0.0;
    for (int k = 2; k <= n; ++k) sum += binomial(n, k) * std::pow(eps, 2.0 * (k - 1));
    return std::sqrt(sum);
}

double w_eps_psd_constant(int n) { return std::pow(2.0 * (1.0 - std::cos(M_PI / n)), -1.0 / (n - 1)); }

namespace {

std::pair<Matrix, Matrix> w_psd_pair(int n, double eps) {
    const double s = w_eps_psd_constant(n) * std::pow(eps, -1.0 / (n - 1));
    Matrix a0(2, 2), a1(2, 2);
    a0(0, 0) = s;
    a0(1, 1) = s;
    a0(0, 1) = s * std::exp(Cplx(0.0, M_PI / n));
    a0(1, 0) = s * std::exp(Cplx(0.0, -M_PI / n));
    a1.setConstant(eps);
    return {a0, a1};
}

}  // namespace

PsdDecomposition w_eps_psd(int n, double eps) {
    if (n < 3) throw ValidationError("w_eps_psd: n must be at least 3");
    require_eps_positive(eps);
    auto [a0, a1] = w_psd_pair(n, eps);
    return psd_from_orbit(symmetric_action(make_simplex(n)), 2,
                          std::vector<int>(static_cast<std::size_t>(n), 2), {{a0, a1}});
}

UnconstrainedDecomposition w_eps_ti_unconstrained(int n, double eps) {
    if (n < 3) throw ValidationError("w_eps_ti_unconstrained: n must be at least 3");
    require_eps_positive(eps);
    const Wsc omega = make_cycle(n);
    const double scale = std::pow(eps, -1.0 / n);
    const Cplx root = std::exp(Cplx(0.0, M_PI / n));  // principal n-th root of -1
    const Matrix rep = cycle_local(omega, 1, 2, [&](int a, int b) {
        Vector v = Vector::Zero(2);
        if (a == 0 && b == 0) {
            v(0) = scale;
            v(1) = scale * eps;
        } else if (a == 1 && b == 1) {
            v(0) = scale * root;
        }
        return v;
    });
    return unconstrained_from_orbit(cyclic_action(omega), 2,
                                    std::vector<int>(static_cast<std::size_t>(n), 2), {rep});
}

PsdDecomposition w_eps_ti_psd(int n, double eps) {
    if (n < 3) throw ValidationError("w_eps_ti_psd: n must be at least 3");
    require_eps_positive(eps);
    const Wsc omega = make_cycle(n);
    auto [a0, a1] = w_psd_pair(n, eps);
    std::vector<Matrix> rep;
    for (const Matrix& a : {a0, a1}) {
        Matrix e = Matrix::Zero(4, 4);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                e(cycle_beta_index(omega, 1, 2, x, x), cycle_beta_index(omega, 1, 2, y, y)) = a(x, y);
        rep.push_back(std::move(e));
    }
    return psd_from_orbit(cyclic_action(omega), 2, std::vector<int>(static_cast<std::size_t>(n), 2),
                          {rep});
}

NonnegativeDecomposition w_eps_ti_nonneg(int n, double eps, int p) {
    if (n < 3) throw ValidationError("w_eps_ti_nonneg: n must be at least 3");
    require_eps_positive(eps);
    if (p < 2 || (n - 1) % p != 0)
        throw ValidationError("w_eps_ti_nonneg: p must be at least 2 and divide n-1");
    const Wsc omega = make_cycle(n);
    const double c0 = std::pow(eps, -1.0 / (n - 1));
    // 1/p^2 absorbed per site: 1/p from the display's prefactor, 1/p from
    // tr(P^m) = p on the surviving strings; weight-1 entries land at 1/p.
    const double site_scale = std::pow(1.0 / (p * p), 1.0 / n);
    const Matrix rep = cycle_local(omega, 1, p, [&](int a, int b) {
        Vector v = Vector::Zero(2);
        if (b == (a + 1) % p) v(0) = site_scale * c0;  // A_0 = eps^{-1/(n-1)} P_tau
        if (a == b) v(1) = site_scale * eps;           // A_1 = eps I_p
        return v;
    });
    NonnegativeDecomposition dec;
    static_cast<UnconstrainedDecomposition&>(dec) = unconstrained_from_orbit(
        cyclic_action(omega), p, std::vector<int>(static_cast<std::size_t>(n), 2), {rep});
    return dec;
}

NonnegativeDecomposition two_domain_eps(int n, int k, double eps) {
    if (n < 3) throw ValidationError("two_domain_eps: n must be at least 3");
    if (k < 2) throw ValidationError("two_domain_eps: k must be at least 2");
    if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("two_domain_eps: eps must lie in (0,1)");
    const Wsc omega = make_cycle(n);
    auto locals = cycle_locals(omega, k, [&](int site, int a, int b) {
        Vector v = Vector::Zero(static_cast<std::int64_t>(k) * k);
        const double diag_coeff = 1.0;  // eps + (1 - eps)
        if (site < n)
            v(a * k + b) = (a == b) ? diag_coeff : eps;
        else
            v(a * k + b) = (a == b) ? 1.0 : 1.0 / eps;
        return v;
    });
    NonnegativeDecomposition dec;
    static_cast<UnconstrainedDecomposition&>(dec) = make_unconstrained(
        trivial_action(omega), k, std::vector<int>(static_cast<std::size_t>(n), k * k), std::move(locals));
    return dec;
}

DenseTensor two_domain_limit(int n, int k) {
    if (n < 3 || k < 2) throw ValidationError("two_domain_limit: need n >= 3 and k >= 2");
    DenseTensor t(std::vector<std::int64_t>(static_cast<std::size_t>(n), static_cast<std::int64_t>(k) * k));
    std::vector<int> alpha(static_cast<std::size_t>(n), 0);
    std::int64_t count = 1;
    for (int i = 0; i < n; ++i) count *= k;
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
    for (std::int64_t lin = 0; lin < count; ++lin) {
        std::int64_t rem = lin;
        for (int i = n; i-- > 0;) {
            alpha[static_cast<std::size_t>(i)] = static_cast<int>(rem % k);
            rem /= k;
        }
        int off_v = 0;
        for (int i = 0; i + 1 < n; ++i)
            if (alpha[static_cast<std::size_t>(i)] != alpha[static_cast<std::size_t>(i + 1)]) ++off_v;
        const int off_w = alpha[static_cast<std::size_t>(n - 1)] != alpha[0] ? 1 : 0;
        if (off_v != off_w) continue;  // eps exponent stays positive
        for (int i = 0; i < n; ++i)
            idx[static_cast<std::size_t>(i)] =
                alpha[static_cast<std::size_t>(i)] * k + alpha[static_cast<std::size_t>((i + 1) % n)];
        t.set(idx, 1.0);
    }
    return t;
}

std::vector<double> log_grid(double hi, double lo, int points) {
    if (!(hi > lo) || !(lo > 0.0) || points < 2) throw ValidationError("bad grid specification");
    std::vector<double> out;
    const double step = (std::log(lo) - std::log(hi)) / (points - 1);
    for (int i = 0; i < points; ++i) out.push_back(std::exp(std::log(hi) + step * i));
    return out;
}

std::vector<double> default_eps_grid() { return log_grid(1e-1, 1e-4, 13); }

LineFit least_squares_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("least_squares_line: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    LineFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.slope * x[i] + fit.intercept);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    fit.slope_stderr = (x.size() > 2) ? std::sqrt(ss / (n - 2.0) / (sxx - sx * sx / n)) : 0.0;
    return fit;
}

ConvergenceStudy convergence_study(const std::string& family,
                                   const std::function<DenseTensor(double)>& contract_at,
                                   const std::vector<double>& eps_grid, const DenseTensor& target) {
    if (eps_grid.size() < 4) throw ValidationError("convergence_study: grid needs at least 4 points");
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > 0.0)) throw ValidationError("convergence_study: eps must be positive");
        if (i > 0 && !(eps_grid[i] < eps_grid[i - 1]))
            throw ValidationError("convergence_study: grid must be strictly decreasing");
    }

    ConvergenceStudy study;
    study.family = family;
    study.eps = eps_grid;
    const double target_norm = frobenius_norm(target);
    const double noise_floor = 1e3 * std::numeric_limits<double>::epsilon() * target_norm;

    for (double eps : eps_grid) {
        double err = std::numeric_limits<double>::quiet_NaN();
        bool usable = true;
        try {
            err = distance(contract_at(eps), target);
        } catch (const ValidationError&) {
            usable = false;  // non-finite contraction at this eps
        }
        study.error.push_back(err);
        study.included.push_back(usable && err > noise_floor);
    }

    for (std::size_t i = 1; i < study.error.size(); ++i)
        if (!(study.error[i] < study.error[i - 1])) study.monotone = false;

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < study.eps.size(); ++i)
        if (study.included[i]) {
            lx.push_back(std::log(study.eps[i]));
            ly.push_back(std::log(study.error[i]));
        }
    if (lx.size() >= 2) {
        const LineFit fit = least_squares_line(lx, ly);
        study.slope = fit.slope;
        study.slope_stderr = fit.slope_stderr;
        study.coefficient = std::exp(fit.intercept);
        study.fit_residual = fit.residual_rms;
    }
    return study;
}

}  // namespace brlab
