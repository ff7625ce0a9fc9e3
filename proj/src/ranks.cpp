#include "brlab/ranks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <thread>

#include "brlab/families.hpp"
#include "brlab/rng.hpp"
#include "brlab/threads.hpp"

namespace brlab {

int worker_threads() {
    static const int cached = [] {
        const char* env = std::getenv("BRLAB_THREADS");
        if (!env) return 1;
        const int parsed = std::atoi(env);
        const int hw = static_cast<int>(std::thread::hardware_concurrency());
        return std::clamp(parsed, 1, std::max(1, hw));
    }();
    return cached;
}

}  // namespace brlab

namespace brlab {

int flattening_lower_bound(const DenseTensor& t, double tol) {
    const auto n = t.order();
    if (n < 2) return t.size() > 0 && frobenius_norm(t) > 0.0 ? 1 : 0;
    std::int64_t best = 0;
    for (std::int64_t s = 1; s <= n; ++s) best = std::max(best, matrix_rank(unfold(t, {s}), tol));
    std::vector<std::int64_t> prefix;
    for (std::int64_t s = 1; s < n; ++s) {
        prefix.push_back(s);
        if (s > 1 && s < n) best = std::max(best, matrix_rank(unfold(t, prefix), tol));
    }
    return static_cast<int>(best);
}

namespace {

// contract conj(cols) into every site except `site`, leaving a d_site vector
Vector contract_all_but(const DenseTensor& t, int site, const std::vector<Vector>& cols) {
    DenseTensor cur = t;
    for (int s = 1; s <= t.order(); ++s) {
        if (s == site) continue;
        const Vector& v = cols[static_cast<std::size_t>(s - 1)];
        Matrix row = v.adjoint();  // 1 x d_s
        cur = mode_apply(row, cur, s);
    }
    Vector out(t.dim(site));
    for (std::int64_t j = 0; j < out.size(); ++j) out(j) = cur[j];
    return out;
}

DenseTensor cp_model(const std::vector<Matrix>& factors, const std::vector<std::int64_t>& shape) {
    DenseTensor out(shape);
    const std::int64_t r = factors[0].cols();
    for (std::int64_t a = 0; a < r; ++a) {
        std::vector<Cplx> cur{Cplx(1.0, 0.0)}, next;
        for (const auto& f : factors) {
            next.assign(cur.size() * static_cast<std::size_t>(f.rows()), Cplx(0.0, 0.0));
            for (std::size_t x = 0; x < cur.size(); ++x)
                for (std::int64_t j = 0; j < f.rows(); ++j)
                    next[x * static_cast<std::size_t>(f.rows()) + static_cast<std::size_t>(j)] =
                        cur[x] * f(j, a);
            cur.swap(next);
        }
        for (std::int64_t i = 0; i < out.size(); ++i) out[i] += cur[static_cast<std::size_t>(i)];
    }
    return out;
}

UnconstrainedDecomposition factors_to_dec(const std::vector<Matrix>& factors, int r) {
    const int n = static_cast<int>(factors.size());
    std::vector<int> phys;
    for (const auto& f : factors) phys.push_back(static_cast<int>(f.rows()));
    return make_unconstrained(trivial_action(make_simplex(n)), r, std::move(phys), factors);
}

double model_residual(const DenseTensor& t, const std::vector<Matrix>& factors) {
    return distance(cp_model(factors, t.shape()), t);
}

struct SweepState {
    std::vector<Matrix> factors;
    std::vector<double> history;
    double residual = 0.0;
};

SweepState run_als_start(const DenseTensor& t, int r, const AlsOptions& opts, Rng rng, bool nonneg,
                         bool use_init) {
    const int n = static_cast<int>(t.order());
    SweepState st;
    if (use_init) {
        st.factors = opts.init;
    } else {
        st.factors.reserve(static_cast<std::size_t>(n));
        for (int s = 1; s <= n; ++s) {
            Matrix f(t.dim(s), r);
            for (std::int64_t j = 0; j < f.rows(); ++j)
                for (int a = 0; a < r; ++a) f(j, a) = nonneg ? Cplx(rng.uniform(), 0.0) : rng.complex_gaussian();
            st.factors.push_back(std::move(f));
        }
    }

    std::vector<Matrix> grams(static_cast<std::size_t>(n));
    auto gram = [&](int s) { return Matrix(st.factors[static_cast<std::size_t>(s - 1)].adjoint() *
                                           st.factors[static_cast<std::size_t>(s - 1)]); };
    for (int s = 1; s <= n; ++s) grams[static_cast<std::size_t>(s - 1)] = gram(s);

    st.residual = model_residual(t, st.factors);
    st.history.push_back(st.residual);

    std::vector<Vector> cols(static_cast<std::size_t>(n));
    for (int sweep = 0; sweep < opts.iters; ++sweep) {
        for (int s = 1; s <= n; ++s) {
            Matrix g = Matrix::Ones(r, r);
            for (int u = 1; u <= n; ++u)
                if (u != s) g = g.cwiseProduct(grams[static_cast<std::size_t>(u - 1)]);

            Matrix b(t.dim(s), r);
            for (int a = 0; a < r; ++a) {
                for (int u = 1; u <= n; ++u) cols[static_cast<std::size_t>(u - 1)] =
                    st.factors[static_cast<std::size_t>(u - 1)].col(a);
                b.col(a) = contract_all_but(t, s, cols);
            }

            Matrix& f = st.factors[static_cast<std::size_t>(s - 1)];
            if (!nonneg) {
                // V (K^T conj(K)) = B with K^T conj(K) = conj(G), G Hermitian
                const Matrix m = g + opts.damping * Matrix::Identity(r, r);
                f = m.ldlt().solve(b.transpose()).transpose();
            } else {
                // Lee-Seung multiplicative step on the unfolding
                const Matrix den = f * g.transpose();
                for (std::int64_t j = 0; j < f.rows(); ++j)
                    for (int a = 0; a < r; ++a) {
                        const double numer = std::max(0.0, b(j, a).real());
                        const double denom = den(j, a).real() + 1e-300;
                        f(j, a) = Cplx(f(j, a).real() * numer / denom, 0.0);
                    }
            }
            grams[static_cast<std::size_t>(s - 1)] = gram(s);
        }
        const double res = model_residual(t, st.factors);
        st.history.push_back(res);
        const double prev = st.history[st.history.size() - 2];
        st.residual = res;
        if (std::abs(prev - res) <= opts.rel_tol * std::max(1.0, prev)) break;
    }
    return st;
}

AlsResult run_multistart(const DenseTensor& t, int r, const AlsOptions& opts, std::uint64_t seed,
                         bool nonneg) {
    if (r < 1) throw ValidationError("als: target rank must be positive");
    if (t.order() < 2) throw ValidationError("als: tensor must have at least 2 sites");
    if (nonneg)
        for (const auto& z : t.data())
            if (z.real() < -1e-12 || std::abs(z.imag()) > 1e-12)
                throw ValidationError("als_nonnegative: tensor has negative or non-real entries");

    if (!opts.init.empty()) {
        if (static_cast<int>(opts.init.size()) != t.order()) throw ValidationError("als: bad warm start");
        for (std::int64_t s = 1; s <= t.order(); ++s)
            if (opts.init[static_cast<std::size_t>(s - 1)].rows() != t.dim(s) ||
                opts.init[static_cast<std::size_t>(s - 1)].cols() != r)
                throw ValidationError("als: warm start shape mismatch");
    }

    std::vector<SweepState> states(static_cast<std::size_t>(opts.starts));
    const int threads = std::min(worker_threads(), opts.starts);
    if (threads <= 1) {
        for (int start = 0; start < opts.starts; ++start) {
            const bool warm = start == 0 && !opts.init.empty();
            states[static_cast<std::size_t>(start)] =
                run_als_start(t, r, opts, Rng(seed, static_cast<std::uint64_t>(start)), nonneg, warm);
        }
    } else {
        std::vector<std::future<void>> futures;
        for (int w = 0; w < threads; ++w)
            futures.push_back(std::async(std::launch::async, [&, w] {
                for (int start = w; start < opts.starts; start += threads) {
                    const bool warm = start == 0 && !opts.init.empty();
                    states[static_cast<std::size_t>(start)] =
                        run_als_start(t, r, opts, Rng(seed, static_cast<std::uint64_t>(start)), nonneg, warm);
                }
            }));
        for (auto& f : futures) f.get();
    }
    // fixed reduction order: strict improvement keeps the lowest start index
    std::optional<SweepState> best;
    for (auto& st : states)
        if (!best || st.residual < best->residual) best = std::move(st);
    AlsResult out;
    out.dec = factors_to_dec(best->factors, r);
    out.residual = best->residual;
    out.history = best->history;
    out.sweeps = static_cast<int>(best->history.size()) - 1;
    for (const auto& f : best->factors) out.max_factor_norm = std::max(out.max_factor_norm, f.norm());
    return out;
}

}  // namespace

AlsResult als_cp(const DenseTensor& t, int r, const AlsOptions& opts, std::uint64_t seed) {
    return run_multistart(t, r, opts, seed, false);
}

AlsResult als_nonnegative(const DenseTensor& t, int r, const AlsOptions& opts, std::uint64_t seed) {
    return run_multistart(t, r, opts, seed, true);
}

NonnegativeDecomposition als_nonnegative_dec(const AlsResult& res) {
    NonnegativeDecomposition dec;
    static_cast<UnconstrainedDecomposition&>(dec) = res.dec;
    // clamp the roundoff shadow so the invariant checker stays quiet
    for (auto& local : dec.locals)
        for (std::int64_t c = 0; c < local.cols(); ++c)
            for (std::int64_t j = 0; j < local.rows(); ++j)
                local(j, c) = Cplx(std::max(0.0, local(j, c).real()), 0.0);
    return dec;
}

namespace {

// model entries <M| A_{j1} * A_{j2} * A_{j3} |M> for rank-1-free Cholesky
// parameters p = (l11, l22, Re l21, Im l21) x 2 matrices
void symm_psd2_model(const double* p, double* f, const DenseTensor& t) {
    Matrix l0 = Matrix::Zero(2, 2), l1 = Matrix::Zero(2, 2);
    l0(0, 0) = p[0];
    l0(1, 1) = p[1];
    l0(1, 0) = Cplx(p[2], p[3]);
    l1(0, 0) = p[4];
    l1(1, 1) = p[5];
    l1(1, 0) = Cplx(p[6], p[7]);
    const Matrix a0 = l0 * l0.adjoint();
    const Matrix a1 = l1 * l1.adjoint();
    const Matrix* as[2] = {&a0, &a1};
    int idx = 0;
    for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2)
            for (int j3 = 0; j3 < 2; ++j3) {
                Cplx sum = 0.0;
                for (int x = 0; x < 2; ++x)
                    for (int y = 0; y < 2; ++y)
                        sum += (*as[j1])(x, y) * (*as[j2])(x, y) * (*as[j3])(x, y);
                f[idx] = sum.real() - t.at({j1, j2, j3}).real();
                ++idx;
            }
}

}  // namespace

double symm_psd2_residual(const DenseTensor& t, int starts, int iters, std::uint64_t seed) {
    if (t.shape() != std::vector<std::int64_t>{2, 2, 2})
        throw ValidationError("symm_psd2_residual: tensor must have shape (2,2,2)");
    for (const auto& z : t.data())
        if (z.real() < -1e-12 || std::abs(z.imag()) > 1e-12)
            throw ValidationError("symm_psd2_residual: tensor must be entrywise nonnegative");

    constexpr int kP = 8, kF = 8;
    double best = std::numeric_limits<double>::infinity();
    for (int start = 0; start < starts; ++start) {
        Rng rng(seed, 1000 + static_cast<std::uint64_t>(start));
        double p[kP];
        for (double& x : p) x = rng.gaussian();

        double f[kF], f_try[kF];
        symm_psd2_model(p, f, t);
        double cost = 0.0;
        for (double v : f) cost += v * v;
        double mu = 1e-3;

        for (int it = 0; it < iters; ++it) {
            Eigen::Matrix<double, kF, kP> jac;
            double fh[kF];
            for (int k = 0; k < kP; ++k) {
                const double h = 1e-7 * std::max(1.0, std::abs(p[k]));
                double ph[kP];
                std::copy(p, p + kP, ph);
                ph[k] += h;
                symm_psd2_model(ph, fh, t);
                for (int i = 0; i < kF; ++i) jac(i, k) = (fh[i] - f[i]) / h;
            }
            const Eigen::Matrix<double, kP, kP> jtj = jac.transpose() * jac;
            Eigen::Matrix<double, kP, 1> g;
            for (int k = 0; k < kP; ++k) {
                g(k) = 0.0;
                for (int i = 0; i < kF; ++i) g(k) += jac(i, k) * f[i];
            }
            if (g.norm() < 1e-14) break;
            const Eigen::Matrix<double, kP, 1> step =
                (jtj + mu * Eigen::Matrix<double, kP, kP>::Identity()).ldlt().solve(-g);
            double pt[kP];
            for (int k = 0; k < kP; ++k) pt[k] = p[k] + step(k);
            symm_psd2_model(pt, f_try, t);
            double cost_try = 0.0;
            for (double v : f_try) cost_try += v * v;
            if (cost_try < cost) {
                std::copy(pt, pt + kP, p);
                std::copy(f_try, f_try + kF, f);
                cost = cost_try;
                mu = std::max(mu / 3.0, 1e-12);
            } else {
                mu = std::min(mu * 4.0, 1e12);
            }
        }
        best = std::min(best, std::sqrt(cost));
    }
    return best;
}

std::vector<ReferenceEntry> reference_ranks(int n) {
    std::vector<ReferenceEntry> out;
    out.push_back({"rank", "exact", static_cast<double>(n), "rank(W_n) = n",
                   "Prop. on the W-state rank: \"we have that rank(W_n) = n\""});
    out.push_back({"brank", "exact", 2.0, "bsymmrank(W_n) = brank(W_n) = 2",
                   "standard border-rank family for the W state"});
    out.push_back({"tiosr-lower", "lower-bound", std::sqrt(static_cast<double>(n)),
                   "tiosr(W_n) >= sqrt(n)", "irreducible-MPS lower bound"});
    out.push_back({"rank-psdrank", "relation", 0.0, "rank(T) <= psdrank(T)^2",
                   "squared-bond embedding, any (Omega,G)"});
    out.push_back({"tipsdosr-lower", "asymptotic-lower", std::pow(static_cast<double>(n), 0.25),
                   "tipsdosr(W_n) >= Omega(n^{1/4})", "combining the embedding with the tiosr bound"});
    for (int p = 2; p <= 4; ++p)
        if ((n - 1) % p == 0)
            out.push_back({"btinnosr-upper", "upper-bound", static_cast<double>(p),
                           "btinnosr(W_n) <= p for p | n-1", "permutation-matrix family"});
    return out;
}

std::optional<double> reference_lookup(const std::string& quantity, int n) {
    for (const auto& e : reference_ranks(n))
        if (e.quantity == quantity) return e.value;
    return std::nullopt;
}

RankReport rank_report(const DenseTensor& t, const std::string& label, int max_rank,
                       const AlsOptions& opts, std::uint64_t seed) {
    RankReport report;
    report.label = label;
    report.flattening_bound = flattening_lower_bound(t);
    bool nonneg = true;
    for (const auto& z : t.data())
        if (z.real() < -1e-12 || std::abs(z.imag()) > 1e-12) nonneg = false;
    for (int r = 1; r <= max_rank; ++r) {
        report.residuals.emplace_back(r, als_cp(t, r, opts, seed).residual);
        if (nonneg) report.nonneg_residuals.emplace_back(r, als_nonnegative(t, r, opts, seed).residual);
    }
    if (label.size() > 1 && label[0] == 'W') {
        const int n = std::atoi(label.c_str() + 1);
        if (n >= 2) report.references = reference_ranks(n);
    }
    return report;
}

FloorMeasurement measure_floors(std::uint64_t seed, int starts, int iters) {
    FloorMeasurement m;
    m.seed = seed;
    m.starts = starts;
    m.iters = iters;
    AlsOptions opts;
    opts.starts = starts;
    opts.iters = iters;
    m.delta_nn = als_nonnegative(w_state(3), 2, opts, seed).residual;
    m.delta_psd = symm_psd2_residual(w_state(3), starts, iters, seed);
    return m;
}

SeparationReport separation_experiment(const std::vector<int>& n_list, std::uint64_t seed,
                                       const AlsOptions& opts) {
    SeparationReport report;
    report.seed = seed;
    for (int n : n_list) {
        if (n < 3 || n > 7) throw ValidationError("separation_experiment: n must lie in [3, 7]");
        SeparationRow row;
        row.n = n;
        const DenseTensor w = w_state(n);
        row.rank_eps_witness = distance(contract_vector(w_eps_unconstrained(n, 1e-3)), w);
        row.psd_eps_witness = distance(contract_psd(w_eps_psd(n, 1e-3)), w);
        for (int r = 2; r < n; ++r)
            row.nonneg_floors.emplace_back(r, als_nonnegative(w, r, opts, seed).residual);
        row.eps_n = row.nonneg_floors.back().second / 2.0;
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace brlab
