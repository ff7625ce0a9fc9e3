#include "brlab/correlations.hpp"

#include <algorithm>
#include <cmath>

namespace brlab {

DenseTensor validate_distribution(const DenseTensor& t, double tol, bool renormalize) {
    double sum = 0.0;
    for (const auto& z : t.data()) {
        if (std::abs(z.imag()) > 1e-12) throw ValidationError("distribution has a non-real entry");
        if (z.real() < -1e-12) throw ValidationError("distribution has a negative entry");
        sum += z.real();
    }
    if (!std::isfinite(sum)) throw ValidationError("distribution has non-finite mass");
    if (std::abs(sum - 1.0) > tol) {
        if (!renormalize)
            throw ValidationError("distribution mass deviates from 1 by " + std::to_string(sum - 1.0));
        if (sum <= 0.0) throw ValidationError("distribution mass is not positive");
        DenseTensor out = t;
        out *= Cplx(1.0 / sum, 0.0);
        return out;
    }
    return t;
}

bool HiddenVariableModel::symmetric() const {
    for (std::size_t i = 1; i < conditionals.size(); ++i)
        if (conditionals[i] != conditionals[0]) return false;
    return true;
}

void validate_model(const HiddenVariableModel& model, double tol) {
    if (model.r < 1) throw ValidationError("hidden variable needs at least one value");
    if (model.prior.size() != model.r) throw ValidationError("prior length mismatch");
    double mass = 0.0;
    for (Eigen::Index a = 0; a < model.prior.size(); ++a) {
        if (model.prior(a) < -1e-12) throw ValidationError("negative prior probability");
        mass += model.prior(a);
    }
    if (std::abs(mass - 1.0) > tol) throw ValidationError("prior does not sum to 1");
    for (const auto& c : model.conditionals) {
        if (c.cols() != model.r) throw ValidationError("conditional column count mismatch");
        for (Eigen::Index a = 0; a < c.cols(); ++a) {
            double col = 0.0;
            for (Eigen::Index j = 0; j < c.rows(); ++j) {
                if (c(j, a) < -1e-12) throw ValidationError("negative conditional probability");
                col += c(j, a);
            }
            if (std::abs(col - 1.0) > tol) throw ValidationError("conditional column does not sum to 1");
        }
    }
}

DenseTensor eval_hvm(const HiddenVariableModel& model) {
    const int n = static_cast<int>(model.conditionals.size());
    std::vector<std::int64_t> shape;
    for (const auto& c : model.conditionals) shape.push_back(c.rows());
    DenseTensor t(shape);
    for (std::int64_t lin = 0; lin < t.size(); ++lin) {
        const auto idx = t.unravel(lin);
        double val = 0.0;
        for (int a = 0; a < model.r; ++a) {
            double prod = model.prior(a);
            for (int i = 0; i < n; ++i)
                prod *= model.conditionals[static_cast<std::size_t>(i)](idx[static_cast<std::size_t>(i)], a);
            val += prod;
        }
        t[lin] = val;
    }
    return t;
}

namespace {

void require_simplex(const Wsc& omega) {
    const Subset full = (omega.n() == 63) ? ~Subset{0} : ((Subset{1} << omega.n()) - 1);
    if (omega.facets() != std::vector<Subset>{full} || omega.multiset_size() != 1)
        throw ValidationError("operation requires a simplex-shaped decomposition");
}

}  // namespace

HiddenVariableModel nn_to_hvm(const NonnegativeDecomposition& dec) {
    require_simplex(dec.omega());
    const auto report = validate(dec);
    if (!report.ok()) throw ValidationError("invalid nonnegative decomposition: " + report.summary());
    validate_distribution(contract_vector(dec), 1e-10, false);

    const int n = dec.n();
    std::vector<int> kept;
    std::vector<std::vector<double>> masses(static_cast<std::size_t>(n));
    for (int a = 0; a < dec.bond; ++a) {
        bool alive = true;
        for (int i = 1; i <= n; ++i) {
            const double m = dec.locals[static_cast<std::size_t>(i - 1)].col(a).real().sum();
            masses[static_cast<std::size_t>(i - 1)].push_back(m);
            if (m <= 0.0) alive = false;
        }
        if (alive) kept.push_back(a);
    }
    if (kept.empty()) throw ValidationError("all hidden values carry zero mass");

    HiddenVariableModel model;
    model.r = static_cast<int>(kept.size());
    model.prior.resize(model.r);
    for (int i = 1; i <= n; ++i)
        model.conditionals.push_back(RealMatrix::Zero(dec.phys_at(i), model.r));
    for (int out = 0; out < model.r; ++out) {
        const int a = kept[static_cast<std::size_t>(out)];
        double prior = 1.0;
        for (int i = 1; i <= n; ++i) {
            const double m = masses[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(a)];
            prior *= m;
            model.conditionals[static_cast<std::size_t>(i - 1)].col(out) =
                dec.locals[static_cast<std::size_t>(i - 1)].col(a).real() / m;
        }
        model.prior(out) = prior;
    }

    const double dev = distance(eval_hvm(model), contract_vector(dec));
    if (dev > 1e-12)
        throw ConstructionError("hidden-variable model fails to reproduce the distribution", dev);
    return model;
}

NonnegativeDecomposition hvm_to_nn(const HiddenVariableModel& model) {
    validate_model(model);
    const int n = static_cast<int>(model.conditionals.size());
    if (n < 2) throw ValidationError("model needs at least two sites");
    std::vector<int> phys;
    for (const auto& c : model.conditionals) phys.push_back(static_cast<int>(c.rows()));

    NonnegativeDecomposition dec;
    if (model.symmetric()) {
        Matrix rep(phys[0], model.r);
        for (int a = 0; a < model.r; ++a)
            rep.col(a) = (model.conditionals[0].col(a) * std::pow(model.prior(a), 1.0 / n))
                             .cast<Cplx>();
        static_cast<UnconstrainedDecomposition&>(dec) =
            unconstrained_from_orbit(symmetric_action(make_simplex(n)), model.r, phys, {rep});
    } else {
        std::vector<Matrix> locals;
        for (int i = 0; i < n; ++i) {
            Matrix local(phys[static_cast<std::size_t>(i)], model.r);
            for (int a = 0; a < model.r; ++a) {
                RealVector col = model.conditionals[static_cast<std::size_t>(i)].col(a);
                if (i == 0) col *= model.prior(a);
                local.col(a) = col.cast<Cplx>();
            }
            locals.push_back(std::move(local));
        }
        static_cast<UnconstrainedDecomposition&>(dec) =
            make_unconstrained(trivial_action(make_simplex(n)), model.r, phys, std::move(locals));
    }

    const double dev = distance(contract_vector(dec), eval_hvm(model));
    if (dev > 1e-12)
        throw ConstructionError("nonnegative decomposition fails to reproduce the model", dev);
    return dec;
}

double povm_completeness_deviation(const POVM& p) {
    if (p.elements.empty()) return 1.0;
    Matrix sum = Matrix::Zero(p.dim(), p.dim());
    for (const auto& e : p.elements) sum += e;
    return (sum - Matrix::Identity(p.dim(), p.dim())).cwiseAbs().maxCoeff();
}

bool is_valid_povm(const POVM& p, double tol) {
    if (p.elements.empty()) return false;
    for (const auto& e : p.elements) {
        if (e.rows() != p.dim() || e.cols() != p.dim()) return false;
        if (!is_hermitian(e, 1e-10)) return false;
        if (!is_psd(e, tol)) return false;
    }
    return povm_completeness_deviation(p) <= tol;
}

Matrix choi_matrix(const KrausChannel& ch) {
    const int din = ch.in_dim(), dout = ch.out_dim();
    if (din == 0) throw ValidationError("channel has no Kraus operators");
    Matrix c = Matrix::Zero(static_cast<std::int64_t>(din) * dout, static_cast<std::int64_t>(din) * dout);
    for (const auto& k : ch.kraus) {
        if (k.rows() != dout || k.cols() != din) throw ValidationError("inconsistent Kraus shapes");
        for (int i = 0; i < din; ++i)
            for (int a = 0; a < dout; ++a)
                for (int j = 0; j < din; ++j)
                    for (int b = 0; b < dout; ++b)
                        c(i * dout + a, j * dout + b) += k(a, i) * std::conj(k(b, j));
    }
    return c;
}

Matrix choi_of_map(const std::function<Matrix(const Matrix&)>& map, int in_dim) {
    int out_dim = static_cast<int>(map(Matrix::Zero(in_dim, in_dim)).rows());
    Matrix c = Matrix::Zero(static_cast<std::int64_t>(in_dim) * out_dim,
                            static_cast<std::int64_t>(in_dim) * out_dim);
    for (int i = 0; i < in_dim; ++i)
        for (int j = 0; j < in_dim; ++j) {
            Matrix e = Matrix::Zero(in_dim, in_dim);
            e(i, j) = 1.0;
            const Matrix img = map(e);
            for (int a = 0; a < out_dim; ++a)
                for (int b = 0; b < out_dim; ++b) c(i * out_dim + a, j * out_dim + b) += img(a, b);
        }
    return c;
}

CptpReport check_cptp(const KrausChannel& ch, double tol) {
    CptpReport report;
    if (ch.kraus.empty()) return report;
    Matrix sum = Matrix::Zero(ch.in_dim(), ch.in_dim());
    for (const auto& k : ch.kraus) sum += k.adjoint() * k;
    report.trace_preservation_deviation =
        (sum - Matrix::Identity(ch.in_dim(), ch.in_dim())).cwiseAbs().maxCoeff();
    const Matrix choi = choi_matrix(ch);
    report.choi_lambda_min = hermitian_eigenvalues(choi).minCoeff();
    report.ok = report.trace_preservation_deviation <= tol &&
                report.choi_lambda_min >= -tol * std::max(1.0, choi.norm());
    return report;
}

KrausChannel povm_to_channel(const POVM& p) {
    if (!is_valid_povm(p)) throw ValidationError("povm_to_channel: invalid POVM");
    const int d = static_cast<int>(p.elements.size());
    const int m = p.dim();
    KrausChannel ch;
    for (int j = 0; j < d; ++j) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(p.elements[static_cast<std::size_t>(j)]);
        const double lmax = es.eigenvalues().maxCoeff();
        for (Eigen::Index l = 0; l < es.eigenvalues().size(); ++l) {
            const double lambda = es.eigenvalues()(l);
            if (lambda <= 1e-12 * std::max(0.0, lmax)) continue;
            Matrix k = Matrix::Zero(d, m);
            k.row(j) = std::sqrt(lambda) * es.eigenvectors().col(l).adjoint();
            ch.kraus.push_back(std::move(k));
        }
    }
    const auto report = check_cptp(ch, 1e-10);
    if (!report.ok)
        throw ConstructionError("povm_to_channel produced a non-CPTP map",
                                report.trace_preservation_deviation);
    return ch;
}

GSymmetricEigen g_symmetric_eigendecomposition(const GroupAction& action, int bond,
                                               const std::vector<Matrix>& k_family) {
    const Wsc& omega = action.omega();
    const int n = omega.n();
    if (static_cast<int>(k_family.size()) != n) throw ValidationError("one matrix per vertex required");
    if (!is_external(action))
        throw ValidationError("g_symmetric_eigendecomposition requires an external action");
    for (int i = 1; i <= n; ++i) {
        const auto sz = BetaIndexer(omega, i, bond).size();
        const auto& k = k_family[static_cast<std::size_t>(i - 1)];
        if (k.rows() != sz || k.cols() != sz) throw ValidationError("matrix size mismatch at vertex");
        if (!is_hermitian(k, 1e-10)) throw ValidationError("family member is not Hermitian");
    }
    // symmetry of the family under every generator, tolerance 1e-10
    for (std::size_t g = 0; g < action.generators().size(); ++g) {
        GroupElement elem{action.generators()[g], action.facet_maps()[g]};
        for (int i = 1; i <= n; ++i) {
            const int gi = elem.vertex_perm(i - 1) + 1;
            const auto relabel = beta_relabel(omega, elem, i, bond);
            const auto& a = k_family[static_cast<std::size_t>(i - 1)];
            const auto& b = k_family[static_cast<std::size_t>(gi - 1)];
            double dev = 0.0;
            for (std::int64_t x = 0; x < a.rows(); ++x)
                for (std::int64_t y = 0; y < a.cols(); ++y)
                    dev = std::max(dev, std::abs(b(relabel[static_cast<std::size_t>(x)],
                                                   relabel[static_cast<std::size_t>(y)]) -
                                                 a(x, y)));
            if (dev > 1e-10 * std::max(1.0, a.norm()))
                throw ValidationError("family is not G-symmetric (deviation " + std::to_string(dev) + ")");
        }
    }

    const auto reps = action.orbit_representatives();
    const auto orbits = action.vertex_orbits();
    const auto trans = action.transversal();
    std::vector<int> rep_of(static_cast<std::size_t>(n), -1);
    for (std::size_t o = 0; o < orbits.size(); ++o)
        for (int v : orbits[o]) rep_of[static_cast<std::size_t>(v - 1)] = static_cast<int>(o);

    std::vector<RealVector> rep_vals(reps.size());
    std::vector<Matrix> rep_vecs(reps.size());
    for (std::size_t o = 0; o < reps.size(); ++o) {
        const auto& k = k_family[static_cast<std::size_t>(reps[o] - 1)];
        Eigen::SelfAdjointEigenSolver<Matrix> es((k + k.adjoint()) / 2.0);
        rep_vals[o] = es.eigenvalues();
        rep_vecs[o] = es.eigenvectors();
    }

    GSymmetricEigen out;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(static_cast<std::size_t>(n));
    for (int v = 1; v <= n; ++v) {
        const int o = rep_of[static_cast<std::size_t>(v - 1)];
        out.values[static_cast<std::size_t>(v - 1)] = rep_vals[static_cast<std::size_t>(o)];
        const auto relabel =
            beta_relabel(omega, trans[static_cast<std::size_t>(v - 1)], reps[static_cast<std::size_t>(o)], bond);
        const Matrix& src = rep_vecs[static_cast<std::size_t>(o)];
        Matrix dst(src.rows(), src.cols());
        for (std::int64_t x = 0; x < src.rows(); ++x) dst.row(relabel[static_cast<std::size_t>(x)]) = src.row(x);
        out.vectors[static_cast<std::size_t>(v - 1)] = std::move(dst);
    }

    // reconstruction sanity at every vertex
    for (int v = 1; v <= n; ++v) {
        const auto& k = k_family[static_cast<std::size_t>(v - 1)];
        const Matrix rec = out.vectors[static_cast<std::size_t>(v - 1)] *
                           out.values[static_cast<std::size_t>(v - 1)].asDiagonal() *
                           out.vectors[static_cast<std::size_t>(v - 1)].adjoint();
        const double dev = (rec - k).cwiseAbs().maxCoeff();
        if (dev > 1e-10 * std::max(1.0, k.norm()))
            throw ConstructionError("transported eigendecomposition fails to reconstruct", dev);
    }
    return out;
}

namespace {

struct NormalizerParts {
    std::vector<Matrix> t;  // beta_size x m_i
    std::vector<Matrix> w;  // m_i x beta_size
    std::vector<int> kept;  // m_i per vertex
};

/// Keep the strictly positive eigenvalues (relative threshold 1e-10) and
/// build T = sum lambda^{-1/2} |w><l|, W = sum lambda^{1/2} |l><w|.
NormalizerParts build_normalizers(const GSymmetricEigen& eig) {
    NormalizerParts parts;
    for (std::size_t v = 0; v < eig.values.size(); ++v) {
        const RealVector& vals = eig.values[v];
        const Matrix& vecs = eig.vectors[v];
        const double lmax = vals.size() ? vals.maxCoeff() : 0.0;
        if (lmax <= 0.0) throw ValidationError("local mass operator vanishes");
        std::vector<Eigen::Index> keep;
        for (Eigen::Index l = 0; l < vals.size(); ++l)
            if (vals(l) > 1e-10 * lmax) keep.push_back(l);
        Matrix t(vecs.rows(), static_cast<Eigen::Index>(keep.size()));
        Matrix w(static_cast<Eigen::Index>(keep.size()), vecs.rows());
        for (std::size_t m = 0; m < keep.size(); ++m) {
            const double lambda = vals(keep[m]);
            t.col(static_cast<Eigen::Index>(m)) = vecs.col(keep[m]) / std::sqrt(lambda);
            w.row(static_cast<Eigen::Index>(m)) = std::sqrt(lambda) * vecs.col(keep[m]).adjoint();
        }
        parts.t.push_back(std::move(t));
        parts.w.push_back(std::move(w));
        parts.kept.push_back(static_cast<int>(keep.size()));
    }
    return parts;
}

std::vector<int> orbit_ids(const GroupAction& action) {
    const auto orbits = action.vertex_orbits();
    std::vector<int> out(static_cast<std::size_t>(action.omega().n()), -1);
    for (std::size_t o = 0; o < orbits.size(); ++o)
        for (int v : orbits[o]) out[static_cast<std::size_t>(v - 1)] = static_cast<int>(o);
    return out;
}

UnconstrainedDecomposition resource_from_w(const GroupAction& action, int bond,
                                           const std::vector<Matrix>& w) {
    std::vector<int> phys;
    for (const auto& m : w) phys.push_back(static_cast<int>(m.rows()));
    return make_unconstrained(action, bond, std::move(phys), w);
}

}  // namespace

DenseTensor eval_quantum_model(const QuantumPovmModel& model) {
    const DenseTensor psi = contract_vector(model.resource);
    const int n = model.resource.n();
    std::vector<std::int64_t> shape;
    for (int v = 1; v <= n; ++v)
        shape.push_back(static_cast<std::int64_t>(model.povm_at(v).elements.size()));
    DenseTensor p(shape);
    for (std::int64_t lin = 0; lin < p.size(); ++lin) {
        const auto idx = p.unravel(lin);
        DenseTensor phi = psi;
        for (int v = 1; v <= n; ++v)
            phi = mode_apply(model.povm_at(v).elements[static_cast<std::size_t>(idx[static_cast<std::size_t>(v - 1)])],
                             phi, v);
        Cplx val = 0.0;
        for (std::int64_t i = 0; i < phi.size(); ++i) val += std::conj(psi[i]) * phi[i];
        p[lin] = Cplx(val.real(), 0.0);
    }
    double mass = 0.0;
    for (const auto& z : p.data()) mass += z.real();
    if (std::abs(mass - 1.0) > 1e-9)
        throw ConstructionError("quantum model distribution mass deviates from 1", mass - 1.0);
    return p;
}

QuantumPovmModel psd_to_quantum_model(const PsdDecomposition& dec, bool renormalize) {
    PsdDecomposition input = dec;
    if (renormalize) {
        double mass = 0.0;
        const DenseTensor full = contract_psd(dec);
        for (const auto& z : full.data()) mass += z.real();
        if (mass <= 0.0) throw ValidationError("contraction mass is not positive");
        const double site_scale = std::pow(1.0 / mass, 1.0 / dec.n());
        for (auto& fam : input.mats)
            for (auto& e : fam) e *= site_scale;
    }
    validate_distribution(contract_psd(input), 1e-10, false);
    const auto report = validate(input);
    if (!report.ok()) throw ValidationError("invalid psd decomposition: " + report.summary());

    const int n = input.n();
    std::vector<Matrix> s_family;
    for (int v = 1; v <= n; ++v) {
        Matrix s = Matrix::Zero(input.beta(v).size(), input.beta(v).size());
        for (const auto& e : input.mats[static_cast<std::size_t>(v - 1)]) s += e;
        s_family.push_back(std::move(s));
    }
    const auto eig = g_symmetric_eigendecomposition(input.action, input.bond, s_family);
    const auto parts = build_normalizers(eig);

    QuantumPovmModel model;
    model.orbit_of = orbit_ids(input.action);
    const auto reps = input.action.orbit_representatives();
    for (int rep : reps) {
        POVM povm;
        const Matrix& t = parts.t[static_cast<std::size_t>(rep - 1)];
        for (const auto& e : input.mats[static_cast<std::size_t>(rep - 1)])
            povm.elements.push_back(t.adjoint() * e * t);
        const double dev = povm_completeness_deviation(povm);
        if (dev > 1e-10) throw ConstructionError("constructed POVM is not complete", dev);
        model.orbit_povms.push_back(std::move(povm));
    }
    model.resource = resource_from_w(input.action, input.bond, parts.w);

    const DenseTensor psi = contract_vector(model.resource);
    const double norm = frobenius_norm(psi);
    if (std::abs(norm - 1.0) > 1e-9)
        throw ConstructionError("resource state is not normalized", norm - 1.0);

    const double dev = distance(eval_quantum_model(model), contract_psd(input));
    if (dev > 1e-9) throw ConstructionError("model fails to reproduce the distribution", dev);
    return model;
}

PsdDecomposition quantum_model_to_psd(const QuantumPovmModel& model) {
    const auto& resource = model.resource;
    const int n = resource.n();
    std::vector<std::vector<Matrix>> mats;
    std::vector<int> phys;
    for (int v = 1; v <= n; ++v) {
        const Matrix& x = resource.locals[static_cast<std::size_t>(v - 1)];
        const POVM& povm = model.povm_at(v);
        if (povm.dim() != x.rows()) throw ValidationError("POVM dimension mismatch with the resource");
        std::vector<Matrix> fam;
        for (const auto& a : povm.elements) fam.push_back(x.adjoint() * a * x);
        mats.push_back(std::move(fam));
        phys.push_back(static_cast<int>(povm.elements.size()));
    }
    auto out = make_psd(resource.action, resource.bond, std::move(phys), std::move(mats));
    const DenseTensor lhs = contract_psd(out);
    const DenseTensor rhs = eval_quantum_model(model);
    const double dev = distance(lhs, rhs);
    if (dev > 1e-10 * std::max(1.0, frobenius_norm(rhs)))
        throw ConstructionError("psd decomposition fails to reproduce the model", dev);
    return out;
}

DenseTensor eval_channel_model(const QuantumChannelModel& model) {
    const DenseTensor psi = contract_vector(model.resource);
    const int n = model.resource.n();
    std::vector<std::int64_t> kraus_counts;
    std::int64_t tuples = 1;
    for (int v = 1; v <= n; ++v) {
        kraus_counts.push_back(static_cast<std::int64_t>(model.channel_at(v).kraus.size()));
        tuples *= kraus_counts.back();
    }
    std::int64_t dtot = 1;
    std::vector<std::int64_t> out_dims;
    for (int v = 1; v <= n; ++v) {
        out_dims.push_back(model.channel_at(v).out_dim());
        dtot *= out_dims.back();
    }

    Matrix rho = Matrix::Zero(dtot, dtot);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
    for (std::int64_t lin = 0; lin < tuples; ++lin) {
        std::int64_t rem = lin;
        for (int v = n; v-- > 0;) {
            idx[static_cast<std::size_t>(v)] = rem % kraus_counts[static_cast<std::size_t>(v)];
            rem /= kraus_counts[static_cast<std::size_t>(v)];
        }
        DenseTensor phi = psi;
        for (int v = 1; v <= n; ++v)
            phi = mode_apply(
                model.channel_at(v).kraus[static_cast<std::size_t>(idx[static_cast<std::size_t>(v - 1)])], phi, v);
        Eigen::Map<const Vector> vec(phi.data().data(), phi.size());
        rho.noalias() += vec * vec.adjoint();
    }
    return matrix_to_operator(rho, out_dims, out_dims);
}

QuantumChannelModel purification_to_channel_model(const PurificationDecomposition& dec,
                                                  bool renormalize) {
    PurificationDecomposition input = dec;
    {
        const Cplx tr = operator_trace(contract_purification(input));
        if (renormalize) {
            if (tr.real() <= 0.0) throw ValidationError("purification trace is not positive");
            const double site_scale = std::pow(1.0 / tr.real(), 1.0 / (2.0 * input.n()));
            for (auto& fam : input.mats)
                for (auto& l : fam) l *= site_scale;
        } else if (std::abs(tr - Cplx(1.0, 0.0)) > 1e-9) {
            throw ValidationError("purification must contract to a trace-1 matrix");
        }
    }
    const auto report = validate(input);
    if (!report.ok()) throw ValidationError("invalid purification: " + report.summary());

    const int n = input.n();
    // Kraus slices (B_k)_{l, beta} = (L_beta)_{l, k} and mass operators S
    std::vector<std::vector<Matrix>> slices(static_cast<std::size_t>(n));
    std::vector<Matrix> s_family;
    for (int v = 1; v <= n; ++v) {
        const auto& fam = input.mats[static_cast<std::size_t>(v - 1)];
        const std::int64_t m = input.beta(v).size();
        Matrix s = Matrix::Zero(m, m);
        for (int k = 0; k < input.ancilla; ++k) {
            Matrix b(input.phys_at(v), m);
            for (std::int64_t beta = 0; beta < m; ++beta) b.col(beta) = fam[static_cast<std::size_t>(beta)].col(k);
            s.noalias() += b.adjoint() * b;
            slices[static_cast<std::size_t>(v - 1)].push_back(std::move(b));
        }
        s_family.push_back(std::move(s));
    }
    const auto eig = g_symmetric_eigendecomposition(input.action, input.bond, s_family);
    const auto parts = build_normalizers(eig);

    QuantumChannelModel model;
    model.orbit_of = orbit_ids(input.action);
    for (int rep : input.action.orbit_representatives()) {
        KrausChannel ch;
        for (const auto& b : slices[static_cast<std::size_t>(rep - 1)])
            ch.kraus.push_back(b * parts.t[static_cast<std::size_t>(rep - 1)]);
        const auto cptp = check_cptp(ch, 1e-10);
        if (!cptp.ok)
            throw ConstructionError("constructed map is not CPTP (trace dev " +
                                        std::to_string(cptp.trace_preservation_deviation) + ", choi min " +
                                        std::to_string(cptp.choi_lambda_min) + ")",
                                    cptp.trace_preservation_deviation);
        model.orbit_channels.push_back(std::move(ch));
    }
    model.resource = resource_from_w(input.action, input.bond, parts.w);

    const double norm = frobenius_norm(contract_vector(model.resource));
    if (std::abs(norm - 1.0) > 1e-9)
        throw ConstructionError("resource state is not normalized", norm - 1.0);

    const double dev = distance(eval_channel_model(model), contract_purification(input));
    if (dev > 1e-8) throw ConstructionError("channel model fails to reproduce rho", dev);
    return model;
}

PurificationDecomposition channel_model_to_purification(const QuantumChannelModel& model) {
    const auto& resource = model.resource;
    const int n = resource.n();
    int ancilla = 0;
    for (int v = 1; v <= n; ++v)
        ancilla = std::max(ancilla, static_cast<int>(model.channel_at(v).kraus.size()));

    std::vector<std::vector<Matrix>> mats;
    std::vector<int> phys;
    for (int v = 1; v <= n; ++v) {
        const Matrix& x = resource.locals[static_cast<std::size_t>(v - 1)];
        const KrausChannel& ch = model.channel_at(v);
        if (ch.in_dim() != x.rows()) throw ValidationError("channel dimension mismatch with the resource");
        std::vector<Matrix> fam;
        for (std::int64_t beta = 0; beta < x.cols(); ++beta) {
            Matrix l = Matrix::Zero(ch.out_dim(), ancilla);
            for (std::size_t k = 0; k < ch.kraus.size(); ++k)
                l.col(static_cast<Eigen::Index>(k)) = ch.kraus[k] * x.col(beta);
            fam.push_back(std::move(l));
        }
        mats.push_back(std::move(fam));
        phys.push_back(ch.out_dim());
    }
    auto out = make_purification(resource.action, resource.bond, std::move(phys), ancilla, std::move(mats));
    const double dev = distance(contract_purification(out), eval_channel_model(model));
    if (dev > 1e-9 * std::max(1.0, frobenius_norm(eval_channel_model(model))))
        throw ConstructionError("purification fails to reproduce rho", dev);
    return out;
}

}  // namespace brlab
