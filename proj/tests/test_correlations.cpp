#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brlab/correlations.hpp"
#include "brlab/families.hpp"
#include "test_helpers.hpp"

using namespace brlab;
using namespace brlab::testing;

namespace {

NonnegativeDecomposition product_distribution_dec(int n, int d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Matrix> locals;
    for (int i = 0; i < n; ++i) {
        Matrix local(d, 1);
        double mass = 0.0;
        for (int j = 0; j < d; ++j) {
            local(j, 0) = rng.uniform() + 0.05;
            mass += local(j, 0).real();
        }
        local /= mass;
        locals.push_back(std::move(local));
    }
    NonnegativeDecomposition dec;
    static_cast<UnconstrainedDecomposition&>(dec) = make_unconstrained(
        trivial_action(make_simplex(n)), 1, std::vector<int>(static_cast<std::size_t>(n), d), locals);
    return dec;
}

NonnegativeDecomposition symmetric_distribution_dec(int n, int d, int r, std::uint64_t seed) {
    Rng rng(seed);
    Matrix rep(d, r);
    for (int j = 0; j < d; ++j)
        for (int a = 0; a < r; ++a) rep(j, a) = rng.uniform() + 0.05;
    NonnegativeDecomposition dec;
    static_cast<UnconstrainedDecomposition&>(dec) = unconstrained_from_orbit(
        symmetric_action(make_simplex(n)), r, std::vector<int>(static_cast<std::size_t>(n), d), {rep});
    double mass = 0.0;
    const DenseTensor full = contract_vector(dec);
    for (const auto& z : full.data()) mass += z.real();
    const double scale = std::pow(1.0 / mass, 1.0 / n);
    for (auto& local : dec.locals) local *= scale;
    return dec;
}

}  // namespace

TEST_CASE("nn_to_hvm") {
    SUBCASE("product distribution gives a deterministic hidden variable") {
        const auto model = nn_to_hvm(product_distribution_dec(3, 2, 5));
        CHECK(model.r == 1);
        CHECK(model.prior(0) == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("symmetric decomposition: prior is a distribution and the model reproduces") {
        const auto dec = symmetric_distribution_dec(3, 2, 2, 7);
        const auto model = nn_to_hvm(dec);
        CHECK(model.prior.sum() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(model.symmetric());
        CHECK(distance(eval_hvm(model), contract_vector(dec)) < 1e-12);
    }

    SUBCASE("round trip preserves the distribution to 1e-12") {
        const auto dec = symmetric_distribution_dec(4, 3, 2, 11);
        const auto model = nn_to_hvm(dec);
        const auto back = hvm_to_nn(model);
        CHECK(distance(contract_vector(back), contract_vector(dec)) < 1e-12);
    }

    SUBCASE("zero-mass hidden values are dropped") {
        auto dec = product_distribution_dec(3, 2, 9);
        // widen to bond 2 with an all-zero second column
        for (auto& local : dec.locals) {
            Matrix wide = Matrix::Zero(2, 2);
            wide.col(0) = local.col(0);
            local = wide;
        }
        dec.bond = 2;
        const auto model = nn_to_hvm(dec);
        CHECK(model.r == 1);
    }

    SUBCASE("non-simplex and unnormalized inputs rejected") {
        NonnegativeDecomposition cyc;
        static_cast<UnconstrainedDecomposition&>(cyc) = make_unconstrained(
            trivial_action(make_cycle(3)), 1, {2, 2, 2},
            {Matrix::Ones(2, 1), Matrix::Ones(2, 1), Matrix::Ones(2, 1)});
        CHECK_THROWS_AS(nn_to_hvm(cyc), ValidationError);

        auto big = product_distribution_dec(3, 2, 1);
        big.locals[0] *= 2.0;
        CHECK_THROWS_AS(nn_to_hvm(big), ValidationError);
    }
}

TEST_CASE("hvm_to_nn") {
    SUBCASE("deterministic hidden variable gives a product distribution") {
        Rng rng(3);
        auto model = random_hvm(rng, 3, 2, 1, false);
        const DenseTensor p = contract_vector(hvm_to_nn(model));
        for (std::int64_t lin = 0; lin < p.size(); ++lin) {
            const auto idx = p.unravel(lin);
            double expect = 1.0;
            for (int i = 0; i < 3; ++i)
                expect *= model.conditionals[static_cast<std::size_t>(i)](idx[static_cast<std::size_t>(i)], 0);
            CHECK(p[lin].real() == doctest::Approx(expect).epsilon(1e-12));
        }
    }

    SUBCASE("two-coin mixture matches the direct sum") {
        Rng rng(5);
        auto model = random_hvm(rng, 3, 2, 2, false);
        CHECK(distance(contract_vector(hvm_to_nn(model)), eval_hvm(model)) < 1e-12);
    }

    SUBCASE("symmetric model gives identical site families") {
        Rng rng(8);
        auto model = random_hvm(rng, 4, 2, 3, true);
        const auto dec = hvm_to_nn(model);
        for (std::size_t i = 1; i < dec.locals.size(); ++i) CHECK(dec.locals[i] == dec.locals[0]);
        CHECK(validate(dec).ok());
        CHECK(dec.action.generators().size() == 3);  // S_4 generators
    }

    SUBCASE("round trips on random models, symmetric and general") {
        Rng rng(13);
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 2 + static_cast<int>(rng.below(3));
            const int d = 2 + static_cast<int>(rng.below(2));
            const int r = 1 + static_cast<int>(rng.below(3));
            auto model = random_hvm(rng, n, d, r, trial % 2 == 0);
            const auto dec = hvm_to_nn(model);
            CHECK(dec.bond == r);
            const auto back = nn_to_hvm(dec);
            CHECK(distance(eval_hvm(back), eval_hvm(model)) < 1e-12);
        }
    }
}

TEST_CASE("g_symmetric_eigendecomposition") {
    SUBCASE("trivial action reduces to per-vertex eigendecompositions") {
        Rng rng(2);
        const GroupAction act = trivial_action(make_line(3));
        std::vector<Matrix> family;
        for (int v = 1; v <= 3; ++v)
            family.push_back(random_psd(rng, static_cast<int>(BetaIndexer(act.omega(), v, 2).size())));
        const auto eig = g_symmetric_eigendecomposition(act, 2, family);
        for (int v = 0; v < 3; ++v) {
            const Matrix rec = eig.vectors[static_cast<std::size_t>(v)] *
                               eig.values[static_cast<std::size_t>(v)].asDiagonal() *
                               eig.vectors[static_cast<std::size_t>(v)].adjoint();
            CHECK((rec - family[static_cast<std::size_t>(v)]).cwiseAbs().maxCoeff() < 1e-10);
        }
    }

    SUBCASE("cyclic invariance transports spectra and keeps frames orthonormal") {
        Rng rng(4);
        const Wsc omega = make_cycle(4);
        const GroupAction cn = cyclic_action(omega);
        // G-symmetric Hermitian family built by transporting one matrix
        const Matrix k1 = random_psd(rng, 4);
        std::vector<std::vector<Matrix>> rep{{k1}};
        const auto carrier = psd_from_orbit(cn, 2, {1, 1, 1, 1}, rep);
        std::vector<Matrix> family;
        for (int v = 0; v < 4; ++v) family.push_back(carrier.mats[static_cast<std::size_t>(v)][0]);

        const auto eig = g_symmetric_eigendecomposition(cn, 2, family);
        for (int v = 1; v < 4; ++v) {
            CHECK((eig.values[static_cast<std::size_t>(v)] - eig.values[0]).cwiseAbs().maxCoeff() == 0.0);
            const Matrix gram = eig.vectors[static_cast<std::size_t>(v)].adjoint() *
                                eig.vectors[static_cast<std::size_t>(v)];
            CHECK((gram - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
        }
    }

    SUBCASE("non-external actions rejected") {
        const Wsc omega = make_line(3);
        Permutation refl;
        refl.image = {2, 1, 0};
        const GroupAction bad(omega, {refl}, {{1, 0}});
        std::vector<Matrix> family{Matrix::Identity(2, 2), Matrix::Identity(4, 4), Matrix::Identity(2, 2)};
        CHECK_THROWS_AS(g_symmetric_eigendecomposition(bad, 2, family), ValidationError);
    }

    SUBCASE("asymmetric families rejected") {
        Rng rng(6);
        const GroupAction cn = cyclic_action(make_cycle(3));
        std::vector<Matrix> family;
        for (int v = 0; v < 3; ++v) family.push_back(random_psd(rng, 4));
        CHECK_THROWS_AS(g_symmetric_eigendecomposition(cn, 2, family), ValidationError);
    }
}

TEST_CASE("choi and cptp") {
    SUBCASE("identity channel") {
        KrausChannel id;
        id.kraus.push_back(Matrix::Identity(2, 2));
        const Matrix choi = choi_matrix(id);
        CHECK(matrix_rank(choi) == 1);
        CHECK(is_psd(choi));
        CHECK(check_cptp(id).ok);
    }

    SUBCASE("completely depolarizing channel has Choi I (x) I / d") {
        const int d = 2;
        KrausChannel dep;
        for (int a = 0; a < d; ++a)
            for (int i = 0; i < d; ++i) {
                Matrix k = Matrix::Zero(d, d);
                k(a, i) = 1.0 / std::sqrt(static_cast<double>(d));
                dep.kraus.push_back(k);
            }
        const Matrix choi = choi_matrix(dep);
        CHECK((choi - Matrix::Identity(4, 4) / 2.0).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(check_cptp(dep).ok);
    }

    SUBCASE("transpose map has a negative Choi eigenvalue") {
        const Matrix choi = choi_of_map([](const Matrix& x) { return Matrix(x.transpose()); }, 2);
        CHECK(hermitian_eigenvalues(choi).minCoeff() == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("povm_to_channel") {
    SUBCASE("computational basis POVM dephases to classical") {
        POVM basis;
        for (int j = 0; j < 2; ++j) {
            Matrix e = Matrix::Zero(2, 2);
            e(j, j) = 1.0;
            basis.elements.push_back(e);
        }
        const auto ch = povm_to_channel(basis);
        CHECK(check_cptp(ch).ok);
        Rng rng(3);
        for (int trial = 0; trial < 100; ++trial) {
            const Matrix rho = random_psd(rng, 2);
            Matrix out = Matrix::Zero(2, 2);
            for (const auto& k : ch.kraus) out += k * rho * k.adjoint();
            CHECK(std::abs(out(0, 1)) < 1e-12);
            CHECK(std::abs(out(1, 0)) < 1e-12);
            CHECK(std::abs(out.trace() - rho.trace()) < 1e-12 * std::abs(rho.trace()));
        }
    }

    SUBCASE("random POVMs give diagonal-output trace-preserving channels") {
        Rng rng(9);
        for (int trial = 0; trial < 20; ++trial) {
            const int m = 2 + static_cast<int>(rng.below(2));
            const auto povm = random_povm(rng, m, 3);
            REQUIRE(is_valid_povm(povm));
            const auto ch = povm_to_channel(povm);
            CHECK(check_cptp(ch).ok);
            const Matrix rho = random_psd(rng, m);
            Matrix out = Matrix::Zero(3, 3);
            for (const auto& k : ch.kraus) out += k * rho * k.adjoint();
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    if (a != b) CHECK(std::abs(out(a, b)) < 1e-12 * std::max(1.0, rho.norm()));
            CHECK(std::abs(out.trace() - rho.trace()) < 1e-10 * std::abs(rho.trace()));
        }
    }
}

TEST_CASE("psd_to_quantum_model") {
    SUBCASE("scalar decomposition of a product distribution") {
        Rng rng(21);
        // r = 1 psd dec with scalar weights, normalized
        std::vector<std::vector<Matrix>> mats;
        for (int v = 0; v < 3; ++v) {
            Matrix e0(1, 1), e1(1, 1);
            const double x = 0.1 + 0.8 * rng.uniform();
            e0 << x;
            e1 << 1.0 - x;
            mats.push_back({e0, e1});
        }
        const auto dec = make_psd(trivial_action(make_simplex(3)), 1, {2, 2, 2}, mats);
        const auto model = psd_to_quantum_model(dec);
        for (const auto& povm : model.orbit_povms) CHECK(povm.dim() == 1);
        CHECK(distance(eval_quantum_model(model), contract_psd(dec)) < 1e-12);
    }

    SUBCASE("random symmetric psd decomposition round trips within 1e-9") {
        Rng rng(31);
        const auto dec = random_normalized_psd_dec(rng, symmetric_action(make_simplex(3)), 2, 2);
        const auto model = psd_to_quantum_model(dec);
        CHECK(model.orbit_povms.size() == 1);
        const auto back = quantum_model_to_psd(model);
        CHECK(back.bond == dec.bond);
        CHECK(distance(contract_psd(back), contract_psd(dec)) < 1e-9);
    }

    SUBCASE("translation-invariant cycle gives identical POVMs") {
        Rng rng(41);
        const auto dec = random_normalized_psd_dec(rng, cyclic_action(make_cycle(3)), 2, 2);
        const auto model = psd_to_quantum_model(dec);
        CHECK(model.orbit_povms.size() == 1);  // one vertex orbit, one shared POVM
        for (int v = 1; v <= 3; ++v) CHECK(&model.povm_at(v) == &model.orbit_povms[0]);
        CHECK(distance(eval_quantum_model(model), contract_psd(dec)) < 1e-9);
    }

    SUBCASE("unnormalized input rejected unless renormalize is set") {
        const auto dec = w_eps_psd(3, 1e-2);  // mass 3-ish, not a distribution
        CHECK_THROWS_AS(psd_to_quantum_model(dec), ValidationError);
        const auto model = psd_to_quantum_model(dec, true);
        const DenseTensor p = eval_quantum_model(model);
        double mass = 0.0;
        for (const auto& z : p.data()) mass += z.real();
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("quantum_model_to_psd") {
    SUBCASE("trivial state with projective measurements") {
        // |0...0> as a bond-1 resource
        std::vector<Matrix> locals;
        for (int v = 0; v < 3; ++v) {
            Matrix l = Matrix::Zero(2, 1);
            l(0, 0) = 1.0;
            locals.push_back(l);
        }
        QuantumPovmModel model;
        model.resource = make_unconstrained(trivial_action(make_simplex(3)), 1, {2, 2, 2}, locals);
        POVM basis;
        for (int j = 0; j < 2; ++j) {
            Matrix e = Matrix::Zero(2, 2);
            e(j, j) = 1.0;
            basis.elements.push_back(e);
        }
        model.orbit_povms = {basis, basis, basis};
        model.orbit_of = {0, 1, 2};
        const DenseTensor p = eval_quantum_model(model);
        CHECK(p.at({0, 0, 0}) == Cplx(1.0));
        const auto dec = quantum_model_to_psd(model);
        CHECK(dec.bond == 1);
        CHECK(distance(contract_psd(dec), p) < 1e-12);
    }

    SUBCASE("bond equals the resource bond, without inflation") {
        Rng rng(51);
        const auto psd = random_normalized_psd_dec(rng, trivial_action(make_line(3)), 3, 2);
        const auto model = psd_to_quantum_model(psd);
        CHECK(quantum_model_to_psd(model).bond == 3);
    }
}

TEST_CASE("eval_quantum_model") {
    POVM basis;
    for (int j = 0; j < 2; ++j) {
        Matrix e = Matrix::Zero(2, 2);
        e(j, j) = 1.0;
        basis.elements.push_back(e);
    }
    POVM mixed;
    mixed.elements = {Matrix::Identity(2, 2) / 2.0, Matrix::Identity(2, 2) / 2.0};

    std::vector<Matrix> zero_locals;
    for (int v = 0; v < 3; ++v) {
        Matrix l = Matrix::Zero(2, 1);
        l(0, 0) = 1.0;
        zero_locals.push_back(l);
    }

    SUBCASE("computational measurement of |000> is a point mass") {
        QuantumPovmModel model;
        model.resource = make_unconstrained(trivial_action(make_simplex(3)), 1, {2, 2, 2}, zero_locals);
        model.orbit_povms = {basis, basis, basis};
        model.orbit_of = {0, 1, 2};
        const DenseTensor p = eval_quantum_model(model);
        CHECK(p.at({0, 0, 0}) == Cplx(1.0));
        CHECK(frobenius_norm(p) == doctest::Approx(1.0));
    }

    SUBCASE("maximally mixed POVM gives the uniform distribution") {
        QuantumPovmModel model;
        model.resource = make_unconstrained(trivial_action(make_simplex(3)), 1, {2, 2, 2}, zero_locals);
        model.orbit_povms = {mixed, mixed, mixed};
        model.orbit_of = {0, 1, 2};
        const DenseTensor p = eval_quantum_model(model);
        for (std::int64_t i = 0; i < p.size(); ++i) CHECK(p[i].real() == doctest::Approx(0.125).epsilon(1e-12));
    }

    SUBCASE("GHZ with Z-basis measurements") {
        const double c = std::pow(0.5, 1.0 / 6.0);  // normalizes the 3-party GHZ
        std::vector<Matrix> ghz_locals(3, Matrix(c * Matrix::Identity(2, 2)));
        QuantumPovmModel model;
        model.resource = make_unconstrained(trivial_action(make_simplex(3)), 2, {2, 2, 2}, ghz_locals);
        model.orbit_povms = {basis, basis, basis};
        model.orbit_of = {0, 1, 2};
        const DenseTensor p = eval_quantum_model(model);
        CHECK(p.at({0, 0, 0}).real() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p.at({1, 1, 1}).real() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(p.at({0, 1, 0}).real() == doctest::Approx(0.0));
    }
}

TEST_CASE("purification to channel model") {
    SUBCASE("single-site purification of a pure state is an isometry conjugation") {
        Rng rng(61);
        Vector phi = random_complex(rng, 2, 1).col(0);
        phi /= phi.norm();
        Matrix l(2, 1);
        l.col(0) = phi;
        const auto dec = make_purification(trivial_action(Wsc(1, {{1, 1}})), 1, {2}, 1, {{l}});
        const auto model = purification_to_channel_model(dec);
        REQUIRE(model.orbit_channels.size() == 1);
        CHECK(check_cptp(model.orbit_channels[0]).ok);
        CHECK(distance(eval_channel_model(model), contract_purification(dec)) < 1e-10);
    }

    SUBCASE("W_3 diagonal state through the psd family") {
        const auto psd = w_eps_psd(3, 1e-3);
        const auto puri = purification_from_psd(psd);
        const auto model = purification_to_channel_model(puri, true);
        DenseTensor target = diag_embed(w_state(3));
        target *= Cplx(1.0 / 3.0, 0.0);
        CHECK(distance(eval_channel_model(model), target) < 4e-3);
    }

    SUBCASE("t.i. purification gives identical channels and round trips") {
        Rng rng(71);
        const auto dec = random_normalized_purification(rng, cyclic_action(make_cycle(3)), 2, 2, 2);
        const auto model = purification_to_channel_model(dec);
        CHECK(model.orbit_channels.size() == 1);
        const auto back = channel_model_to_purification(model);
        CHECK(back.bond == dec.bond);
        CHECK(distance(contract_purification(back), contract_purification(dec)) < 1e-8);
    }
}

TEST_CASE("channel_model_to_purification") {
    SUBCASE("identity channels on a product state") {
        Rng rng(81);
        auto resource = random_resource(rng, trivial_action(make_simplex(3)), 1, 2);
        QuantumChannelModel model;
        model.resource = resource;
        KrausChannel id;
        id.kraus.push_back(Matrix::Identity(2, 2));
        model.orbit_channels = {id, id, id};
        model.orbit_of = {0, 1, 2};
        const auto dec = channel_model_to_purification(model);
        CHECK(dec.bond == 1);
        const DenseTensor rho = contract_purification(dec);
        // rho = |psi><psi|
        const DenseTensor psi = contract_vector(resource);
        const Matrix flat = operator_to_matrix(rho);
        Eigen::Map<const Vector> vec(psi.data().data(), psi.size());
        CHECK((flat - Matrix(vec * vec.adjoint())).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("round trips on random channel models") {
        Rng rng(91);
        for (int trial = 0; trial < 5; ++trial) {
            const auto resource = random_resource(rng, trivial_action(make_line(3)), 2, 2);
            QuantumChannelModel model;
            model.resource = resource;
            model.orbit_of = {0, 1, 2};
            for (int v = 0; v < 3; ++v) model.orbit_channels.push_back(random_channel(rng, 2, 2, 2));
            const auto dec = channel_model_to_purification(model);
            CHECK(dec.bond == 2);
            const auto back = purification_to_channel_model(dec);
            CHECK(distance(eval_channel_model(back), eval_channel_model(model)) < 1e-8);
        }
    }
}

TEST_CASE("validate_distribution") {
    DenseTensor t({2});
    t[0] = 0.5;
    t[1] = 0.6;
    CHECK_THROWS_AS(validate_distribution(t), ValidationError);
    const DenseTensor fixed = validate_distribution(t, 1e-10, true);
    CHECK(fixed[0].real() == doctest::Approx(0.5 / 1.1));
    t[1] = -0.1;
    CHECK_THROWS_AS(validate_distribution(t, 1e-10, true), ValidationError);
}
