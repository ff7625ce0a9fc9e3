#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "brlab/families.hpp"
#include "test_helpers.hpp"

using namespace brlab;
using namespace brlab::testing;

namespace {

int hamming_weight(std::int64_t lin, int n) {
    int w = 0;
    for (int i = 0; i < n; ++i) {
        w += lin & 1;
        lin >>= 1;
    }
    return w;
}

double binom(int n, int k) {
    double out = 1.0;
    for (int i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
    return out;
}

}  // namespace

TEST_CASE("w_state") {
    const DenseTensor w3 = w_state(3);
    CHECK(w3.at({0, 0, 1}) == Cplx(1.0));
    CHECK(w3.at({0, 1, 0}) == Cplx(1.0));
    CHECK(w3.at({1, 0, 0}) == Cplx(1.0));
    CHECK(frobenius_norm(w3) == doctest::Approx(std::sqrt(3.0)));

    const Matrix w2 = unfold(w_state(2), {1});
    CHECK(w2(0, 1) == Cplx(1.0));
    CHECK(w2(1, 0) == Cplx(1.0));
    CHECK(w2(0, 0) == Cplx(0.0));

    for (int site = 1; site <= 5; ++site) CHECK(matrix_rank(unfold(w_state(5), {site})) == 2);
    CHECK_THROWS_AS(w_state(1), ValidationError);
}

TEST_CASE("w_eps_unconstrained") {
    SUBCASE("closed-form error") {
        const auto dec = w_eps_unconstrained(3, 0.01);
        CHECK(validate(dec).ok());
        const double err = distance(contract_vector(dec), w_state(3));
        const double expect = std::sqrt(3.0 * 1e-4 + 1e-8);
        CHECK(err == doctest::Approx(expect).epsilon(1e-9));
        CHECK(expect == doctest::Approx(0.01732).epsilon(1e-3));
        CHECK(w_eps_unconstrained_error(3, 0.01) == doctest::Approx(expect).epsilon(1e-12));
    }

    SUBCASE("two product terms: every unfolding has rank at most 2") {
        const auto dec = w_eps_unconstrained(4, 0.05);
        CHECK(dec.bond == 2);
        const DenseTensor t = contract_vector(dec);
        for (const auto& left : std::vector<std::vector<std::int64_t>>{{1}, {2}, {1, 2}, {1, 3}})
            CHECK(matrix_rank(unfold(t, left)) <= 2);
        // site-permutation invariance of the symmetric contraction
        CHECK(distance(t, transpose(t, {1, 0, 2, 3})) < 1e-12 * frobenius_norm(t));
        CHECK(distance(t, transpose(t, {3, 1, 2, 0})) < 1e-12 * frobenius_norm(t));
    }

    SUBCASE("slope fit over the default grid") {
        const auto study = convergence_study(
            "w-unconstrained", [&](double e) { return contract_vector(w_eps_unconstrained(3, e)); },
            default_eps_grid(), w_state(3));
        CHECK(study.monotone);
        CHECK(study.slope == doctest::Approx(1.0).epsilon(0.02));
        CHECK(study.coefficient == doctest::Approx(std::sqrt(3.0)).epsilon(0.01));
    }

    CHECK_THROWS_AS(w_eps_unconstrained(3, 0.0), ValidationError);
}

TEST_CASE("w_eps_psd") {
    SUBCASE("normalization constant") {
        CHECK(w_eps_psd_constant(5) == doctest::Approx(1.27202).epsilon(1e-5));
        CHECK(w_eps_psd_constant(3) == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("weight-0 entry cancels, weight-1 entries are 1") {
        for (int n : {3, 5, 7}) {
            const auto dec = w_eps_psd(n, 0.1);
            CHECK(validate(dec).ok());
            const DenseTensor t = contract_psd(dec);
            CHECK(std::abs(t[0]) < 1e-12);
            for (std::int64_t lin = 0; lin < t.size(); ++lin)
                if (hamming_weight(lin, n) == 1) CHECK(std::abs(t[lin] - 1.0) < 1e-12);
        }
    }

    SUBCASE("error slope is 1 + 1/(n-1)") {
        for (int n : {3, 5}) {
            const auto study = convergence_study(
                "w-psd", [&](double e) { return contract_psd(w_eps_psd(n, e)); }, default_eps_grid(),
                w_state(n));
            CHECK(study.monotone);
            CHECK(std::abs(study.slope - (1.0 + 1.0 / (n - 1))) < 0.05);
        }
    }
}

TEST_CASE("w_eps_ti_unconstrained") {
    SUBCASE("contraction is cyclic-shift invariant for every eps") {
        for (double eps : {0.3, 1e-2}) {
            const auto dec = w_eps_ti_unconstrained(4, eps);
            CHECK(validate(dec).ok());
            const DenseTensor t = contract_vector(dec);
            CHECK(distance(t, transpose(t, {3, 0, 1, 2})) < 1e-12 * frobenius_norm(t));
        }
    }

    SUBCASE("errors decrease along the grid and the slope is recorded") {
        const auto study = convergence_study(
            "w-ti-unconstrained", [&](double e) { return contract_vector(w_eps_ti_unconstrained(5, e)); },
            default_eps_grid(), w_state(5));
        CHECK(study.monotone);
        CHECK(study.error.back() < study.error.front());
        CHECK(study.slope > 0.0);
        // the construction reaches W_n at first order
        CHECK(study.slope == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("w_eps_ti_psd") {
    SUBCASE("lifted matrices are psd with the delta-delta pattern") {
        const auto dec = w_eps_ti_psd(5, 0.1);
        CHECK(validate(dec).ok());
        for (int j = 0; j < 2; ++j) {
            const Matrix& b = dec.mats[0][static_cast<std::size_t>(j)];
            CHECK(b.rows() == 4);
            // entries outside the diagonal-pair block vanish
            const Wsc omega = dec.omega();
            for (int x = 0; x < 2; ++x)
                for (int y = 0; y < 2; ++y)
                    for (int x2 = 0; x2 < 2; ++x2)
                        for (int y2 = 0; y2 < 2; ++y2) {
                            const auto row = cycle_beta_index(omega, 1, 2, x, y);
                            const auto col = cycle_beta_index(omega, 1, 2, x2, y2);
                            if (x != y || x2 != y2) CHECK(b(row, col) == Cplx(0.0));
                        }
        }
    }

    SUBCASE("matches the simplex family entrywise at small weight") {
        const DenseTensor ti = contract_psd(w_eps_ti_psd(5, 1e-2));
        const DenseTensor symm = contract_psd(w_eps_psd(5, 1e-2));
        for (std::int64_t lin = 0; lin < ti.size(); ++lin)
            if (hamming_weight(lin, 5) <= 1) CHECK(std::abs(ti[lin] - symm[lin]) < 1e-9);
    }

    SUBCASE("slope 1 + 1/(n-1)") {
        const auto study = convergence_study(
            "w-ti-psd", [&](double e) { return contract_psd(w_eps_ti_psd(5, e)); }, default_eps_grid(),
            w_state(5));
        CHECK(std::abs(study.slope - 1.25) < 0.05);
    }
}

TEST_CASE("w_eps_ti_nonneg") {
    SUBCASE("entry pattern at n=5, p=2, eps=0.1") {
        const auto dec = w_eps_ti_nonneg(5, 0.1, 2);
        CHECK(validate(dec).ok());
        const DenseTensor t = contract_vector(dec);
        for (std::int64_t lin = 0; lin < t.size(); ++lin) {
            const int k = hamming_weight(lin, 5);
            if (k % 2 == 0) {
                CHECK(t[lin] == Cplx(0.0));  // even weight vanishes exactly
            } else if (k == 1) {
                CHECK(std::abs(t[lin] - 0.5) < 1e-14);
            } else if (k == 3) {
                CHECK(std::abs(t[lin] - 0.5 * std::pow(0.1, 2.5)) < 1e-16);
                CHECK(std::abs(t[lin]) == doctest::Approx(1.581e-3).epsilon(1e-3));
            }
        }
    }

    SUBCASE("closed-form error and fitted slope p n/(n-1)") {
        // entries at weight k (k = 1 mod p) equal (1/p) eps^{(k-1) n/(n-1)};
        // subtracting (1/p) W_n leaves the k > 1 terms
        for (auto [n, p] : std::vector<std::pair<int, int>>{{5, 2}, {5, 4}, {7, 3}}) {
            auto closed_form = [&, n = n, p = p](double e) {
                double sum = 0.0;
                for (int k = 1 + p; k <= n; k += p)
                    sum += binom(n, k) * std::pow(e, 2.0 * (k - 1) * n / (n - 1.0)) / (p * p);
                return std::sqrt(sum);
            };
            DenseTensor target = w_state(n);
            target *= Cplx(1.0 / p, 0.0);
            for (double e : {0.1, 0.01}) {
                const double measured = distance(contract_vector(w_eps_ti_nonneg(n, e, p)), target);
                CHECK(measured == doctest::Approx(closed_form(e)).epsilon(1e-10));
            }
            const auto study = convergence_study(
                "w-ti-nonneg", [&, n = n, p = p](double e) { return contract_vector(w_eps_ti_nonneg(n, e, p)); },
                default_eps_grid(), target);
            CHECK(std::abs(study.slope - p * n / (n - 1.0)) < 0.05);
        }
    }

    CHECK_THROWS_AS(w_eps_ti_nonneg(5, 0.1, 3), ValidationError);  // 3 does not divide 4
    CHECK_THROWS_AS(w_eps_ti_nonneg(5, -0.1, 2), ValidationError);
}

TEST_CASE("two_domain") {
    SUBCASE("entries are nonnegative") {
        const auto dec = two_domain_eps(4, 2, 0.5);
        CHECK(validate(dec).ok());
        const DenseTensor t = contract_vector(dec);
        for (std::int64_t i = 0; i < t.size(); ++i) {
            CHECK(t[i].real() >= 0.0);
            CHECK(t[i].imag() == 0.0);
        }
    }

    SUBCASE("grid contractions are Cauchy toward the limit") {
        const DenseTensor tau = two_domain_limit(4, 2);
        double prev = 1e300;
        for (double e : {1e-1, 1e-2, 1e-3, 1e-4}) {
            const double d = distance(contract_vector(two_domain_eps(4, 2, e)), tau);
            CHECK(d < prev);
            prev = d;
        }
    }

    SUBCASE("limit entries follow the domain-wall rule") {
        const DenseTensor tau = two_domain_limit(4, 3);
        // all-equal assignments contribute |a,a>^(x)n
        for (int a = 0; a < 3; ++a) {
            std::vector<std::int64_t> idx(4, static_cast<std::int64_t>(a * 3 + a));
            CHECK(tau.at(idx) == Cplx(1.0));
        }
        // nonzero count: k + (n-1) k (k-1)
        std::int64_t nonzero = 0;
        for (std::int64_t i = 0; i < tau.size(); ++i)
            if (tau[i] != Cplx(0.0)) ++nonzero;
        CHECK(nonzero == 3 + 3 * 3 * 2);
    }

    SUBCASE("exact limit matches floating extrapolation within 1e-6") {
        for (auto [n, k] : std::vector<std::pair<int, int>>{{4, 2}, {5, 3}}) {
            const DenseTensor tau = two_domain_limit(n, k);
            // Richardson step on the eps-linear entry corrections
            const double e = 1e-5;
            DenseTensor extrap = contract_vector(two_domain_eps(n, k, e));
            extrap *= 2.0;
            extrap -= contract_vector(two_domain_eps(n, k, 2.0 * e));
            CHECK(distance(extrap, tau) < 1e-6);
        }
    }

    SUBCASE("slope: 1.00 for k >= 3, 2.00 for k = 2 by bond parity") {
        // independent oracle: enumerate assignments and count eps powers
        auto predicted_error = [](int n, int k, double e) {
            std::int64_t count = 1;
            for (int i = 0; i < n; ++i) count *= k;
            double sum = 0.0;
            std::vector<int> alpha(static_cast<std::size_t>(n));
            for (std::int64_t lin = 0; lin < count; ++lin) {
                std::int64_t rem = lin;
                for (int i = n; i-- > 0;) {
                    alpha[static_cast<std::size_t>(i)] = static_cast<int>(rem % k);
                    rem /= k;
                }
                int m = 0;
                for (int i = 0; i + 1 < n; ++i)
                    if (alpha[static_cast<std::size_t>(i)] != alpha[static_cast<std::size_t>(i + 1)]) ++m;
                const int b = alpha[static_cast<std::size_t>(n - 1)] != alpha[0] ? 1 : 0;
                if (m > b) sum += std::pow(e, 2.0 * (m - b));
            }
            return std::sqrt(sum);
        };
        for (auto [n, k, want] : std::vector<std::tuple<int, int, double>>{{4, 2, 2.0}, {4, 3, 1.0}, {5, 2, 2.0}}) {
            const DenseTensor tau = two_domain_limit(n, k);
            const double measured = distance(contract_vector(two_domain_eps(n, k, 0.05)), tau);
            CHECK(measured == doctest::Approx(predicted_error(n, k, 0.05)).epsilon(1e-10));
            const auto study = convergence_study(
                "two-domain", [&, n = n, k = k](double e) { return contract_vector(two_domain_eps(n, k, e)); },
                default_eps_grid(), tau);
            CHECK(std::abs(study.slope - want) < 0.05);
        }
    }

    CHECK_THROWS_AS(two_domain_eps(4, 2, 1.5), ValidationError);
}

TEST_CASE("convergence_study mechanics") {
    CHECK_THROWS_AS(convergence_study("x", [](double) { return DenseTensor({2}); }, {1e-1, 1e-2, 1e-3},
                                      DenseTensor({2})),
                    ValidationError);  // too few points
    CHECK_THROWS_AS(convergence_study("x", [](double) { return DenseTensor({2}); },
                                      {1e-1, 1e-1, 1e-2, 1e-3}, DenseTensor({2})),
                    ValidationError);  // not strictly decreasing

    SUBCASE("non-finite points are excluded and flagged") {
        DenseTensor target({2});
        target[0] = 1.0;
        auto contract_at = [](double e) {
            DenseTensor t({2});
            t[0] = (e < 1e-3) ? std::numeric_limits<double>::infinity() : 1.0 + e;
            return t;
        };
        const auto study = convergence_study("x", contract_at, {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}, target);
        CHECK(study.included[0]);
        CHECK_FALSE(study.included[3]);
        CHECK_FALSE(study.included[4]);
        CHECK(study.slope == doctest::Approx(1.0).epsilon(1e-6));
    }
}
