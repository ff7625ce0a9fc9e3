#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "brlab/io.hpp"
#include "brlab/version.hpp"
#include "test_helpers.hpp"

using namespace brlab;
using namespace brlab::testing;
namespace io = brlab::io;

TEST_CASE("wsc json") {
    for (const Wsc& omega : {make_simplex(3), make_cycle(5), make_line(4)}) {
        const Wsc back = io::wsc_from_json(io::wsc_to_json(omega));
        CHECK(back == omega);
    }

    SUBCASE("singletons default to weight 1, omitted subsets to 0") {
        const auto j = io::json::parse(R"({"n": 3, "weights": [{"subset": [1, 2], "w": 2},
                                                               {"subset": [1], "w": 2},
                                                               {"subset": [2], "w": 2}]})");
        const Wsc omega = io::wsc_from_json(j);
        CHECK(omega.weight(subset_of({3}, 3)) == 1);
        CHECK(omega.weight(subset_of({1, 2}, 3)) == 2);
        CHECK(omega.weight(subset_of({1, 3}, 3)) == 0);
        CHECK(omega.degree(1) == 2);  // two copies of the doubled edge
    }
}

TEST_CASE("action json") {
    const auto act = cyclic_action(make_cycle(4));
    const auto j = io::action_to_json(act);
    const auto back = io::action_from_json(j, act.omega());
    CHECK(back.generators() == act.generators());
    CHECK(back.facet_maps() == act.facet_maps());
    CHECK(is_external(back));
}

TEST_CASE("tensor json round trip is exact") {
    Rng rng(3);
    DenseTensor t({2, 3, 2});
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = rng.complex_gaussian() * 1e-7;
    const std::string dumped = io::tensor_to_json(t).dump();
    const DenseTensor back = io::tensor_from_json(io::json::parse(dumped));
    CHECK(back.shape() == t.shape());
    for (std::int64_t i = 0; i < t.size(); ++i) CHECK(back[i] == t[i]);
}

TEST_CASE("decomposition json round trips") {
    Rng rng(11);

    SUBCASE("unconstrained / nonnegative") {
        auto dec = random_resource(rng, cyclic_action(make_cycle(3)), 2, 2);
        const auto j = io::decomposition_to_json(dec);
        const auto back = std::get<UnconstrainedDecomposition>(io::decomposition_from_json(j));
        CHECK(validate(back).ok());
        const DenseTensor a = contract_vector(dec), b = contract_vector(back);
        for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }

    SUBCASE("psd") {
        const auto dec = random_normalized_psd_dec(rng, symmetric_action(make_simplex(3)), 2, 2);
        const auto back = std::get<PsdDecomposition>(io::decomposition_from_json(io::decomposition_to_json(dec)));
        CHECK(validate(back).ok());
        CHECK(distance(contract_psd(back), contract_psd(dec)) == 0.0);
    }

    SUBCASE("separable and purification") {
        std::vector<std::vector<Matrix>> mats;
        for (int v = 0; v < 2; ++v) mats.push_back({random_psd(rng, 2), random_psd(rng, 2)});
        const auto sep = make_separable(trivial_action(make_line(2)), 2, {2, 2}, mats);
        const auto back =
            std::get<SeparableDecomposition>(io::decomposition_from_json(io::decomposition_to_json(sep)));
        CHECK(distance(contract_matrix(back), contract_matrix(sep)) == 0.0);

        const auto puri = random_normalized_purification(rng, trivial_action(make_line(2)), 2, 2, 2);
        const auto back2 = std::get<PurificationDecomposition>(
            io::decomposition_from_json(io::decomposition_to_json(puri)));
        CHECK(back2.ancilla == puri.ancilla);
        CHECK(distance(contract_purification(back2), contract_purification(puri)) == 0.0);
    }
}

TEST_CASE("model json round trips") {
    Rng rng(21);

    SUBCASE("hidden variable model") {
        const auto model = random_hvm(rng, 3, 2, 2, false);
        const auto back = io::hvm_from_json(io::hvm_to_json(model));
        CHECK(distance(eval_hvm(back), eval_hvm(model)) == 0.0);
    }

    SUBCASE("povm model") {
        const auto dec = random_normalized_psd_dec(rng, trivial_action(make_simplex(3)), 2, 2);
        const auto model = psd_to_quantum_model(dec);
        const auto back = io::povm_model_from_json(io::povm_model_to_json(model));
        CHECK(distance(eval_quantum_model(back), eval_quantum_model(model)) == 0.0);
    }

    SUBCASE("channel model") {
        const auto dec = random_normalized_purification(rng, trivial_action(make_line(3)), 2, 2, 2);
        const auto model = purification_to_channel_model(dec);
        const auto back = io::channel_model_from_json(io::channel_model_to_json(model));
        CHECK(distance(eval_channel_model(back), eval_channel_model(model)) == 0.0);
    }

    SUBCASE("tagged dispatch") {
        const auto model = random_hvm(rng, 3, 2, 2, true);
        const auto any = io::model_from_json(io::model_to_json(io::AnyModel{model}));
        CHECK(std::holds_alternative<HiddenVariableModel>(any));
    }
}

TEST_CASE("study csv") {
    ConvergenceStudy study;
    study.family = "w-unconstrained";
    study.eps = {1e-1, 1e-2};
    study.error = {0.17320508075688773, 0.017320630092706545};
    study.included = {true, false};
    const std::string csv = io::study_to_csv(study);
    CHECK(csv.substr(0, 32) == "epsilon,error,included_in_fit\n0.");
    CHECK(csv.find("0.17320508075688773") != std::string::npos);
    CHECK(csv.back() == '\n');
    CHECK(csv.find("\r") == std::string::npos);
}

TEST_CASE("config hash and stamping") {
    io::json a{{"family", "w-psd"}, {"n", 5}};
    io::json b{{"n", 5}, {"family", "w-psd"}};  // key order must not matter
    CHECK(io::config_hash(a) == io::config_hash(b));
    io::json c{{"n", 6}, {"family", "w-psd"}};
    CHECK(io::config_hash(a) != io::config_hash(c));

    io::json out{{"slope", 1.0}};
    io::stamp(out, a);
    CHECK(out.contains("config_hash"));
    CHECK(out.at("version").get<std::string>() == std::string(kVersion));
}

TEST_CASE("floors json") {
    FloorMeasurement m;
    m.delta_nn = 1.0000000003;
    m.delta_psd = 5.017e-6;
    m.starts = 100;
    m.iters = 2000;
    m.seed = 42;
    const auto back = io::floors_from_json(io::floors_to_json(m));
    CHECK(back.delta_nn == m.delta_nn);
    CHECK(back.delta_psd == m.delta_psd);
    CHECK(back.seed == 42);
}
