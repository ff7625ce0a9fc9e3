// brlab: reproducible experiments on positive and invariant tensor
// decompositions. See README.md for the subcommand reference.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "brlab/io.hpp"
#include "brlab/threads.hpp"
#include "brlab/version.hpp"

namespace fs = std::filesystem;
using namespace brlab;
using brlab::io::json;

namespace {

struct EpsSpec {
    double hi = 1e-1;
    double lo = 1e-4;
    int points = 13;
};

EpsSpec parse_eps(const std::string& spec) {
    EpsSpec out;
    const auto dots = spec.find("..");
    if (dots == std::string::npos) throw ValidationError("--eps expects <hi>..<lo>[:points]");
    const auto colon = spec.find(':', dots + 2);
    out.hi = std::stod(spec.substr(0, dots));
    if (colon == std::string::npos) {
        out.lo = std::stod(spec.substr(dots + 2));
    } else {
        out.lo = std::stod(spec.substr(dots + 2, colon - dots - 2));
        out.points = std::stoi(spec.substr(colon + 1));
    }
    return out;
}

DenseTensor named_tensor(const std::string& name) {
    if (name.size() >= 2 && name[0] == 'W') {
        const int n = std::atoi(name.c_str() + 1);
        if (n >= 2 && n <= 12) return w_state(n);
    }
    throw ValidationError("unknown tensor name (expected W2..W12): " + name);
}

json load_json(const std::string& path) { return json::parse(io::read_text_file(path)); }

void write_json(const fs::path& path, const json& j) {
    io::write_text_file(path.string(), j.dump(2) + "\n");
}

/// Values from --config <file> fill every option the command line left unset.
void merge_config(CLI::App* cmd, const std::string& config_path) {
    if (config_path.empty()) return;
    const json cfg = load_json(config_path);
    for (const auto& [key, value] : cfg.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr || opt->count() > 0) continue;
        std::vector<std::string> args;
        if (value.is_string())
            args.push_back(value.get<std::string>());
        else
            args.push_back(value.dump());
        opt->add_result(args[0]);
        opt->run_callback();
    }
}

json cli_config(const CLI::App* cmd) {
    json cfg;
    cfg["subcommand"] = cmd->get_name();
    for (const CLI::Option* opt : cmd->get_options()) {
        if (opt->get_name().size() < 3 || opt->count() == 0) continue;
        const std::string name = opt->get_name().substr(2);
        if (name == "out" || name == "config") continue;  // I/O plumbing, not experiment parameters
        cfg[name] = opt->results().front();
    }
    return cfg;
}

int run_family_study(const std::string& family, int n, int p, int k, const EpsSpec& eps,
                     const std::string& out_dir, const json& config) {
    const auto grid = log_grid(eps.hi, eps.lo, eps.points);
    DenseTensor target({1});
    std::function<DenseTensor(double)> contract_at;

    if (family == "w-unconstrained") {
        target = w_state(n);
        contract_at = [n](double e) { return contract_vector(w_eps_unconstrained(n, e)); };
    } else if (family == "w-psd") {
        target = w_state(n);
        contract_at = [n](double e) { return contract_psd(w_eps_psd(n, e)); };
    } else if (family == "w-ti-unconstrained") {
        target = w_state(n);
        contract_at = [n](double e) { return contract_vector(w_eps_ti_unconstrained(n, e)); };
    } else if (family == "w-ti-psd") {
        target = w_state(n);
        contract_at = [n](double e) { return contract_psd(w_eps_ti_psd(n, e)); };
    } else if (family == "w-ti-nonneg") {
        target = w_state(n);
        target *= Cplx(1.0 / p, 0.0);
        contract_at = [n, p](double e) { return contract_vector(w_eps_ti_nonneg(n, e, p)); };
    } else if (family == "two-domain") {
        target = two_domain_limit(n, k);
        contract_at = [n, k](double e) { return contract_vector(two_domain_eps(n, k, e)); };
    } else {
        throw ValidationError("unknown family: " + family);
    }

    const auto study = convergence_study(family, contract_at, grid, target);

    fs::create_directories(out_dir);
    const std::string stamp_line =
        "# config_hash=" + io::config_hash(config) + " version=" + kVersion + "\n";
    io::write_text_file((fs::path(out_dir) / "study.csv").string(), stamp_line + io::study_to_csv(study));

    json summary = io::study_to_json(study);
    summary["n"] = n;
    if (family == "w-ti-nonneg") summary["p"] = p;
    if (family == "two-domain") summary["k"] = k;
    io::stamp(summary, config);
    write_json(fs::path(out_dir) / "study.json", summary);
    std::cout << "study: slope " << io::format_double(study.slope) << ", coefficient "
              << io::format_double(study.coefficient) << "\n";
    return 0;
}

json validate_model_report(const io::AnyModel& model) {
    json report;
    bool ok = true;
    if (const auto* hvm = std::get_if<HiddenVariableModel>(&model)) {
        try {
            validate_model(*hvm);
            report["kind"] = "hvm";
        } catch (const ValidationError& e) {
            ok = false;
            report["error"] = e.what();
        }
    } else if (const auto* qm = std::get_if<QuantumPovmModel>(&model)) {
        report["kind"] = "povm-model";
        json povms = json::array();
        for (const auto& povm : qm->orbit_povms) {
            const double dev = povm_completeness_deviation(povm);
            bool psd_ok = true;
            for (const auto& e : povm.elements)
                if (!is_hermitian(e, 1e-10) || !is_psd(e, 1e-10)) psd_ok = false;
            povms.push_back({{"completeness_deviation", dev}, {"elements_psd", psd_ok}});
            if (dev > 1e-10 || !psd_ok) ok = false;
        }
        report["povms"] = povms;
        const double norm = frobenius_norm(contract_vector(qm->resource));
        report["resource_norm"] = norm;
        if (std::abs(norm - 1.0) > 1e-9) ok = false;
        const auto dec_report = validate(qm->resource);
        if (!dec_report.ok()) {
            ok = false;
            report["resource_issues"] = dec_report.summary();
        }
    } else if (const auto* cm = std::get_if<QuantumChannelModel>(&model)) {
        report["kind"] = "channel-model";
        json channels = json::array();
        for (const auto& ch : cm->orbit_channels) {
            const auto cptp = check_cptp(ch, 1e-10);
            channels.push_back({{"trace_preservation_deviation", cptp.trace_preservation_deviation},
                                {"choi_lambda_min", cptp.choi_lambda_min},
                                {"cptp", cptp.ok}});
            if (!cptp.ok) ok = false;
        }
        report["channels"] = channels;
        const double norm = frobenius_norm(contract_vector(cm->resource));
        report["resource_norm"] = norm;
        if (std::abs(norm - 1.0) > 1e-9) ok = false;
    }
    report["valid"] = ok;
    return report;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"positive and invariant tensor decompositions at desk scale"};
    app.set_version_flag("--version", std::string("brlab ") + kVersion);
    app.require_subcommand(1);
    (void)worker_threads();  // validate BRLAB_THREADS early

    std::string config_path, out_dir = ".", family, tensor_name, in_path, eps_spec = "1e-1..1e-4:13";
    std::string n_list_spec = "3,4,5";
    int n = 5, p = 2, k = 2, max_rank = 3, starts = 20, iters = 2000;
    std::uint64_t seed = 0;
    bool renormalize = false, force_non_tree = false;
    double tol_rank = 1e-9, tol_dist = 1e-10;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file; flags override its values");
        cmd->add_option("--out", out_dir, "output directory");
    };

    auto* study_cmd = app.add_subcommand("family-study", "convergence study of an explicit family");
    study_cmd->add_option("--family", family,
                          "w-unconstrained | w-psd | w-ti-unconstrained | w-ti-psd | w-ti-nonneg | two-domain");
    study_cmd->add_option("--n", n, "system size");
    study_cmd->add_option("--p", p, "cycle length of the permutation block (w-ti-nonneg)");
    study_cmd->add_option("--r", k, "bond dimension k (two-domain)");
    study_cmd->add_option("--eps", eps_spec, "grid <hi>..<lo>[:points], log spaced");
    add_common(study_cmd);

    auto* ranks_cmd = app.add_subcommand("ranks", "flattening bound and ALS residual report");
    ranks_cmd->add_option("--tensor", tensor_name, "named tensor, e.g. W5");
    ranks_cmd->add_option("--in", in_path, "tensor JSON file");
    ranks_cmd->add_option("--r", max_rank, "largest target rank");
    ranks_cmd->add_option("--seed", seed, "RNG seed")->required();
    ranks_cmd->add_option("--starts", starts, "multi-start count");
    ranks_cmd->add_option("--iters", iters, "sweep cap");
    ranks_cmd->add_option("--tol-rank", tol_rank, "relative singular value cutoff");
    add_common(ranks_cmd);

    auto* floors_cmd = app.add_subcommand("floors-bootstrap", "measure the W_3 residual floors");
    floors_cmd->add_option("--seed", seed, "RNG seed")->required();
    floors_cmd->add_option("--starts", starts, "multi-start count")->capture_default_str();
    floors_cmd->add_option("--iters", iters, "iteration cap")->capture_default_str();
    add_common(floors_cmd);

    auto* to_model_cmd = app.add_subcommand("to-model", "decomposition -> correlation model");
    to_model_cmd->add_option("--in", in_path, "decomposition JSON")->required();
    to_model_cmd->add_flag("--renormalize", renormalize, "rescale to unit mass first");
    to_model_cmd->add_option("--tol-dist", tol_dist, "distribution mass tolerance");
    add_common(to_model_cmd);

    auto* from_model_cmd = app.add_subcommand("from-model", "correlation model -> decomposition");
    from_model_cmd->add_option("--in", in_path, "model JSON")->required();
    add_common(from_model_cmd);

    auto* eval_cmd = app.add_subcommand("eval-model", "evaluate a model to a tensor");
    eval_cmd->add_option("--in", in_path, "model JSON")->required();
    add_common(eval_cmd);

    auto* validate_cmd = app.add_subcommand("validate-model", "check POVM/CPTP/probability constraints");
    validate_cmd->add_option("--in", in_path, "model JSON")->required();
    add_common(validate_cmd);

    auto* tree_cmd = app.add_subcommand("tree", "canonical forms on tree decompositions");
    auto* tree_norm = tree_cmd->add_subcommand("normalize", "left-canonical / trace rebalancing");
    tree_norm->add_option("--in", in_path, "decomposition JSON")->required();
    add_common(tree_norm);
    auto* tree_closure = tree_cmd->add_subcommand("closure-check", "normalize a sequence, check bounds");
    tree_closure->add_option("--in", in_path, "JSON {sequence: [...], eps: [...]}")->required();
    tree_closure->add_flag("--force-non-tree", force_non_tree, "raw divergence diagnostic");
    add_common(tree_closure);

    auto* sep_cmd = app.add_subcommand("separation", "rank^eps witnesses vs nonnegative floors");
    sep_cmd->add_option("--n-list", n_list_spec, "comma separated sizes in [3,7]");
    sep_cmd->add_option("--seed", seed, "RNG seed")->required();
    sep_cmd->add_option("--starts", starts, "multi-start count");
    sep_cmd->add_option("--iters", iters, "sweep cap");
    add_common(sep_cmd);

    auto* ref_cmd = app.add_subcommand("reference", "paper-stated rank facts");
    ref_cmd->add_option("--tensor", tensor_name, "named tensor, e.g. W5")->required();
    add_common(ref_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* active = app.get_subcommands().front();
        CLI::App* leaf = active;
        if (!active->get_subcommands().empty()) leaf = active->get_subcommands().front();
        merge_config(leaf, config_path);
        const json config = cli_config(leaf);
        fs::create_directories(out_dir);

        if (active == study_cmd) {
            if (family.empty()) throw ValidationError("--family is required");
            return run_family_study(family, n, p, k, parse_eps(eps_spec), out_dir, config);
        }

        if (active == ranks_cmd) {
            DenseTensor t =
                in_path.empty() ? named_tensor(tensor_name) : io::tensor_from_json(load_json(in_path));
            AlsOptions opts;
            opts.starts = starts;
            opts.iters = iters;
            const std::string label = tensor_name.empty() ? "tensor" : tensor_name;
            RankReport report = rank_report(t, label, max_rank, opts, seed);
            report.flattening_bound = flattening_lower_bound(t, tol_rank);
            json out = io::rank_report_to_json(report);
            io::stamp(out, config);
            write_json(fs::path(out_dir) / "report.json", out);
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (active == floors_cmd) {
            const auto floors = measure_floors(seed, starts, iters);
            json out = io::floors_to_json(floors);
            io::stamp(out, config);
            write_json(fs::path(out_dir) / "floors.json", out);
            std::cout << "delta_nn " << io::format_double(floors.delta_nn) << ", delta_psd "
                      << io::format_double(floors.delta_psd) << "\n";
            return 0;
        }

        if (active == to_model_cmd) {
            const auto dec = io::decomposition_from_json(load_json(in_path));
            io::AnyModel model = std::visit(
                [&](const auto& d) -> io::AnyModel {
                    using T = std::decay_t<decltype(d)>;
                    if constexpr (std::is_same_v<T, NonnegativeDecomposition>) return nn_to_hvm(d);
                    else if constexpr (std::is_same_v<T, PsdDecomposition>)
                        return psd_to_quantum_model(d, renormalize);
                    else if constexpr (std::is_same_v<T, PurificationDecomposition>)
                        return purification_to_channel_model(d, renormalize);
                    else
                        throw ValidationError(
                            "to-model expects a nonnegative, psd, or purification decomposition");
                },
                dec);
            json out = io::model_to_json(model);
            io::stamp(out, config);
            write_json(fs::path(out_dir) / "model.json", out);
            return 0;
        }

        if (active == from_model_cmd) {
            const auto model = io::model_from_json(load_json(in_path));
            io::AnyDecomposition dec = std::visit(
                [](const auto& m) -> io::AnyDecomposition {
                    using T = std::decay_t<decltype(m)>;
                    if constexpr (std::is_same_v<T, HiddenVariableModel>) return hvm_to_nn(m);
                    else if constexpr (std::is_same_v<T, QuantumPovmModel>) return quantum_model_to_psd(m);
                    else return channel_model_to_purification(m);
                },
                model);
            json out = io::decomposition_to_json(dec);
            io::stamp(out, config);
            write_json(fs::path(out_dir) / "dec.json", out);
            return 0;
        }

        if (active == eval_cmd) {
            const auto model = io::model_from_json(load_json(in_path));
            const DenseTensor t = std::visit(
                [](const auto& m) -> DenseTensor {
                    using T = std::decay_t<decltype(m)>;
                    if constexpr (std::is_same_v<T, HiddenVariableModel>) return eval_hvm(m);
                    else if constexpr (std::is_same_v<T, QuantumPovmModel>) return eval_quantum_model(m);
                    else return eval_channel_model(m);
                },
                model);
            json out = io::tensor_to_json(t);
            io::stamp(out, config);
            write_json(fs::path(out_dir) / "tensor.json", out);
            return 0;
        }

        if (active == validate_cmd) {
            const auto model = io::model_from_json(load_json(in_path));
            json report = validate_model_report(model);
            io::stamp(report, config);
            std::cout << report.dump(2) << "\n";
            return report.at("valid").get<bool>() ? 0 : 2;
        }

        if (active == tree_cmd) {
            if (leaf == tree_norm) {
                const auto dec = io::decomposition_from_json(load_json(in_path));
                io::AnyDecomposition normalized = std::visit(
                    [](const auto& d) -> io::AnyDecomposition {
                        using T = std::decay_t<decltype(d)>;
                        if constexpr (std::is_same_v<T, UnconstrainedDecomposition> ||
                                      std::is_same_v<T, NonnegativeDecomposition>)
                            return left_canonical(d);
                        else if constexpr (std::is_same_v<T, SeparableDecomposition>)
                            return normalize_separable_tree(d);
                        else
                            throw ValidationError("tree normalize expects an unconstrained or separable input");
                    },
                    dec);
                json out = io::decomposition_to_json(normalized);
                io::stamp(out, config);
                write_json(fs::path(out_dir) / "dec.json", out);
                return 0;
            }
            // closure-check
            const json j = load_json(in_path);
            const json& seq_json = j.contains("sequence") ? j.at("sequence") : j;
            std::vector<double> eps;
            if (j.contains("eps")) eps = j.at("eps").get<std::vector<double>>();
            ClosureReport report;
            if (force_non_tree) {
                std::vector<UnconstrainedDecomposition> seq;
                for (const auto& dj : seq_json) {
                    auto any = io::decomposition_from_json(dj);
                    if (auto* u = std::get_if<UnconstrainedDecomposition>(&any)) seq.push_back(*u);
                    else if (auto* nn = std::get_if<NonnegativeDecomposition>(&any)) seq.push_back(*nn);
                    else throw ValidationError("diagnostic expects vector decompositions");
                }
                report = closure_diagnostic(seq, eps);
            } else {
                auto first = io::decomposition_from_json(seq_json.at(0));
                if (std::holds_alternative<SeparableDecomposition>(first)) {
                    std::vector<SeparableDecomposition> seq;
                    for (const auto& dj : seq_json)
                        seq.push_back(std::get<SeparableDecomposition>(io::decomposition_from_json(dj)));
                    report = closure_check(seq);
                } else {
                    std::vector<UnconstrainedDecomposition> seq;
                    for (const auto& dj : seq_json) {
                        auto any = io::decomposition_from_json(dj);
                        if (auto* u = std::get_if<UnconstrainedDecomposition>(&any)) seq.push_back(*u);
                        else if (auto* nn = std::get_if<NonnegativeDecomposition>(&any)) seq.push_back(*nn);
                        else throw ValidationError("closure-check expects a homogeneous sequence");
                    }
                    report = closure_check(seq);
                }
            }
            json out = io::closure_to_json(report);
            io::stamp(out, config);
            write_json(fs::path(out_dir) / "closure.json", out);
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (active == sep_cmd) {
            std::vector<int> n_list;
            std::stringstream ss(n_list_spec);
            std::string item;
            while (std::getline(ss, item, ',')) n_list.push_back(std::stoi(item));
            AlsOptions opts;
            opts.starts = starts;
            opts.iters = iters;
            const auto report = separation_experiment(n_list, seed, opts);
            json out = io::separation_to_json(report);
            io::stamp(out, config);
            write_json(fs::path(out_dir) / "report.json", out);
            std::cout << out.dump(2) << "\n";
            return 0;
        }

        if (active == ref_cmd) {
            const int ref_n = std::atoi(tensor_name.c_str() + 1);
            if (tensor_name.empty() || tensor_name[0] != 'W' || ref_n < 2)
                throw ValidationError("reference expects --tensor W<n>");
            json out = json::array();
            for (const auto& e : reference_ranks(ref_n))
                out.push_back({{"quantity", e.quantity},
                               {"kind", e.kind},
                               {"value", e.value},
                               {"statement", e.statement},
                               {"citation", e.citation}});
            json wrapped{{"tensor", tensor_name}, {"entries", out}};
            io::stamp(wrapped, config);
            std::cout << wrapped.dump(2) << "\n";
            write_json(fs::path(out_dir) / "report.json", wrapped);
            return 0;
        }

        throw ValidationError("unhandled subcommand");
    } catch (const ResourceError& e) {
        std::cerr << json{{"error", {{"type", "resource"}, {"message", e.what()}}}}.dump() << "\n";
        return 4;
    } catch (const ConstructionError& e) {
        std::cerr << json{{"error",
                           {{"type", "construction"}, {"message", e.what()}, {"deviation", e.deviation}}}}
                         .dump()
                  << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << json{{"error", {{"type", "validation"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"type", "internal"}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
}
