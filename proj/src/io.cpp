#include "brlab/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

#include "brlab/version.hpp"

namespace brlab::io {

namespace {

std::vector<double> real_parts(const std::vector<Cplx>& data) {
    std::vector<double> out;
    out.reserve(data.size());
    for (const auto& z : data) out.push_back(z.real());
    return out;
}

std::vector<double> imag_parts(const std::vector<Cplx>& data) {
    std::vector<double> out;
    out.reserve(data.size());
    for (const auto& z : data) out.push_back(z.imag());
    return out;
}

}  // namespace

json wsc_to_json(const Wsc& omega) {
    json weights = json::array();
    for (const auto& [subset, w] : omega.stored_weights())
        weights.push_back({{"subset", subset_vertices(subset)}, {"w", w}});
    return {{"n", omega.n()}, {"weights", weights}};
}

Wsc wsc_from_json(const json& j) {
    const int n = j.at("n").get<int>();
    std::map<Subset, std::uint64_t> weights;
    if (j.contains("weights"))
        for (const auto& entry : j.at("weights")) {
            const auto vertices = entry.at("subset").get<std::vector<int>>();
            weights[subset_of(vertices, n)] = entry.at("w").get<std::uint64_t>();
        }
    return Wsc(n, std::move(weights));
}

json action_to_json(const GroupAction& action) {
    json generators = json::array();
    for (const auto& g : action.generators()) {
        std::vector<int> image;
        for (int i = 0; i < g.degree(); ++i) image.push_back(g(i) + 1);
        generators.push_back(image);
    }
    return {{"generators", generators}, {"facet_maps", action.facet_maps()}};
}

GroupAction action_from_json(const json& j, const Wsc& omega) {
    std::vector<Permutation> generators;
    for (const auto& image : j.at("generators")) {
        Permutation p;
        for (const auto& v : image) p.image.push_back(v.get<int>() - 1);
        generators.push_back(std::move(p));
    }
    auto facet_maps = j.at("facet_maps").get<std::vector<std::vector<int>>>();
    return GroupAction(omega, std::move(generators), std::move(facet_maps));
}

json tensor_to_json(const DenseTensor& t) {
    return {{"shape", t.shape()}, {"re", real_parts(t.data())}, {"im", imag_parts(t.data())}};
}

DenseTensor tensor_from_json(const json& j) {
    const auto shape = j.at("shape").get<std::vector<std::int64_t>>();
    const auto re = j.at("re").get<std::vector<double>>();
    std::vector<double> im(re.size(), 0.0);
    if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
    if (im.size() != re.size()) throw ValidationError("tensor json: re/im size mismatch");
    std::vector<Cplx> data;
    data.reserve(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) data.emplace_back(re[i], im[i]);
    return DenseTensor(shape, std::move(data));
}

json matrix_to_json(const Matrix& m) {
    std::vector<double> re, im;
    re.reserve(static_cast<std::size_t>(m.size()));
    im.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re.push_back(m(r, c).real());
            im.push_back(m(r, c).imag());
        }
    return {{"shape", {m.rows(), m.cols()}}, {"re", re}, {"im", im}};
}

Matrix matrix_from_json(const json& j) {
    const auto shape = j.at("shape").get<std::vector<std::int64_t>>();
    if (shape.size() != 2) throw ValidationError("matrix json: shape must have two entries");
    const auto re = j.at("re").get<std::vector<double>>();
    std::vector<double> im(re.size(), 0.0);
    if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
    Matrix m(shape[0], shape[1]);
    if (static_cast<std::int64_t>(re.size()) != m.size()) throw ValidationError("matrix json: bad size");
    std::size_t idx = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c, ++idx) m(r, c) = Cplx(re[idx], im[idx]);
    return m;
}

namespace {

json base_to_json(const DecompositionBase& dec, const char* type) {
    json j{{"type", type}, {"omega", wsc_to_json(dec.omega())}, {"r", dec.bond}, {"phys", dec.phys}};
    if (!dec.action.trivial()) j["action"] = action_to_json(dec.action);
    return j;
}

GroupAction base_action_from_json(const json& j, const Wsc& omega) {
    if (j.contains("action") && !j.at("action").is_null()) return action_from_json(j.at("action"), omega);
    return trivial_action(omega);
}

std::vector<int> phys_from_json(const json& j, int n) {
    if (j.contains("phys")) return j.at("phys").get<std::vector<int>>();
    return std::vector<int>(static_cast<std::size_t>(n), j.at("d").get<int>());
}

json locals_to_json(const std::vector<Matrix>& locals) {
    json out = json::array();
    for (const auto& m : locals) out.push_back(matrix_to_json(m));
    return out;
}

std::vector<Matrix> locals_from_json(const json& j) {
    std::vector<Matrix> out;
    for (const auto& m : j) out.push_back(matrix_from_json(m));
    return out;
}

json families_to_json(const std::vector<std::vector<Matrix>>& mats) {
    json out = json::array();
    for (const auto& fam : mats) out.push_back(locals_to_json(fam));
    return out;
}

std::vector<std::vector<Matrix>> families_from_json(const json& j) {
    std::vector<std::vector<Matrix>> out;
    for (const auto& fam : j) out.push_back(locals_from_json(fam));
    return out;
}

}  // namespace

json decomposition_to_json(const AnyDecomposition& dec) {
    return std::visit(
        [](const auto& d) -> json {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, UnconstrainedDecomposition>) {
                json j = base_to_json(d, "unconstrained");
                j["locals"] = locals_to_json(d.locals);
                return j;
            } else if constexpr (std::is_same_v<T, NonnegativeDecomposition>) {
                json j = base_to_json(d, "nonnegative");
                j["locals"] = locals_to_json(d.locals);
                return j;
            } else if constexpr (std::is_same_v<T, PsdDecomposition>) {
                json j = base_to_json(d, "psd");
                j["mats"] = families_to_json(d.mats);
                return j;
            } else if constexpr (std::is_same_v<T, SeparableDecomposition>) {
                json j = base_to_json(d, "separable");
                j["mats"] = families_to_json(d.mats);
                return j;
            } else {
                json j = base_to_json(d, "purification");
                j["d_prime"] = d.ancilla;
                j["mats"] = families_to_json(d.mats);
                return j;
            }
        },
        dec);
}

AnyDecomposition decomposition_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    const Wsc omega = wsc_from_json(j.at("omega"));
    GroupAction action = base_action_from_json(j, omega);
    const int bond = j.at("r").get<int>();
    std::vector<int> phys = phys_from_json(j, omega.n());

    if (type == "unconstrained")
        return make_unconstrained(std::move(action), bond, std::move(phys), locals_from_json(j.at("locals")));
    if (type == "nonnegative")
        return make_nonnegative(std::move(action), bond, std::move(phys), locals_from_json(j.at("locals")));
    if (type == "psd")
        return make_psd(std::move(action), bond, std::move(phys), families_from_json(j.at("mats")));
    if (type == "separable")
        return make_separable(std::move(action), bond, std::move(phys), families_from_json(j.at("mats")));
    if (type == "purification")
        return make_purification(std::move(action), bond, std::move(phys), j.at("d_prime").get<int>(),
                                 families_from_json(j.at("mats")));
    throw ValidationError("unknown decomposition type: " + type);
}

json hvm_to_json(const HiddenVariableModel& model) {
    json conditionals = json::array();
    for (const auto& c : model.conditionals) {
        Matrix m = c.cast<Cplx>();
        conditionals.push_back(matrix_to_json(m));
    }
    std::vector<double> prior(model.prior.data(), model.prior.data() + model.prior.size());
    return {{"type", "hvm"}, {"r", model.r}, {"prior", prior}, {"conditionals", conditionals}};
}

HiddenVariableModel hvm_from_json(const json& j) {
    HiddenVariableModel model;
    model.r = j.at("r").get<int>();
    const auto prior = j.at("prior").get<std::vector<double>>();
    model.prior.resize(static_cast<Eigen::Index>(prior.size()));
    for (std::size_t i = 0; i < prior.size(); ++i) model.prior(static_cast<Eigen::Index>(i)) = prior[i];
    for (const auto& c : j.at("conditionals")) model.conditionals.push_back(matrix_from_json(c).real());
    validate_model(model);
    return model;
}

namespace {

json povms_to_json(const std::vector<POVM>& povms) {
    json out = json::array();
    for (const auto& p : povms) out.push_back(locals_to_json(p.elements));
    return out;
}

json channels_to_json(const std::vector<KrausChannel>& channels) {
    json out = json::array();
    for (const auto& ch : channels) out.push_back(locals_to_json(ch.kraus));
    return out;
}

UnconstrainedDecomposition resource_from_json(const json& j) {
    auto any = decomposition_from_json(j);
    if (auto* u = std::get_if<UnconstrainedDecomposition>(&any)) return *u;
    if (auto* nn = std::get_if<NonnegativeDecomposition>(&any))
        return static_cast<UnconstrainedDecomposition>(*nn);
    throw ValidationError("resource must be an unconstrained decomposition");
}

}  // namespace

json povm_model_to_json(const QuantumPovmModel& model) {
    return {{"type", "povm-model"},
            {"resource", decomposition_to_json(model.resource)},
            {"orbit_povms", povms_to_json(model.orbit_povms)},
            {"orbit_of", model.orbit_of}};
}

QuantumPovmModel povm_model_from_json(const json& j) {
    QuantumPovmModel model;
    model.resource = resource_from_json(j.at("resource"));
    for (const auto& p : j.at("orbit_povms")) {
        POVM povm;
        povm.elements = locals_from_json(p);
        model.orbit_povms.push_back(std::move(povm));
    }
    model.orbit_of = j.at("orbit_of").get<std::vector<int>>();
    if (static_cast<int>(model.orbit_of.size()) != model.resource.n())
        throw ValidationError("orbit_of must list one orbit per vertex");
    return model;
}

json channel_model_to_json(const QuantumChannelModel& model) {
    return {{"type", "channel-model"},
            {"resource", decomposition_to_json(model.resource)},
            {"orbit_channels", channels_to_json(model.orbit_channels)},
            {"orbit_of", model.orbit_of}};
}

QuantumChannelModel channel_model_from_json(const json& j) {
    QuantumChannelModel model;
    model.resource = resource_from_json(j.at("resource"));
    for (const auto& c : j.at("orbit_channels")) {
        KrausChannel ch;
        ch.kraus = locals_from_json(c);
        model.orbit_channels.push_back(std::move(ch));
    }
    model.orbit_of = j.at("orbit_of").get<std::vector<int>>();
    if (static_cast<int>(model.orbit_of.size()) != model.resource.n())
        throw ValidationError("orbit_of must list one orbit per vertex");
    return model;
}

json model_to_json(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, HiddenVariableModel>) return hvm_to_json(m);
            else if constexpr (std::is_same_v<T, QuantumPovmModel>) return povm_model_to_json(m);
            else return channel_model_to_json(m);
        },
        model);
}

AnyModel model_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "hvm") return hvm_from_json(j);
    if (type == "povm-model") return povm_model_from_json(j);
    if (type == "channel-model") return channel_model_from_json(j);
    throw ValidationError("unknown model type: " + type);
}

json study_to_json(const ConvergenceStudy& study) {
    return {{"family", study.family},
            {"eps", study.eps},
            {"error", study.error},
            {"included", study.included},
            {"slope", study.slope},
            {"slope_stderr", study.slope_stderr},
            {"coefficient", study.coefficient},
            {"fit_residual", study.fit_residual},
            {"monotone", study.monotone}};
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string study_to_csv(const ConvergenceStudy& study) {
    std::string out = "epsilon,error,included_in_fit\n";
    for (std::size_t i = 0; i < study.eps.size(); ++i) {
        out += format_double(study.eps[i]);
        out += ',';
        out += format_double(study.error[i]);
        out += ',';
        out += study.included[i] ? '1' : '0';
        out += '\n';
    }
    return out;
}

json rank_report_to_json(const RankReport& report) {
    json residuals = json::array();
    for (const auto& [r, res] : report.residuals) residuals.push_back({{"rank", r}, {"residual", res}});
    json nn = json::array();
    for (const auto& [r, res] : report.nonneg_residuals) nn.push_back({{"rank", r}, {"residual", res}});
    json refs = json::array();
    for (const auto& e : report.references)
        refs.push_back({{"quantity", e.quantity},
                        {"kind", e.kind},
                        {"value", e.value},
                        {"statement", e.statement},
                        {"citation", e.citation}});
    return {{"label", report.label},
            {"flattening_lower_bound", report.flattening_bound},
            {"als_residuals", residuals},
            {"nonneg_residuals", nn},
            {"references", refs}};
}

json separation_to_json(const SeparationReport& report) {
    json rows = json::array();
    for (const auto& row : report.rows) {
        json floors = json::array();
        for (const auto& [r, f] : row.nonneg_floors) floors.push_back({{"rank", r}, {"floor", f}});
        rows.push_back({{"n", row.n},
                        {"rank_eps_witness", row.rank_eps_witness},
                        {"psd_eps_witness", row.psd_eps_witness},
                        {"nonneg_floors", floors},
                        {"eps_n", row.eps_n}});
    }
    return {{"seed", report.seed}, {"rows", rows}};
}

json closure_to_json(const ClosureReport& report) {
    json j{{"cauchy_ok", report.cauchy_ok},
           {"tail_distances", report.tail_distances},
           {"max_local_norms", report.max_local_norms},
           {"bound_value", report.bound_value},
           {"bounded", report.bounded},
           {"limit_bond", report.limit_bond},
           {"limit_deviation", report.limit_deviation},
           {"diagnostic", report.diagnostic}};
    if (report.diagnostic) {
        j["max_entries"] = report.max_entries;
        j["entry_slope"] = report.entry_slope;
    }
    return j;
}

json floors_to_json(const FloorMeasurement& floors) {
    return {{"delta_nn", floors.delta_nn},
            {"delta_psd", floors.delta_psd},
            {"starts", floors.starts},
            {"iters", floors.iters},
            {"seed", floors.seed}};
}

FloorMeasurement floors_from_json(const json& j) {
    FloorMeasurement m;
    m.delta_nn = j.at("delta_nn").get<double>();
    m.delta_psd = j.at("delta_psd").get<double>();
    m.starts = j.at("starts").get<int>();
    m.iters = j.at("iters").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    return m;
}

std::string config_hash(const json& config) {
    const std::string dump = config.dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

void stamp(json& out, const json& config) {
    out["config_hash"] = config_hash(config);
    out["version"] = kVersion;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw ValidationError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open: " + path);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

}  // namespace brlab::io
