#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "fairtopk/brute2d.hpp"
#include "fairtopk/generators.hpp"
#include "fairtopk/pipeline.hpp"
#include "fairtopk/verify.hpp"

using namespace fairtopk;

namespace {

constexpr int kAnswered = 0;
constexpr int kError = 1;
constexpr int kNoFairVector = 2;

void emit(const std::string& text, const std::string& path)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write " + path);
    out << text;
}

struct Inputs {
    RunConfig config;
    Dataset data;
};

Inputs load(const std::string& data_path, const std::string& config_path)
{
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    const auto names = protected_names(config);
    return {config, load_csv(data_path, names)};
}

int run_verify(const std::string& data_path, const std::string& config_path, const std::vector<double>& weights,
               const std::string& out)
{
    auto in = load(data_path, config_path);
    if (!weights.empty()) in.config.wo = weights;
    const auto w = reference_weight(in.config, in.data.dimension());
    const auto spec = spec_from_config(in.data, in.config);
    const auto witness = fair_topk_witness(in.data, in.config.k, spec, w, in.config.objective, w);
    nlohmann::json j;
    j["fair"] = witness.has_value();
    j["weight"] = w.values();
    if (witness) {
        std::vector<std::int64_t> ids;
        for (auto c : *witness) ids.push_back(in.data[c].id);
        j["topk_ids"] = ids;
        const auto counts = group_counts(in.data, *witness);
        nlohmann::json g = nlohmann::json::object();
        for (std::size_t i = 0; i < counts.size(); ++i) g[in.data.group_names()[i]] = counts[i];
        j["group_counts"] = g;
    }
    emit(j.dump(2) + "\n", out);
    return witness ? kAnswered : kNoFairVector;
}

int run_select(const std::string& data_path, const std::string& config_path, const std::string& out, bool oracle)
{
    const auto in = load(data_path, config_path);
    SelectOutcome outcome;
    if (oracle) {
        const auto reference = reference_weight(in.config, in.data.dimension());
        const auto start = std::chrono::steady_clock::now();
        outcome.result = brute_select_2d(in.data, in.config.k, spec_from_config(in.data, in.config),
                                         build_region(in.config, reference));
        outcome.engine = "brute2d";
        outcome.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    } else {
        outcome = select(in.data, in.config);
    }
    emit(result_json(in.data, in.config, outcome).dump(2) + "\n", out);
    return outcome.result ? kAnswered : kNoFairVector;
}

int run_preprocess(const std::string& data_path, const std::string& config_path, std::optional<int> k,
                   bool skyband, const std::string& out)
{
    const auto in = load(data_path, config_path);
    Dataset data = normalize(in.data);
    if (skyband) data = kskyband(data, k.value_or(in.config.k));
    std::ifstream header(data_path);
    std::string line;
    std::getline(header, line);
    std::vector<std::string> names;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) names.push_back(f);
    names = std::vector<std::string>(names.begin() + 1, names.end() - 1);
    std::ostringstream csv;
    write_csv(csv, data, names);
    emit(csv.str(), out);
    std::cerr << "kept " << data.size() << " of " << in.data.size() << " candidates\n";
    return kAnswered;
}

struct GenArgs {
    std::string kind = "setcover";
    std::size_t universe = 6, sets = 8, vectors = 10, length = 6, t = 2;
    double density = 0.4;
    int k = 0;
    std::uint64_t seed = 1;
    std::string out, config_out;
};

int run_gen(const GenArgs& a)
{
    std::mt19937_64 rng(a.seed);
    std::optional<GeneratedInstance> g;
    if (a.kind == "setcover") {
        const auto collection = random_collection(rng, a.universe, a.sets, a.density);
        const int k = a.k > 0 ? a.k : min_cover_size(a.universe, collection).value_or(1);
        g = gen_setcover(a.universe, collection, k);
    } else if (a.kind == "ov" || a.kind == "tov") {
        const std::size_t t = a.kind == "ov" ? 2 : a.t;
        std::vector<std::vector<BinaryVector>> lists;
        for (std::size_t i = 0; i < t; ++i) lists.push_back(random_vectors(rng, a.vectors, a.length, a.density));
        g = gen_tov(lists);
    } else {
        throw DomainError("unknown kind '" + a.kind + "'");
    }

    std::ostringstream csv;
    write_csv(csv, g->data);
    emit(csv.str(), a.out);

    nlohmann::json config;
    config["k"] = g->k;
    config["engine"] = "auto";
    config["wo"] = std::vector<double>{0.5, 0.5};
    config["protected"] = nlohmann::json::array();
    for (std::size_t j = 0; j < g->spec.size(); ++j)
        config["protected"].push_back({{"name", g->data.group_names()[j]},
                                       {"lower", static_cast<double>(g->spec[j].lower) / g->k},
                                       {"upper", static_cast<double>(g->spec[j].upper) / g->k}});
    if (!a.config_out.empty()) emit(config.dump(2) + "\n", a.config_out);

    nlohmann::json summary{{"kind", g->kind}, {"n", g->data.size()}, {"k", g->k}};
    if (g->min_cover) summary["min_cover"] = *g->min_cover;
    if (g->orthogonal) summary["orthogonal"] = *g->orthogonal;
    std::cerr << summary.dump() << "\n";
    return kAnswered;
}

struct BenchArgs {
    std::string data, config, out, name;
    std::vector<int> ks;
    std::vector<double> epsilons, fractions{1.0};
    std::vector<std::size_t> dims;
    std::size_t samples = 20;
    double timeout_ms = 600'000.0;
};

int run_bench(const BenchArgs& a)
{
    const auto in = load(a.data, a.config);
    BenchGrid grid;
    grid.ks = a.ks.empty() ? std::vector<int>{in.config.k} : a.ks;
    grid.epsilons = a.epsilons.empty() ? std::vector<double>{in.config.epsilon} : a.epsilons;
    grid.n_fractions = a.fractions;
    grid.dimensions = a.dims;
    grid.samples = a.samples;
    grid.cell_timeout_ms = a.timeout_ms;
    const auto rows = bench(a.name.empty() ? a.data : a.name, in.data, in.config, grid);
    std::ostringstream csv;
    write_bench_csv(csv, rows);
    emit(csv.str(), a.out);
    return kAnswered;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Fair top-k verification and weight synthesis"};
    app.require_subcommand(1);
    std::string data, config, out;
    std::vector<double> weights;

    auto* verify = app.add_subcommand("verify", "check whether a weight vector admits a fair top-k");
    verify->add_option("--data", data, "candidate CSV")->required();
    verify->add_option("--config", config, "run configuration JSON");
    verify->add_option("--weights", weights, "weight vector (defaults to wo from the config)");
    verify->add_option("--out", out, "output path");

    auto* sel = app.add_subcommand("select", "find the best fair weight vector near wo");
    sel->add_option("--data", data, "candidate CSV")->required();
    sel->add_option("--config", config, "run configuration JSON")->required();
    sel->add_option("--out", out, "output path");

    auto* oracle = app.add_subcommand("oracle", "brute-force 2-D selection");
    oracle->add_option("--data", data, "candidate CSV")->required();
    oracle->add_option("--config", config, "run configuration JSON")->required();
    oracle->add_option("--out", out, "output path");

    std::optional<int> band_k;
    bool no_skyband = false;
    auto* pre = app.add_subcommand("preprocess", "normalize attributes and keep the k-skyband");
    pre->add_option("--data", data, "candidate CSV")->required();
    pre->add_option("--config", config, "run configuration JSON");
    pre->add_option("--k", band_k, "skyband depth (defaults to k from the config)");
    pre->add_flag("--no-skyband", no_skyband, "only normalize");
    pre->add_option("--out", out, "output CSV");

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "write a hardness-reduction instance");
    gen->add_option("--kind", gen_args.kind, "setcover, ov or tov")->check(CLI::IsMember({"setcover", "ov", "tov"}));
    gen->add_option("--universe", gen_args.universe, "set cover universe size");
    gen->add_option("--sets", gen_args.sets, "set cover collection size");
    gen->add_option("--vectors", gen_args.vectors, "vectors per list");
    gen->add_option("--length", gen_args.length, "vector length");
    gen->add_option("--t", gen_args.t, "number of lists for tov");
    gen->add_option("--density", gen_args.density, "probability of a one");
    gen->add_option("--k", gen_args.k, "set cover k (defaults to the minimum cover)");
    gen->add_option("--seed", gen_args.seed, "random seed");
    gen->add_option("--out", gen_args.out, "output CSV");
    gen->add_option("--config-out", gen_args.config_out, "matching configuration JSON");

    BenchArgs bench_args;
    auto* ben = app.add_subcommand("bench", "time selection over sampled unfair reference vectors");
    ben->add_option("--data", bench_args.data, "candidate CSV")->required();
    ben->add_option("--config", bench_args.config, "base configuration JSON")->required();
    ben->add_option("--name", bench_args.name, "dataset label");
    ben->add_option("--ks", bench_args.ks, "values of k");
    ben->add_option("--epsilons", bench_args.epsilons, "values of epsilon");
    ben->add_option("--fractions", bench_args.fractions, "fractions of the rows to keep");
    ben->add_option("--dims", bench_args.dims, "numbers of leading attributes to keep");
    ben->add_option("--samples", bench_args.samples, "unfair vectors per cell");
    ben->add_option("--timeout-ms", bench_args.timeout_ms, "per-cell time limit");
    ben->add_option("--out", bench_args.out, "output CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kAnswered : kError;
    }

    try {
        if (*verify) return run_verify(data, config, weights, out);
        if (*sel) return run_select(data, config, out, false);
        if (*oracle) return run_select(data, config, out, true);
        if (*pre) return run_preprocess(data, config, band_k, !no_skyband, out);
        if (*gen) return run_gen(gen_args);
        if (*ben) return run_bench(bench_args);
    } catch (const std::exception& e) {
        std::cerr << "fair-topk: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
