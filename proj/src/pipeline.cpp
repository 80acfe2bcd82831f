#include "fairtopk/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "fairtopk/brute2d.hpp"
#include "fairtopk/klevel.hpp"
#include "fairtopk/log.hpp"
#include "fairtopk/milp.hpp"
#include "fairtopk/stability.hpp"
#include "fairtopk/sweep2d.hpp"
#include "fairtopk/verify.hpp"

namespace fairtopk {

namespace {

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string shortest(double v)
{
    std::ostringstream o;
    o.precision(17);
    o << v;
    // Prefer the shortest form that reads back to the same value.
    for (int p = 1; p <= 17; ++p) {
        std::ostringstream t;
        t.precision(p);
        t << v;
        if (std::stod(t.str()) == v) return t.str();
    }
    return o.str();
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j)
{
    RunConfig c;
    try {
        if (j.contains("k")) c.k = j.at("k").get<int>();
        if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
        if (j.contains("objective")) c.objective = objective_from_string(j.at("objective").get<std::string>());
        if (j.contains("engine")) c.engine = j.at("engine").get<std::string>();
        if (j.contains("protected"))
            for (const auto& p : j.at("protected"))
                c.protected_groups.push_back(
                    {p.at("name").get<std::string>(), p.value("lower", 0.0), p.value("upper", 1.0)});
        if (j.contains("wo") && !j.at("wo").is_null()) c.wo = j.at("wo").get<std::vector<double>>();
        if (j.contains("extra_halfspaces")) c.extra_halfspaces = j.at("extra_halfspaces").get<std::vector<std::vector<double>>>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("workers")) c.workers = j.at("workers").get<std::size_t>();
        if (j.contains("stable")) c.stable = j.at("stable").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("bad config: ") + e.what());
    }
    if (c.k < 1) throw DomainError("config k must be positive");
    if (!(c.epsilon > 0.0 && c.epsilon <= 1.0)) throw DomainError("config epsilon must lie in (0, 1]");
    if (c.engine != "auto" && c.engine != "sweep2d" && c.engine != "klevel" && c.engine != "milp")
        throw DomainError("unknown engine '" + c.engine + "'");
    for (const auto& p : c.protected_groups)
        if (!(p.lower >= 0.0 && p.upper <= 1.0 && p.lower <= p.upper))
            throw DomainError("protected group '" + p.name + "' needs 0 <= lower <= upper <= 1");
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config " + path);
    try {
        return parse_config(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(path + ": " + e.what());
    }
}

std::vector<std::string> protected_names(const RunConfig& config)
{
    std::vector<std::string> names;
    for (const auto& p : config.protected_groups) names.push_back(p.name);
    return names;
}

Dataset parse_csv(std::istream& in, std::span<const std::string> protected_groups, const std::string& source)
{
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(source, 1, "missing header");
    ++lineno;
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split(trim(line), ',');
    if (header.size() < 3 || trim(header.front()) != "id" || trim(header.back()) != "groups")
        throw ParseError(source, lineno, "header must be id,<attributes>,groups");
    const std::size_t d = header.size() - 2;

    std::map<std::string, GroupId> ids;
    std::vector<std::string> names(protected_groups.begin(), protected_groups.end());
    for (std::size_t g = 0; g < names.size(); ++g)
        if (!ids.emplace(names[g], static_cast<GroupId>(g)).second)
            throw ParseError(source, lineno, "protected group '" + names[g] + "' listed twice");
    std::vector<bool> seen(names.size(), false);

    std::vector<Candidate> cands;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line), ',');
        if (fields.size() != d + 2)
            throw ParseError(source, lineno, "expected " + std::to_string(d + 2) + " fields, got " + std::to_string(fields.size()));
        Candidate c;
        try {
            std::size_t used = 0;
            c.id = std::stoll(trim(fields[0]), &used);
            if (used != trim(fields[0]).size()) throw std::invalid_argument("id");
        } catch (const std::exception&) {
            throw ParseError(source, lineno, "bad id '" + fields[0] + "'");
        }
        for (std::size_t i = 0; i < d; ++i) {
            const std::string f = trim(fields[i + 1]);
            try {
                std::size_t used = 0;
                const double v = std::stod(f, &used);
                if (used != f.size()) throw std::invalid_argument("value");
                c.point.push_back(v);
            } catch (const std::exception&) {
                throw ParseError(source, lineno, "bad value '" + f + "' for " + trim(header[i + 1]));
            }
        }
        const std::string groups = trim(fields.back());
        if (!groups.empty()) {
            for (auto name : split(groups, '|')) {
                name = trim(name);
                if (name.empty()) throw ParseError(source, lineno, "empty group name");
                auto [it, added] = ids.emplace(name, static_cast<GroupId>(names.size()));
                if (added) names.push_back(name);
                if (it->second < seen.size()) seen[it->second] = true;
                c.groups.push_back(it->second);
            }
        }
        cands.push_back(std::move(c));
    }
    for (std::size_t g = 0; g < seen.size(); ++g)
        if (!seen[g]) throw ParseError(source, lineno, "unknown protected group '" + names[g] + "'");
    try {
        return Dataset(std::move(cands), d, names.size(), protected_groups.size(), names);
    } catch (const DomainError& e) {
        throw ParseError(source, lineno, e.what());
    }
}

Dataset load_csv(const std::string& path, std::span<const std::string> protected_groups)
{
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open data file " + path);
    return parse_csv(in, protected_groups, path);
}

void write_csv(std::ostream& out, const Dataset& data, std::span<const std::string> attribute_names)
{
    out << "id";
    for (std::size_t i = 0; i < data.dimension(); ++i)
        out << ',' << (i < attribute_names.size() ? attribute_names[i] : "a" + std::to_string(i + 1));
    out << ",groups\n";
    const auto& names = data.group_names();
    for (const auto& c : data.candidates()) {
        out << c.id;
        for (double v : c.point) out << ',' << shortest(v);
        out << ',';
        for (std::size_t g = 0; g < c.groups.size(); ++g) {
            if (g) out << '|';
            out << (names.empty() ? "g" + std::to_string(c.groups[g]) : names[c.groups[g]]);
        }
        out << '\n';
    }
}

Dataset normalize(const Dataset& data)
{
    const std::size_t d = data.dimension();
    std::vector<double> lo(d, INFINITY), hi(d, -INFINITY);
    for (const auto& c : data.candidates())
        for (std::size_t i = 0; i < d; ++i) {
            if (!std::isfinite(c.point[i]))
                throw DomainError("candidate " + std::to_string(c.id) + " has a non-finite attribute");
            lo[i] = std::min(lo[i], c.point[i]);
            hi[i] = std::max(hi[i], c.point[i]);
        }
    std::vector<Candidate> out = data.candidates();
    for (auto& c : out)
        for (std::size_t i = 0; i < d; ++i) c.point[i] = hi[i] > lo[i] ? (c.point[i] - lo[i]) / (hi[i] - lo[i]) : 0.0;
    return Dataset(std::move(out), d, data.group_count(), data.protected_count(), data.group_names());
}

Dataset kskyband(const Dataset& data, int k)
{
    const std::size_t n = data.size(), d = data.dimension();
    std::vector<CandidateIndex> keep;
    for (std::size_t c = 0; c < n; ++c) {
        int dominators = 0;
        const auto& p = data[c].point;
        for (std::size_t o = 0; o < n && dominators < k; ++o) {
            if (o == c) continue;
            const auto& q = data[o].point;
            bool geq = true, strict = false;
            for (std::size_t i = 0; i < d && geq; ++i) {
                geq = q[i] >= p[i];
                strict = strict || q[i] > p[i];
            }
            if (geq && strict) ++dominators;
        }
        if (dominators < k) keep.push_back(c);
    }
    return data.subset(keep);
}

SampleReport sample_unfair(const Dataset& data, int k, const FairnessSpec& spec, std::size_t count, std::uint64_t seed,
                           std::size_t max_tries)
{
    if (count < 1) throw DomainError("sample count must be positive");
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gamma1(1.0);
    SampleReport report;
    while (report.unfair.size() < count) {
        if (report.tried >= max_tries)
            throw RefusalError("found " + std::to_string(report.unfair.size()) + " unfair weight vectors in " +
                               std::to_string(report.tried) + " draws; giving up");
        std::vector<double> w(data.dimension());
        double sum = 0.0;
        for (auto& v : w) sum += (v = gamma1(rng));
        for (auto& v : w) v /= sum;
        ++report.tried;
        WeightVector wv = WeightVector::from_solver(std::move(w));
        if (!verify_fair(data, k, spec, wv)) report.unfair.push_back(std::move(wv));
    }
    return report;
}

FairnessSpec spec_from_config(const Dataset& data, const RunConfig& config, int k)
{
    if (config.protected_groups.size() != data.protected_count())
        throw DomainError("config names " + std::to_string(config.protected_groups.size()) +
                          " protected groups but the data declares " + std::to_string(data.protected_count()));
    std::vector<std::pair<double, double>> fractions;
    for (const auto& p : config.protected_groups) fractions.emplace_back(p.lower, p.upper);
    return FairnessSpec::from_fractions(fractions, k);
}

FairnessSpec spec_from_config(const Dataset& data, const RunConfig& config)
{
    return spec_from_config(data, config, config.k);
}

WeightVector reference_weight(const RunConfig& config, std::size_t dimension)
{
    if (!config.wo) return WeightVector(std::vector<double>(dimension, 1.0 / static_cast<double>(dimension)));
    if (config.wo->size() != dimension)
        throw DomainError("wo has " + std::to_string(config.wo->size()) + " components for " +
                          std::to_string(dimension) + " attributes");
    return WeightVector(*config.wo);
}

WeightRegion build_region(const RunConfig& config, const WeightVector& reference)
{
    auto region = WeightRegion::epsilon_box(reference, config.epsilon, config.objective);
    const std::size_t d = reference.dimension();
    for (const auto& h : config.extra_halfspaces) {
        if (h.size() != d + 1) throw DomainError("extra halfspaces need d + 1 numbers");
        region.halfspaces.push_back({std::vector<double>(h.begin(), h.end() - 1), h.back()});
    }
    return region;
}

std::string auto_engine(std::size_t dimension, int k, Objective objective)
{
    if (dimension == 2) return "sweep2d";
    double limit = std::ceil(120.0 / std::pow(2.0, static_cast<double>(dimension) - 3.0));
    if (objective == Objective::WDifference) limit *= 1.5;
    return k <= limit ? "klevel" : "milp";
}

SelectOutcome select(const Dataset& data, const RunConfig& config)
{
    return select(data, config, reference_weight(config, data.dimension()));
}

SelectOutcome select(const Dataset& data, const RunConfig& config, const WeightVector& reference)
{
    const std::size_t d = data.dimension();
    if (d < 2) throw DomainError("at least two scoring attributes are needed");
    if (static_cast<std::size_t>(config.k) > data.size()) throw DomainError("k exceeds the number of candidates");
    const auto spec = spec_from_config(data, config);
    const auto region = build_region(config, reference);

    SelectOutcome out;
    out.engine = config.engine == "auto" ? auto_engine(d, config.k, config.objective) : config.engine;
    if (out.engine == "sweep2d" && d != 2) throw DomainError("sweep2d needs exactly two attributes");

    const auto start = std::chrono::steady_clock::now();
    if (out.engine == "sweep2d") {
        out.result = sweep_select(data, config.k, spec, region);
    } else if (out.engine == "klevel") {
        TraverseOptions opt;
        opt.workers = config.workers;
        opt.seed = config.seed;
        out.result = traverse(data, config.k, spec, region, opt);
    } else {
        MilpOptions opt;
        opt.seed = config.seed;
        out.result = solve_milp(build_milp(data, config.k, spec, region), opt);
    }

    if (out.result && config.stable) {
        if (config.objective == Objective::WDifference)
            warn("stability is meant for utility-loss solutions; the stable weight may be far from wo");
        const auto s = d == 2 ? stable_weight_2d(data, out.result->subset, region, out.result->weight)
                              : stable_weight_md(data, out.result->subset, region, out.result->weight, config.seed);
        if (s.degenerate) warn("no weight keeps this top-k with a positive margin");
        out.result->stable_weight = s.weight;
        out.result->margin = s.margin;
    }
    out.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

nlohmann::json result_json(const Dataset& data, const RunConfig& config, const SelectOutcome& outcome)
{
    nlohmann::json j;
    j["fair"] = outcome.result.has_value();
    j["engine"] = outcome.engine;
    if (const auto& r = outcome.result) {
        j["weight"] = r->weight.values();
        j["objective_value"] = r->objective_value;
        std::vector<std::int64_t> ids;
        for (auto c : r->subset) ids.push_back(data[c].id);
        j["topk_ids"] = ids;
        const auto counts = group_counts(data, r->subset);
        nlohmann::json g = nlohmann::json::object();
        for (std::size_t i = 0; i < counts.size(); ++i)
            g[data.group_names().empty() ? std::to_string(i) : data.group_names()[i]] = counts[i];
        j["group_counts"] = g;
        if (r->stable_weight) j["stable_weight"] = r->stable_weight->values();
        if (r->margin) j["margin"] = *r->margin;
    }
    j["elapsed_ms"] = outcome.elapsed_ms;
    j["seed"] = config.seed;
    return j;
}

std::vector<BenchRow> bench(const std::string& name, const Dataset& data, const RunConfig& base, const BenchGrid& grid)
{
    std::vector<BenchRow> rows;
    const std::vector<std::size_t> dims = grid.dimensions.empty() ? std::vector<std::size_t>{data.dimension()} : grid.dimensions;
    for (double fraction : grid.n_fractions)
        for (std::size_t d : dims)
            for (int k : grid.ks)
                for (double eps : grid.epsilons) {
                    if (d < 2 || d > data.dimension()) throw DomainError("bench dimension out of range");
                    const auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(data.size())));
                    std::vector<Candidate> cands(data.candidates().begin(),
                                                 data.candidates().begin() + static_cast<std::ptrdiff_t>(std::min(take, data.size())));
                    for (auto& c : cands) c.point.resize(d);
                    const Dataset sliced = kskyband(
                        normalize(Dataset(std::move(cands), d, data.group_count(), data.protected_count(), data.group_names())), k);

                    RunConfig config = base;
                    config.k = k;
                    config.epsilon = eps;
                    BenchRow row;
                    row.dataset = name;
                    row.objective = to_string(config.objective);
                    row.k = k;
                    row.epsilon = eps;
                    row.n = sliced.size();
                    row.d = d;
                    row.seed = config.seed;
                    row.engine = config.engine == "auto" ? auto_engine(d, k, config.objective) : config.engine;
                    if (static_cast<std::size_t>(k) > sliced.size()) throw DomainError("bench k exceeds n");

                    const auto spec = spec_from_config(sliced, config, k);
                    const auto samples = sample_unfair(sliced, k, spec, grid.samples, config.seed);
                    row.unfair_sampled = samples.unfair.size();
                    double total = 0.0;
                    bool timed_out = false;
                    for (const auto& wo : samples.unfair) {
                        if (total > grid.cell_timeout_ms) {
                            timed_out = true;
                            break;
                        }
                        std::optional<double> value;
                        try {
                            const auto out = select(sliced, config, wo);
                            total += out.elapsed_ms;
                            if (out.result) {
                                ++row.found;
                                value = out.result->objective_value;
                            }
                        } catch (const RefusalError& e) {
                            warn(name + ": " + e.what());
                            timed_out = true;
                            break;
                        }
                        row.objectives.push_back(value);
                    }
                    if (!timed_out) row.mean_ms = total / static_cast<double>(samples.unfair.size());
                    rows.push_back(std::move(row));
                }
    return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows)
{
    out << "dataset,engine,objective,k,epsilon,n,d,mean_ms,found,unfair_sampled,seed\n";
    for (const auto& r : rows) {
        out << r.dataset << ',' << r.engine << ',' << r.objective << ',' << r.k << ',' << shortest(r.epsilon) << ','
            << r.n << ',' << r.d << ',' << (r.mean_ms ? shortest(*r.mean_ms) : std::string("timeout")) << ','
            << r.found << ',' << r.unfair_sampled << ',' << r.seed << '\n';
    }
}

}  // namespace fairtopk
