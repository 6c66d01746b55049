#include "ckabs/io.hpp"

#include <fstream>
#include <sstream>

namespace ckabs {

using nlohmann::json;

nlohmann::json partition_to_json(const Partition& partition) {
    json j;
    j["alphabet_size"] = partition.alphabet_size;
    auto& words = j["words"] = json::array();
    for (const auto& w : partition.words) words.push_back(w.text());
    return j;
}

Partition partition_from_json(const nlohmann::json& j) {
    Partition partition;
    partition.alphabet_size = j.at("alphabet_size").get<int>();
    for (const auto& w : j.at("words")) partition.words.push_back(TimedWord::parse(w.get<std::string>()));
    const auto violations = check_partition(partition);
    if (!violations.empty()) throw Error("malformed partition: " + violations.front());
    return partition;
}

nlohmann::json chain_to_json(const LabeledMarkovChain& chain) {
    const auto n = static_cast<std::size_t>(chain.n_states());
    json j;
    j["alphabet_size"] = chain.alphabet_size;
    j["mu"] = chain.mu;
    auto& tau = j["tau"] = json::array();
    for (std::size_t s = 0; s < n; ++s) {
        json row = json::array();
        for (std::size_t t = 0; t < n; ++t) row.push_back(chain.tau[s * n + t]);
        tau.push_back(std::move(row));
    }
    j["labels"] = chain.labels;
    if (!chain.state_names.empty()) {
        auto& states = j["states"] = json::array();
        for (const auto& w : chain.state_names) states.push_back(w.text());
    }
    return j;
}

LabeledMarkovChain chain_from_json(const nlohmann::json& j) {
    LabeledMarkovChain chain;
    chain.mu = j.at("mu").get<std::vector<double>>();
    chain.labels = j.at("labels").get<std::vector<int>>();
    const auto n = chain.mu.size();
    chain.tau.reserve(n * n);
    for (const auto& row : j.at("tau")) {
        if (row.size() != n) throw Error("chain tau rows must match the state count");
        for (const auto& p : row) chain.tau.push_back(p.get<double>());
    }
    if (chain.tau.size() != n * n) throw Error("chain tau must be square");
    if (j.contains("states"))
        for (const auto& w : j.at("states"))
            chain.state_names.push_back(TimedWord::parse(w.get<std::string>()));
    if (j.contains("alphabet_size")) {
        chain.alphabet_size = j.at("alphabet_size").get<int>();
    } else {
        int top = 0;
        for (int label : chain.labels) top = std::max(top, label);
        chain.alphabet_size = top + 1;
    }
    const auto violations = validate(chain);
    if (!violations.empty()) throw Error("malformed chain: " + violations.front());
    return chain;
}

void save_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

namespace {

LabelRegion::Interval interval_from_json(const json& j) {
    LabelRegion::Interval interval;
    if (j.is_null()) return interval;
    if (!j.is_array() || j.size() != 2) throw Error("region bounds must be [lo, hi] or null");
    if (!j[0].is_null()) interval.lo = j[0].get<double>();
    if (!j[1].is_null()) interval.hi = j[1].get<double>();
    return interval;
}

}  // namespace

AffineSystem affine_from_json(const nlohmann::json& j) {
    if (j.at("type").get<std::string>() != "affine")
        throw Error("unknown system type, expected \"affine\"");
    const auto& a_rows = j.at("A");
    const int dimension = static_cast<int>(a_rows.size());
    std::vector<double> a_continuous;
    for (const auto& row : a_rows) {
        if (static_cast<int>(row.size()) != dimension) throw Error("A must be square");
        for (const auto& x : row) a_continuous.push_back(x.get<double>());
    }
    const auto b_continuous = j.at("b").get<std::vector<double>>();
    const double h_step = j.at("h_step").get<double>();

    std::vector<LabelRegion> regions;
    int top_label = 0;
    for (const auto& region_json : j.at("labels")) {
        LabelRegion region;
        region.label = region_json.at("label").get<int>();
        top_label = std::max(top_label, region.label);
        if (region_json.contains("box"))
            for (const auto& side : region_json.at("box"))
                region.box.push_back(interval_from_json(side));
        regions.push_back(std::move(region));
    }

    std::vector<std::pair<double, double>> init_box;
    for (const auto& side : j.at("init_box"))
        init_box.emplace_back(side.at(0).get<double>(), side.at(1).get<double>());

    const int alphabet_size =
        j.contains("alphabet_size") ? j.at("alphabet_size").get<int>() : top_label + 1;
    return AffineSystem::from_continuous(dimension, a_continuous, b_continuous, h_step,
                                         std::move(regions), std::move(init_box), alphabet_size);
}

LoadedSystem load_system(const std::string& spec) {
    LoadedSystem loaded;
    if (spec == "lorentz") {
        loaded.affine = make_lorentz_system();
        loaded.system = loaded.affine->system();
        loaded.description = "lorentz";
        return loaded;
    }
    if (spec.rfind("rotation:", 0) == 0) {
        double theta = 0.0;
        try {
            std::size_t used = 0;
            theta = std::stod(spec.substr(9), &used);
            if (used != spec.size() - 9) throw Error("trailing text");
        } catch (const std::exception&) {
            throw Error("rotation angle must be a number, e.g. rotation:0.25");
        }
        loaded.system = make_rotation_system(theta);
        loaded.description = spec;
        return loaded;
    }
    loaded.affine = affine_from_json(load_json(spec));
    loaded.system = loaded.affine->system();
    loaded.description = spec;
    return loaded;
}

void write_csv(std::ostream& out, const std::vector<std::string>& comments,
               const std::string& header, const std::vector<std::string>& rows) {
    for (const auto& comment : comments) out << "# " << comment << '\n';
    out << header << '\n';
    for (const auto& row : rows) out << row << '\n';
}

void write_csv(const std::string& path, const std::vector<std::string>& comments,
               const std::string& header, const std::vector<std::string>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write_csv(out, comments, header, rows);
}

}  // namespace ckabs
