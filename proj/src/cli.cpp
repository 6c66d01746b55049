#include "ckabs/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ckabs/ck.hpp"
#include "ckabs/dynamics.hpp"
#include "ckabs/errors.hpp"
#include "ckabs/estimation.hpp"
#include "ckabs/io.hpp"
#include "ckabs/markov.hpp"
#include "ckabs/random.hpp"
#include "ckabs/refine.hpp"
#include "ckabs/safety.hpp"
#include "ckabs/symbolic.hpp"

namespace ckabs {
namespace {

// Shortest representation that round-trips through a double, so CSV output
// stays bit-reproducible across runs.
std::string fmt(double x) { return nlohmann::json(x).dump(); }

std::string join_words(const std::vector<TimedWord>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += ';';
        out += w.text();
    }
    return out;
}

unsigned long long ipow(unsigned long long base, int exponent) {
    unsigned long long value = 1;
    for (int i = 0; i < exponent; ++i) value *= base;
    return value;
}

// Partition arguments accept a JSON file path or the built-ins "letters"
// (one word per letter) and "memory:<m>" (every length-m future word).
Partition resolve_partition(const std::string& spec, int alphabet_size) {
    int memory = 0;
    if (spec == "letters") {
        memory = 1;
    } else if (spec.rfind("memory:", 0) == 0) {
        std::size_t used = 0;
        memory = std::stoi(spec.substr(7), &used);
        if (used != spec.size() - 7 || memory < 1) throw Error("bad partition spec: " + spec);
    }
    if (memory > 0) {
        if (memory > 20) throw TooLarge("memory:" + std::to_string(memory) + " is too deep");
        unsigned long long count = 1;
        for (int i = 0; i < memory; ++i) {
            count *= static_cast<unsigned long long>(alphabet_size);
            if (count > (1ull << 20)) throw TooLarge("memory:" + std::to_string(memory) + " is too deep");
        }
        Partition partition;
        partition.alphabet_size = alphabet_size;
        for (unsigned long long code = 0; code < count; ++code) {
            std::vector<int> letters(static_cast<std::size_t>(memory));
            unsigned long long rest = code;
            for (int i = memory - 1; i >= 0; --i) {
                letters[static_cast<std::size_t>(i)] = static_cast<int>(rest % alphabet_size);
                rest /= static_cast<unsigned long long>(alphabet_size);
            }
            partition.words.push_back(TimedWord::future_word(letters));
        }
        return partition;
    }
    Partition partition = partition_from_json(load_json(spec));
    if (partition.alphabet_size != alphabet_size) {
        throw AlphabetMismatch("partition alphabet " + std::to_string(partition.alphabet_size) +
                               " does not match system alphabet " + std::to_string(alphabet_size));
    }
    return partition;
}

void emit_csv(const std::string& path, const std::vector<std::string>& comments,
              const std::string& header, const std::vector<std::string>& rows) {
    if (path.empty()) {
        write_csv(std::cout, comments, header, rows);
    } else {
        write_csv(path, comments, header, rows);
    }
}

nlohmann::json words_to_json(const std::vector<TimedWord>& words) {
    auto j = nlohmann::json::array();
    for (const auto& w : words) j.push_back(w.text());
    return j;
}

nlohmann::json report_to_json(const RefineReport& report, const std::string& metric_name) {
    nlohmann::json j;
    j["master_seed"] = report.master_seed;
    j["samples_per_candidate"] = report.samples_per_candidate;
    j["metric"] = metric_name;
    j["initial"] = {{"partition", partition_to_json(report.initial_partition)},
                    {"dropped", words_to_json(report.initial_dropped)},
                    {"chain", chain_to_json(report.initial_chain)}};
    auto& iterations = j["iterations"] = nlohmann::json::array();
    for (const auto& it : report.iterations) {
        nlohmann::json e;
        auto& distances = e["distances"] = nlohmann::json::array();
        for (const auto& d : it.candidate_distance) {
            if (d) {
                distances.push_back(*d);
            } else {
                distances.push_back(nullptr);
            }
        }
        e["chosen"] = it.chosen;
        e["dropped"] = words_to_json(it.dropped);
        e["partition"] = partition_to_json(it.partition);
        e["chain"] = chain_to_json(it.chain);
        iterations.push_back(std::move(e));
    }
    return j;
}

struct SimulateOpts {
    std::string system;
    int past = 0;
    int future = 0;
    int count = 1;
    std::uint64_t seed = 1;
    std::string out;
};

void run_simulate(const SimulateOpts& o) {
    const LoadedSystem loaded = load_system(o.system);
    std::vector<std::string> rows;
    for (int i = 0; i < o.count; ++i) {
        // Trajectory i gets the same derived seed estimation would use, so
        // sampled traces can be cross-checked against estimated counts.
        const Trace trace = simulate_trace(loaded.system, derive_seed(o.seed, static_cast<std::uint64_t>(i)),
                                           o.past, o.future);
        for (int t = trace.first_time(); t <= trace.last_time(); ++t) {
            rows.push_back(std::to_string(i) + ',' + std::to_string(t) + ',' +
                           std::to_string(trace.label_at(t)));
        }
    }
    std::ostringstream comment;
    comment << "simulate system=" << loaded.description << " seed=" << o.seed << " past=" << o.past
            << " future=" << o.future << " count=" << o.count;
    emit_csv(o.out, {comment.str()}, "trajectory,time,label", rows);
}

struct AbstractOpts {
    std::string system;
    std::string partition;
    long long samples = 0;
    std::uint64_t seed = 1;
    long long threshold = 0;
    int threads = 1;
    bool allow_drops = false;
    std::string out;
};

void run_abstract(const AbstractOpts& o) {
    const LoadedSystem loaded = load_system(o.system);
    const Partition partition = resolve_partition(o.partition, loaded.system.alphabet_size);
    const EstimationConfig config{o.samples, o.seed, o.threshold, o.threads};
    LabeledMarkovChain chain;
    std::vector<TimedWord> dropped;
    if (o.allow_drops) {
        PrunedEstimate pruned = estimate_with_drops(loaded.system, partition, config);
        chain = std::move(pruned.chain);
        dropped = std::move(pruned.dropped);
    } else {
        chain = estimate_abstraction(loaded.system, partition, config);
    }
    save_json(o.out, chain_to_json(chain));
    std::cout << "states=" << chain.n_states() << '\n';
    if (!dropped.empty()) std::cout << "dropped=" << join_words(dropped) << '\n';
}

struct CkOpts {
    std::string chain1;
    std::string chain2;
    double epsilon = 1e-3;
    std::optional<int> k;
    std::optional<int> oracle_k;
};

void run_ck(const CkOpts& o) {
    const LabeledMarkovChain c1 = chain_from_json(load_json(o.chain1));
    const LabeledMarkovChain c2 = chain_from_json(load_json(o.chain2));
    const CkResult result = o.k ? ck_distance_at(c1, c2, *o.k) : ck_distance(c1, c2, o.epsilon);
    std::cout << "value=" << fmt(result.value) << '\n'
              << "lower=" << fmt(result.lower) << '\n'
              << "upper=" << fmt(result.upper) << '\n'
              << "k=" << result.k_used << '\n'
              << "nodes_visited=" << result.nodes_visited << '\n';
    if (o.oracle_k) {
        const OracleResult oracle = kantorovich_lp_oracle(c1, c2, *o.oracle_k);
        std::cout << "oracle_k=" << *o.oracle_k << '\n'
                  << "oracle_value=" << fmt(oracle.value) << '\n';
    }
}

struct RefineOpts {
    std::string system;
    int iterations = 0;
    long long samples = 0;
    std::uint64_t seed = 1;
    double epsilon = 1e-3;
    long long threshold = 0;
    int threads = 1;
    std::string out;
    std::string report;
};

void run_refine(const RefineOpts& o) {
    const LoadedSystem loaded = load_system(o.system);
    const ChainMetric metric = ck_metric(o.epsilon);
    const EstimationConfig config{o.samples, o.seed, o.threshold, o.threads};
    const RefineReport report = refine(loaded.system, metric, o.iterations, config);
    save_json(o.out, partition_to_json(report.final_partition()));
    if (!o.report.empty()) save_json(o.report, report_to_json(report, metric.name));
    std::cout << "states=" << report.final_chain().n_states() << '\n';
    const auto dropped = report.all_dropped();
    if (!dropped.empty()) std::cout << "dropped=" << join_words(dropped) << '\n';
}

struct VerifyOpts {
    std::string chain;
    int hmax = 0;
    std::optional<double> beta;
    int unsafe = 0;
    std::string out;
    bool ground_truth = false;
    std::string system;
    long long samples = 0;
    std::uint64_t seed = 1;
};

void run_verify(const VerifyOpts& o) {
    std::vector<std::string> rows;
    std::ostringstream comment;
    if (o.ground_truth) {
        if (o.system.empty() || o.samples <= 0) {
            throw CLI::ValidationError("--ground-truth needs --system and --samples");
        }
        const LoadedSystem loaded = load_system(o.system);
        for (int h = 0; h <= o.hmax; ++h) {
            const SafetyQuery query{h, 0.0, o.unsafe};
            const double ph = ground_truth_safety_probability(loaded.system, query, o.samples, o.seed);
            rows.push_back(std::to_string(h) + ',' + fmt(ph));
        }
        comment << "verify ground-truth system=" << loaded.description << " unsafe=" << o.unsafe
                << " samples=" << o.samples << " seed=" << o.seed;
    } else {
        if (o.chain.empty() || !o.beta) {
            throw CLI::ValidationError("verify needs --chain and --beta (or --ground-truth)");
        }
        const LabeledMarkovChain chain = chain_from_json(load_json(o.chain));
        for (int h = 0; h <= o.hmax; ++h) {
            const SafetyQuery query{h, *o.beta, o.unsafe};
            rows.push_back(std::to_string(h) + ',' + fmt(estimate_safety_probability(chain, query)));
        }
        comment << "verify chain=" << o.chain << " unsafe=" << o.unsafe << " beta=" << fmt(*o.beta);
    }
    emit_csv(o.out, {comment.str()}, "H,P_H_estimate", rows);
}

struct GridOpts {
    std::string system;
    int parts = 0;
    long long samples = 0;
    std::uint64_t seed = 1;
    int unsafe = 0;
    std::string out;
};

void run_grid(const GridOpts& o) {
    const LoadedSystem loaded = load_system(o.system);
    if (!loaded.affine) throw Error("grid abstraction needs an affine system");
    const EstimationConfig config{o.samples, o.seed, 0, 1};
    const LabeledMarkovChain chain = grid_abstraction(*loaded.affine, o.parts, config, o.unsafe);
    save_json(o.out, chain_to_json(chain));
    std::cout << "states=" << chain.n_states() << '\n';
}

struct FiguresOpts {
    std::string outdir;
    long long samples = 50000;
    long long truth_samples = 200000;
    std::uint64_t seed = 1;
    double epsilon = 1e-3;
    int threads = 1;
};

// Dense chain (every entry positive) so the behaviour tree has no zero
// branches and node counts show the worst case.
LabeledMarkovChain make_random_dense_chain(int alphabet, int n_states, std::uint64_t seed) {
    Rng rng(seed);
    LabeledMarkovChain chain;
    chain.alphabet_size = alphabet;
    const auto n = static_cast<std::size_t>(n_states);
    chain.mu.resize(n);
    chain.tau.resize(n * n);
    chain.labels.resize(n);
    for (std::size_t s = 0; s < n; ++s) chain.labels[s] = static_cast<int>(s) % alphabet;
    auto fill_simplex = [&rng](double* row, std::size_t size) {
        double total = 0.0;
        for (std::size_t i = 0; i < size; ++i) {
            row[i] = 0.05 + rng.uniform01();
            total += row[i];
        }
        for (std::size_t i = 0; i < size; ++i) row[i] /= total;
    };
    fill_simplex(chain.mu.data(), n);
    for (std::size_t s = 0; s < n; ++s) fill_simplex(chain.tau.data() + s * n, n);
    return chain;
}

void run_figures(const FiguresOpts& o) {
    std::filesystem::create_directories(o.outdir);

    {
        const int alphabets[] = {2, 3, 4};
        const int depth_caps[] = {15, 10, 8};
        std::vector<std::string> rows;
        for (int i = 0; i < 3; ++i) {
            const int a = alphabets[i];
            const auto c1 = make_random_dense_chain(a, 4, derive_seed(o.seed, 500 + 2 * static_cast<std::uint64_t>(a)));
            const auto c2 = make_random_dense_chain(a, 4, derive_seed(o.seed, 501 + 2 * static_cast<std::uint64_t>(a)));
            for (int k = 1; k <= depth_caps[i]; ++k) {
                const CkResult r = ck_distance_at(c1, c2, k);
                rows.push_back(std::to_string(a) + ',' + std::to_string(k) + ',' +
                               std::to_string(r.nodes_visited) + ',' + std::to_string(ipow(a, k + 1)) +
                               ',' + std::to_string(ipow(a, 2 * k)));
            }
        }
        const std::string path = o.outdir + "/fig5.csv";
        write_csv(path,
                  {"behaviour tree nodes visited on dense random 4-state chains, seed=" + std::to_string(o.seed)},
                  "alphabet,k,nodes_visited,node_bound,pair_matrix_size", rows);
        std::cout << "wrote " << path << '\n';
    }

    {
        const AffineSystem lorentz = make_lorentz_system();
        const DynamicalSystem system = lorentz.system();
        const ChainMetric metric = ck_metric(o.epsilon);
        std::cerr << "[figures] refining the particle abstraction (14 iterations)\n";
        const EstimationConfig config{o.samples, o.seed, 0, o.threads};
        const RefineReport report = refine(system, metric, 14, config);
        const LabeledMarkovChain& mid =
            report.iterations.size() >= 6 ? report.iterations[5].chain : report.final_chain();
        std::cerr << "[figures] building grid abstractions\n";
        const LabeledMarkovChain grid2 =
            grid_abstraction(lorentz, 2, {o.samples, derive_seed(o.seed, 9001), 0, 1}, 0);
        const LabeledMarkovChain grid3 =
            grid_abstraction(lorentz, 3, {o.samples, derive_seed(o.seed, 9002), 0, 1}, 0);
        std::cerr << "[figures] sampling ground truth\n";
        const int hmax = 8;
        std::vector<double> truth(static_cast<std::size_t>(hmax) + 1);
        for (int h = 0; h <= hmax; ++h) {
            truth[static_cast<std::size_t>(h)] = ground_truth_safety_probability(
                system, {h, 0.0, 0}, o.truth_samples, derive_seed(o.seed, 9003));
        }
        struct Source {
            std::string name;
            const LabeledMarkovChain* chain;
        };
        const Source sources[] = {{"refine_n6", &mid},
                                  {"refine_n14", &report.final_chain()},
                                  {"grid_p2", &grid2},
                                  {"grid_p3", &grid3}};
        std::vector<std::string> rows;
        for (const double beta : {0.01, 0.05, 0.25}) {
            for (int h = 0; h <= hmax; ++h) {
                for (const auto& source : sources) {
                    const double ph = estimate_safety_probability(*source.chain, {h, beta, 0});
                    rows.push_back(fmt(beta) + ',' + std::to_string(h) + ',' + source.name + ',' +
                                   std::to_string(source.chain->n_states()) + ',' + fmt(ph));
                }
                rows.push_back(fmt(beta) + ',' + std::to_string(h) + ",ground_truth,0," +
                               fmt(truth[static_cast<std::size_t>(h)]));
            }
        }
        std::ostringstream comment;
        comment << "safety estimates vs sampled truth on the particle system; samples=" << o.samples
                << " truth_samples=" << o.truth_samples << " seed=" << o.seed
                << " epsilon=" << fmt(o.epsilon);
        const std::string path = o.outdir + "/fig7.csv";
        write_csv(path, {comment.str()}, "beta,H,source,states,P_H", rows);
        std::cout << "wrote " << path << '\n';
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"data-driven Markov abstractions with a behavioural metric"};
    app.require_subcommand(1);

    const std::string system_help = "built-in (lorentz, rotation:<theta>) or affine system JSON file";
    const std::string partition_help = "partition JSON file, or letters / memory:<m>";

    auto simulate = std::make_shared<SimulateOpts>();
    {
        auto* cmd = app.add_subcommand("simulate", "sample labeled traces from a system");
        cmd->add_option("--system", simulate->system, system_help)->required();
        cmd->add_option("--past", simulate->past, "steps simulated backwards from time 0")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--future", simulate->future, "steps simulated forwards from time 0")
            ->required()
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--count", simulate->count, "number of trajectories")->check(CLI::PositiveNumber);
        cmd->add_option("--seed", simulate->seed, "master seed; trajectory i uses a seed derived from it");
        cmd->add_option("--out", simulate->out, "output CSV (stdout when omitted)");
        cmd->callback([simulate] { run_simulate(*simulate); });
    }

    auto abstract_opts = std::make_shared<AbstractOpts>();
    {
        auto* cmd = app.add_subcommand("abstract", "estimate a Markov abstraction over a partition");
        cmd->add_option("--system", abstract_opts->system, system_help)->required();
        cmd->add_option("--partition", abstract_opts->partition, partition_help)->required();
        cmd->add_option("--samples", abstract_opts->samples, "trajectories to sample")
            ->required()
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", abstract_opts->seed, "master seed");
        cmd->add_option("--threshold", abstract_opts->threshold,
                        "treat words observed at most this often as unobserved")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--threads", abstract_opts->threads, "worker threads")->check(CLI::PositiveNumber);
        cmd->add_flag("--allow-drops", abstract_opts->allow_drops,
                      "drop unobserved words instead of failing");
        cmd->add_option("--out", abstract_opts->out, "output chain JSON")->required();
        cmd->callback([abstract_opts] { run_abstract(*abstract_opts); });
    }

    auto ck = std::make_shared<CkOpts>();
    {
        auto* cmd = app.add_subcommand("ck", "behavioural distance between two chains");
        cmd->add_option("--chain1", ck->chain1, "first chain JSON")->required();
        cmd->add_option("--chain2", ck->chain2, "second chain JSON")->required();
        cmd->add_option("--epsilon", ck->epsilon, "enclosure accuracy (picks the depth)")
            ->check(CLI::Range(1e-9, 0.5));
        cmd->add_option("--k", ck->k, "fixed truncation depth (overrides --epsilon)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--oracle-k", ck->oracle_k,
                        "also solve the depth-k transport program exactly")
            ->check(CLI::PositiveNumber);
        cmd->callback([ck] { run_ck(*ck); });
    }

    auto refine_opts = std::make_shared<RefineOpts>();
    {
        auto* cmd = app.add_subcommand("refine", "greedily split blocks to grow an abstraction");
        cmd->add_option("--system", refine_opts->system, system_help)->required();
        cmd->add_option("--iterations", refine_opts->iterations, "number of splits")
            ->required()
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--samples", refine_opts->samples, "trajectories per candidate estimate")
            ->required()
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", refine_opts->seed, "master seed");
        cmd->add_option("--epsilon", refine_opts->epsilon, "metric accuracy")->check(CLI::Range(1e-9, 0.5));
        cmd->add_option("--threshold", refine_opts->threshold,
                        "treat words observed at most this often as unobserved")
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--threads", refine_opts->threads, "worker threads")->check(CLI::PositiveNumber);
        cmd->add_option("--out", refine_opts->out, "output partition JSON")->required();
        cmd->add_option("--report", refine_opts->report, "full per-iteration report JSON");
        cmd->callback([refine_opts] { run_refine(*refine_opts); });
    }

    auto verify = std::make_shared<VerifyOpts>();
    {
        auto* cmd = app.add_subcommand("verify", "bound the probability of avoiding the unsafe label");
        cmd->add_option("--chain", verify->chain, "abstraction chain JSON");
        cmd->add_option("--hmax", verify->hmax, "largest horizon to report")
            ->required()
            ->check(CLI::NonNegativeNumber);
        cmd->add_option("--beta", verify->beta, "confidence margin in [0,1]");
        cmd->add_option("--unsafe", verify->unsafe, "unsafe output letter")->check(CLI::NonNegativeNumber);
        cmd->add_option("--out", verify->out, "output CSV (stdout when omitted)");
        cmd->add_flag("--ground-truth", verify->ground_truth, "sample the system instead of a chain");
        cmd->add_option("--system", verify->system, system_help);
        cmd->add_option("--samples", verify->samples, "trajectories for --ground-truth")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", verify->seed, "master seed for --ground-truth");
        cmd->callback([verify] { run_verify(*verify); });
    }

    auto grid = std::make_shared<GridOpts>();
    {
        auto* cmd = app.add_subcommand("grid", "estimate a uniform-grid abstraction of an affine system");
        cmd->add_option("--system", grid->system, system_help)->required();
        cmd->add_option("--parts", grid->parts, "partitions per dimension")
            ->required()
            ->check(CLI::PositiveNumber);
        cmd->add_option("--samples", grid->samples, "trajectories to sample")
            ->required()
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", grid->seed, "master seed");
        cmd->add_option("--unsafe", grid->unsafe, "unsafe output letter")->check(CLI::NonNegativeNumber);
        cmd->add_option("--out", grid->out, "output chain JSON")->required();
        cmd->callback([grid] { run_grid(*grid); });
    }

    auto figures = std::make_shared<FiguresOpts>();
    {
        auto* cmd = app.add_subcommand("figures", "reproduce the node-count and safety study CSVs");
        cmd->add_option("--outdir", figures->outdir, "directory for fig5.csv and fig7.csv")->required();
        cmd->add_option("--samples", figures->samples, "trajectories per estimate")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--truth-samples", figures->truth_samples, "trajectories for ground truth")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", figures->seed, "master seed");
        cmd->add_option("--epsilon", figures->epsilon, "metric accuracy")->check(CLI::Range(1e-9, 0.5));
        cmd->add_option("--threads", figures->threads, "worker threads")->check(CLI::PositiveNumber);
        cmd->callback([figures] { run_figures(*figures); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace ckabs
