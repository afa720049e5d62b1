#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clusterir/cluster.hpp"
#include "clusterir/corpus_io.hpp"
#include "clusterir/embedding.hpp"
#include "clusterir/error.hpp"
#include "clusterir/eval.hpp"
#include "clusterir/index.hpp"
#include "clusterir/index_io.hpp"
#include "clusterir/search.hpp"

namespace {

using namespace clusterir;
using nlohmann::json;

// Exit codes: 0 success, 2 usage, 3 I/O, 4 parse, 5 validation/configuration.
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitParse = 4;
constexpr int kExitValidation = 5;

struct IndexArgs {
    std::string embeddings, corpus, index_dir;
    std::string stopwords, gazetteer, synonym_pairs;
    double epsilon = 0.35;
    bool epsilon_set = false;
    double gamma = 1.0, k1 = 1.2, b = 0.75;
    int rw_threshold = 1;
};

struct SearchArgs {
    std::string index_dir, queries, output, system;
    std::string embeddings, corpus;
    int k = 50, fusion_n = 100;
    double epsilon = 0.0, gamma = 0.0, k1 = 0.0, b = 0.0;
    bool epsilon_set = false, gamma_set = false, k1_set = false, b_set = false;
};

struct EvaluateArgs {
    std::string run, qrels, json_out;
    std::vector<int> k_values{1, 5, 10, 20, 50};
};

struct CompareArgs {
    std::string run_a, run_b, qrels;
    std::string metric = "ap";
};

struct ReformulateArgs {
    std::string queries, lexicon, output;
    double p = 0.5;
    unsigned seed = 42;
};

PipelineConfig make_pipeline(const std::string& stopwords, const std::string& gazetteer,
                             int rw_threshold) {
    PipelineConfig cfg;
    if (!stopwords.empty()) cfg.stopwords = read_word_list(stopwords);
    if (!gazetteer.empty()) cfg.gazetteer = read_word_list(gazetteer);
    cfg.rw_threshold = rw_threshold;
    return cfg;
}

std::unordered_set<std::string> collect_surfaces(const std::vector<Document>& docs,
                                                 const PipelineConfig& pipeline) {
    std::unordered_set<std::string> surfaces;
    for (const Document& d : docs) {
        for (const Token& t : document_tokens(d, pipeline)) surfaces.insert(t.surface);
    }
    return surfaces;
}

void add_query_surfaces(const std::vector<Query>& queries, const PipelineConfig& pipeline,
                        std::unordered_set<std::string>& surfaces) {
    for (const Query& q : queries) {
        for (const Token& t : tokenize(preprocess(q.text), pipeline.stopwords))
            surfaces.insert(t.surface);
    }
}

int cmd_index(const IndexArgs& args) {
    PipelineConfig pipeline =
        make_pipeline(args.stopwords, args.gazetteer, args.rw_threshold);
    std::vector<Document> corpus = read_corpus(args.corpus);

    std::vector<std::pair<std::string, std::string>> pairs;
    if (!args.synonym_pairs.empty()) pairs = read_synonym_pairs(args.synonym_pairs);

    std::unordered_set<std::string> filter = collect_surfaces(corpus, pipeline);
    for (const auto& [a, b] : pairs) {
        filter.insert(a);
        filter.insert(b);
    }
    EmbeddingTable table = load_embeddings(args.embeddings, &filter);

    IndexConfig cfg;
    cfg.pipeline = std::move(pipeline);
    cfg.gamma = args.gamma;
    cfg.k1 = args.k1;
    cfg.b = args.b;
    const char* provenance = "default, not estimated";
    if (args.epsilon_set) {
        cfg.epsilon = args.epsilon;
        cfg.epsilon_estimated = false;
        provenance = "set by flag";
    } else if (!pairs.empty()) {
        cfg.epsilon = estimate_epsilon(pairs, table);
        cfg.epsilon_estimated = true;
        provenance = "estimated from synonym pairs";
    }

    Index index = build_index(corpus, table, cfg);
    save_index(index, args.index_dir);

    std::printf("indexed %zu documents into %s\n", corpus.size(), args.index_dir.c_str());
    std::printf("vocabulary size: %zu\n", index.clusters.word_to_cluster.size());
    std::printf("clusters: %zu\n", index.clusters.size());
    std::printf("epsilon: %.6f (%s)\n", cfg.epsilon, provenance);
    return 0;
}

int cmd_search(const SearchArgs& args) {
    Index index = load_index(args.index_dir);

    // The manifest is authoritative; explicit overrides must agree with it so
    // runs stay comparable.
    if (args.epsilon_set && args.epsilon != index.manifest.epsilon)
        throw ConfigError("search: --epsilon disagrees with the index manifest");
    if (args.gamma_set && args.gamma != index.manifest.gamma)
        throw ConfigError("search: --gamma disagrees with the index manifest");
    if (args.k1_set && args.k1 != index.manifest.k1)
        throw ConfigError("search: --k1 disagrees with the index manifest");
    if (args.b_set && args.b != index.manifest.b)
        throw ConfigError("search: --b disagrees with the index manifest");

    QueryConfig cfg = make_query_config(index);
    cfg.k = args.k;
    cfg.fusion_n = args.fusion_n;

    std::vector<Query> queries = read_queries(args.queries);
    std::sort(queries.begin(), queries.end(),
              [](const Query& a, const Query& b) { return a.id < b.id; });

    bool needs_embeddings = args.system != "bm25";
    EmbeddingTable table;
    std::vector<Document> corpus;
    if (args.system == "avg-baseline") {
        if (args.corpus.empty())
            throw ConfigError("search: --corpus is required for system avg-baseline");
        corpus = read_corpus(args.corpus);
    }
    if (needs_embeddings) {
        if (args.embeddings.empty())
            throw ConfigError("search: --embeddings is required for system " + args.system);
        std::unordered_set<std::string> filter;
        if (!corpus.empty()) filter = collect_surfaces(corpus, index.pipeline);
        add_query_surfaces(queries, index.pipeline, filter);
        table = load_embeddings(args.embeddings, &filter);
    }

    std::vector<RunEntry> entries;
    if (args.system == "avg-baseline") {
        AvgBaseline baseline = AvgBaseline::build(corpus, table, index.pipeline);
        for (const Query& q : queries) {
            auto run = to_run_entries(baseline.search(q, table, cfg));
            entries.insert(entries.end(), run.begin(), run.end());
        }
    } else {
        for (const Query& q : queries) {
            ScoredList list;
            if (args.system == "semantic") {
                list = search_semantic(q, index, table, cfg);
            } else if (args.system == "bm25") {
                list = search_bm25(q, index, cfg);
            } else {
                list = search_combined(q, index, table, cfg);
            }
            auto run = to_run_entries(list);
            entries.insert(entries.end(), run.begin(), run.end());
        }
    }
    write_run(entries, args.output);
    std::printf("wrote %zu result lines for %zu queries to %s\n", entries.size(),
                queries.size(), args.output.c_str());
    return 0;
}

json report_to_json(const MetricsReport& report) {
    json per_query = json::object();
    for (const auto& [qid, m] : report.per_query) {
        json p_at = json::object(), r_at = json::object();
        for (const auto& [k, v] : m.p_at) p_at[std::to_string(k)] = v;
        for (const auto& [k, v] : m.r_at) r_at[std::to_string(k)] = v;
        per_query[qid] = {{"ap", m.ap},       {"r_prec", m.r_prec},
                          {"rr", m.rr},       {"p_at", p_at},
                          {"r_at", r_at},     {"relevant", m.relevant_total}};
    }
    json p_at = json::object(), r_at = json::object();
    for (const auto& [k, v] : report.mean_p_at) p_at[std::to_string(k)] = v;
    for (const auto& [k, v] : report.mean_r_at) r_at[std::to_string(k)] = v;
    return {{"query_count", report.query_count},
            {"skipped_queries", report.skipped},
            {"map", report.map},
            {"r_prec", report.mean_r_prec},
            {"mrr", report.mrr},
            {"p_at", p_at},
            {"r_at", r_at},
            {"per_query", per_query}};
}

int cmd_evaluate(const EvaluateArgs& args) {
    RunsByQuery runs = group_run(read_run(args.run));
    Qrels qrels = read_qrels(args.qrels);
    MetricsReport report = evaluate_run(runs, qrels, args.k_values);

    std::printf("queries evaluated: %d\n", report.query_count);
    std::printf("queries skipped:   %d\n", report.skipped);
    std::printf("%-8s %.4f\n", "MAP", report.map);
    std::printf("%-8s %.4f\n", "R-Prec", report.mean_r_prec);
    std::printf("%-8s %.4f\n", "MRR", report.mrr);
    for (const auto& [k, v] : report.mean_p_at)
        std::printf("P@%-6d %.4f\n", k, v);
    for (const auto& [k, v] : report.mean_r_at)
        std::printf("R@%-6d %.4f\n", k, v);

    if (!args.json_out.empty())
        atomic_write(args.json_out, report_to_json(report).dump(2) + "\n");
    return 0;
}

double metric_value(const QueryMetrics& m, const std::string& metric, int k) {
    if (metric == "ap") return m.ap;
    if (metric == "rprec") return m.r_prec;
    if (metric == "rr") return m.rr;
    if (metric.rfind("p@", 0) == 0) return m.p_at.at(k);
    return m.r_at.at(k);
}

int cmd_compare(const CompareArgs& args) {
    std::string metric = args.metric;
    int k = 0;
    bool needs_k = metric.rfind("p@", 0) == 0 || metric.rfind("r@", 0) == 0;
    if (needs_k) {
        try {
            k = std::stoi(metric.substr(2));
        } catch (const std::exception&) {
            throw ConfigError("compare: malformed metric '" + metric + "'");
        }
        if (k < 1) throw ConfigError("compare: cutoff must be >= 1 in '" + metric + "'");
    } else if (metric != "ap" && metric != "rprec" && metric != "rr") {
        throw ConfigError("compare: unknown metric '" + metric +
                          "' (expected ap, rprec, rr, p@K or r@K)");
    }

    Qrels qrels = read_qrels(args.qrels);
    std::vector<int> ks = needs_k ? std::vector<int>{k} : std::vector<int>{};
    MetricsReport a = evaluate_run(group_run(read_run(args.run_a)), qrels, ks);
    MetricsReport b = evaluate_run(group_run(read_run(args.run_b)), qrels, ks);

    std::vector<double> series_a, series_b;
    for (const auto& [qid, m] : a.per_query) {
        auto it = b.per_query.find(qid);
        if (it == b.per_query.end()) continue;
        series_a.push_back(metric_value(m, metric, k));
        series_b.push_back(metric_value(it->second, metric, k));
    }
    if (series_a.size() < 2)
        throw ValidationError("compare: fewer than 2 queries shared by both runs");

    TTestResult res = paired_t_test(series_a, series_b);
    std::printf("metric:    %s over %zu queries\n", metric.c_str(), series_a.size());
    std::printf("mean diff: %+.6f\n", res.mean_diff);
    if (res.no_difference) {
        std::printf("no difference (all paired differences are zero)\n");
    } else {
        std::printf("t:         %.6f\n", res.t);
        std::printf("df:        %d\n", res.df);
        std::printf("p (two-sided): %.6f\n", res.p);
    }
    return 0;
}

int cmd_reformulate(const ReformulateArgs& args) {
    std::vector<Query> queries = read_queries(args.queries);
    SynonymLexicon lexicon = read_lexicon(args.lexicon);
    std::vector<Query> rewritten = reformulate_queries(queries, lexicon, args.p, args.seed);
    write_queries(rewritten, args.output);
    std::printf("wrote %zu reformulated queries to %s\n", rewritten.size(),
                args.output.c_str());
    return 0;
}

int cmd_cluster_stats(const std::string& index_dir) {
    Index index = load_index(index_dir);
    std::size_t total = index.clusters.size();
    std::size_t singletons = 0;
    std::map<std::size_t, int> histogram;
    double dist_sum = 0.0;
    long dist_count = 0;
    for (const Cluster& c : index.clusters.clusters) {
        if (c.singleton) ++singletons;
        ++histogram[c.words.size()];
        if (!c.singleton) {
            for (double d : c.dists) {
                dist_sum += d;
                ++dist_count;
            }
        }
    }
    std::printf("clusters: %zu\n", total);
    std::printf("words:    %zu\n", index.clusters.word_to_cluster.size());
    std::printf("singleton fraction: %.4f\n",
                total > 0 ? static_cast<double>(singletons) / total : 0.0);
    std::printf("mean intra-cluster centroid distance: %.6f\n",
                dist_count > 0 ? dist_sum / dist_count : 0.0);
    std::printf("size histogram:\n");
    for (const auto& [size, count] : histogram)
        std::printf("  %zu-word clusters: %d\n", size, count);
    return 0;
}

int cmd_estimate_epsilon(const std::string& embeddings, const std::string& pairs_path) {
    auto pairs = read_synonym_pairs(pairs_path);
    std::unordered_set<std::string> filter;
    for (const auto& [a, b] : pairs) {
        filter.insert(a);
        filter.insert(b);
    }
    EmbeddingTable table = load_embeddings(embeddings, &filter);
    double eps = estimate_epsilon(pairs, table);
    std::printf("epsilon: %.6f (mean cosine distance over %zu pairs)\n", eps,
                pairs.size());
    return 0;
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const ParseError*>(&e)) return kExitParse;
    if (dynamic_cast<const IoError*>(&e)) return kExitIo;
    if (dynamic_cast<const CorruptIndexError*>(&e)) return kExitIo;
    return kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"clusterir: semantic cluster retrieval engine"};
    app.require_subcommand(1);
    const char* env_config = std::getenv("CLUSTERIR_CONFIG");
    app.set_config("--config", env_config ? env_config : "",
                   "configuration file; command-line flags win on conflict");
    app.allow_config_extras(false);

    IndexArgs index_args;
    auto* index_cmd = app.add_subcommand("index", "build and save an index");
    index_cmd->add_option("--embeddings", index_args.embeddings, "word-vector file")
        ->required();
    index_cmd->add_option("--corpus", index_args.corpus, "JSONL corpus file")->required();
    index_cmd->add_option("--index-dir", index_args.index_dir, "output directory")
        ->required();
    index_cmd->add_option("--stopwords", index_args.stopwords, "stopword file");
    index_cmd->add_option("--gazetteer", index_args.gazetteer, "named-entity list");
    index_cmd->add_option("--synonym-pairs", index_args.synonym_pairs,
                          "pair file for epsilon estimation");
    index_cmd->add_option("--epsilon", index_args.epsilon, "membership threshold override")
        ->check(CLI::Range(1e-9, 1.0));
    index_cmd->add_option("--gamma", index_args.gamma, "maximum query cluster weight")
        ->check(CLI::PositiveNumber);
    index_cmd->add_option("--k1", index_args.k1, "bm25 k1");
    index_cmd->add_option("--b", index_args.b, "bm25 b");
    index_cmd->add_option("--rw-threshold", index_args.rw_threshold,
                          "rare-word document frequency threshold");

    SearchArgs search_args;
    auto* search_cmd = app.add_subcommand("search", "rank documents for a query file");
    search_cmd->add_option("--index-dir", search_args.index_dir, "index directory")
        ->required();
    search_cmd->add_option("--queries", search_args.queries, "TSV query file")->required();
    search_cmd->add_option("--output", search_args.output, "run file to write")->required();
    search_cmd
        ->add_option("--system", search_args.system,
                     "one of semantic, bm25, combined, avg-baseline")
        ->required()
        ->check(CLI::IsMember({"semantic", "bm25", "combined", "avg-baseline"}));
    search_cmd->add_option("--embeddings", search_args.embeddings, "word-vector file");
    search_cmd->add_option("--corpus", search_args.corpus,
                           "JSONL corpus (avg-baseline only)");
    search_cmd->add_option("--k", search_args.k, "result depth")->check(CLI::PositiveNumber);
    search_cmd->add_option("--fusion-n", search_args.fusion_n, "fusion candidate depth")
        ->check(CLI::PositiveNumber);
    search_cmd->add_option("--epsilon", search_args.epsilon, "must match the manifest");
    search_cmd->add_option("--gamma", search_args.gamma, "must match the manifest");
    search_cmd->add_option("--k1", search_args.k1, "must match the manifest");
    search_cmd->add_option("--b", search_args.b, "must match the manifest");

    EvaluateArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "score a run file against qrels");
    eval_cmd->add_option("--run", eval_args.run, "run file")->required();
    eval_cmd->add_option("--qrels", eval_args.qrels, "qrels file")->required();
    eval_cmd->add_option("--k-values", eval_args.k_values, "P@k / R@k cutoffs");
    eval_cmd->add_option("--json-out", eval_args.json_out, "machine-readable report path");

    CompareArgs compare_args;
    auto* compare_cmd =
        app.add_subcommand("compare", "paired t-test between two runs");
    compare_cmd->add_option("--run-a", compare_args.run_a, "first run file")->required();
    compare_cmd->add_option("--run-b", compare_args.run_b, "second run file")->required();
    compare_cmd->add_option("--qrels", compare_args.qrels, "qrels file")->required();
    compare_cmd->add_option("--metric", compare_args.metric,
                            "per-query series: ap, rprec, rr, p@K or r@K");

    ReformulateArgs reform_args;
    auto* reform_cmd =
        app.add_subcommand("reformulate", "randomly replace query words with synonyms");
    reform_cmd->add_option("--queries", reform_args.queries, "TSV query file")->required();
    reform_cmd->add_option("--lexicon", reform_args.lexicon, "synonym lexicon JSON")
        ->required();
    reform_cmd->add_option("--p", reform_args.p, "replacement probability")
        ->required()
        ->check(CLI::Range(0.0, 1.0));
    reform_cmd->add_option("--seed", reform_args.seed, "random seed");
    reform_cmd->add_option("--output", reform_args.output, "output query file")->required();

    std::string stats_dir;
    auto* stats_cmd = app.add_subcommand("cluster-stats", "summarize a saved cluster set");
    stats_cmd->add_option("--index-dir", stats_dir, "index directory")->required();

    std::string est_embeddings, est_pairs;
    auto* est_cmd =
        app.add_subcommand("estimate-epsilon", "mean cosine distance over synonym pairs");
    est_cmd->add_option("--embeddings", est_embeddings, "word-vector file")->required();
    est_cmd->add_option("--synonym-pairs", est_pairs, "pair file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    index_args.epsilon_set = index_cmd->count("--epsilon") > 0;
    search_args.epsilon_set = search_cmd->count("--epsilon") > 0;
    search_args.gamma_set = search_cmd->count("--gamma") > 0;
    search_args.k1_set = search_cmd->count("--k1") > 0;
    search_args.b_set = search_cmd->count("--b") > 0;

    try {
        if (index_cmd->parsed()) return cmd_index(index_args);
        if (search_cmd->parsed()) return cmd_search(search_args);
        if (eval_cmd->parsed()) return cmd_evaluate(eval_args);
        if (compare_cmd->parsed()) return cmd_compare(compare_args);
        if (reform_cmd->parsed()) return cmd_reformulate(reform_args);
        if (stats_cmd->parsed()) return cmd_cluster_stats(stats_dir);
        if (est_cmd->parsed()) return cmd_estimate_epsilon(est_embeddings, est_pairs);
    } catch (const Error& e) {
        std::cerr << "clusterir: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "clusterir: internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
