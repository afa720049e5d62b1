#include "clusterir/search.hpp"

#include <algorithm>
#include <cmath>

#include "clusterir/error.hpp"
#include "clusterir/vec_math.hpp"

namespace clusterir {

namespace {

double sparse_norm(const std::map<int, double>& weights) {
    double sq = 0.0;
    for (const auto& [id, w] : weights) sq += w * w;
    return std::sqrt(sq);
}

void rank_and_truncate(ScoredList& list, std::vector<ScoredDoc>&& candidates, int k) {
    std::sort(candidates.begin(), candidates.end(),
              [](const ScoredDoc& a, const ScoredDoc& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.doc_id < b.doc_id;
              });
    if (k >= 0 && static_cast<int>(candidates.size()) > k) candidates.resize(k);
    for (std::size_t i = 0; i < candidates.size(); ++i)
        candidates[i].rank = static_cast<int>(i) + 1;
    list.entries = std::move(candidates);
}

std::vector<Token> query_tokens(const Query& query, const Index& index) {
    std::vector<Token> tokens =
        tokenize(preprocess(query.text), index.pipeline.stopwords);
    const auto& term_df = index.stats.term_df;
    annotate(
        tokens, index.pipeline.gazetteer,
        [&term_df](const std::string& s) {
            auto it = term_df.find(s);
            return it == term_df.end() ? 0 : it->second;
        },
        index.pipeline.rw_threshold);
    return tokens;
}

} // namespace

QueryConfig make_query_config(const Index& index) {
    QueryConfig cfg;
    cfg.gamma = index.manifest.gamma;
    cfg.epsilon = index.manifest.epsilon;
    return cfg;
}

std::optional<double> cluster_proximity(const Vec& centroid, const Vec& word_vec,
                                        double epsilon) {
    double d = cosine_distance(centroid, word_vec);
    if (d <= epsilon) return d;
    return std::nullopt;
}

double proximity_weight(double distance, double gamma, double epsilon) {
    if (!(distance >= 0.0 && distance <= epsilon))
        throw DomainError("proximity_weight: distance outside [0, epsilon]");
    // Parenthesized so the endpoints come out exact: f(0) = gamma, f(eps) = 0.
    return gamma * ((epsilon - distance) / epsilon);
}

double query_cluster_weight(const Token& w, const Vec* word_vec, const Cluster& c,
                            const QueryConfig& cfg) {
    if (std::find(c.words.begin(), c.words.end(), w.surface) != c.words.end())
        return cfg.gamma;
    if (c.singleton || !c.has_centroid()) return 0.0;
    if (w.label == Label::NamedEntity) return 0.0;
    if (!word_vec) return 0.0;
    auto d = cluster_proximity(c.centroid, *word_vec, cfg.epsilon);
    if (!d) return 0.0;
    return proximity_weight(*d, cfg.gamma, cfg.epsilon);
}

QueryVector build_query_vector(const Query& query, const Index& index,
                               const EmbeddingTable& table, const QueryConfig& cfg) {
    QueryVector qv;
    qv.query_id = query.id;
    for (const Token& t : query_tokens(query, index)) {
        // Exact membership: clusters are disjoint, so at most one cluster
        // holds the surface.
        auto member = index.clusters.cluster_of(t.surface);
        if (member) qv.weights[*member] += cfg.gamma;
        if (t.label == Label::NamedEntity) continue;
        const Vec* wvec = table.find(t.surface);
        if (!wvec) continue;
        for (const Cluster& c : index.clusters.clusters) {
            if (member && c.id == *member) continue;
            if (c.singleton || !c.has_centroid()) continue;
            auto d = cluster_proximity(c.centroid, *wvec, cfg.epsilon);
            if (!d) continue;
            double w = proximity_weight(*d, cfg.gamma, cfg.epsilon);
            if (w > 0.0) qv.weights[c.id] += w;
        }
    }
    return qv;
}

double rsv_cosine(const DocVector& dvec, const QueryVector& qvec) {
    if (dvec.weights.empty() || qvec.weights.empty()) return 0.0;
    double dn = dvec.norm;
    double qn = sparse_norm(qvec.weights);
    if (dn == 0.0 || qn == 0.0) return 0.0;
    double dot = 0.0;
    auto di = dvec.weights.begin();
    auto qi = qvec.weights.begin();
    while (di != dvec.weights.end() && qi != qvec.weights.end()) {
        if (di->first == qi->first) {
            dot += di->second * qi->second;
            ++di;
            ++qi;
        } else if (di->first < qi->first) {
            ++di;
        } else {
            ++qi;
        }
    }
    return std::min(1.0, dot / (dn * qn));
}

ScoredList search_semantic(const Query& query, const Index& index,
                           const EmbeddingTable& table, const QueryConfig& cfg) {
    ScoredList out;
    out.query_id = query.id;
    out.tag = "semantic";
    QueryVector qv = build_query_vector(query, index, table, cfg);
    if (qv.weights.empty()) return out;
    double qn = sparse_norm(qv.weights);
    if (qn == 0.0) return out;

    std::vector<double> acc(index.docs.size(), 0.0);
    for (const auto& [cid, qw] : qv.weights) {
        auto it = index.cluster_postings.find(cid);
        if (it == index.cluster_postings.end()) continue;
        for (const auto& [doc, alpha] : it->second) acc[doc] += qw * alpha;
    }
    std::vector<ScoredDoc> candidates;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (acc[i] <= 0.0) continue;
        double dn = index.doc_vectors[i].norm;
        if (dn == 0.0) continue;
        candidates.push_back({index.docs[i].id, std::min(1.0, acc[i] / (dn * qn)), 0});
    }
    rank_and_truncate(out, std::move(candidates), cfg.k);
    return out;
}

ScoredList search_bm25(const Query& query, const Index& index, const QueryConfig& cfg) {
    ScoredList out;
    out.query_id = query.id;
    out.tag = "bm25";
    std::vector<Token> tokens =
        tokenize(preprocess(query.text), index.pipeline.stopwords);
    if (tokens.empty() || index.docs.empty()) return out;

    const CorpusStats& stats = index.stats;
    double k1 = index.manifest.k1;
    double b = index.manifest.b;
    std::vector<double> acc(index.docs.size(), 0.0);
    for (const Token& t : tokens) {
        auto postings = index.term_postings.find(t.surface);
        if (postings == index.term_postings.end()) continue;
        double df = static_cast<double>(postings->second.size());
        double idf = std::log(1.0 + (stats.n_docs - df + 0.5) / (df + 0.5));
        for (const auto& [doc, tf] : postings->second) {
            double len_ratio =
                stats.avg_doc_len > 0.0 ? index.docs[doc].len / stats.avg_doc_len : 0.0;
            double norm = k1 * (1.0 - b + b * len_ratio);
            acc[doc] += idf * tf * (k1 + 1.0) / (tf + norm);
        }
    }
    std::vector<ScoredDoc> candidates;
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (acc[i] > 0.0) candidates.push_back({index.docs[i].id, acc[i], 0});
    }
    rank_and_truncate(out, std::move(candidates), cfg.k);
    return out;
}

std::vector<double> normalize_bm25(const std::vector<double>& scores, double sem_min,
                                   double sem_max) {
    if (scores.empty())
        throw DomainError("normalize_bm25: empty score list");
    if (sem_min > sem_max)
        throw DomainError("normalize_bm25: sem_min exceeds sem_max");
    auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    double lo = *lo_it, hi = *hi_it;
    std::vector<double> out;
    out.reserve(scores.size());
    if (hi == lo) {
        double mid = (sem_min + sem_max) / 2.0;
        out.assign(scores.size(), mid);
        return out;
    }
    double scale = (sem_max - sem_min) / (hi - lo);
    for (double s : scores) out.push_back(sem_min + (s - lo) * scale);
    return out;
}

ScoredList fuse(const ScoredList& semantic, const ScoredList& lexical, int n) {
    if (n < 1)
        throw DomainError("fuse: candidate depth must be >= 1");
    struct Ranked {
        int sem_rank, lex_rank;
        double sem_score, lex_score;
    };
    std::map<std::string, Ranked> docs;
    auto absent = Ranked{n + 1, n + 1, 0.0, 0.0};
    for (int i = 0; i < static_cast<int>(semantic.entries.size()) && i < n; ++i) {
        const ScoredDoc& e = semantic.entries[i];
        auto [it, _] = docs.emplace(e.doc_id, absent);
        it->second.sem_rank = i + 1;
        it->second.sem_score = e.score;
    }
    for (int i = 0; i < static_cast<int>(lexical.entries.size()) && i < n; ++i) {
        const ScoredDoc& e = lexical.entries[i];
        auto [it, _] = docs.emplace(e.doc_id, absent);
        it->second.lex_rank = i + 1;
        it->second.lex_score = e.score;
    }

    ScoredList out;
    out.query_id = semantic.query_id.empty() ? lexical.query_id : semantic.query_id;
    out.tag = "combined";
    std::vector<ScoredDoc> candidates;
    for (const auto& [doc_id, r] : docs) {
        double sem_factor = std::max(0.0, static_cast<double>(n - r.sem_rank));
        double lex_factor = std::max(0.0, static_cast<double>(n - r.lex_rank));
        double score =
            sem_factor * r.sem_score + lex_factor * std::log(1.0 + r.lex_score);
        candidates.push_back({doc_id, score, 0});
    }
    rank_and_truncate(out, std::move(candidates), -1);
    return out;
}

ScoredList search_combined(const Query& query, const Index& index,
                           const EmbeddingTable& table, const QueryConfig& cfg) {
    QueryConfig deep = cfg;
    deep.k = cfg.fusion_n;
    ScoredList sem = search_semantic(query, index, table, deep);
    ScoredList lex = search_bm25(query, index, deep);
    if (!lex.entries.empty()) {
        // The lexical scores are mapped onto the semantic score interval; with
        // no semantic results the unit interval stands in so the combination
        // degrades to the bm25 ordering.
        double sem_max = 1.0, sem_min = 0.0;
        if (!sem.entries.empty()) {
            sem_max = sem.entries.front().score;
            sem_min = sem.entries.back().score;
        }
        std::vector<double> raw;
        raw.reserve(lex.entries.size());
        for (const ScoredDoc& e : lex.entries) raw.push_back(e.score);
        std::vector<double> normalized = normalize_bm25(raw, sem_min, sem_max);
        for (std::size_t i = 0; i < lex.entries.size(); ++i)
            lex.entries[i].score = normalized[i];
    }
    ScoredList fused = fuse(sem, lex, cfg.fusion_n);
    fused.query_id = query.id;
    if (cfg.k >= 0 && static_cast<int>(fused.entries.size()) > cfg.k)
        fused.entries.resize(cfg.k);
    return fused;
}

Vec avg_vector(const std::vector<Token>& tokens, const EmbeddingTable& table,
               int n_docs, const std::map<std::string, int>& term_df) {
    if (table.dim <= 0 || n_docs <= 0) return {};
    std::map<std::string, int> tf;
    for (const Token& t : tokens) ++tf[t.surface];
    Vec sum(table.dim, 0.0);
    double weight_sum = 0.0;
    for (const auto& [surface, f] : tf) {
        const Vec* v = table.find(surface);
        if (!v) continue;
        auto it = term_df.find(surface);
        double df = it == term_df.end() ? 0.0 : it->second;
        double idf = std::max(0.0, std::log(n_docs / (1.0 + df)));
        double w = f * idf;
        if (w <= 0.0) continue;
        for (int i = 0; i < table.dim; ++i) sum[i] += w * (*v)[i];
        weight_sum += w;
    }
    if (weight_sum == 0.0) return {};
    for (double& x : sum) x /= weight_sum;
    if (is_zero_vector(sum)) return {};
    return sum;
}

AvgBaseline AvgBaseline::build(const std::vector<Document>& corpus,
                               const EmbeddingTable& table, const PipelineConfig& cfg) {
    AvgBaseline base;
    base.pipeline = cfg;
    base.n_docs = static_cast<int>(corpus.size());
    std::vector<std::vector<Token>> all_tokens;
    all_tokens.reserve(corpus.size());
    for (const Document& doc : corpus) {
        all_tokens.push_back(document_tokens(doc, cfg));
        std::map<std::string, int> seen;
        for (const Token& t : all_tokens.back()) seen[t.surface] = 1;
        for (const auto& [surface, one] : seen) base.term_df[surface] += one;
    }
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        Vec v = avg_vector(all_tokens[i], table, base.n_docs, base.term_df);
        if (!v.empty()) base.doc_vectors.emplace_back(corpus[i].id, std::move(v));
    }
    return base;
}

ScoredList AvgBaseline::search(const Query& query, const EmbeddingTable& table,
                               const QueryConfig& cfg) const {
    ScoredList out;
    out.query_id = query.id;
    out.tag = "avg-baseline";
    std::vector<Token> tokens = tokenize(preprocess(query.text), pipeline.stopwords);
    Vec qvec = avg_vector(tokens, table, n_docs, term_df);
    if (qvec.empty()) return out;
    std::vector<ScoredDoc> candidates;
    for (const auto& [doc_id, dvec] : doc_vectors)
        candidates.push_back({doc_id, cosine(qvec, dvec), 0});
    rank_and_truncate(out, std::move(candidates), cfg.k);
    return out;
}

std::vector<RunEntry> to_run_entries(const ScoredList& list) {
    std::vector<RunEntry> out;
    out.reserve(list.entries.size());
    for (const ScoredDoc& e : list.entries)
        out.push_back({list.query_id, e.doc_id, e.rank, e.score, list.tag});
    return out;
}

} // namespace clusterir
