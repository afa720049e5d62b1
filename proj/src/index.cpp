#include "clusterir/index.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "clusterir/error.hpp"
#include "clusterir/vec_math.hpp"

namespace clusterir {

namespace {

DocTerms make_doc_terms(const Document& doc, const PipelineConfig& pipeline) {
    std::vector<Token> tokens = document_tokens(doc, pipeline);
    DocTerms dt;
    dt.id = doc.id;
    dt.len = static_cast<int>(tokens.size());
    for (const Token& t : tokens) ++dt.tf[t.surface];
    return dt;
}

void recompute_stats(Index& index) {
    CorpusStats stats;
    stats.n_docs = static_cast<int>(index.docs.size());
    long total_len = 0;
    for (const DocTerms& d : index.docs) {
        stats.doc_len[d.id] = d.len;
        total_len += d.len;
        std::set<int> touched;
        for (const auto& [surface, tf] : d.tf) {
            ++stats.term_df[surface];
            if (auto cid = index.clusters.cluster_of(surface)) touched.insert(*cid);
        }
        for (int cid : touched) ++stats.cluster_df[cid];
    }
    stats.avg_doc_len =
        stats.n_docs > 0 ? static_cast<double>(total_len) / stats.n_docs : 0.0;
    index.stats = std::move(stats);
}

void recompute_vectors_and_postings(Index& index) {
    index.doc_vectors.clear();
    index.cluster_postings.clear();
    index.term_postings.clear();
    index.doc_vectors.reserve(index.docs.size());
    for (std::size_t i = 0; i < index.docs.size(); ++i) {
        const DocTerms& d = index.docs[i];
        DocVector dv = build_doc_vector(d, index.clusters, index.stats);
        for (const auto& [cid, alpha] : dv.weights)
            index.cluster_postings[cid].emplace_back(static_cast<int>(i), alpha);
        for (const auto& [surface, tf] : d.tf)
            index.term_postings[surface].emplace_back(static_cast<int>(i), tf);
        index.doc_vectors.push_back(std::move(dv));
    }
}

// New surfaces of one document, in the deterministic insertion order used by
// the full build: term frequency descending, then surface.
std::vector<std::string> new_surfaces_in_order(const DocTerms& dt, const ClusterSet& cs) {
    std::vector<std::string> fresh;
    for (const auto& [surface, tf] : dt.tf) {
        if (!cs.contains(surface)) fresh.push_back(surface);
    }
    std::sort(fresh.begin(), fresh.end(), [&](const std::string& a, const std::string& b) {
        int ta = dt.tf.at(a), tb = dt.tf.at(b);
        if (ta != tb) return ta > tb;
        return a < b;
    });
    return fresh;
}

} // namespace

int Index::doc_ordinal(const std::string& doc_id) const {
    auto it = doc_pos.find(doc_id);
    if (it == doc_pos.end())
        throw LookupError("index: unknown document id '" + doc_id + "'");
    return it->second;
}

int cluster_frequency(const DocTerms& doc, const Cluster& c) {
    int f = 0;
    for (const std::string& w : c.words) {
        auto it = doc.tf.find(w);
        if (it != doc.tf.end()) f += it->second;
    }
    return f;
}

double cluster_coverage(const DocTerms& doc, const Cluster& c) {
    if (c.words.empty())
        throw DomainError("cluster_coverage: empty cluster");
    int present = 0;
    for (const std::string& w : c.words) {
        if (doc.tf.count(w)) ++present;
    }
    return static_cast<double>(present) / static_cast<double>(c.words.size());
}

double cluster_weight(const DocTerms& doc, const Cluster& c, const CorpusStats& stats) {
    int f = cluster_frequency(doc, c);
    if (f == 0 || stats.n_docs <= 0) return 0.0;
    auto it = stats.cluster_df.find(c.id);
    int n_i = it == stats.cluster_df.end() ? 0 : it->second;
    double idf = std::log(static_cast<double>(stats.n_docs) / (n_i + 1.0));
    if (idf <= 0.0) return 0.0;
    return cluster_coverage(doc, c) * std::log(1.0 + f) * idf;
}

DocVector build_doc_vector(const DocTerms& doc, const ClusterSet& cs,
                           const CorpusStats& stats) {
    DocVector dv;
    dv.doc_id = doc.id;
    std::set<int> touched;
    for (const auto& [surface, tf] : doc.tf) {
        if (auto cid = cs.cluster_of(surface)) touched.insert(*cid);
    }
    for (int cid : touched) {
        double alpha = cluster_weight(doc, cs.clusters[cid], stats);
        if (alpha > 0.0) dv.weights[cid] = alpha;
    }
    double sq = 0.0;
    for (const auto& [cid, alpha] : dv.weights) sq += alpha * alpha;
    dv.norm = std::sqrt(sq);
    return dv;
}

Index build_index(const std::vector<Document>& corpus, const EmbeddingTable& table,
                  const IndexConfig& cfg) {
    Index index;
    index.manifest.format_version = 1;
    index.manifest.epsilon = cfg.epsilon;
    index.manifest.epsilon_estimated = cfg.epsilon_estimated;
    index.manifest.gamma = cfg.gamma;
    index.manifest.k1 = cfg.k1;
    index.manifest.b = cfg.b;
    index.manifest.rw_threshold = cfg.pipeline.rw_threshold;
    index.pipeline = cfg.pipeline;

    for (const Document& doc : corpus) {
        if (doc.id.empty())
            throw ValidationError("index: empty document id");
        if (!index.doc_pos.emplace(doc.id, static_cast<int>(index.docs.size())).second)
            throw ValidationError("index: duplicate document id '" + doc.id + "'");
        index.docs.push_back(make_doc_terms(doc, cfg.pipeline));
    }

    Vocabulary vocab = build_vocabulary(corpus, cfg.pipeline);
    index.clusters = build_clusters(vocab, table, ClusterConfig{cfg.epsilon});
    recompute_stats(index);
    recompute_vectors_and_postings(index);
    return index;
}

void add_document(Index& index, const Document& doc, const EmbeddingTable& table) {
    if (doc.id.empty())
        throw ValidationError("index: empty document id");
    if (index.doc_pos.count(doc.id))
        throw ValidationError("index: duplicate document id '" + doc.id + "'");

    std::vector<Token> tokens = document_tokens(doc, index.pipeline);
    DocTerms dt;
    dt.id = doc.id;
    dt.len = static_cast<int>(tokens.size());
    for (const Token& t : tokens) ++dt.tf[t.surface];

    // Label new surfaces the way a full rebuild would: NE on any NE-labeled
    // occurrence, RW by document frequency (a fresh surface has df = 1).
    std::set<std::string> ne;
    for (const Token& t : tokens) {
        bool explicit_ne = doc.tokens.has_value() && t.label == Label::NamedEntity;
        bool heuristic_ne =
            !doc.tokens.has_value() &&
            ((t.position > 0 && !t.original.empty() && t.original[0] >= 'A' &&
              t.original[0] <= 'Z') ||
             index.pipeline.gazetteer.count(t.surface) > 0);
        if (explicit_ne || heuristic_ne) ne.insert(t.surface);
    }
    for (const std::string& surface : new_surfaces_in_order(dt, index.clusters)) {
        WordInsert w;
        w.surface = surface;
        if (ne.count(surface)) {
            w.label = Label::NamedEntity;
        } else if (1 <= index.pipeline.rw_threshold) {
            w.label = Label::RareWord;
        } else {
            w.label = Label::Plain;
        }
        w.vector = table.find(surface);
        insert_word(index.clusters, w, index.manifest.epsilon);
    }

    index.doc_pos[dt.id] = static_cast<int>(index.docs.size());
    index.docs.push_back(std::move(dt));

    // The idf factors depend on the corpus size, so every vector is refreshed.
    recompute_stats(index);
    recompute_vectors_and_postings(index);
}

double bm25_score(const std::vector<std::string>& query_terms,
                  const std::string& doc_id, const Index& index) {
    int ordinal = index.doc_ordinal(doc_id);
    const DocTerms& d = index.docs[ordinal];
    const CorpusStats& stats = index.stats;
    double k1 = index.manifest.k1;
    double b = index.manifest.b;
    double len_ratio = stats.avg_doc_len > 0.0 ? d.len / stats.avg_doc_len : 0.0;
    double norm = k1 * (1.0 - b + b * len_ratio);
    double score = 0.0;
    for (const std::string& t : query_terms) {
        auto it = d.tf.find(t);
        if (it == d.tf.end()) continue;
        double tf = it->second;
        auto df_it = stats.term_df.find(t);
        double df = df_it == stats.term_df.end() ? 0.0 : df_it->second;
        double idf = std::log(1.0 + (stats.n_docs - df + 0.5) / (df + 0.5));
        score += idf * tf * (k1 + 1.0) / (tf + norm);
    }
    return score;
}

} // namespace clusterir
