#include <doctest.h>

#include <cmath>
#include <random>

#include "clusterir/error.hpp"
#include "clusterir/index.hpp"
#include "clusterir/search.hpp"
#include "clusterir/vec_math.hpp"
#include "common/fixtures.hpp"
#include "common/oracles.hpp"

using namespace clusterir;

TEST_CASE("cluster_proximity returns the distance only within epsilon") {
    Vec u{1, 0}, v{1, 0};
    auto same = cluster_proximity(u, v, 0.5);
    REQUIRE(same.has_value());
    CHECK(*same == 0.0);

    Vec w{1, 0.1};
    double d = cosine_distance(u, w);
    auto boundary = cluster_proximity(u, w, d); // d == epsilon is included
    REQUIRE(boundary.has_value());
    CHECK(*boundary == d);
    CHECK_FALSE(cluster_proximity(u, w, d * 0.999).has_value());
    CHECK_THROWS_AS(cluster_proximity({0, 0}, v, 0.5), DomainError);
}

TEST_CASE("proximity_weight endpoints are exact") {
    const double gamma = 2.5, eps = 0.35;
    CHECK(proximity_weight(0.0, gamma, eps) == gamma);
    CHECK(proximity_weight(eps, gamma, eps) == 0.0);
    CHECK(proximity_weight(eps / 2.0, gamma, eps) == gamma / 2.0);
    CHECK_THROWS_AS(proximity_weight(-0.1, gamma, eps), DomainError);
    CHECK_THROWS_AS(proximity_weight(eps + 0.1, gamma, eps), DomainError);
}

namespace {

// Two synonym groups plus an entity and a rare word; epsilon 0.2.
struct QueryFixture {
    EmbeddingTable table;
    Index index;
    QueryConfig cfg;

    QueryFixture() {
        table.dim = 4;
        table.entries["cold"] = {1, 0, 0, 0};
        table.entries["chilly"] = {0.99, 0.141, 0, 0};
        table.entries["icy"] = {0.995, 0, 0.0999, 0};   // near "cold", not in corpus
        table.entries["warm"] = {0, 1, 0, 0};
        table.entries["hot"] = {0, 0.99, 0.141, 0};
        table.entries["paris"] = {0.999, 0.0447, 0, 0}; // NE, near "cold"
        table.entries["quux"] = {0, 0, 0, 1};           // rare word
        IndexConfig icfg;
        icfg.epsilon = 0.2;
        icfg.pipeline.rw_threshold = 1;
        icfg.pipeline.gazetteer = {"paris"};
        std::vector<Document> corpus{
            {"d1", "cold chilly cold quux", std::nullopt},
            {"d2", "warm hot warm", std::nullopt},
            {"d3", "cold warm paris", std::nullopt},
            {"d4", "chilly hot paris", std::nullopt},
        };
        index = build_index(corpus, table, icfg);
        cfg = make_query_config(index);
        cfg.k = 10;
    }

    const Cluster& cluster_of(const std::string& w) const {
        return index.clusters.clusters[index.clusters.word_to_cluster.at(w)];
    }
};

} // namespace

TEST_CASE("query_cluster_weight piecewise rule") {
    QueryFixture f;
    const double gamma = f.cfg.gamma;

    Token plain{"cold", "cold", Label::Plain, 1};
    const Vec* cold = f.table.find("cold");

    SUBCASE("exact membership pays gamma") {
        CHECK(query_cluster_weight(plain, cold, f.cluster_of("cold"), f.cfg) == gamma);
    }
    SUBCASE("soft match within epsilon pays the falloff") {
        Token icy{"icy", "icy", Label::Plain, 1};
        const Vec* v = f.table.find("icy");
        double d = cosine_distance(f.cluster_of("cold").centroid, *v);
        REQUIRE(d <= f.cfg.epsilon);
        double w = query_cluster_weight(icy, v, f.cluster_of("cold"), f.cfg);
        CHECK(w == proximity_weight(d, gamma, f.cfg.epsilon));
        CHECK(w > 0.0);
        // The same word pays nothing to a distant cluster.
        CHECK(query_cluster_weight(icy, v, f.cluster_of("warm"), f.cfg) == 0.0);
    }
    SUBCASE("boundary distance pays zero") {
        // A token exactly at distance epsilon from a fabricated centroid.
        Cluster c;
        c.id = 99;
        c.centroid = {1, 0, 0, 0};
        c.words = {"other"};
        double eps = cosine_distance(c.centroid, *f.table.find("chilly"));
        QueryConfig cfg = f.cfg;
        cfg.epsilon = eps;
        Token t{"chilly", "chilly", Label::Plain, 1};
        CHECK(query_cluster_weight(t, f.table.find("chilly"), c, cfg) == 0.0);
    }
    SUBCASE("singleton clusters match by surface only") {
        const Cluster& rare = f.cluster_of("quux");
        REQUIRE(rare.singleton);
        Token quux{"quux", "quux", Label::RareWord, 0};
        CHECK(query_cluster_weight(quux, f.table.find("quux"), rare, f.cfg) == gamma);
        // A plain word arbitrarily close to the singleton centroid pays zero.
        Token near{"cold", "cold", Label::Plain, 1};
        Cluster fake = rare;
        fake.centroid = *f.table.find("cold");
        CHECK(query_cluster_weight(near, cold, fake, f.cfg) == 0.0);
    }
    SUBCASE("NE query words never soft-match") {
        Token ne{"paris", "Paris", Label::NamedEntity, 1};
        const Vec* v = f.table.find("paris");
        REQUIRE(cosine_distance(f.cluster_of("cold").centroid, *v) <= f.cfg.epsilon);
        CHECK(query_cluster_weight(ne, v, f.cluster_of("cold"), f.cfg) == 0.0);
        CHECK(query_cluster_weight(ne, v, f.cluster_of("paris"), f.cfg) == gamma);
    }
    SUBCASE("words without vectors only match by surface") {
        Token ghost{"ghost", "ghost", Label::Plain, 1};
        CHECK(query_cluster_weight(ghost, nullptr, f.cluster_of("cold"), f.cfg) == 0.0);
    }
}

TEST_CASE("build_query_vector sums per-occurrence contributions") {
    QueryFixture f;
    CHECK(build_query_vector({"q0", ""}, f.index, f.table, f.cfg).weights.empty());

    QueryVector twice = build_query_vector({"q1", "cold cold"}, f.index, f.table, f.cfg);
    int cold_cluster = f.index.clusters.word_to_cluster.at("cold");
    CHECK(twice.weights.at(cold_cluster) == 2.0 * f.cfg.gamma);

    // An out-of-vocabulary word within epsilon of exactly one centroid puts
    // weight on that cluster only.
    QueryVector oov = build_query_vector({"q2", "icy"}, f.index, f.table, f.cfg);
    REQUIRE(oov.weights.size() == 1);
    CHECK(oov.weights.count(cold_cluster) == 1);
    CHECK(oov.weights.at(cold_cluster) > 0.0);
}

TEST_CASE("build_query_vector matches the dense oracle on a 20-cluster fixture") {
    fixtures::RandomScenario s = fixtures::make_random_scenario(61, 30, 25);
    Index index = build_index(s.corpus, s.table, s.config);
    REQUIRE(index.clusters.size() >= 20);
    QueryConfig cfg = make_query_config(index);
    for (const Query& q : s.queries) {
        QueryVector got = build_query_vector(q, index, s.table, cfg);
        std::vector<Token> tokens = tokenize(preprocess(q.text), s.config.pipeline.stopwords);
        annotate(
            tokens, s.config.pipeline.gazetteer,
            [&](const std::string& w) {
                auto it = index.stats.term_df.find(w);
                return it == index.stats.term_df.end() ? 0 : it->second;
            },
            s.config.pipeline.rw_threshold);
        auto dense = oracles::query_cluster_weights(tokens, index.clusters, s.table,
                                                    cfg.gamma, cfg.epsilon);
        REQUIRE(got.weights.size() == dense.size());
        for (const auto& [cid, w] : dense)
            CHECK(std::abs(got.weights.at(cid) - w) < 1e-12);
    }
}

TEST_CASE("rsv_cosine basics") {
    DocVector d;
    d.doc_id = "d";
    d.weights = {{1, 1.0}, {2, 1.0}};
    d.norm = std::sqrt(2.0);
    QueryVector q;
    q.weights = {{1, 1.0}};
    CHECK(std::abs(rsv_cosine(d, q) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(rsv_cosine(d, q) == doctest::Approx(0.70711).epsilon(1e-4));

    QueryVector prop;
    prop.weights = {{1, 3.0}, {2, 3.0}};
    CHECK(rsv_cosine(d, prop) == doctest::Approx(1.0).epsilon(1e-12));

    QueryVector disjoint;
    disjoint.weights = {{7, 1.0}};
    CHECK(rsv_cosine(d, disjoint) == 0.0);
    CHECK(rsv_cosine(DocVector{}, q) == 0.0);
    CHECK(rsv_cosine(d, QueryVector{}) == 0.0);
}

TEST_CASE("rsv_cosine range and scale invariance") {
    std::mt19937 rng(67);
    std::uniform_real_distribution<double> weight(0.01, 5.0);
    std::uniform_int_distribution<int> cid(0, 14);
    std::uniform_int_distribution<int> len(0, 6);
    std::uniform_real_distribution<double> scale(0.1, 20.0);
    for (int trial = 0; trial < 300; ++trial) {
        DocVector d;
        for (int i = len(rng); i > 0; --i) d.weights[cid(rng)] = weight(rng);
        double sq = 0;
        for (auto& [k, v] : d.weights) sq += v * v;
        d.norm = std::sqrt(sq);
        QueryVector q;
        for (int i = len(rng); i > 0; --i) q.weights[cid(rng)] = weight(rng);

        double r = rsv_cosine(d, q);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);

        double c = scale(rng);
        DocVector ds = d;
        for (auto& [k, v] : ds.weights) v *= c;
        ds.norm = 0;
        double s2 = 0;
        for (auto& [k, v] : ds.weights) s2 += v * v;
        ds.norm = std::sqrt(s2);
        CHECK(std::abs(rsv_cosine(ds, q) - r) < 1e-9);
    }
}

TEST_CASE("searches return empty lists when nothing matches") {
    QueryFixture f;
    Query nomatch{"q", "zzz yyy"};
    CHECK(search_semantic(nomatch, f.index, f.table, f.cfg).entries.empty());
    CHECK(search_bm25(nomatch, f.index, f.cfg).entries.empty());
    CHECK(search_combined(nomatch, f.index, f.table, f.cfg).entries.empty());
}

TEST_CASE("single-document corpus ranks it first on any term match") {
    EmbeddingTable table;
    table.dim = 2;
    IndexConfig cfg;
    cfg.pipeline.rw_threshold = 0;
    Index index = build_index({{"only", "alpha beta", std::nullopt}}, table, cfg);
    QueryConfig qcfg = make_query_config(index);
    ScoredList got = search_bm25({"q", "beta"}, index, qcfg);
    REQUIRE(got.entries.size() == 1);
    CHECK(got.entries[0].doc_id == "only");
    CHECK(got.entries[0].rank == 1);
}

TEST_CASE("semantic postings scoring equals the full scan") {
    fixtures::RandomScenario s = fixtures::make_random_scenario(71, 60, 20);
    Index index = build_index(s.corpus, s.table, s.config);
    QueryConfig cfg = make_query_config(index);
    cfg.k = 80;
    for (const Query& q : s.queries) {
        std::vector<Token> tokens = tokenize(preprocess(q.text), s.config.pipeline.stopwords);
        annotate(
            tokens, s.config.pipeline.gazetteer,
            [&](const std::string& w) {
                auto it = index.stats.term_df.find(w);
                return it == index.stats.term_df.end() ? 0 : it->second;
            },
            s.config.pipeline.rw_threshold);
        auto naive = oracles::semantic_full_scan(tokens, index.docs, index.clusters,
                                                 s.table, cfg.gamma, cfg.epsilon, cfg.k);
        ScoredList got = search_semantic(q, index, s.table, cfg);
        REQUIRE(got.entries.size() == naive.size());
        for (std::size_t i = 0; i < naive.size(); ++i) {
            CHECK(got.entries[i].doc_id == naive[i].doc_id);
            CHECK(std::abs(got.entries[i].score - naive[i].score) < 1e-9);
        }
    }
}

TEST_CASE("normalize_bm25 maps onto the semantic interval") {
    auto out = normalize_bm25({0.0, 10.0}, 0.2, 0.8);
    CHECK(out[0] == doctest::Approx(0.2));
    CHECK(out[1] == doctest::Approx(0.8));

    auto mid = normalize_bm25({5.0, 5.0}, 0.2, 0.8);
    CHECK(mid[0] == doctest::Approx(0.5));
    CHECK(mid[1] == doctest::Approx(0.5));

    auto affine = normalize_bm25({0.0, 5.0, 10.0}, 0.0, 1.0);
    CHECK(affine[0] == doctest::Approx(0.0));
    CHECK(affine[1] == doctest::Approx(0.5));
    CHECK(affine[2] == doctest::Approx(1.0));

    CHECK_THROWS_AS(normalize_bm25({}, 0.0, 1.0), DomainError);
}

namespace {

ScoredList make_list(const std::string& qid, const std::string& tag,
                     std::vector<std::pair<std::string, double>> entries) {
    ScoredList list;
    list.query_id = qid;
    list.tag = tag;
    int rank = 1;
    for (auto& [doc_id, score] : entries) list.entries.push_back({doc_id, score, rank++});
    return list;
}

} // namespace

TEST_CASE("fuse hand-evaluated combination") {
    ScoredList sem = make_list("q", "semantic", {{"A", 0.9}, {"B", 0.1}});
    ScoredList lex = make_list("q", "bm25", {{"A", 0.9}, {"B", 0.2}});
    ScoredList fused = fuse(sem, lex, 2);
    REQUIRE(fused.entries.size() == 2);
    CHECK(fused.entries[0].doc_id == "A");
    CHECK(fused.entries[0].score == 1.0 * 0.9 + 1.0 * std::log(1.9));
    CHECK(fused.entries[0].score == doctest::Approx(1.54185).epsilon(1e-5));
    // B sits at rank N in both lists: both factors are zero.
    CHECK(fused.entries[1].doc_id == "B");
    CHECK(fused.entries[1].score == 0.0);
}

TEST_CASE("fuse covers one-sided documents and rejects bad depth") {
    ScoredList sem = make_list("q", "semantic", {{"A", 0.8}});
    ScoredList lex = make_list("q", "bm25", {{"B", 0.5}});
    ScoredList fused = fuse(sem, lex, 10);
    REQUIRE(fused.entries.size() == 2);
    CHECK(fused.entries[0].doc_id == "A"); // (10-1)*0.8 > (10-1)*ln(1.5)
    CHECK(fused.entries[0].score == doctest::Approx(9.0 * 0.8));
    CHECK(fused.entries[1].score == doctest::Approx(9.0 * std::log(1.5)));

    CHECK_THROWS_AS(fuse(sem, lex, 0), DomainError);
}

TEST_CASE("improving a semantic rank never lowers the combined score") {
    std::mt19937 rng(73);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        // Build a 6-document semantic list with sorted random scores.
        std::vector<double> scores;
        for (int i = 0; i < 6; ++i) scores.push_back(score(rng));
        std::sort(scores.rbegin(), scores.rend());
        std::vector<std::pair<std::string, double>> sem_entries;
        for (int i = 0; i < 6; ++i)
            sem_entries.push_back({"d" + std::to_string(i), scores[i]});
        ScoredList lex =
            make_list("q", "bm25", {{"d3", 0.7}, {"d1", 0.5}, {"d5", 0.2}});

        auto combined_score_of = [&](const ScoredList& fused, const std::string& id) {
            for (const ScoredDoc& e : fused.entries) {
                if (e.doc_id == id) return e.score;
            }
            return 0.0;
        };
        ScoredList base = fuse(make_list("q", "semantic", sem_entries), lex, 10);
        // Move d3 (rank 4) one step up, keeping every score where it was.
        auto improved = sem_entries;
        std::swap(improved[2].first, improved[3].first);
        ScoredList better = fuse(make_list("q", "semantic", improved), lex, 10);
        CHECK(combined_score_of(better, "d3") >= combined_score_of(base, "d3"));
    }
}

TEST_CASE("combined search preserves agreement and finds synonym-only documents") {
    fixtures::SynonymScenario s = fixtures::make_synonym_scenario();
    Index index = build_index(s.corpus, s.table, s.config);
    QueryConfig cfg = make_query_config(index);
    cfg.k = 10;
    cfg.fusion_n = 50;

    SUBCASE("verbatim query: combined top-1 equals bm25 top-1") {
        for (int i : {0, 7, 42}) {
            ScoredList lex = search_bm25(s.queries[i], index, cfg);
            ScoredList comb = search_combined(s.queries[i], index, s.table, cfg);
            REQUIRE(!lex.entries.empty());
            REQUIRE(!comb.entries.empty());
            CHECK(lex.entries[0].doc_id == comb.entries[0].doc_id);
        }
    }
    SUBCASE("agreeing rankings stay in order") {
        ScoredList sem = search_semantic(s.queries[3], index, s.table, cfg);
        ScoredList comb = search_combined(s.queries[3], index, s.table, cfg);
        REQUIRE(!sem.entries.empty());
        CHECK(comb.entries[0].doc_id == sem.entries[0].doc_id);
    }
    SUBCASE("a document containing only synonyms is found by combined, not bm25") {
        Query rewritten{"qs", "g021b g022b g023b"}; // synonyms of document d07's words
        ScoredList lex = search_bm25(rewritten, index, cfg);
        CHECK(lex.entries.empty());
        ScoredList comb = search_combined(rewritten, index, s.table, cfg);
        REQUIRE(!comb.entries.empty());
        CHECK(comb.entries[0].doc_id == "d07");
    }
}

TEST_CASE("gamma scaling leaves semantic rankings unchanged") {
    fixtures::RandomScenario s = fixtures::make_random_scenario(79, 40, 10);
    Index index = build_index(s.corpus, s.table, s.config);
    QueryConfig one = make_query_config(index);
    QueryConfig three = one;
    three.gamma = 3.0;
    for (const Query& q : s.queries) {
        ScoredList a = search_semantic(q, index, s.table, one);
        ScoredList b = search_semantic(q, index, s.table, three);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            CHECK(a.entries[i].doc_id == b.entries[i].doc_id);
            CHECK(std::abs(a.entries[i].score - b.entries[i].score) < 1e-9);
        }
    }
}

TEST_CASE("searches are deterministic") {
    fixtures::RandomScenario s = fixtures::make_random_scenario(83, 40, 10);
    Index index = build_index(s.corpus, s.table, s.config);
    QueryConfig cfg = make_query_config(index);
    for (const Query& q : s.queries) {
        ScoredList a = search_combined(q, index, s.table, cfg);
        ScoredList b = search_combined(q, index, s.table, cfg);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            CHECK(a.entries[i].doc_id == b.entries[i].doc_id);
            CHECK(a.entries[i].score == b.entries[i].score);
        }
    }
}

TEST_CASE("avg_vector composes a weighted mean") {
    EmbeddingTable table;
    table.dim = 2;
    table.entries["u"] = {1, 0};
    table.entries["v"] = {0, 1};
    std::map<std::string, int> df{{"u", 1}, {"v", 1}};

    SUBCASE("single embedded token keeps its direction") {
        std::vector<Token> tokens{{"u", "u", Label::Plain, 0}};
        Vec out = avg_vector(tokens, table, 10, df);
        REQUIRE(out.size() == 2);
        CHECK(out[0] == doctest::Approx(1.0));
        CHECK(out[1] == doctest::Approx(0.0));
    }
    SUBCASE("two equal-weight tokens average") {
        std::vector<Token> tokens{{"u", "u", Label::Plain, 0}, {"v", "v", Label::Plain, 1}};
        Vec out = avg_vector(tokens, table, 10, df);
        CHECK(out[0] == doctest::Approx(0.5));
        CHECK(out[1] == doctest::Approx(0.5));
    }
    SUBCASE("no embedded token yields the zero case") {
        std::vector<Token> tokens{{"x", "x", Label::Plain, 0}};
        CHECK(avg_vector(tokens, table, 10, df).empty());
    }
}

TEST_CASE("avg baseline ranking equals the dense oracle") {
    fixtures::RandomScenario s = fixtures::make_random_scenario(89, 50, 15);
    AvgBaseline baseline = AvgBaseline::build(s.corpus, s.table, s.config.pipeline);
    QueryConfig cfg;
    cfg.k = 60;
    std::vector<DocTerms> docs;
    for (const Document& d : s.corpus) {
        DocTerms dt;
        dt.id = d.id;
        for (const Token& t : document_tokens(d, s.config.pipeline)) {
            ++dt.tf[t.surface];
            ++dt.len;
        }
        docs.push_back(std::move(dt));
    }
    for (const Query& q : s.queries) {
        std::vector<Token> tokens = tokenize(preprocess(q.text), s.config.pipeline.stopwords);
        auto naive = oracles::avg_full_scan(tokens, docs, s.table, cfg.k);
        ScoredList got = baseline.search(q, s.table, cfg);
        REQUIRE(got.entries.size() == naive.size());
        for (std::size_t i = 0; i < naive.size(); ++i) {
            CHECK(got.entries[i].doc_id == naive[i].doc_id);
            CHECK(std::abs(got.entries[i].score - naive[i].score) < 1e-9);
        }
    }
}
