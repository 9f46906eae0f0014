#pragma once

// The UI mapping translation table and the ArkUI documentation corpus, with
// BM25 retrieval, a lexical reranker, and reflective enrichment writes.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uitrans/common.hpp"
#include "uitrans/task_planner.hpp"

namespace uitrans {

// ---- store schemas ---------------------------------------------------------------

struct AttributeMapRow {
    std::string android_attr;
    std::string arkui;      // ".fontSize" chain, "@arg" / "@arg:<name>" builder arg,
                            // or empty when the transform consumes the attribute
    std::string transform;  // identity | strip_unit | color_ref | resource_ref |
                            // dimension | consumed | id_ref | event_handler | visibility

    bool operator==(const AttributeMapRow&) const = default;
};

struct MappingEntry {
    std::string entry_id;
    std::string source_tag;
    std::string target_component;
    std::string description;
    std::string source_example;
    std::string target_example;
    std::vector<AttributeMapRow> attribute_map;
    std::string provenance;  // "seeded" | "learned"

    bool operator==(const MappingEntry&) const = default;
};

struct DocAttribute {
    std::string name;
    std::string type;
    std::string description;
};

struct DocEntry {
    std::string doc_id;
    std::string component_name;
    std::string functional_description;
    std::vector<DocAttribute> attributes;
    std::string usage_example;
};

struct RetrievalHit {
    std::string id;
    double bm25_score = 0.0;
    double rerank_score = 0.0;
};

struct RetrievalResult {
    std::vector<RetrievalHit> hits;  // ≤ 3, rerank_score descending, lower id on ties
};

// ---- tokenizer --------------------------------------------------------------------

// Lowercase, split on non-alphanumeric, split camelCase at a lower/digit to
// upper boundary ("TextView" -> text, view; "setOnClickListener" -> set, on,
// click, listener). Upper runs stay whole ("XMLParser" -> xmlparser).
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&]() {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    char prev = '\0';
    for (char c : text) {
        if (!std::isalnum(static_cast<unsigned char>(c))) {
            flush();
            prev = '\0';
            continue;
        }
        bool boundary = std::isupper(static_cast<unsigned char>(c)) &&
                        (std::islower(static_cast<unsigned char>(prev)) ||
                         std::isdigit(static_cast<unsigned char>(prev)));
        if (boundary) flush();
        current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        prev = c;
    }
    flush();
    return tokens;
}

// ---- BM25 ----------------------------------------------------------------------

// Plain in-memory BM25 (k1=1.2, b=0.75, idf = ln(1 + (N-df+0.5)/(df+0.5))).
// Documents are scanned linearly; corpora here are tens of entries.
class Bm25Index {
public:
    static constexpr double k1 = 1.2;
    static constexpr double b = 0.75;

    struct Doc {
        std::string id;
        std::map<std::string, int> tf;
        size_t length = 0;
    };

    void add(const std::string& id, const std::string& text) {
        Doc doc;
        doc.id = id;
        std::vector<std::string> tokens = tokenize(text);
        doc.length = tokens.size();
        for (auto& t : tokens) ++doc.tf[t];
        for (const auto& [term, _] : doc.tf) ++df_[term];
        total_length_ += doc.length;
        docs_.push_back(std::move(doc));
    }

    size_t size() const { return docs_.size(); }
    size_t term_count() const { return df_.size(); }

    double idf(const std::string& term) const {
        auto it = df_.find(term);
        double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
        double n = static_cast<double>(docs_.size());
        return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    }

    // Score of one document against the query tokens (repeated query tokens
    // contribute repeatedly).
    double score(const Doc& doc, const std::vector<std::string>& query_tokens) const {
        if (docs_.empty()) return 0.0;
        double avgdl = total_length_ / static_cast<double>(docs_.size());
        double s = 0.0;
        for (const auto& term : query_tokens) {
            auto it = doc.tf.find(term);
            if (it == doc.tf.end()) continue;
            double tf = static_cast<double>(it->second);
            double denom = tf + k1 * (1.0 - b + b * static_cast<double>(doc.length) / avgdl);
            s += idf(term) * tf * (k1 + 1.0) / denom;
        }
        return s;
    }

    // Top-k by (score desc, id asc); zero-score documents are dropped.
    std::vector<std::pair<std::string, double>> rank(const std::string& query,
                                                     size_t k) const {
        std::vector<std::pair<std::string, double>> scored;
        std::vector<std::string> q = tokenize(query);
        if (q.empty()) return scored;
        for (const auto& doc : docs_) {
            double s = score(doc, q);
            if (s > 0.0) scored.emplace_back(doc.id, s);
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b_) {
            if (a.second != b_.second) return a.second > b_.second;
            return a.first < b_.first;
        });
        if (scored.size() > k) scored.resize(k);
        return scored;
    }

    const std::vector<Doc>& docs() const { return docs_; }

private:
    std::vector<Doc> docs_;
    std::map<std::string, int> df_;
    double total_length_ = 0.0;
};

// ---- the knowledge base -----------------------------------------------------------

struct RerankWeights {
    double exact_tag = 0.5;
    double jaccard = 0.3;
    double bm25 = 0.2;
};

struct KnowledgeBase {
    std::vector<MappingEntry> entries;
    std::vector<DocEntry> docs;
    Bm25Index mapping_index;
    Bm25Index corpus_index;
    RerankWeights weights;

    const MappingEntry* entry_by_id(std::string_view id) const {
        for (const auto& e : entries) {
            if (e.entry_id == id) return &e;
        }
        return nullptr;
    }
    const DocEntry* doc_by_id(std::string_view id) const {
        for (const auto& d : docs) {
            if (d.doc_id == id) return &d;
        }
        return nullptr;
    }
    std::vector<MappingEntry> entries_for_tag(std::string_view tag) const {
        std::vector<MappingEntry> out;
        for (const auto& e : entries) {
            if (e.source_tag == tag) out.push_back(e);
        }
        return out;
    }
};

inline std::string mapping_entry_text(const MappingEntry& e) {
    std::string text = e.source_tag + " " + e.description;
    for (const auto& row : e.attribute_map) text += " " + row.android_attr;
    return text;
}

inline std::string doc_entry_text(const DocEntry& d) {
    std::string text = d.component_name + " " + d.functional_description;
    for (const auto& a : d.attributes) text += " " + a.name;
    return text;
}

// ---- loading -------------------------------------------------------------------

namespace detail {

inline const ojson& store_array(const ojson& root, const char* array_key,
                                const std::string& path) {
    if (root.is_array()) return root;
    if (root.is_object()) {
        if (root.value("schema_version", 0) != 1) {
            throw SchemaViolation(path, "schema_version", "expected 1");
        }
        if (!root.contains(array_key) || !root.at(array_key).is_array()) {
            throw SchemaViolation(path, array_key, "missing or not an array");
        }
        return root.at(array_key);
    }
    throw SchemaViolation(path, "$", "expected an array or a versioned object");
}

inline std::string require_string(const ojson& obj, const char* field,
                                  const std::string& path, bool allow_empty = false) {
    if (!obj.contains(field) || !obj.at(field).is_string()) {
        throw SchemaViolation(path, field, "missing or not a string");
    }
    std::string value = obj.at(field).get<std::string>();
    if (value.empty() && !allow_empty) throw SchemaViolation(path, field, "must be non-empty");
    return value;
}

inline const std::set<std::string>& known_transforms() {
    static const std::set<std::string> kinds = {
        "identity", "strip_unit", "color_ref",     "color_hex",  "resource_ref",
        "dimension", "consumed",  "event_handler", "id_ref",     "visibility"};
    return kinds;
}

inline MappingEntry parse_mapping_entry(const ojson& j, const std::string& path) {
    MappingEntry e;
    e.entry_id = require_string(j, "entry_id", path);
    e.source_tag = require_string(j, "source_tag", path);
    e.target_component = require_string(j, "target_component", path);
    e.description = require_string(j, "description", path, true);
    e.source_example = j.value("source_example", std::string());
    e.target_example = j.value("target_example", std::string());
    e.provenance = require_string(j, "provenance", path);
    if (e.provenance != "seeded" && e.provenance != "learned") {
        throw SchemaViolation(path, "provenance", "must be 'seeded' or 'learned'");
    }
    if (j.contains("attribute_map")) {
        if (!j.at("attribute_map").is_array()) {
            throw SchemaViolation(path, "attribute_map", "must be an array");
        }
        for (const auto& row : j.at("attribute_map")) {
            AttributeMapRow r;
            r.android_attr = require_string(row, "android", path);
            r.arkui = row.value("arkui", std::string());
            r.transform = require_string(row, "transform", path);
            if (!known_transforms().count(r.transform)) {
                throw SchemaViolation(path, "transform",
                                      "unknown transform '" + r.transform + "'");
            }
            e.attribute_map.push_back(std::move(r));
        }
    }
    return e;
}

inline DocEntry parse_doc_entry(const ojson& j, const std::string& path) {
    DocEntry d;
    d.doc_id = require_string(j, "doc_id", path);
    d.component_name = require_string(j, "component_name", path);
    d.functional_description = require_string(j, "functional_description", path, true);
    d.usage_example = j.value("usage_example", std::string());
    if (j.contains("attributes")) {
        for (const auto& a : j.at("attributes")) {
            DocAttribute attr;
            attr.name = require_string(a, "name", path);
            attr.type = a.value("type", std::string());
            attr.description = a.value("description", std::string());
            d.attributes.push_back(std::move(attr));
        }
    }
    return d;
}

}  // namespace detail

inline KnowledgeBase load_stores(const std::filesystem::path& mapping_path,
                                 const std::filesystem::path& corpus_path) {
    KnowledgeBase kb;

    {
        std::string raw = read_file(mapping_path);
        ojson root = ojson::parse(raw, nullptr, true);
        const ojson& arr = detail::store_array(root, "entries", mapping_path.string());
        std::set<std::string> ids;
        std::set<std::pair<std::string, std::string>> pairs;
        for (const auto& j : arr) {
            MappingEntry e = detail::parse_mapping_entry(j, mapping_path.string());
            if (!ids.insert(e.entry_id).second) {
                throw SchemaViolation(mapping_path.string(), "entry_id",
                                      "duplicate '" + e.entry_id + "'");
            }
            if (!pairs.insert({e.source_tag, e.target_component}).second) {
                throw SchemaViolation(mapping_path.string(), "source_tag",
                                      "duplicate mapping " + e.source_tag + " -> " +
                                          e.target_component);
            }
            kb.entries.push_back(std::move(e));
        }
    }
    {
        std::string raw = read_file(corpus_path);
        ojson root = ojson::parse(raw, nullptr, true);
        const ojson& arr = detail::store_array(root, "docs", corpus_path.string());
        std::set<std::string> ids;
        for (const auto& j : arr) {
            DocEntry d = detail::parse_doc_entry(j, corpus_path.string());
            if (!ids.insert(d.doc_id).second) {
                throw SchemaViolation(corpus_path.string(), "doc_id",
                                      "duplicate '" + d.doc_id + "'");
            }
            kb.docs.push_back(std::move(d));
        }
    }

    for (const auto& e : kb.entries) kb.mapping_index.add(e.entry_id, mapping_entry_text(e));
    for (const auto& d : kb.docs) kb.corpus_index.add(d.doc_id, doc_entry_text(d));
    return kb;
}

// ---- ranking -------------------------------------------------------------------

inline std::vector<std::pair<std::string, double>> bm25_rank(const std::string& query,
                                                             const KnowledgeBase& kb,
                                                             size_t k) {
    return kb.mapping_index.rank(query, k);
}

inline double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::set<std::string> sa(a.begin(), a.end());
    std::set<std::string> sb(b.begin(), b.end());
    if (sa.empty() && sb.empty()) return 0.0;
    size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    size_t uni = sa.size() + sb.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

namespace detail {

// Shared rerank core: candidates carry (id, bm25, candidate_tag, description).
struct RerankCandidate {
    std::string id;
    double bm25 = 0.0;
    std::string tag;
    std::string description;
};

inline RetrievalResult rerank_pool(const std::string& query, const std::string& source_tag,
                                   const std::vector<RerankCandidate>& pool,
                                   const RerankWeights& w) {
    RetrievalResult result;
    if (pool.empty()) return result;
    double max_bm25 = 0.0;
    for (const auto& c : pool) max_bm25 = std::max(max_bm25, c.bm25);
    std::vector<std::string> query_tokens = tokenize(query);

    std::vector<RetrievalHit> hits;
    for (const auto& c : pool) {
        double exact = c.tag == source_tag ? 1.0 : 0.0;
        double jac = jaccard(query_tokens, tokenize(c.description));
        double norm = max_bm25 > 0.0 ? c.bm25 / max_bm25 : 0.0;
        hits.push_back(RetrievalHit{c.id, c.bm25,
                                    w.exact_tag * exact + w.jaccard * jac + w.bm25 * norm});
    }
    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.rerank_score != b.rerank_score) return a.rerank_score > b.rerank_score;
        return a.id < b.id;
    });
    if (hits.size() > 3) hits.resize(3);
    result.hits = std::move(hits);
    return result;
}

}  // namespace detail

// Reranks a BM25 candidate pool from the mapping table. `source_tag` is the
// Android tag being queried; exact table matches on it dominate.
inline RetrievalResult rerank(const std::string& query,
                              const std::vector<std::pair<std::string, double>>& candidates,
                              const KnowledgeBase& kb, const std::string& source_tag) {
    std::vector<detail::RerankCandidate> pool;
    for (const auto& [id, score] : candidates) {
        const MappingEntry* e = kb.entry_by_id(id);
        if (!e) continue;
        pool.push_back(detail::RerankCandidate{id, score, e->source_tag, e->description});
    }
    return detail::rerank_pool(query, source_tag, pool, kb.weights);
}

inline RetrievalResult rerank_docs(const std::string& query,
                                   const std::vector<std::pair<std::string, double>>& candidates,
                                   const KnowledgeBase& kb, const std::string& source_tag) {
    std::vector<detail::RerankCandidate> pool;
    for (const auto& [id, score] : candidates) {
        const DocEntry* d = kb.doc_by_id(id);
        if (!d) continue;
        pool.push_back(detail::RerankCandidate{id, score, d->component_name,
                                               d->functional_description});
    }
    return detail::rerank_pool(query, source_tag, pool, kb.weights);
}

// ---- unit-level retrieval -----------------------------------------------------------

struct DomainKnowledge {
    RetrievalResult mapping_hits;
    std::vector<MappingEntry> mapping_entries;  // parallel to mapping_hits.hits
    RetrievalResult doc_hits;                   // only populated when !resolved
    std::vector<DocEntry> doc_entries;          // parallel to doc_hits.hits
    bool resolved = false;
    // exact-tag table rows for tags appearing below the unit root (inline
    // children of R2 units); the generator picks per node
    std::map<std::string, std::vector<MappingEntry>> aux_entries;
};

inline std::string retrieval_query(const TranslationUnit& unit) {
    std::string q = unit.root.tag + " " + unit.description.purpose;
    for (const auto& [name, _] : unit.description.salient_attributes) q += " " + name;
    return q;
}

inline constexpr size_t kRerankPool = 10;

inline DomainKnowledge query_mapping(const TranslationUnit& unit, const KnowledgeBase& kb) {
    DomainKnowledge knowledge;
    std::string query = retrieval_query(unit);
    const std::string& tag = unit.root.tag;

    auto pool = kb.mapping_index.rank(query, kRerankPool);
    knowledge.mapping_hits = rerank(query, pool, kb, tag);
    for (const auto& hit : knowledge.mapping_hits.hits) {
        const MappingEntry* e = kb.entry_by_id(hit.id);
        knowledge.mapping_entries.push_back(*e);
        if (e->source_tag == tag) knowledge.resolved = true;
    }

    if (!knowledge.resolved) {
        auto doc_pool = kb.corpus_index.rank(query, kRerankPool);
        knowledge.doc_hits = rerank_docs(query, doc_pool, kb, tag);
        for (const auto& hit : knowledge.doc_hits.hits) {
            knowledge.doc_entries.push_back(*kb.doc_by_id(hit.id));
        }
    }

    // inline descendants of a whole-subtree unit need their own table rows;
    // a descendant sharing the root tag still gets them (nested containers)
    std::set<std::string> seen;
    auto visit = [&](const LayoutNode& node, auto&& self) -> void {
        for (const auto& c : node.children) {
            if (seen.insert(c.tag).second) {
                auto rows = kb.entries_for_tag(c.tag);
                if (!rows.empty()) knowledge.aux_entries[c.tag] = std::move(rows);
            }
            self(c, self);
        }
    };
    visit(unit.root, visit);
    return knowledge;
}

// ---- persistence and enrichment ------------------------------------------------------

inline ojson mapping_entry_to_json(const MappingEntry& e) {
    ojson j;
    j["entry_id"] = e.entry_id;
    j["source_tag"] = e.source_tag;
    j["target_component"] = e.target_component;
    j["description"] = e.description;
    j["source_example"] = e.source_example;
    j["target_example"] = e.target_example;
    ojson rows = ojson::array();
    for (const auto& r : e.attribute_map) {
        rows.push_back(ojson{{"android", r.android_attr},
                             {"arkui", r.arkui},
                             {"transform", r.transform}});
    }
    j["attribute_map"] = std::move(rows);
    j["provenance"] = e.provenance;
    return j;
}

inline std::string dump_mapping_table(const KnowledgeBase& kb) {
    ojson root;
    root["schema_version"] = 1;
    ojson arr = ojson::array();
    for (const auto& e : kb.entries) arr.push_back(mapping_entry_to_json(e));
    root["entries"] = std::move(arr);
    return root.dump(2) + "\n";
}

enum class EnrichOutcome { inserted, duplicate };

// Inserts a learned mapping and persists the table atomically (temp + rename).
// `crash_after_temp` stops before the rename, simulating a crash; the previous
// table file must stay intact and loadable.
inline EnrichOutcome enrich(MappingEntry entry, KnowledgeBase& kb,
                            const std::filesystem::path& table_path,
                            Warnings* warnings = nullptr, bool crash_after_temp = false) {
    if (entry.provenance != "learned") {
        throw SchemaViolation(table_path.string(), "provenance",
                              "enrich accepts learned entries only");
    }
    for (const auto& e : kb.entries) {
        if (e.source_tag == entry.source_tag &&
            e.target_component == entry.target_component) {
            if (warnings) {
                warn(*warnings, "duplicate_enrichment",
                     entry.source_tag + " -> " + entry.target_component +
                         " already present; skipped");
            }
            return EnrichOutcome::duplicate;
        }
    }
    if (entry.entry_id.empty()) {
        entry.entry_id = "learned-" + to_lower(sanitize_identifier(entry.source_tag)) + "-" +
                         to_lower(sanitize_identifier(entry.target_component));
    }
    while (kb.entry_by_id(entry.entry_id)) entry.entry_id += "x";

    kb.mapping_index.add(entry.entry_id, mapping_entry_text(entry));
    kb.entries.push_back(std::move(entry));
    write_file_atomic(table_path, dump_mapping_table(kb), crash_after_temp);
    return EnrichOutcome::inserted;
}

}  // namespace uitrans
