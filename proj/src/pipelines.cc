// Copyright 2026 The sfns Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pipelines.h"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "baselines.h"
#include "encoder.h"
#include "error.h"
#include "eval.h"
#include "hci_sim.h"
#include "index.h"
#include "io.h"
#include "mining.h"
#include "synth.h"
#include "text.h"
#include "tokenizer.h"

namespace sfns {
namespace {

using nlohmann::json;

// Reads options and records the value each one resolved to.
class Options {
 public:
  explicit Options(const json& in) : in_(in.is_null() ? json::object() : in) {
    if (!in_.is_object()) throw ValidationError("options must be a JSON object");
  }

  bool Has(const std::string& key) const {
    return in_.contains(key) && !in_[key].is_null();
  }

  template <typename T>
  T Get(const std::string& key, T fallback) {
    T value = Has(key) ? Convert<T>(key) : std::move(fallback);
    resolved_[key] = value;
    return value;
  }

  template <typename T>
  T Require(const std::string& key) {
    if (!Has(key)) throw ValidationError("missing required option '" + key + "'");
    T value = Convert<T>(key);
    resolved_[key] = value;
    return value;
  }

  template <typename T>
  std::optional<T> Optional(const std::string& key) {
    if (!Has(key)) return std::nullopt;
    T value = Convert<T>(key);
    resolved_[key] = value;
    return value;
  }

  const json& resolved() const { return resolved_; }

 private:
  template <typename T>
  T Convert(const std::string& key) const {
    try {
      return in_[key].get<T>();
    } catch (const json::exception&) {
      throw ValidationError("option '" + key + "' has the wrong type");
    }
  }

  json in_;
  json resolved_ = json::object();
};

struct Context {
  Options& options;
  std::vector<std::string>& warnings;
};

template <typename Fn>
void ForEachJson(const std::string& path, Fn&& fn) {
  ForEachLine(path, [&](size_t line_no, std::string_view line) {
    const std::string where = path + ":" + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(where + ": malformed JSON: " + e.what());
    }
    try {
      fn(j);
    } catch (const json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
  });
}

void WriteLines(const std::string& path, const std::vector<json>& rows) {
  std::string out;
  for (const json& r : rows) {
    out += r.dump();
    out += '\n';
  }
  WriteFile(path, out);
}

std::string IdString(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

QueryWeighting ParseWeighting(const std::string& name) {
  if (name == "idf") return QueryWeighting::kIdf;
  if (name == "none") return QueryWeighting::kIndicator;
  throw ValidationError("query weighting must be 'idf' or 'none', got '" + name + "'");
}

std::shared_ptr<const TokenizerModel> RequireTokenizer(Options& o) {
  return std::make_shared<const TokenizerModel>(
      LoadTokenizer(o.Require<std::string>("tokenizer")));
}

// Parameters whose vocabulary must match the tokenizer.
std::shared_ptr<const EncoderParams> OptionalParams(Options& o,
                                                    const TokenizerModel& tok) {
  const auto path = o.Optional<std::string>("params");
  if (!path) return nullptr;
  auto params = std::make_shared<const EncoderParams>(LoadEncoder(*path));
  if (params->vocab_size() != tok.size()) {
    throw ValidationError("encoder vocabulary (" +
                          std::to_string(params->vocab_size()) +
                          ") does not match tokenizer (" +
                          std::to_string(tok.size()) + ")");
  }
  return params;
}

std::vector<TokenId> KnownTokens(const TokenizerModel& tok, std::string_view text) {
  std::vector<TokenId> out;
  for (TokenId t : Segment(tok, Normalize(text))) {
    if (t < tok.size()) out.push_back(t);
  }
  return out;
}

FuzzyConfig ReadFuzzyConfig(Options& o) {
  FuzzyConfig cfg;
  cfg.max_edits = o.Get<int>("max_edits", 1);
  cfg.prefix_lock = o.Get<int>("prefix_lock", 0);
  cfg.Validate();
  return cfg;
}

// A channel that never retrieves anything.
class EmptyRetriever : public Retriever {
 public:
  explicit EmptyRetriever(std::span<const TextDoc> docs) {
    for (const TextDoc& d : docs) docs_.push_back({d.id, d.text, d.payload});
  }
  std::vector<SearchHit> Search(std::string_view, size_t k) const override {
    if (k < 1) throw ValidationError("k must be >= 1");
    return {};
  }
  double SelfScore(std::string_view) const override { return 0.0; }
  std::span<const DocEntry> docs() const override { return docs_; }

 private:
  std::vector<DocEntry> docs_;
};

std::unique_ptr<Retriever> MakeRetriever(Context& ctx) {
  Options& o = ctx.options;
  const std::string method = o.Get<std::string>("method", "sparse");
  if (method == "trigram") {
    const auto docs = LoadTextDocs(o.Require<std::string>("docs"));
    return std::make_unique<TrigramRetriever>(docs);
  }
  if (method == "fuzzy") {
    const auto docs = LoadTextDocs(o.Require<std::string>("docs"));
    return std::make_unique<FuzzyRetriever>(docs, ReadFuzzyConfig(o));
  }
  if (method != "sparse") {
    throw ValidationError("method must be trigram, fuzzy or sparse, got '" +
                          method + "'");
  }
  auto tok = RequireTokenizer(o);
  const QueryWeighting weighting =
      ParseWeighting(o.Get<std::string>("query_weighting", "idf"));
  auto params = OptionalParams(o, *tok);
  DocEncoder encoder =
      params ? ExpansionDocEncoder(tok, params) : IndicatorDocEncoder(tok);
  if (const auto index_path = o.Optional<std::string>("index")) {
    return std::make_unique<SparseRetriever>(tok, LoadIndex(*index_path),
                                             std::move(encoder), weighting);
  }
  const auto docs = LoadTextDocs(o.Require<std::string>("docs"));
  return SparseRetriever::Build(tok, docs, std::move(encoder), weighting);
}

json HitsJson(const Retriever& r, const std::vector<SearchHit>& hits) {
  json out = json::array();
  for (const SearchHit& h : hits) {
    const DocEntry& d = r.docs()[h.doc];
    out.push_back({{"rank", h.rank}, {"doc", h.doc}, {"id", d.id},
                   {"text", d.text}, {"payload", d.payload}, {"score", h.score}});
  }
  return out;
}

json VectorJson(const TokenizerModel& tok, const SparseVector& v) {
  json out = json::object();
  for (const SparseEntry& e : v.entries()) out[tok.PieceUtf8(e.token)] = e.weight;
  return out;
}

// ---------------------------------------------------------------------------

json TokenizeTrain(Context& ctx) {
  Options& o = ctx.options;
  const std::string input = o.Require<std::string>("input");
  const std::string out = o.Require<std::string>("out");
  UnigramTrainerConfig cfg;
  cfg.vocab_size = o.Get<size_t>("vocab_size", cfg.vocab_size);
  cfg.max_piece_len = o.Get<int>("max_piece_len", cfg.max_piece_len);
  cfg.shrink_factor = o.Get<double>("shrink_factor", cfg.shrink_factor);
  cfg.em_iters = o.Get<int>("em_iters", cfg.em_iters);
  o.Get<uint64_t>("seed", 0);  // training has no randomness; kept for the record
  std::vector<std::string> corpus;
  ForEachLine(input, [&](size_t, std::string_view line) {
    corpus.emplace_back(line);
  });
  const TokenizerModel model = TrainUnigram(corpus, cfg);
  SaveTokenizer(model, out);
  size_t longest = 0;
  for (const Piece& p : model.pieces()) longest = std::max(longest, p.text.size());
  return {{"pieces", model.size()},
          {"longest_piece", longest},
          {"corpus_lines", corpus.size()},
          {"out", out}};
}

json TokenizeApply(Context& ctx) {
  Options& o = ctx.options;
  const TokenizerModel tok = LoadTokenizer(o.Require<std::string>("tokenizer"));
  auto segment = [&](std::string_view text) {
    json ids = json::array();
    json pieces = json::array();
    for (TokenId t : Segment(tok, Normalize(text))) {
      ids.push_back(t);
      pieces.push_back(t < tok.size() ? tok.PieceUtf8(t) : std::string("<unk>"));
    }
    return json{{"text", std::string(text)}, {"ids", ids}, {"pieces", pieces}};
  };
  if (const auto text = o.Optional<std::string>("text")) return segment(*text);
  const std::string input = o.Require<std::string>("input");
  const std::string out = o.Require<std::string>("out");
  std::vector<json> rows;
  ForEachLine(input, [&](size_t, std::string_view line) {
    rows.push_back(segment(line));
  });
  WriteLines(out, rows);
  return {{"lines", rows.size()}, {"out", out}};
}

json EncoderTrain(Context& ctx) {
  Options& o = ctx.options;
  auto tok = RequireTokenizer(o);
  const std::string pairs_path = o.Require<std::string>("pairs");
  const std::string out = o.Require<std::string>("out");
  TrainConfig cfg;
  cfg.lr = o.Get<double>("lr", cfg.lr);
  cfg.momentum = o.Get<double>("momentum", cfg.momentum);
  cfg.steps = o.Get<size_t>("steps", cfg.steps);
  cfg.batch_size = o.Get<size_t>("batch_size", cfg.batch_size);
  cfg.lambda_reg = o.Get<double>("lambda_reg", cfg.lambda_reg);
  cfg.seed = o.Get<uint64_t>("seed", cfg.seed);
  cfg.negatives_per_query = o.Get<size_t>("negatives", cfg.negatives_per_query);
  const size_t dim = o.Get<size_t>("dim", 16);

  std::vector<TrainItem> dataset;
  std::set<std::string> doc_texts;
  size_t skipped = 0;
  ForEachJson(pairs_path, [&](const json& j) {
    TrainItem item;
    item.query = KnownTokens(*tok, j.at("q").get<std::string>());
    const std::string pos = j.at("pos").get<std::string>();
    item.positive = KnownTokens(*tok, pos);
    doc_texts.insert(Normalize(pos));
    if (j.contains("negs")) {
      for (const auto& n : j["negs"]) {
        auto neg = KnownTokens(*tok, n.get<std::string>());
        doc_texts.insert(Normalize(n.get<std::string>()));
        if (!neg.empty()) item.negatives.push_back(std::move(neg));
      }
    }
    if (item.query.empty() || item.positive.empty()) {
      ++skipped;
      return;
    }
    dataset.push_back(std::move(item));
  });
  if (skipped > 0) {
    ctx.warnings.push_back(std::to_string(skipped) +
                           " pairs skipped: no known tokens in query or positive");
  }
  if (dataset.empty()) throw ValidationError("no usable training pairs");

  std::vector<SparseVector> doc_vectors;
  DocEncoder indicator = IndicatorDocEncoder(tok);
  for (const std::string& t : doc_texts) doc_vectors.push_back(indicator(t));
  const VocabStats stats = VocabStats::FromVectors(doc_vectors);

  EncoderParams init = EncoderParams(1, 1);
  if (const auto init_path = o.Optional<std::string>("init")) {
    init = LoadEncoder(*init_path);
    if (init.vocab_size() != tok->size()) {
      throw ValidationError("initial parameters do not match tokenizer vocabulary");
    }
  } else {
    init = EncoderParams::Random(tok->size(), dim, cfg.seed);
  }
  const TrainResult result = Train(init, stats, dataset, cfg);
  SaveEncoder(result.params, out);

  json telemetry = json::array();
  for (const StepTelemetry& t : result.telemetry) {
    telemetry.push_back({{"step", t.step}, {"loss", t.loss}, {"infonce", t.infonce},
                         {"flops", t.flops}, {"avg_nonzero_dims", t.avg_nonzero_dims}});
  }
  return {{"items", dataset.size()},
          {"vocab_size", result.params.vocab_size()},
          {"dim", result.params.dim()},
          {"telemetry", telemetry},
          {"out", out}};
}

json EncoderEncode(Context& ctx) {
  Options& o = ctx.options;
  auto tok = RequireTokenizer(o);
  auto params = OptionalParams(o, *tok);
  const std::string out = o.Require<std::string>("out");
  DocEncoder encoder =
      params ? ExpansionDocEncoder(tok, params) : IndicatorDocEncoder(tok);
  if (!params) {
    ctx.warnings.push_back("no params given: documents use indicator weights");
  }
  std::vector<json> rows;
  double dims = 0.0;
  for (const TextDoc& d : LoadTextDocs(o.Require<std::string>("docs"))) {
    const SparseVector v = encoder(d.text);
    dims += static_cast<double>(v.size());
    json row = {{"id", d.id}, {"text", d.text}, {"vec", VectorJson(*tok, v)}};
    if (!d.payload.empty()) row["payload"] = d.payload;
    rows.push_back(std::move(row));
  }
  WriteLines(out, rows);
  return {{"docs", rows.size()},
          {"avg_nonzero_dims", rows.empty() ? 0.0 : dims / static_cast<double>(rows.size())},
          {"out", out}};
}

json IndexBuild(Context& ctx) {
  Options& o = ctx.options;
  auto tok = RequireTokenizer(o);
  const std::string out = o.Require<std::string>("out");
  std::vector<DocInput> inputs;
  if (const auto vectors = o.Optional<std::string>("vectors")) {
    ExternalVectors ext = LoadExternalVectors(*vectors, *tok);
    ctx.warnings.insert(ctx.warnings.end(), ext.warnings.begin(), ext.warnings.end());
    inputs = std::move(ext.docs);
  } else {
    auto params = OptionalParams(o, *tok);
    DocEncoder encoder =
        params ? ExpansionDocEncoder(tok, params) : IndicatorDocEncoder(tok);
    for (const TextDoc& d : LoadTextDocs(o.Require<std::string>("docs"))) {
      inputs.push_back({d.id, d.text, encoder(d.text), d.payload});
    }
  }
  const InvertedIndex index = InvertedIndex::Build(inputs);
  SaveIndex(index, out);
  return {{"docs", index.doc_count()},
          {"postings", index.posting_count()},
          {"terms", index.postings().size()},
          {"avg_nonzero_dims", index.AverageNonZeroDims()},
          {"out", out}};
}

json Search(Context& ctx) {
  Options& o = ctx.options;
  const std::string query = o.Require<std::string>("query");
  const size_t k = o.Get<size_t>("k", 10);
  std::unique_ptr<Retriever> r = MakeRetriever(ctx);
  return {{"query", query}, {"hits", HitsJson(*r, r->Search(query, k))}};
}

json IndexStats(Context& ctx) {
  const InvertedIndex index = LoadIndex(ctx.options.Require<std::string>("index"));
  size_t longest = 0;
  for (const auto& [_, list] : index.postings()) longest = std::max(longest, list.size());
  return {{"docs", index.doc_count()},
          {"postings", index.posting_count()},
          {"terms", index.postings().size()},
          {"longest_posting_list", longest},
          {"avg_nonzero_dims", index.AverageNonZeroDims()},
          {"format_version", kIndexFormatVersion}};
}

BehaviorLog ReadLog(Options& o, int64_t default_min = 1) {
  const std::string path = o.Require<std::string>("log");
  return LoadBehaviorLog(path, o.Get<int64_t>("min_engagements", default_min));
}

json MinePairs(Context& ctx) {
  Options& o = ctx.options;
  const BehaviorLog log = ReadLog(o);
  const std::string out = o.Require<std::string>("out");
  std::vector<json> rows;
  for (const MinedPair& p : MinePositivePairs(log)) {
    rows.push_back({{"q", p.q}, {"pos", p.q_pos}, {"shared", p.shared_entities}});
  }
  WriteLines(out, rows);
  return {{"pairs", rows.size()}, {"queries", log.Queries().size()}, {"out", out}};
}

json MineNegatives(Context& ctx) {
  Options& o = ctx.options;
  const BehaviorLog log = ReadLog(o);
  const std::string out = o.Require<std::string>("out");
  const size_t n = o.Get<size_t>("n", 4);
  const size_t depth = o.Get<size_t>("depth", 50);
  if (depth < 1) throw ValidationError("depth must be >= 1");
  auto tok = RequireTokenizer(o);

  std::unique_ptr<SparseRetriever> retriever;
  if (const auto index_path = o.Optional<std::string>("index")) {
    auto params = OptionalParams(o, *tok);
    DocEncoder enc = params ? ExpansionDocEncoder(tok, params) : IndicatorDocEncoder(tok);
    retriever = std::make_unique<SparseRetriever>(tok, LoadIndex(*index_path),
                                                  std::move(enc));
  } else {
    // Candidates are the log's own queries.
    std::vector<TextDoc> docs;
    for (const std::string& q : log.Queries()) docs.push_back({q, q, ""});
    auto params = OptionalParams(o, *tok);
    DocEncoder enc = params ? ExpansionDocEncoder(tok, params) : IndicatorDocEncoder(tok);
    retriever = SparseRetriever::Build(tok, docs, std::move(enc));
  }
  CandidateSource source = [&](std::string_view q) {
    std::vector<std::string> out;
    for (const SearchHit& h : retriever->Search(q, depth)) {
      out.push_back(retriever->docs()[h.doc].text);
    }
    return out;
  };

  std::vector<MinedPair> pairs;
  ForEachJson(o.Require<std::string>("pairs"), [&](const json& j) {
    pairs.push_back({Normalize(j.at("q").get<std::string>()),
                     Normalize(j.at("pos").get<std::string>()),
                     {}});
  });
  const NegativeMiningResult mined = MineHardNegatives(pairs, source, log, n);
  if (mined.starved > 0) {
    ctx.warnings.push_back(std::to_string(mined.starved) +
                           " triples have fewer than n negatives");
  }
  std::vector<json> rows;
  for (const TrainTriple& t : mined.triples) {
    rows.push_back({{"q", t.q}, {"pos", t.q_pos}, {"negs", t.negatives}});
  }
  WriteLines(out, rows);
  return {{"triples", rows.size()}, {"starved", mined.starved}, {"out", out}};
}

json MineSplit(Context& ctx) {
  Options& o = ctx.options;
  const BehaviorLog log = ReadLog(o);
  const double frac = o.Get<double>("test_frac", 0.2);
  const uint64_t seed = o.Get<uint64_t>("seed", 0);
  const SplitResult split = SplitByComponents(log, frac, seed);
  json manifest = {
      {"train", {{"queries", split.train_queries},
                 {"entities", split.train_entities},
                 {"components", split.train_components}}},
      {"test", {{"queries", split.test_queries},
                {"entities", split.test_entities},
                {"components", split.test_components}}},
  };
  if (const auto out = o.Optional<std::string>("out")) {
    WriteFile(*out, manifest.dump(2) + "\n");
  }
  return {{"components", split.component_count},
          {"train_queries", split.train_queries.size()},
          {"test_queries", split.test_queries.size()},
          {"train_entities", split.train_entities.size()},
          {"test_entities", split.test_entities.size()}};
}

json MetricsJson(const SliceReport& s) {
  json m = json::object();
  for (const MetricsAtK& x : s.metrics) {
    m[std::to_string(x.k)] = {
        {"recall", x.recall}, {"precision", x.precision}, {"ndcg", x.ndcg}};
  }
  return {{"queries", s.queries}, {"metrics", m}};
}

std::vector<size_t> ParseKs(const std::string& text) {
  std::vector<size_t> ks;
  size_t start = 0;
  while (start <= text.size()) {
    const size_t comma = std::min(text.find(',', start), text.size());
    const std::string part = text.substr(start, comma - start);
    try {
      size_t used = 0;
      const long v = std::stol(part, &used);
      if (used != part.size() || v < 1) throw std::invalid_argument(part);
      ks.push_back(static_cast<size_t>(v));
    } catch (const std::exception&) {
      throw ValidationError("bad k list '" + text + "'");
    }
    start = comma + 1;
  }
  return ks;
}

json EvalRun(Context& ctx, json& meta) {
  Options& o = ctx.options;
  const auto queries = LoadQueries(o.Require<std::string>("queries"));
  const Qrels qrels = LoadQrels(o.Require<std::string>("qrels"));
  BenchmarkOptions bo;
  bo.ks = ParseKs(o.Get<std::string>("k", "1,10,25"));
  bo.threads = o.Get<size_t>("threads", 1);
  bo.warmup = o.Get<size_t>("warmup", 0);
  const std::string key = o.Get<std::string>("rel_key", "id");
  if (key == "payload") {
    bo.key = RelevanceKey::kPayload;
  } else if (key != "id") {
    throw ValidationError("rel_key must be 'id' or 'payload'");
  }
  std::unique_ptr<Retriever> r = MakeRetriever(ctx);
  const BenchmarkReport report = RunBenchmark(queries, qrels, *r, bo);
  if (report.missing_qrels > 0) {
    ctx.warnings.push_back(std::to_string(report.missing_qrels) +
                           " queries have no relevance judgments and were skipped");
  }
  meta["qps"] = report.qps;
  meta["benchmark_seconds"] = report.elapsed_seconds;
  json slices = json::object();
  for (const auto& [name, s] : report.slices) slices[name] = MetricsJson(s);
  json result = {{"ks", report.ks},
                 {"total_queries", report.total_queries},
                 {"evaluated", report.evaluated},
                 {"missing_qrels", report.missing_qrels},
                 {"overall", MetricsJson(report.overall)},
                 {"slices", slices}};
  if (const auto csv = o.Optional<std::string>("csv")) {
    std::string text = "slice,k,queries,recall,precision,ndcg\n";
    auto add = [&](const std::string& name, const SliceReport& s) {
      for (const MetricsAtK& m : s.metrics) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s,%zu,%zu,%.6f,%.6f,%.6f\n", name.c_str(),
                      m.k, s.queries, m.recall, m.precision, m.ndcg);
        text += buf;
      }
    };
    add("all", report.overall);
    for (const auto& [name, s] : report.slices) add(name, s);
    WriteFile(*csv, text);
  }
  return result;
}

json SimReplay(Context& ctx) {
  Options& o = ctx.options;
  ReplayConfig cfg;
  cfg.min_engagements = o.Get<int64_t>("min_engagements", cfg.min_engagements);
  const BehaviorLog log = LoadBehaviorLog(o.Require<std::string>("log"), 1);
  std::vector<CatalogEntry> catalog;
  for (const TextDoc& d : LoadTextDocs(o.Require<std::string>("catalog"))) {
    catalog.push_back({d.id, d.text});
  }
  cfg.epochs = o.Get<size_t>("epochs", cfg.epochs);
  cfg.k_eval = o.Get<size_t>("k", cfg.k_eval);
  cfg.fuzzy_top = o.Get<size_t>("fuzzy_top", cfg.fuzzy_top);
  cfg.replay_all_each_epoch =
      o.Get<bool>("replay_all_each_epoch", cfg.replay_all_each_epoch);
  cfg.threads = o.Get<size_t>("threads", 1);
  const std::string channel = o.Get<std::string>("channel", "sparse");

  ChannelFactory cold = [](std::span<const TextDoc> docs) {
    return std::unique_ptr<Retriever>(std::make_unique<TrigramRetriever>(docs));
  };
  ChannelFactory fuzzy;
  if (channel == "trigram") {
    fuzzy = cold;
  } else if (channel == "fuzzy") {
    const FuzzyConfig fc = ReadFuzzyConfig(o);
    fuzzy = [fc](std::span<const TextDoc> docs) {
      return std::unique_ptr<Retriever>(std::make_unique<FuzzyRetriever>(docs, fc));
    };
  } else if (channel == "sparse") {
    auto tok = RequireTokenizer(o);
    auto params = OptionalParams(o, *tok);
    DocEncoder enc = params ? ExpansionDocEncoder(tok, params) : IndicatorDocEncoder(tok);
    fuzzy = [tok, enc](std::span<const TextDoc> docs) {
      return std::unique_ptr<Retriever>(SparseRetriever::Build(tok, docs, enc));
    };
  } else if (channel == "none") {
    fuzzy = [](std::span<const TextDoc> docs) {
      return std::unique_ptr<Retriever>(std::make_unique<EmptyRetriever>(docs));
    };
  } else {
    throw ValidationError("channel must be trigram, fuzzy, sparse or none");
  }

  const ReplayReport report = RunReplay(log, catalog, cold, fuzzy, cfg);
  json epochs = json::array();
  for (const EpochReport& e : report.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"queries", e.queries},
                      {"truth_pairs", e.truth_pairs},
                      {"hits", e.hits},
                      {"recall", e.recall},
                      {"new_entries", e.new_entries},
                      {"total_entries", e.total_entries}});
  }
  if (const auto entries_out = o.Optional<std::string>("entries_out")) {
    std::vector<json> rows;
    for (const auto& [q, entry] : report.final_state.entries) {
      rows.push_back({{"q", q}, {"entities", entry.entity_scores}});
    }
    WriteLines(*entries_out, rows);
  }
  return {{"epochs", epochs},
          {"fixed_point_epoch", report.fixed_point_epoch},
          {"cold_start_recall", report.epochs.front().recall},
          {"final_recall", report.epochs.back().recall}};
}

json GenSynth(Context& ctx) {
  Options& o = ctx.options;
  SynthConfig cfg;
  cfg.seed = o.Get<uint64_t>("seed", cfg.seed);
  cfg.n_entities = o.Get<size_t>("entities", cfg.n_entities);
  cfg.queries_per_entity = o.Get<size_t>("queries_per_entity", cfg.queries_per_entity);
  cfg.family_fraction = o.Get<double>("family_fraction", cfg.family_fraction);
  cfg.family_size = o.Get<size_t>("family_size", cfg.family_size);
  cfg.days = o.Get<size_t>("days", cfg.days);
  const std::string dir = o.Require<std::string>("out_dir");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());

  const SynthCorpus corpus = GenerateSynthCorpus(cfg);
  std::vector<json> docs, queries, qrels, log;
  std::string text;
  for (const TextDoc& d : corpus.docs) {
    docs.push_back({{"id", d.id}, {"text", d.text}});
    text += d.text + "\n";
  }
  std::map<std::string, size_t> slices;
  for (const SynthQuery& q : corpus.queries) {
    json ops = json::array();
    for (TypoOp op : q.ops) ops.push_back(std::string(TypoOpName(op)));
    queries.push_back({{"q", q.text}, {"e", q.entity}, {"slice", q.slice}, {"ops", ops}});
    ++slices[q.slice];
  }
  for (const auto& [q, rel] : corpus.qrels) qrels.push_back({{"q", q}, {"rel", rel}});
  for (const LogRecord& r : corpus.log) {
    log.push_back({{"q", r.query}, {"e", r.entity}, {"n", r.engagements}, {"day", r.day}});
    text += r.query + "\n";
  }
  const std::filesystem::path base(dir);
  WriteLines((base / "docs.jsonl").string(), docs);
  WriteLines((base / "queries.jsonl").string(), queries);
  WriteLines((base / "qrels.jsonl").string(), qrels);
  WriteLines((base / "log.jsonl").string(), log);
  WriteFile((base / "corpus.txt").string(), text);
  return {{"docs", docs.size()},
          {"queries", queries.size()},
          {"log_records", log.size()},
          {"slices", slices},
          {"out_dir", dir}};
}

}  // namespace

std::vector<TextDoc> LoadTextDocs(const std::string& path) {
  std::vector<TextDoc> docs;
  ForEachJson(path, [&](const json& j) {
    TextDoc d;
    d.id = IdString(j.at("id"));
    d.text = j.at("text").get<std::string>();
    if (j.contains("payload") && j["payload"].is_string()) d.payload = j["payload"];
    docs.push_back(std::move(d));
  });
  return docs;
}

std::vector<std::string> PipelineCommands() {
  return {"tokenize.train", "tokenize.apply", "encoder.train",  "encoder.encode",
          "index.build",    "index.search",   "index.stats",    "search",
          "mine.pairs",     "mine.negatives", "mine.split",     "eval.run",
          "sim.replay",     "gen.synth"};
}

json RunPipeline(std::string_view command, const json& options) {
  const auto start = std::chrono::steady_clock::now();
  Options o(options);
  std::vector<std::string> warnings;
  Context ctx{o, warnings};
  json meta = json::object();
  json result;
  if (command == "tokenize.train") {
    result = TokenizeTrain(ctx);
  } else if (command == "tokenize.apply") {
    result = TokenizeApply(ctx);
  } else if (command == "encoder.train") {
    result = EncoderTrain(ctx);
  } else if (command == "encoder.encode") {
    result = EncoderEncode(ctx);
  } else if (command == "index.build") {
    result = IndexBuild(ctx);
  } else if (command == "index.search" || command == "search") {
    result = Search(ctx);
  } else if (command == "index.stats") {
    result = IndexStats(ctx);
  } else if (command == "mine.pairs") {
    result = MinePairs(ctx);
  } else if (command == "mine.negatives") {
    result = MineNegatives(ctx);
  } else if (command == "mine.split") {
    result = MineSplit(ctx);
  } else if (command == "eval.run") {
    result = EvalRun(ctx, meta);
  } else if (command == "sim.replay") {
    result = SimReplay(ctx);
  } else if (command == "gen.synth") {
    result = GenSynth(ctx);
  } else {
    throw ValidationError("unknown command '" + std::string(command) + "'");
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  meta["elapsed_seconds"] = elapsed.count();
  return {{"command", std::string(command)},
          {"config", o.resolved()},
          {"result", result},
          {"warnings", warnings},
          {"meta", meta}};
}

}  // namespace sfns
