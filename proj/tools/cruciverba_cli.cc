// cruciverba: batch pipeline and HTTP server for educational crosswords.

#include <httplib.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "cruciverba/config.h"
#include "cruciverba/curation.h"
#include "cruciverba/dataset.h"
#include "cruciverba/error.h"
#include "cruciverba/grid.h"
#include "cruciverba/llm.h"
#include "cruciverba/rouge.h"
#include "cruciverba/runtime.h"
#include "cruciverba/service.h"
#include "cruciverba/text.h"
#include "cruciverba/validator.h"

namespace {

using cruciverba::Error;
using cruciverba::ErrorCode;
using nlohmann::json;
namespace fs = std::filesystem;

struct Common {
  std::string config_path;
  bool json_output = false;
  std::string replay_dir;
  std::string record_dir;
  std::string cache_dir;
  std::string data_dir;
};

cruciverba::RuntimeOptions runtime_options(const Common& c) {
  cruciverba::RuntimeOptions opts;
  opts.config = c.config_path.empty() ? cruciverba::default_config() : cruciverba::load_config(c.config_path);
  if (!c.cache_dir.empty()) opts.config.paths.cache_dir = c.cache_dir;
  if (!c.data_dir.empty()) opts.config.paths.data_dir = c.data_dir;
  if (!c.replay_dir.empty()) opts.replay_dir = fs::path(c.replay_dir);
  if (!c.record_dir.empty()) opts.record_dir = fs::path(c.record_dir);
  return opts;
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::vector<json> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (cruciverba::text::trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw Error(ErrorCode::kSchemaError, path.string() + ":" + std::to_string(line_no) + " is not a JSON object");
    }
    rows.push_back(std::move(j));
  }
  return rows;
}

std::string field(const json& row, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (row.contains(n) && row[n].is_string()) return row[n].get<std::string>();
  }
  return {};
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    cruciverba::write_file_atomic(out_path, content);
  }
}

void append_line(const fs::path& path, const std::string& line) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << line << '\n';
}

std::vector<cruciverba::ClueStyle> parse_styles(const std::vector<std::string>& names) {
  std::vector<cruciverba::ClueStyle> out;
  for (const auto& n : names) {
    auto s = cruciverba::parse_clue_style(n);
    if (!s) throw Error(ErrorCode::kInvalidArgument, "unknown style \"" + n + "\"");
    out.push_back(*s);
  }
  return out;
}

std::vector<cruciverba::ClueRecord> load_records(const std::string& in_path, const std::string& data_dir) {
  if (!in_path.empty()) {
    auto result = cruciverba::import_jsonl(in_path);
    if (!result.errors.empty()) {
      const auto& e = result.errors.front();
      throw Error(ErrorCode::kSchemaError, in_path + ":" + std::to_string(e.line) + ": " + e.message);
    }
    return result.records;
  }
  if (data_dir.empty()) throw Error(ErrorCode::kInvalidArgument, "give --in or --data");
  return cruciverba::DatasetStore(data_dir).snapshot();
}

int run_ingest(const Common& c, const std::string& title, const std::string& out) {
  const auto rt = cruciverba::make_runtime(runtime_options(c));
  const auto article = rt.wiki->extract_metadata(rt.wiki->fetch_article(title));
  if (!out.empty()) append_line(out, cruciverba::to_json(article).dump());
  if (c.json_output) {
    std::cout << cruciverba::to_json(article).dump(2) << '\n';
  } else {
    std::cout << article.title << '\n'
              << "  url:        " << article.url << '\n'
              << "  words:      " << cruciverba::text::split_whitespace(article.intro_text).size() << '\n'
              << "  views:      " << (article.view_count_available ? std::to_string(article.view_count) : "n/a") << '\n'
              << "  keywords:   " << cruciverba::text::join(article.bold_keywords, ", ") << '\n'
              << "  categories: " << cruciverba::text::join(article.categories, ", ") << '\n'
              << "  summary:    " << article.summary << '\n';
  }
  return 0;
}

int run_curate(const Common& c, const std::string& in, const std::string& out) {
  const auto cfg = runtime_options(c).config.curation;
  cfg.validate();
  std::vector<cruciverba::ArticleRecord> pool;
  for (const auto& row : read_jsonl(in)) pool.push_back(cruciverba::article_from_json(row));
  json report = json::array();
  std::vector<cruciverba::ArticleRecord> accepted;
  std::ostringstream table;
  for (const auto& a : cruciverba::rank_articles(pool)) {
    const auto v = cruciverba::filter_article(a, cfg);
    json reasons = json::array();
    std::vector<std::string> reason_names;
    for (auto r : v.reasons) {
      reasons.push_back(cruciverba::to_string(r));
      reason_names.emplace_back(cruciverba::to_string(r));
    }
    report.push_back({{"title", a.title},
                      {"accepted", v.accepted},
                      {"reasons", reasons},
                      {"word_count", v.word_count},
                      {"view_count", a.view_count},
                      {"keywords", v.keywords}});
    table << (v.accepted ? "ACCEPT " : "REJECT ") << a.title << " (" << v.word_count << " words, " << a.view_count
          << " views)";
    if (!v.accepted) table << " " << cruciverba::text::join(reason_names, ",");
    table << '\n';
    if (v.accepted) {
      auto kept = a;
      kept.bold_keywords = v.keywords;
      accepted.push_back(std::move(kept));
    }
  }
  if (!out.empty()) {
    std::string lines;
    for (const auto& a : accepted) lines += cruciverba::to_json(a).dump() + "\n";
    cruciverba::write_file_atomic(out, lines);
  }
  std::cout << (c.json_output ? report.dump(2) + "\n" : table.str());
  return 0;
}

struct GenArgs {
  std::string title;
  std::string text_file;
  std::string label = "Testo";
  std::string keyword;
  std::vector<std::string> styles{"unrestricted"};
  int n = cruciverba::kDefaultClueCount;
  std::string out;
  std::string prompts_dir;
  bool store = false;
};

int run_gen(const Common& c, const GenArgs& g) {
  auto opts = runtime_options(c);
  if (!opts.replay_dir && opts.config.gateway.requires_auth && opts.config.gateway.api_key.empty()) {
    throw Error(ErrorCode::kAuthFailure, "set CRUCIVERBA_LLM_API_KEY (or use --replay)");
  }
  if (g.title.empty() == g.text_file.empty()) throw Error(ErrorCode::kInvalidArgument, "give exactly one of --title, --text-file");
  const auto styles = parse_styles(g.styles);
  const auto rt = cruciverba::make_runtime(opts);
  const auto prompts = g.prompts_dir.empty() ? cruciverba::PromptLibrary::builtin()
                                             : cruciverba::PromptLibrary::load(g.prompts_dir);
  const auto article = g.title.empty() ? cruciverba::article_from_text(g.label, cruciverba::read_file(g.text_file))
                                       : rt.wiki->extract_metadata(rt.wiki->fetch_article(g.title));
  std::unique_ptr<cruciverba::DatasetStore> store;
  if (g.store) store = std::make_unique<cruciverba::DatasetStore>(opts.config.paths.data_dir);

  json all = json::array();
  std::string lines;
  for (auto style : styles) {
    auto drafts = cruciverba::generate_clues(*rt.gateway, article, g.keyword, style, g.n, opts.config.generation, prompts);
    if (drafts.shortfall) {
      std::cerr << "warning: " << cruciverba::to_string(style) << ": got " << drafts.drafts.size() << " of "
                << drafts.requested << " clues\n";
    }
    for (auto& r : drafts.drafts) {
      r.validation = cruciverba::validate(r.clue, r.keyword, style);
      const auto t = cruciverba::score_pair(r.clue, r.context);
      r.rouge1 = t.rouge1.f1;
      r.rouge2 = t.rouge2.f1;
      r.rougeL = t.rougeL.f1;
      if (store) r.id = store->append(r);
      lines += cruciverba::to_json(r).dump() + "\n";
      all.push_back(cruciverba::to_json(r));
      if (!c.json_output) {
        std::cout << "[" << cruciverba::to_string(style) << "] " << r.clue << "  ("
                  << (r.validation.passed() ? "ok" : "check") << ", detected "
                  << cruciverba::to_string(r.validation.detected_style) << (r.validation.answer_leak ? ", LEAK" : "")
                  << ")\n";
      }
    }
  }
  if (!g.out.empty()) cruciverba::write_file_atomic(g.out, lines);
  if (c.json_output) std::cout << all.dump(2) << '\n';
  return 0;
}

int run_validate(const Common& c, const std::string& clue, const std::string& answer, const std::string& style_name,
                 const std::string& in) {
  json out = json::array();
  auto report_one = [&](const std::string& cl, const std::string& ans, cruciverba::ClueStyle st) {
    const auto rep = cruciverba::validate(cl, ans, st);
    json j = cruciverba::to_json(rep);
    j["clue"] = cl;
    j["answer"] = ans;
    out.push_back(j);
    if (!c.json_output) {
      std::cout << (rep.passed() ? "PASS " : "FAIL ") << cl << "  [requested " << cruciverba::to_string(st)
                << ", detected " << cruciverba::to_string(rep.detected_style) << (rep.answer_leak ? ", answer leak" : "")
                << (rep.length_ok ? "" : ", length") << "]\n";
    }
  };
  if (!in.empty()) {
    for (const auto& r : load_records(in, "")) report_one(r.clue, r.keyword, r.style);
  } else {
    if (clue.empty() || answer.empty()) throw Error(ErrorCode::kInvalidArgument, "give --clue and --answer, or --in");
    report_one(clue, answer, parse_styles({style_name}).front());
  }
  if (c.json_output) std::cout << (out.size() == 1 ? out[0] : out).dump(2) << '\n';
  return 0;
}

int run_rouge(const Common& c, const std::string& pairs_path) {
  std::vector<cruciverba::CluePair> pairs;
  for (const auto& row : read_jsonl(pairs_path)) {
    pairs.push_back({field(row, {"clue", "candidate"}), field(row, {"context", "reference"})});
  }
  const auto report = cruciverba::score_corpus(pairs);
  if (c.json_output) {
    std::cout << cruciverba::to_json(report).dump(2) << '\n';
  } else {
    std::cout << cruciverba::format_report_header() << cruciverba::format_report_row(pairs_path, report);
  }
  return 0;
}

int run_compare(const Common& c, const std::string& a_path, const std::string& b_path) {
  auto load = [](const std::string& p) {
    std::vector<cruciverba::KeyedClue> out;
    for (const auto& row : read_jsonl(p)) out.push_back({field(row, {"key", "id"}), field(row, {"clue"})});
    return out;
  };
  const auto report = cruciverba::compare_cluesets(load(a_path), load(b_path));
  if (c.json_output) {
    std::cout << cruciverba::to_json(report).dump(2) << '\n';
  } else {
    std::cout << cruciverba::format_report_header() << cruciverba::format_report_row(a_path + " vs " + b_path, report);
  }
  return 0;
}

int run_stats(const Common& c, const std::string& in) {
  const auto stats = cruciverba::compute_stats(load_records(in, in.empty() ? runtime_options(c).config.paths.data_dir.string() : ""));
  const json j = cruciverba::to_json(stats);
  if (c.json_output) {
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  std::cout << "records: " << stats.record_count << '\n'
            << "context tokens: " << stats.min_context_tokens << ".." << stats.max_context_tokens << '\n'
            << "clue tokens: " << stats.min_clue_tokens << ".." << stats.max_clue_tokens << '\n'
            << "context histogram (bucket: count):\n";
  for (const auto& [b, n] : stats.context_token_histogram) std::cout << "  " << b << ": " << n << '\n';
  std::cout << "clue histogram (bucket: count):\n";
  for (const auto& [b, n] : stats.clue_token_histogram) std::cout << "  " << b << ": " << n << '\n';
  std::cout << "categories:\n";
  for (const auto& [cat, n] : stats.category_counts) std::cout << "  " << (cat.empty() ? "(none)" : cat) << ": " << n << '\n';
  return 0;
}

struct GridArgs {
  std::string in;
  std::string out;
  std::string format = "text";
  std::optional<uint64_t> seed;
  std::optional<int> max_width;
  std::optional<int> max_height;
};

int run_grid(const Common& c, const GridArgs& g) {
  auto cfg = runtime_options(c).config.grid;
  if (g.seed) cfg.seed = *g.seed;
  if (g.max_width) cfg.max_width = *g.max_width;
  if (g.max_height) cfg.max_height = *g.max_height;
  const auto format = cruciverba::parse_render_format(g.format);
  std::vector<cruciverba::Entry> entries;
  int line = 0;
  for (const auto& row : read_jsonl(g.in)) {
    ++line;
    std::string id = field(row, {"id"});
    if (id.empty()) id = "e" + std::to_string(line);
    entries.push_back(cruciverba::make_entry(id, field(row, {"keyword", "answer"}), field(row, {"clue"})));
  }
  if (entries.empty()) throw Error(ErrorCode::kEmptySelection, g.in + " has no entries");
  const auto result = cruciverba::build(entries, cfg);
  for (const auto& u : result.unplaced) std::cerr << "unplaced: " << u.entry_id << " (" << u.reason << ")\n";
  if (result.budget_exhausted) std::cerr << "warning: node budget exhausted after " << result.nodes << " nodes\n";
  write_output(g.out, cruciverba::render(result.layout, entries, format));
  if (c.json_output && !g.out.empty() && g.out != "-") {
    json unplaced = json::array();
    for (const auto& u : result.unplaced) unplaced.push_back({{"entry_id", u.entry_id}, {"reason", u.reason}});
    std::cout << json{{"out", g.out},
                      {"placed", result.layout.placements.size()},
                      {"unplaced", unplaced},
                      {"budget_exhausted", result.budget_exhausted},
                      {"nodes", result.nodes}}
                     .dump(2)
              << '\n';
  }
  return 0;
}

int run_export(const Common& c, const std::string& out, const std::string& style_name, bool include_deleted,
               bool rated_only) {
  cruciverba::DatasetStore store(runtime_options(c).config.paths.data_dir);
  std::optional<cruciverba::ClueStyle> style;
  if (!style_name.empty()) style = parse_styles({style_name}).front();
  const auto n = store.export_jsonl(
      out,
      [&](const cruciverba::ClueRecord& r) { return (!style || r.style == *style) && (!rated_only || r.rating); },
      include_deleted);
  if (c.json_output) {
    std::cout << json{{"exported", n}, {"out", out}}.dump(2) << '\n';
  } else {
    std::cout << "exported " << n << " records to " << out << '\n';
  }
  return 0;
}

int run_import(const Common& c, const std::string& in, bool published) {
  cruciverba::DatasetStore store(runtime_options(c).config.paths.data_dir);
  cruciverba::ImportResult result;
  if (published) {
    auto parsed = cruciverba::import_published(in);
    result.errors = parsed.errors;
    for (auto& r : parsed.records) {
      r.id.clear();
      try {
        store.append(r);
        result.records.push_back(r);
      } catch (const Error& e) {
        result.errors.push_back({0, e.what()});
      }
    }
  } else {
    result = store.import_jsonl(in);
  }
  json errors = json::array();
  for (const auto& e : result.errors) errors.push_back({{"line", e.line}, {"message", e.message}});
  if (c.json_output) {
    std::cout << json{{"imported", result.records.size()}, {"errors", errors}}.dump(2) << '\n';
  } else {
    std::cout << "imported " << result.records.size() << " records\n";
    for (const auto& e : result.errors) std::cerr << in << ":" << e.line << ": " << e.message << '\n';
  }
  return result.errors.empty() ? 0 : cruciverba::exit_code(ErrorCode::kSchemaError);
}

int run_manifest(const Common& c, const std::string& in, const std::string& out_dir) {
  const auto records = load_records(in, in.empty() ? runtime_options(c).config.paths.data_dir.string() : "");
  const json manifest = cruciverba::export_training_manifest(records, out_dir);
  if (c.json_output) {
    std::cout << manifest.dump(2) << '\n';
  } else {
    const auto& s = manifest.at("splits");
    std::cout << "wrote " << out_dir << "/manifest.json (train " << s["train"]["count"] << ", val " << s["val"]["count"]
              << ", test " << s["test"]["count"] << ")\n";
  }
  return 0;
}

int run_serve(const Common& c, const std::string& host, int port) {
  const auto opts = runtime_options(c);
  const auto rt = cruciverba::make_runtime(opts);
  cruciverba::ServiceDeps deps;
  deps.store = std::make_shared<cruciverba::DatasetStore>(opts.config.paths.data_dir);
  deps.wiki = rt.wiki;
  deps.gateway = rt.gateway;
  deps.state_dir = opts.config.paths.data_dir;
  deps.curation = opts.config.curation;
  deps.grid = opts.config.grid;
  deps.generation = opts.config.generation;
  deps.clock = rt.clock;
  cruciverba::Service service(std::move(deps));
  httplib::Server server;
  cruciverba::register_routes(server, service);
  std::cerr << "listening on http://" << host << ":" << port << "/v1\n";
  if (!server.listen(host, port)) throw Error(ErrorCode::kIoError, "cannot listen on " + host + ":" + std::to_string(port));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Italian educational crossword pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_flag("--json", common.json_output, "Emit JSON");
  app.add_option("--replay", common.replay_dir, "Serve HTTP from recorded fixtures")->check(CLI::ExistingDirectory);
  app.add_option("--record", common.record_dir, "Record HTTP exchanges as fixtures");
  app.add_option("--cache", common.cache_dir, "Article cache directory");
  app.add_option("--data", common.data_dir, "Dataset directory");

  std::function<int()> action;

  std::string title, in, out;
  auto* ingest = app.add_subcommand("ingest", "Fetch a Wikipedia article and its metadata");
  ingest->add_option("--title", title, "Article title")->required();
  ingest->add_option("--out", out, "Append the ArticleRecord to this JSONL file");
  ingest->callback([&] { action = [&] { return run_ingest(common, title, out); }; });

  auto* curate = app.add_subcommand("curate", "Filter and rank ingested articles");
  curate->add_option("--in", in, "ArticleRecord JSONL")->required()->check(CLI::ExistingFile);
  curate->add_option("--out", out, "Write accepted articles here");
  curate->callback([&] { action = [&] { return run_curate(common, in, out); }; });

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate clues with the LLM gateway");
  gen->add_option("--title", gen_args.title, "Wikipedia article title");
  gen->add_option("--text-file", gen_args.text_file, "Pasted text file")->check(CLI::ExistingFile);
  gen->add_option("--label", gen_args.label, "Title recorded for pasted text");
  gen->add_option("--keyword", gen_args.keyword, "Answer word")->required();
  gen->add_option("--styles", gen_args.styles, "Clue styles")->delimiter(',');
  gen->add_option("--n", gen_args.n, "Clues per style")->check(CLI::Range(1, 20));
  gen->add_option("--out", gen_args.out, "Write ClueRecords as JSONL");
  gen->add_option("--prompts", gen_args.prompts_dir, "Prompt template directory")->check(CLI::ExistingDirectory);
  gen->add_flag("--store", gen_args.store, "Append the records to the dataset store");
  gen->callback([&] { action = [&] { return run_gen(common, gen_args); }; });

  std::string clue, answer, style_name = "unrestricted";
  auto* validate = app.add_subcommand("validate", "Check clue structure and answer leaks");
  validate->add_option("--clue", clue);
  validate->add_option("--answer", answer);
  validate->add_option("--style", style_name, "Requested style");
  validate->add_option("--in", in, "ClueRecord JSONL")->check(CLI::ExistingFile);
  validate->callback([&] { action = [&] { return run_validate(common, clue, answer, style_name, in); }; });

  auto* rouge = app.add_subcommand("rouge", "ROUGE of clues against their contexts");
  rouge->add_option("--pairs", in, "JSONL of {clue, context}")->required()->check(CLI::ExistingFile);
  rouge->callback([&] { action = [&] { return run_rouge(common, in); }; });

  std::string set_a, set_b;
  auto* compare = app.add_subcommand("compare", "ROUGE between two clue sets keyed by context");
  compare->add_option("--a", set_a, "Candidate JSONL of {key, clue}")->required()->check(CLI::ExistingFile);
  compare->add_option("--b", set_b, "Reference JSONL of {key, clue}")->required()->check(CLI::ExistingFile);
  compare->callback([&] { action = [&] { return run_compare(common, set_a, set_b); }; });

  auto* stats = app.add_subcommand("stats", "Dataset statistics");
  stats->add_option("--in", in, "ClueRecord JSONL (default: the store)")->check(CLI::ExistingFile);
  stats->callback([&] { action = [&] { return run_stats(common, in); }; });

  GridArgs grid_args;
  auto* grid = app.add_subcommand("grid", "Build and render a crossword");
  grid->add_option("--in", grid_args.in, "JSONL of {id, keyword, clue}")->required()->check(CLI::ExistingFile);
  grid->add_option("--out", grid_args.out, "Output file (default stdout)");
  grid->add_option("--format", grid_args.format, "text, json or html");
  grid->add_option("--seed", grid_args.seed);
  grid->add_option("--max-width", grid_args.max_width);
  grid->add_option("--max-height", grid_args.max_height);
  grid->callback([&] { action = [&] { return run_grid(common, grid_args); }; });

  std::string export_style;
  bool include_deleted = false, rated_only = false;
  auto* exp = app.add_subcommand("export", "Export the store as JSONL");
  exp->add_option("--out", out, "Output JSONL")->required();
  exp->add_option("--style", export_style, "Only this style");
  exp->add_flag("--include-deleted", include_deleted);
  exp->add_flag("--rated-only", rated_only);
  exp->callback([&] { action = [&] { return run_export(common, out, export_style, include_deleted, rated_only); }; });

  bool published = false;
  auto* imp = app.add_subcommand("import", "Import ClueRecord JSONL into the store");
  imp->add_option("--in", in, "Input JSONL")->required()->check(CLI::ExistingFile);
  imp->add_flag("--published", published, "Rows follow the published dataset's columns");
  imp->callback([&] { action = [&] { return run_import(common, in, published); }; });

  auto* manifest = app.add_subcommand("manifest", "Write the fine-tuning manifest and splits");
  manifest->add_option("--in", in, "ClueRecord JSONL (default: the store)")->check(CLI::ExistingFile);
  manifest->add_option("--out", out, "Output directory")->required();
  manifest->callback([&] { action = [&] { return run_manifest(common, in, out); }; });

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Run the /v1 HTTP API");
  serve->add_option("--host", host);
  serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve->callback([&] { action = [&] { return run_serve(common, host, port); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    return action();
  } catch (const Error& e) {
    if (common.json_output) {
      std::cout << json{{"error", {{"code", cruciverba::to_string(e.code())}, {"message", e.what()}}}}.dump(2) << '\n';
    }
    std::cerr << "error: " << e.what() << '\n';
    return cruciverba::exit_code(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error: SchemaError: " << e.what() << '\n';
    return cruciverba::exit_code(ErrorCode::kSchemaError);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: IoError: " << e.what() << '\n';
    return cruciverba::exit_code(ErrorCode::kIoError);
  }
}
