#include "cruciverba/service.h"

#include <httplib.h>

#include <algorithm>
#include <cstdio>

#include "cruciverba/rouge.h"
#include "cruciverba/text.h"
#include "cruciverba/validator.h"

namespace cruciverba {

using nlohmann::json;

std::string_view to_string(DecisionState s) {
  switch (s) {
    case DecisionState::kAccepted: return "accepted";
    case DecisionState::kRejected: return "rejected";
    case DecisionState::kEdited: return "edited";
  }
  return "accepted";
}

namespace {

DecisionState parse_decision_state(const std::string& s) {
  if (s == "accepted") return DecisionState::kAccepted;
  if (s == "rejected") return DecisionState::kRejected;
  if (s == "edited") return DecisionState::kEdited;
  throw Error(ErrorCode::kSchemaError, "unknown decision state " + s);
}

json verdict_json(const CurationVerdict& v) {
  json reasons = json::array();
  for (auto r : v.reasons) reasons.push_back(to_string(r));
  return json{{"accepted", v.accepted}, {"reasons", reasons}, {"keywords", v.keywords}, {"word_count", v.word_count}};
}

CurationVerdict verdict_from_json(const json& j) {
  CurationVerdict v;
  v.accepted = j.at("accepted").get<bool>();
  for (const auto& r : j.at("reasons")) {
    const std::string s = r.get<std::string>();
    for (auto reason : {RejectionReason::kTooShort, RejectionReason::kTooLong, RejectionReason::kNoValidKeyword}) {
      if (to_string(reason) == s) v.reasons.push_back(reason);
    }
  }
  v.keywords = j.at("keywords").get<std::vector<std::string>>();
  v.word_count = j.at("word_count").get<int>();
  return v;
}

void require_object(const json& body) {
  if (!body.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be a JSON object");
}

std::optional<std::string> optional_string(const json& body, const char* key) {
  if (!body.contains(key) || body[key].is_null()) return std::nullopt;
  if (!body[key].is_string()) throw Error(ErrorCode::kInvalidArgument, std::string("\"") + key + "\" must be a string");
  return body[key].get<std::string>();
}

template <typename T>
std::optional<T> optional_integer(const json& body, const char* key) {
  if (!body.contains(key) || body[key].is_null()) return std::nullopt;
  if (!body[key].is_number_integer()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("\"") + key + "\" must be an integer");
  }
  return body[key].get<T>();
}

std::string format_seq(char prefix, uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%06llu", prefix, static_cast<unsigned long long>(n));
  return buf;
}

uint64_t seq_from_stem(const std::filesystem::path& p) {
  const std::string stem = p.stem().string();
  if (stem.size() < 2) return 0;
  try {
    return std::stoull(stem.substr(1));
  } catch (const std::exception&) {
    return 0;
  }
}

void apply_rouge(ClueRecord& r) {
  const RougeTriple t = score_pair(r.clue, r.context);
  r.rouge1 = t.rouge1.f1;
  r.rouge2 = t.rouge2.f1;
  r.rougeL = t.rougeL.f1;
}

bool selected_for_puzzle(const ClueRecord& r, const Decision& d) {
  if (d.state == DecisionState::kAccepted) return true;
  return d.state == DecisionState::kEdited && !r.validation.answer_leak;
}

}  // namespace

json to_json(const Session& s) {
  json styles = json::array();
  for (auto st : s.selected_styles) styles.push_back(to_string(st));
  json decisions = json::object();
  for (const auto& [id, d] : s.decisions) {
    json dj{{"state", to_string(d.state)}};
    if (d.state == DecisionState::kEdited) dj["text"] = d.edited_text;
    decisions[id] = dj;
  }
  return json{{"id", s.id},
              {"source", s.source},
              {"article", to_json(s.article)},
              {"curation", verdict_json(s.curation)},
              {"selected_styles", styles},
              {"clue_ids", s.clue_ids},
              {"decisions", decisions},
              {"puzzle_id", s.puzzle_id ? json(*s.puzzle_id) : json(nullptr)},
              {"created_at", format_utc(s.created_at)}};
}

Session session_from_json(const json& j) {
  try {
    Session s;
    s.id = j.at("id").get<std::string>();
    s.source = j.at("source").get<std::string>();
    s.article = article_from_json(j.at("article"));
    s.curation = verdict_from_json(j.at("curation"));
    for (const auto& st : j.at("selected_styles")) {
      auto style = parse_clue_style(st.get<std::string>());
      if (!style) throw Error(ErrorCode::kSchemaError, "unknown style in session " + s.id);
      s.selected_styles.insert(*style);
    }
    s.clue_ids = j.at("clue_ids").get<std::vector<std::string>>();
    for (const auto& [id, d] : j.at("decisions").items()) {
      Decision dec{parse_decision_state(d.at("state").get<std::string>()), d.value("text", "")};
      s.decisions[id] = dec;
    }
    if (!j.at("puzzle_id").is_null()) s.puzzle_id = j.at("puzzle_id").get<std::string>();
    s.created_at = parse_utc(j.at("created_at").get<std::string>());
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaError, std::string("session: ") + e.what());
  }
}

Service::Service(ServiceDeps deps) : deps_(std::move(deps)) {
  if (!deps_.store) throw Error(ErrorCode::kInvalidArgument, "service needs a dataset store");
  std::filesystem::create_directories(deps_.state_dir / "sessions");
  std::filesystem::create_directories(deps_.state_dir / "puzzles");
  for (const auto& f : std::filesystem::directory_iterator(deps_.state_dir / "sessions")) {
    if (f.path().extension() != ".json") continue;
    const Session s = session_from_json(json::parse(read_file(f.path())));
    for (const auto& c : s.clue_ids) clue_owner_[c] = s.id;
    next_session_ = std::max(next_session_, seq_from_stem(f.path()) + 1);
  }
  for (const auto& f : std::filesystem::directory_iterator(deps_.state_dir / "puzzles")) {
    if (f.path().extension() == ".json") next_puzzle_ = std::max(next_puzzle_, seq_from_stem(f.path()) + 1);
  }
}

std::filesystem::path Service::session_path(const std::string& id) const {
  return deps_.state_dir / "sessions" / (id + ".json");
}

std::filesystem::path Service::puzzle_path(const std::string& id) const {
  return deps_.state_dir / "puzzles" / (id + ".json");
}

Session Service::load_session(const std::string& id) const {
  const auto path = session_path(id);
  if (id.empty() || id.find_first_of("/\\.") != std::string::npos || !std::filesystem::exists(path)) {
    throw Error(ErrorCode::kNotFound, "no session " + id);
  }
  return session_from_json(json::parse(read_file(path)));
}

void Service::save_session(const Session& s) { write_file_atomic(session_path(s.id), to_json(s).dump(2) + "\n"); }

std::shared_ptr<std::mutex> Service::session_lock(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto& m = session_locks_[id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

std::string Service::owner_of(const std::string& clue_id) const {
  std::lock_guard lock(mutex_);
  auto it = clue_owner_.find(clue_id);
  if (it == clue_owner_.end()) throw Error(ErrorCode::kNotFound, "no clue " + clue_id);
  return it->second;
}

std::string Service::next_id(char prefix, uint64_t& counter) {
  std::lock_guard lock(mutex_);
  return format_seq(prefix, counter++);
}

json Service::clue_view(const ClueRecord& r, const Session& s) const {
  json j = to_json(r);
  j["session_id"] = s.id;
  auto it = s.decisions.find(r.id);
  j["decision"] = it == s.decisions.end() ? json(nullptr) : json(to_string(it->second.state));
  return j;
}

json Service::session_view(const Session& s) const {
  json j = to_json(s);
  json clues = json::array();
  for (const auto& id : s.clue_ids) {
    if (auto r = deps_.store->get(id)) clues.push_back(clue_view(*r, s));
  }
  j["clues"] = clues;
  return j;
}

json Service::create_session(const json& body) {
  require_object(body);
  const auto text_in = optional_string(body, "text");
  const auto title_in = optional_string(body, "title");
  Session s;
  if (text_in) {
    if (text::trim(*text_in).empty()) throw Error(ErrorCode::kEmptyContext, "pasted text is empty");
    s.source = "text";
    s.article = article_from_text(title_in.value_or("Testo"), *text_in);
    s.curation.accepted = true;
    s.curation.word_count = static_cast<int>(text::split_whitespace(s.article.intro_text).size());
  } else if (title_in) {
    if (!deps_.wiki) throw Error(ErrorCode::kInvalidArgument, "article ingestion is not configured");
    s.source = "title";
    s.article = deps_.wiki->extract_metadata(deps_.wiki->fetch_article(*title_in));
    s.curation = filter_article(s.article, deps_.curation);
    if (!s.curation.accepted) {
      json reasons = json::array();
      for (auto r : s.curation.reasons) reasons.push_back(to_string(r));
      throw ApiError(ErrorCode::kCurationRejected, "article \"" + s.article.title + "\" failed curation",
                     json{{"reasons", reasons}, {"word_count", s.curation.word_count}});
    }
  } else {
    throw Error(ErrorCode::kInvalidArgument, "provide \"text\" or \"title\"");
  }
  s.created_at = deps_.clock();
  s.id = next_id('s', next_session_);
  auto lock = session_lock(s.id);
  std::lock_guard guard(*lock);
  save_session(s);
  return session_view(s);
}

json Service::generate(const std::string& session_id, const json& body) {
  require_object(body);
  auto lock = session_lock(session_id);
  std::lock_guard guard(*lock);
  Session s = load_session(session_id);
  if (!deps_.gateway) throw Error(ErrorCode::kInvalidArgument, "no LLM gateway configured");

  const auto keyword = optional_string(body, "keyword");
  if (!keyword) throw Error(ErrorCode::kInvalidArgument, "\"keyword\" is required");
  if (!filter_keyword(*keyword, deps_.curation)) {
    throw Error(ErrorCode::kInvalidArgument, "keyword \"" + *keyword + "\" fails the keyword filter");
  }
  std::vector<ClueStyle> styles;
  if (!body.contains("styles")) {
    styles.push_back(ClueStyle::kUnrestricted);
  } else {
    if (!body["styles"].is_array() || body["styles"].empty()) {
      throw Error(ErrorCode::kInvalidArgument, "\"styles\" must be a non-empty array");
    }
    for (const auto& st : body["styles"]) {
      auto style = st.is_string() ? parse_clue_style(st.get<std::string>()) : std::nullopt;
      if (!style) throw Error(ErrorCode::kInvalidArgument, "unknown style " + st.dump());
      if (std::find(styles.begin(), styles.end(), *style) == styles.end()) styles.push_back(*style);
    }
  }
  const int n = optional_integer<int>(body, "n").value_or(kDefaultClueCount);
  if (n < 1 || n > 20) throw Error(ErrorCode::kInvalidArgument, "\"n\" must be between 1 and 20");

  json clues = json::array();
  json shortfalls = json::array();
  int duplicates = 0;
  for (ClueStyle style : styles) {
    ClueDrafts drafts = generate_clues(*deps_.gateway, s.article, *keyword, style, n, deps_.generation, *deps_.prompts);
    if (drafts.shortfall) {
      shortfalls.push_back({{"style", to_string(style)},
                            {"requested", drafts.requested},
                            {"received", drafts.drafts.size()},
                            {"request_id", drafts.transcript.request_id}});
    }
    s.selected_styles.insert(style);
    for (ClueRecord& r : drafts.drafts) {
      r.validation = validate(r.clue, r.keyword, style);
      apply_rouge(r);
      try {
        r.id = deps_.store->append(r);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDuplicateRecord) throw;
        ++duplicates;
        continue;
      }
      s.clue_ids.push_back(r.id);
      {
        std::lock_guard map_lock(mutex_);
        clue_owner_[r.id] = s.id;
      }
      save_session(s);
      clues.push_back(clue_view(r, s));
    }
  }
  save_session(s);
  return json{{"session_id", s.id}, {"clues", clues}, {"shortfalls", shortfalls}, {"skipped_duplicates", duplicates}};
}

json Service::decide(const std::string& clue_id, const json& body) {
  require_object(body);
  const std::string sid = owner_of(clue_id);
  auto lock = session_lock(sid);
  std::lock_guard guard(*lock);
  Session s = load_session(sid);
  auto record = deps_.store->get(clue_id);
  if (!record || record->deleted) throw Error(ErrorCode::kNotFound, "no clue " + clue_id);

  const auto action = optional_string(body, "action");
  if (!action) throw Error(ErrorCode::kInvalidArgument, "\"action\" is required");
  Decision d;
  if (*action == "accept") {
    d.state = DecisionState::kAccepted;
  } else if (*action == "reject") {
    d.state = DecisionState::kRejected;
  } else if (*action == "edit") {
    const auto edited = optional_string(body, "text");
    if (!edited || text::trim(*edited).empty()) throw Error(ErrorCode::kInvalidArgument, "edit needs a non-empty \"text\"");
    d.state = DecisionState::kEdited;
    d.edited_text = text::normalize_whitespace(*edited);
    record->clue = d.edited_text;
    record->validation = validate(record->clue, record->keyword, record->style);
    apply_rouge(*record);
    deps_.store->update(*record);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "action must be accept, reject or edit");
  }
  s.decisions[clue_id] = d;
  save_session(s);
  return clue_view(*record, s);
}

json Service::rate(const std::string& clue_id, const json& body) {
  require_object(body);
  const std::string sid = owner_of(clue_id);
  auto lock = session_lock(sid);
  std::lock_guard guard(*lock);
  Session s = load_session(sid);
  auto record = deps_.store->get(clue_id);
  if (!record || record->deleted) throw Error(ErrorCode::kNotFound, "no clue " + clue_id);
  const auto rating = optional_string(body, "rating");
  if (!rating || rating->size() != 1 || !is_valid_rating((*rating)[0])) {
    throw Error(ErrorCode::kInvariantViolation, "rating must be one of A, B, C, D, E");
  }
  record->rating = (*rating)[0];
  deps_.store->update(*record);
  return clue_view(*record, s);
}

json Service::build_puzzle(const std::string& session_id, const json& body) {
  if (!body.is_null()) require_object(body);
  auto lock = session_lock(session_id);
  std::lock_guard guard(*lock);
  Session s = load_session(session_id);

  GridConfig cfg = deps_.grid;
  if (body.is_object()) {
    cfg.seed = optional_integer<uint64_t>(body, "seed").value_or(cfg.seed);
    cfg.max_width = optional_integer<int>(body, "max_width").value_or(cfg.max_width);
    cfg.max_height = optional_integer<int>(body, "max_height").value_or(cfg.max_height);
  }
  std::vector<Entry> entries;
  for (const auto& id : s.clue_ids) {
    auto d = s.decisions.find(id);
    if (d == s.decisions.end()) continue;
    auto r = deps_.store->get(id);
    if (!r || r->deleted || !selected_for_puzzle(*r, d->second)) continue;
    entries.push_back(make_entry(r->id, r->keyword, r->clue));
  }
  if (entries.empty()) throw Error(ErrorCode::kEmptySelection, "session " + s.id + " has no accepted clues");

  const BuildResult result = build(entries, cfg);
  json unplaced = json::array();
  for (const auto& u : result.unplaced) unplaced.push_back({{"entry_id", u.entry_id}, {"reason", u.reason}});
  const std::string pid = next_id('p', next_puzzle_);
  const json puzzle{{"id", pid},
                    {"session_id", s.id},
                    {"seed", cfg.seed},
                    {"layout", layout_to_json(result.layout, entries)},
                    {"unplaced", unplaced},
                    {"budget_exhausted", result.budget_exhausted}};
  write_file_atomic(puzzle_path(pid), puzzle.dump(2) + "\n");
  s.puzzle_id = pid;
  save_session(s);
  return puzzle;
}

Service::Rendered Service::get_puzzle(const std::string& puzzle_id, const std::string& format) const {
  const auto path = puzzle_path(puzzle_id);
  if (puzzle_id.empty() || puzzle_id.find_first_of("/\\.") != std::string::npos || !std::filesystem::exists(path)) {
    throw Error(ErrorCode::kNotFound, "no puzzle " + puzzle_id);
  }
  const RenderFormat fmt = parse_render_format(format.empty() ? "json" : format);
  const json puzzle = json::parse(read_file(path));
  const json& lj = puzzle.at("layout");
  const std::string body = render(layout_from_json(lj), entries_from_layout_json(lj), fmt);
  switch (fmt) {
    case RenderFormat::kText: return {"text/plain; charset=utf-8", body};
    case RenderFormat::kJson: return {"application/json", body};
    case RenderFormat::kPrintableHtml: return {"text/html; charset=utf-8", body};
  }
  return {"text/plain; charset=utf-8", body};
}

json Service::get_session(const std::string& session_id) const { return session_view(load_session(session_id)); }

json Service::get_clue(const std::string& clue_id) const {
  const Session s = load_session(owner_of(clue_id));
  auto record = deps_.store->get(clue_id);
  if (!record) throw Error(ErrorCode::kNotFound, "no clue " + clue_id);
  return clue_view(*record, s);
}

json Service::codebook() {
  json levels = json::array();
  for (const auto& level : rating_codebook()) {
    levels.push_back({{"code", std::string(1, level.code)}, {"description", level.description}});
  }
  return json{{"levels", levels}};
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kNetwork:
    case ErrorCode::kRateLimited:
    case ErrorCode::kAuthFailure:
    case ErrorCode::kTimeout:
    case ErrorCode::kMalformedResponse:
    case ErrorCode::kUpstreamError:
    case ErrorCode::kUnparseableResponse:
    case ErrorCode::kFixtureMissing: return 502;
    case ErrorCode::kIoError: return 500;
    default: return 400;
  }
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message, const json* details) {
  json err{{"code", to_string(code)}, {"message", message}};
  if (details != nullptr) err["details"] = *details;
  send_json(res, http_status(code), json{{"error", err}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json(nullptr);
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kInvalidArgument, "request body is not valid JSON");
  return j;
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const ApiError& e) {
      send_error(res, e.code(), e.what(), &e.details());
    } catch (const Error& e) {
      send_error(res, e.code(), e.what(), nullptr);
    } catch (const json::exception& e) {
      send_error(res, ErrorCode::kSchemaError, e.what(), nullptr);
    } catch (const std::filesystem::filesystem_error& e) {
      send_error(res, ErrorCode::kIoError, e.what(), nullptr);
    }
  };
}

}  // namespace

void register_routes(httplib::Server& server, Service& service) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  server.Post("/v1/sessions", guarded([&](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 201, service.create_session(parse_body(req)));
              }));
  server.Get(R"(/v1/sessions/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, service.get_session(req.matches[1]));
             }));
  server.Post(R"(/v1/sessions/([^/]+)/clues)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, service.generate(req.matches[1], parse_body(req)));
              }));
  server.Post(R"(/v1/sessions/([^/]+)/puzzle)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 201, service.build_puzzle(req.matches[1], parse_body(req)));
              }));
  server.Get(R"(/v1/clues/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, 200, service.get_clue(req.matches[1]));
             }));
  server.Post(R"(/v1/clues/([^/]+)/decision)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, service.decide(req.matches[1], parse_body(req)));
              }));
  server.Post(R"(/v1/clues/([^/]+)/rating)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                send_json(res, 200, service.rate(req.matches[1], parse_body(req)));
              }));
  server.Get(R"(/v1/puzzles/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
               const auto rendered = service.get_puzzle(req.matches[1], req.get_param_value("format"));
               res.status = 200;
               res.set_content(rendered.body, rendered.content_type);
             }));
  server.Get("/v1/codebook", guarded([&](const httplib::Request&, httplib::Response& res) {
               send_json(res, 200, Service::codebook());
             }));
}

}  // namespace cruciverba
