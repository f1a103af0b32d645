#include "rainbench/survey_service.h"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <thread>

#include <fcntl.h>
#include <sys/socket.h>
#include <unistd.h>

#include <httplib.h>
#include <json.hpp>

#include "rainbench/error.h"
#include "rainbench/file_io.h"
#include "rainbench/rng.h"

namespace rainbench {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// EventLog

EventLog::EventLog(fs::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorKind::kIoError, "cannot open event log " + path_.string());
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

void EventLog::append_line(const std::string& line) {
  const std::string record = line + "\n";
  std::lock_guard lock(mu_);
  // One write() per record; O_APPEND keeps concurrent appends whole.
  const ssize_t n = ::write(fd_, record.data(), record.size());
  if (n != static_cast<ssize_t>(record.size())) {
    throw Error(ErrorKind::kIoError, "short append to " + path_.string());
  }
  ::fdatasync(fd_);
}

void EventLog::append_session(const SurveySession& session, std::int64_t created_at) {
  ordered_json j;
  j["type"] = "session";
  j["session_id"] = session.session_id();
  j["seed"] = session.seed();
  j["created_at"] = created_at;
  j["items"] = ordered_json::array();
  for (const auto& item : session.items()) {
    j["items"].push_back({{"item_id", item.item_id},
                          {"image_ref", item.image_ref},
                          {"ground_truth", std::string(to_string(item.ground_truth))}});
  }
  append_line(j.dump());
}

void EventLog::append_answer(const std::string& session_id, const Answer& answer) {
  ordered_json j;
  j["type"] = "answer";
  j["session_id"] = session_id;
  j["item_id"] = answer.item_id;
  j["choice"] = std::string(to_string(answer.choice));
  j["answered_at"] = answer.answered_at;
  append_line(j.dump());
}

std::vector<SurveySession> EventLog::replay(const fs::path& path) {
  std::vector<SurveySession> sessions;
  if (!fs::exists(path)) return sessions;
  const std::string text = read_text_file(path);
  std::map<std::string, std::size_t> index;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    const bool torn = end == std::string::npos;
    const std::string_view line(text.data() + start, (torn ? text.size() : end) - start);
    start = torn ? text.size() : end + 1;
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const ordered_json::parse_error&) {
      if (torn) break;
      throw Error(ErrorKind::kSyntaxError, path.string() + ": line " + std::to_string(line_no));
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      const std::string sid = j.at("session_id").get<std::string>();
      if (type == "session") {
        std::vector<QuizItem> items;
        for (const auto& it : j.at("items")) {
          const auto truth = verdict_from_string(it.at("ground_truth").get<std::string>());
          if (!truth) throw Error(ErrorKind::kSchemaError, "bad ground_truth at line " + std::to_string(line_no));
          items.push_back({it.at("item_id").get<std::string>(), it.at("image_ref").get<std::string>(), *truth});
        }
        index[sid] = sessions.size();
        sessions.emplace_back(sid, j.at("seed").get<std::uint64_t>(), std::move(items));
      } else if (type == "answer") {
        const auto it = index.find(sid);
        const auto choice = verdict_from_string(j.at("choice").get<std::string>());
        if (it == index.end() || !choice) {
          throw Error(ErrorKind::kSchemaError, "orphan answer at line " + std::to_string(line_no));
        }
        sessions[it->second].record(
            {j.at("item_id").get<std::string>(), *choice, j.at("answered_at").get<std::int64_t>()});
      }
    } catch (const ordered_json::exception& e) {
      throw Error(ErrorKind::kSchemaError, path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return sessions;
}

// ---------------------------------------------------------------------------
// SurveyStore

std::string random_token() {
  std::random_device rd;
  char buf[33];
  std::snprintf(buf, sizeof(buf), "%08x%08x%08x%08x", rd(), rd(), rd(), rd());
  return buf;
}

namespace {

std::int64_t utc_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

SurveyStore::SurveyStore(std::vector<std::string> syn_pool, std::vector<std::string> real_pool,
                         std::optional<fs::path> log_path, QuizShape shape, std::uint64_t seed, Clock clock)
    : syn_pool_(std::move(syn_pool)),
      real_pool_(std::move(real_pool)),
      shape_(shape),
      clock_(clock ? std::move(clock) : Clock(utc_seconds)),
      seed_rng_(seed) {
  if (log_path) {
    for (auto& s : EventLog::replay(*log_path)) {
      const std::string sid = s.session_id();
      for (const auto& item : s.items()) item_owner_[item.item_id] = sid;
      creation_order_.push_back(sid);
      sessions_.emplace(sid, std::make_shared<Entry>(std::move(s)));
      seed_rng_.next();
    }
    log_ = std::make_unique<EventLog>(*log_path);
  }
}

SurveySession SurveyStore::create_session() {
  std::unique_lock lock(mu_);
  SurveySession s = build_quiz(syn_pool_, real_pool_, seed_rng_.next(), random_token(), shape_);
  if (log_) log_->append_session(s, clock_());
  for (const auto& item : s.items()) item_owner_[item.item_id] = s.session_id();
  creation_order_.push_back(s.session_id());
  sessions_.emplace(s.session_id(), std::make_shared<Entry>(s));
  return s;
}

std::size_t SurveyStore::submit(const std::string& session_id, const std::string& item_id, Verdict choice) {
  std::shared_ptr<Entry> entry;
  {
    std::shared_lock lock(mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorKind::kUnknownItem, "session " + session_id);
    entry = it->second;
  }
  std::lock_guard lock(entry->mu);
  SurveySession next = submit_answer(entry->session, item_id, choice, clock_());
  if (log_) log_->append_answer(session_id, next.answers().back());
  entry->session = std::move(next);
  return entry->session.answers().size();
}

std::optional<SurveySession> SurveyStore::session(const std::string& session_id) const {
  std::shared_ptr<Entry> entry;
  {
    std::shared_lock lock(mu_);
    const auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return std::nullopt;
    entry = it->second;
  }
  std::lock_guard lock(entry->mu);
  return entry->session;
}

std::optional<QuizItem> SurveyStore::item(const std::string& item_id) const {
  std::string sid;
  {
    std::shared_lock lock(mu_);
    const auto it = item_owner_.find(item_id);
    if (it == item_owner_.end()) return std::nullopt;
    sid = it->second;
  }
  const auto s = session(sid);
  if (!s) return std::nullopt;
  const QuizItem* item = s->find_item(item_id);
  return item ? std::optional<QuizItem>(*item) : std::nullopt;
}

std::vector<SurveySession> SurveyStore::sessions() const {
  std::vector<std::string> ids;
  {
    std::shared_lock lock(mu_);
    ids = creation_order_;
  }
  std::vector<SurveySession> out;
  for (const auto& id : ids) {
    if (auto s = session(id)) out.push_back(std::move(*s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// SurveyServer

namespace {

void send_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view error, const std::string& detail) {
  send_json(res, status, {{"error", std::string(error)}, {"detail", detail}});
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownItem: return 404;
    case ErrorKind::kAlreadyAnswered:
    case ErrorKind::kSessionComplete: return 409;
    case ErrorKind::kNoCompleteSessions: return 409;
    default: return 500;
  }
}

std::string image_content_type(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8) return "image/jpeg";
  return "image/png";
}

ordered_json metrics_json(const SurveyMetrics& m) {
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  return {{"fpr", opt(m.fpr)}, {"tpr", opt(m.tpr)}, {"precision", opt(m.precision)}, {"accuracy", opt(m.accuracy)}};
}

}  // namespace

SurveyServer::SurveyServer(SurveyStore& store, ServerOptions options)
    : store_(store), options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  // httplib's default adds SO_REUSEPORT, which would let a second server
  // share a port that is already taken.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  install_routes();
}

SurveyServer::~SurveyServer() { stop(); }

void SurveyServer::install_routes() {
  auto& svr = *server_;

  svr.Post("/api/session", [this](const httplib::Request&, httplib::Response& res) {
    try {
      const SurveySession s = store_.create_session();
      ordered_json items = ordered_json::array();
      for (const auto& item : s.items()) {
        items.push_back({{"item_id", item.item_id}, {"image_url", "/api/image/" + item.item_id}});
      }
      send_json(res, 200, {{"session_id", s.session_id()}, {"items", std::move(items)}});
    } catch (const Error& e) {
      send_error(res, 500, e.name(), e.detail());
    }
  });

  svr.Get("/api/image/:item_id", [this](const httplib::Request& req, httplib::Response& res) {
    const auto item = store_.item(req.path_params.at("item_id"));
    if (!item) return send_error(res, 404, "UnknownItem", req.path_params.at("item_id"));
    try {
      const auto bytes = read_file(item->image_ref);
      res.status = 200;
      res.set_content(std::string(bytes.begin(), bytes.end()), image_content_type(bytes));
    } catch (const Error& e) {
      send_error(res, 500, e.name(), "image unavailable");
    }
  });

  svr.Post("/api/session/:session_id/answer", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string sid = req.path_params.at("session_id");
    if (!store_.session(sid)) return send_error(res, 404, "UnknownSession", sid);
    std::string item_id;
    std::optional<Verdict> choice;
    try {
      const auto body = ordered_json::parse(req.body);
      item_id = body.at("item_id").get<std::string>();
      choice = verdict_from_string(body.at("choice").get<std::string>());
    } catch (const ordered_json::exception&) {
      return send_error(res, 422, "MalformedBody", "expected {item_id, choice}");
    }
    if (!choice) return send_error(res, 422, "MalformedBody", "choice must be \"real\" or \"fake\"");
    try {
      const std::size_t answered = store_.submit(sid, item_id, *choice);
      const std::size_t total = store_.shape().total();
      send_json(res, 200, {{"answered", answered}, {"remaining", total - answered}});
    } catch (const Error& e) {
      send_error(res, status_for(e.kind()), e.name(), e.detail());
    }
  });

  svr.Get("/api/session/:session_id/result", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string sid = req.path_params.at("session_id");
    const auto s = store_.session(sid);
    if (!s) return send_error(res, 404, "UnknownSession", sid);
    if (!s->complete()) return send_error(res, 409, "SessionOpen", std::to_string(s->answers().size()) + " answered");
    ordered_json items = ordered_json::array();
    std::size_t correct = 0;
    for (const auto& item : s->items()) {
      const Answer* a = s->find_answer(item.item_id);
      const bool ok = a->choice == item.ground_truth;
      correct += ok ? 1 : 0;
      items.push_back({{"item_id", item.item_id},
                       {"image_url", "/api/image/" + item.item_id},
                       {"chosen", std::string(to_string(a->choice))},
                       {"truth", std::string(to_string(item.ground_truth))},
                       {"correct", ok}});
    }
    send_json(res, 200,
              {{"session_id", sid}, {"items", std::move(items)}, {"correct", correct},
               {"accuracy", session_accuracy(*s)}});
  });

  svr.Get("/api/report", [this](const httplib::Request& req, httplib::Response& res) {
    if (options_.admin_token.empty()) return send_error(res, 403, "ReportDisabled", "no admin token configured");
    const std::string expected = "Bearer " + options_.admin_token;
    if (req.get_header_value("Authorization") != expected) {
      return send_error(res, 401, "Unauthorized", "admin token required");
    }
    Verdict positive = Verdict::kFake;
    if (req.has_param("positive")) {
      const auto p = verdict_from_string(req.get_param_value("positive"));
      if (!p) return send_error(res, 422, "MalformedQuery", "positive must be real or fake");
      positive = *p;
    }
    try {
      const auto sessions = store_.sessions();
      const Tally t = tally_sessions(sessions, positive);
      send_json(res, 200,
                {{"positive_class", std::string(to_string(positive))},
                 {"sessions_complete", t.complete_sessions},
                 {"sessions_open", t.open_sessions},
                 {"matrix", {{"tp", t.matrix.tp}, {"fp", t.matrix.fp}, {"tn", t.matrix.tn}, {"fn", t.matrix.fn}}},
                 {"metrics", metrics_json(survey_metrics(t.matrix))}});
    } catch (const Error& e) {
      send_error(res, status_for(e.kind()), e.name(), e.detail());
    }
  });

  if (options_.static_dir) svr.set_mount_point("/", options_.static_dir->string());
}

int SurveyServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorKind::kBindFailed, host + ":0");
    return bound;
  }
  if (!server_->bind_to_port(host, port)) throw Error(ErrorKind::kBindFailed, host + ":" + std::to_string(port));
  return port;
}

void SurveyServer::listen() {
  listening_ = true;
  if (!stop_requested_) server_->listen_after_bind();
  finished_ = true;
}

// httplib ignores stop() until its accept loop is running, so a stop that
// races an about-to-start listen() waits for the loop first.
void SurveyServer::stop() {
  stop_requested_ = true;
  if (!listening_) return;
  while (!server_->is_running() && !finished_) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  server_->stop();
}

}  // namespace rainbench
