#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "rainbench/rng.h"
#include "rainbench/survey.h"

namespace httplib {
class Server;
}

namespace rainbench {

// Append-only newline-delimited JSON log: one "session" record when a
// quiz is served and one "answer" record per verdict.
class EventLog {
 public:
  explicit EventLog(std::filesystem::path path);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void append_session(const SurveySession& session, std::int64_t created_at);
  void append_answer(const std::string& session_id, const Answer& answer);

  /// Rebuilds sessions in creation order. A torn final line (crash during
  /// append) is ignored; any other malformed line is a SyntaxError.
  static std::vector<SurveySession> replay(const std::filesystem::path& path);

 private:
  void append_line(const std::string& line);

  std::filesystem::path path_;
  int fd_ = -1;
  std::mutex mu_;
};

std::string random_token();

// Quiz state shared by all HTTP workers. Sessions are independent; each
// is mutated under its own lock. Session k is built from the k-th draw of
// SeededRng(seed), so quiz contents are reproducible while session ids
// stay random.
class SurveyStore {
 public:
  using Clock = std::function<std::int64_t()>;

  SurveyStore(std::vector<std::string> syn_pool, std::vector<std::string> real_pool,
              std::optional<std::filesystem::path> log_path = std::nullopt, QuizShape shape = {},
              std::uint64_t seed = kDefaultSeed, Clock clock = {});

  SurveySession create_session();
  // Returns the number of answers recorded so far.
  std::size_t submit(const std::string& session_id, const std::string& item_id, Verdict choice);

  std::optional<SurveySession> session(const std::string& session_id) const;
  std::optional<QuizItem> item(const std::string& item_id) const;
  std::vector<SurveySession> sessions() const;
  const QuizShape& shape() const { return shape_; }

 private:
  struct Entry {
    mutable std::mutex mu;
    SurveySession session;
    explicit Entry(SurveySession s) : session(std::move(s)) {}
  };

  std::vector<std::string> syn_pool_;
  std::vector<std::string> real_pool_;
  QuizShape shape_;
  Clock clock_;
  SeededRng seed_rng_;
  std::unique_ptr<EventLog> log_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::vector<std::string> creation_order_;
  std::map<std::string, std::string> item_owner_;  // item_id -> session_id
};

struct ServerOptions {
  // Empty disables GET /api/report.
  std::string admin_token;
  // Served at "/" when set (the browser quiz).
  std::optional<std::filesystem::path> static_dir;
};

class SurveyServer {
 public:
  SurveyServer(SurveyStore& store, ServerOptions options);
  ~SurveyServer();

  /// Binds without serving; port 0 picks a free port. Throws BindFailed.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  void install_routes();

  SurveyStore& store_;
  ServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::atomic<bool> listening_{false};
  std::atomic<bool> stop_requested_{false};
  std::atomic<bool> finished_{false};
};

}  // namespace rainbench
