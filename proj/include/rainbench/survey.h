#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rainbench {

// Ground truth and participant verdicts share one vocabulary.
enum class Verdict { kFake, kReal };

std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

struct QuizItem {
  std::string item_id;
  std::string image_ref;
  Verdict ground_truth = Verdict::kFake;  // fake iff drawn from the synthetic pool

  friend bool operator==(const QuizItem&, const QuizItem&) = default;
};

struct Answer {
  std::string item_id;
  Verdict choice = Verdict::kFake;
  std::int64_t answered_at = 0;  // UTC seconds

  friend bool operator==(const Answer&, const Answer&) = default;
};

struct QuizShape {
  std::size_t fake = 6;
  std::size_t real = 4;

  std::size_t total() const { return fake + real; }
};

enum class SessionState { kOpen, kComplete };

class SurveySession {
 public:
  SurveySession(std::string session_id, std::uint64_t seed, std::vector<QuizItem> items);

  const std::string& session_id() const { return session_id_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<QuizItem>& items() const { return items_; }
  // Submission order; never reordered.
  const std::vector<Answer>& answers() const { return answers_; }
  SessionState state() const {
    return answers_.size() == items_.size() ? SessionState::kComplete : SessionState::kOpen;
  }
  bool complete() const { return state() == SessionState::kComplete; }

  const QuizItem* find_item(std::string_view item_id) const;
  const Answer* find_answer(std::string_view item_id) const;

  /// Throws SessionComplete, UnknownItem or AlreadyAnswered; on error
  /// the session is unchanged.
  void record(Answer answer);

  friend bool operator==(const SurveySession&, const SurveySession&) = default;

 private:
  std::string session_id_;
  std::uint64_t seed_;
  std::vector<QuizItem> items_;
  std::vector<Answer> answers_;
};

/// Draws shape.fake images from the synthetic pool and shape.real from the
/// real pool without replacement, then shuffles them, all from one
/// SeededRng(seed). Item ids are `<session_id>-<slot>`.
SurveySession build_quiz(std::span<const std::string> syn_pool, std::span<const std::string> real_pool,
                         std::uint64_t seed, const std::string& session_id, QuizShape shape = {});

SurveySession submit_answer(const SurveySession& session, const std::string& item_id, Verdict choice,
                            std::int64_t answered_at);

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct Tally {
  ConfusionMatrix matrix;
  std::size_t complete_sessions = 0;
  std::size_t open_sessions = 0;  // excluded from the matrix
};

/// Tallies every answer of every complete session. With positive = fake:
/// tp = fake called fake, fp = real called fake, tn = real called real,
/// fn = fake called real. Throws NoCompleteSessions.
Tally tally_sessions(std::span<const SurveySession> sessions, Verdict positive = Verdict::kFake);
ConfusionMatrix confusion_matrix(std::span<const SurveySession> sessions, Verdict positive = Verdict::kFake);

// Ratios with a zero denominator are left empty.
struct SurveyMetrics {
  std::optional<double> fpr;
  std::optional<double> tpr;
  std::optional<double> precision;
  std::optional<double> accuracy;
};

SurveyMetrics survey_metrics(const ConfusionMatrix& m);

double session_accuracy(const SurveySession& session);

/// Text report: positive class, session counts, matrix cells, metrics as
/// percentages to one decimal, and per-session accuracy.
std::string aggregate_report(std::span<const SurveySession> sessions, Verdict positive = Verdict::kFake);

// Recovers the matrix from an aggregate_report text.
ConfusionMatrix parse_report_matrix(std::string_view report);

std::string format_percent(const std::optional<double>& ratio);

}  // namespace rainbench
