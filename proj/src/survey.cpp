#include "rainbench/survey.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "rainbench/error.h"
#include "rainbench/rng.h"

namespace rainbench {

std::string_view to_string(Verdict v) { return v == Verdict::kFake ? "fake" : "real"; }

std::optional<Verdict> verdict_from_string(std::string_view s) {
  if (s == "fake") return Verdict::kFake;
  if (s == "real") return Verdict::kReal;
  return std::nullopt;
}

SurveySession::SurveySession(std::string session_id, std::uint64_t seed, std::vector<QuizItem> items)
    : session_id_(std::move(session_id)), seed_(seed), items_(std::move(items)) {}

const QuizItem* SurveySession::find_item(std::string_view item_id) const {
  for (const auto& item : items_) {
    if (item.item_id == item_id) return &item;
  }
  return nullptr;
}

const Answer* SurveySession::find_answer(std::string_view item_id) const {
  for (const auto& a : answers_) {
    if (a.item_id == item_id) return &a;
  }
  return nullptr;
}

void SurveySession::record(Answer answer) {
  if (complete()) throw Error(ErrorKind::kSessionComplete, session_id_);
  if (!find_item(answer.item_id)) throw Error(ErrorKind::kUnknownItem, answer.item_id);
  if (find_answer(answer.item_id)) throw Error(ErrorKind::kAlreadyAnswered, answer.item_id);
  answers_.push_back(std::move(answer));
}

namespace {

std::vector<std::string> distinct(std::span<const std::string> pool) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& p : pool) {
    if (seen.insert(p).second) out.push_back(p);
  }
  return out;
}

}  // namespace

SurveySession build_quiz(std::span<const std::string> syn_pool, std::span<const std::string> real_pool,
                         std::uint64_t seed, const std::string& session_id, QuizShape shape) {
  auto syn = distinct(syn_pool);
  auto real = distinct(real_pool);
  if (syn.size() < shape.fake) {
    throw Error(ErrorKind::kPoolTooSmall, "synthetic pool: need " + std::to_string(shape.fake) + ", have " +
                                              std::to_string(syn.size()));
  }
  if (real.size() < shape.real) {
    throw Error(ErrorKind::kPoolTooSmall, "real pool: need " + std::to_string(shape.real) + ", have " +
                                              std::to_string(real.size()));
  }
  SeededRng rng(seed);
  partial_shuffle(syn, shape.fake, rng);
  partial_shuffle(real, shape.real, rng);

  std::vector<QuizItem> items;
  std::set<std::string> refs;
  for (std::size_t i = 0; i < shape.fake; ++i) items.push_back({"", syn[i], Verdict::kFake});
  for (std::size_t i = 0; i < shape.real; ++i) items.push_back({"", real[i], Verdict::kReal});
  for (const auto& item : items) {
    if (!refs.insert(item.image_ref).second) {
      throw Error(ErrorKind::kInvalidArgument, "image '" + item.image_ref + "' is in both pools");
    }
  }
  shuffle(items, rng);
  for (std::size_t i = 0; i < items.size(); ++i) {
    char slot[24];
    std::snprintf(slot, sizeof(slot), "-%02zu", i);
    items[i].item_id = session_id + slot;
  }
  return SurveySession(session_id, seed, std::move(items));
}

SurveySession submit_answer(const SurveySession& session, const std::string& item_id, Verdict choice,
                            std::int64_t answered_at) {
  SurveySession next = session;
  next.record({item_id, choice, answered_at});
  return next;
}

Tally tally_sessions(std::span<const SurveySession> sessions, Verdict positive) {
  Tally t;
  for (const auto& s : sessions) {
    if (!s.complete()) {
      ++t.open_sessions;
      continue;
    }
    ++t.complete_sessions;
    for (const auto& a : s.answers()) {
      const bool truth_positive = s.find_item(a.item_id)->ground_truth == positive;
      const bool said_positive = a.choice == positive;
      if (truth_positive && said_positive) ++t.matrix.tp;
      else if (!truth_positive && said_positive) ++t.matrix.fp;
      else if (!truth_positive && !said_positive) ++t.matrix.tn;
      else ++t.matrix.fn;
    }
  }
  if (t.complete_sessions == 0) throw Error(ErrorKind::kNoCompleteSessions, "no complete sessions to tally");
  if (t.open_sessions > 0) {
    std::fprintf(stderr, "warning: %zu open session(s) excluded from the tally\n", t.open_sessions);
  }
  return t;
}

ConfusionMatrix confusion_matrix(std::span<const SurveySession> sessions, Verdict positive) {
  return tally_sessions(sessions, positive).matrix;
}

SurveyMetrics survey_metrics(const ConfusionMatrix& m) {
  if (m.total() == 0) throw Error(ErrorKind::kEmptyMatrix, "confusion matrix has no answers");
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? std::nullopt : std::optional<double>(static_cast<double>(num) / static_cast<double>(den));
  };
  return {ratio(m.fp, m.fp + m.tn), ratio(m.tp, m.tp + m.fn), ratio(m.tp, m.tp + m.fp),
          ratio(m.tp + m.tn, m.total())};
}

double session_accuracy(const SurveySession& session) {
  if (session.answers().empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& a : session.answers()) {
    if (session.find_item(a.item_id)->ground_truth == a.choice) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(session.answers().size());
}

std::string format_percent(const std::optional<double>& ratio) {
  if (!ratio) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", *ratio * 100.0);
  return buf;
}

std::string aggregate_report(std::span<const SurveySession> sessions, Verdict positive) {
  const Tally t = tally_sessions(sessions, positive);
  const SurveyMetrics metrics = survey_metrics(t.matrix);
  std::ostringstream out;
  out << "positive_class " << to_string(positive) << "\n";
  out << "sessions_complete " << t.complete_sessions << "\n";
  out << "sessions_open " << t.open_sessions << "\n";
  out << "answers " << t.matrix.total() << "\n";
  out << "TP " << t.matrix.tp << "\n";
  out << "FP " << t.matrix.fp << "\n";
  out << "TN " << t.matrix.tn << "\n";
  out << "FN " << t.matrix.fn << "\n";
  out << "\nMetric  Value\n";
  out << "FPR  " << format_percent(metrics.fpr) << "\n";
  out << "TPR  " << format_percent(metrics.tpr) << "\n";
  out << "Precision  " << format_percent(metrics.precision) << "\n";
  out << "Accuracy  " << format_percent(metrics.accuracy) << "\n";
  out << "\nsession_accuracy\n";
  for (const auto& s : sessions) {
    if (s.complete()) out << s.session_id() << "  " << format_percent(session_accuracy(s)) << "\n";
  }
  return out.str();
}

ConfusionMatrix parse_report_matrix(std::string_view report) {
  ConfusionMatrix m;
  int found = 0;
  std::istringstream in{std::string(report)};
  std::string key;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::size_t value = 0;
    if (!(ls >> key >> value)) continue;
    if (key == "TP") m.tp = value, found |= 1;
    else if (key == "FP") m.fp = value, found |= 2;
    else if (key == "TN") m.tn = value, found |= 4;
    else if (key == "FN") m.fn = value, found |= 8;
  }
  if (found != 15) throw Error(ErrorKind::kSyntaxError, "report lacks confusion matrix cells");
  return m;
}

}  // namespace rainbench
