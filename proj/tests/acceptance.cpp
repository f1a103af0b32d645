// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.h"
#include "oracles/oracles.h"
#include "rainbench/annotations.h"
#include "rainbench/benchmark.h"
#include "rainbench/dataset.h"
#include "rainbench/dct.h"
#include "rainbench/error.h"
#include "rainbench/metrics.h"
#include "rainbench/report.h"
#include "rainbench/survey.h"
#include "rainbench/survey_service.h"

using namespace rainbench;

namespace {

// Collects failed checks; a criterion passes when none were recorded.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ |= !ok;
  }
  void near(double got, double want, double tol, const std::string& what) {
    std::ostringstream s;
    s.precision(12);
    s << what << ": got " << got << ", want " << want << " +/- " << tol;
    expect(std::fabs(got - want) <= tol, s.str());
  }
  bool failed() const { return failed_; }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  bool failed_ = false;
  std::vector<std::string> failures_;
};

struct Criterion {
  std::string name;
  double limit_s;  // 0: no runtime bound
  std::function<void(Checks&)> body;
};

std::string text_row(const std::string& text, const std::string& label) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(label + "  ", 0) == 0) return line;
  }
  return {};
}

std::vector<std::string> fields(const std::string& row) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= row.size()) {
    const std::size_t end = row.find("  ", pos);
    out.push_back(row.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
    if (end == std::string::npos) break;
    pos = end + 2;
  }
  return out;
}

// Published benchmark means reproduced by 94 per-pair scores with zero-sum spread.
void gain_arithmetic(Checks& c) {
  struct Row {
    std::string label;
    double ssim, phvsm;
  };
  const std::vector<Row> rows = {{"Restormer", 0.79, 20.68}, {"RESCAN", 0.74, 18.44}};
  const Row base{std::string(kBaselineLabel), 0.63, 16.19};
  std::vector<ScoreRecord> recs;
  for (int i = 0; i < 94; ++i) {
    const double d = (i % 2 == 0 ? 1 : -1) * (1 + i / 2) * 0.001;
    const std::string id = "pair" + std::to_string(1000 + i);
    const double bs = base.ssim + d, bp = base.phvsm + 10 * d;
    recs.push_back({id, base.label, bs, bp, 0, 0});
    for (const auto& r : rows) {
      const double ms = r.ssim + d, mp = r.phvsm + 10 * d;
      recs.push_back({id, r.label, ms, mp, ms - bs, mp - bp});
    }
  }
  const std::vector<std::string> order = {"Restormer", "RESCAN"};
  const BenchmarkTable t = tabulate(recs, order);
  const std::string text = emit_table(t, TableStyle::kText);
  c.expect(text.find("Quality results for 94 samples") != std::string::npos, "title carries n=94");

  const auto restormer = fields(text_row(text, "Restormer"));
  const auto rescan = fields(text_row(text, "RESCAN"));
  const auto rain = fields(text_row(text, "Rain image"));
  c.expect(restormer.size() == 7 && rescan.size() == 7 && rain.size() == 7, "three 7-field rows");
  if (restormer.size() != 7 || rescan.size() != 7 || rain.size() != 7) return;
  c.expect(restormer[1] == "0.79" && restormer[4] == "20.68dB", "Restormer means " + restormer[1] + " " + restormer[4]);
  c.expect(rescan[1] == "0.74" && rescan[4] == "18.44dB", "RESCAN means " + rescan[1] + " " + rescan[4]);
  c.expect(rain[1] == "0.63" && rain[4] == "16.19dB", "baseline means " + rain[1] + " " + rain[4]);
  c.expect(restormer[3] == "+0.16", "Restormer SSIM gain " + restormer[3]);
  c.expect(rescan[3] == "+0.11", "RESCAN SSIM gain " + rescan[3]);
  c.expect(restormer[6] == "+4.49dB", "Restormer PSNR-HVS-M gain " + restormer[6]);
  c.expect(rescan[6] == "+2.25dB", "RESCAN PSNR-HVS-M gain " + rescan[6]);
  c.expect(rain[3] == "-" && rain[6] == "-", "baseline gains blank");
  c.expect(t.rows.back().label == kBaselineLabel, "baseline row last");
}

void ssim_oracle(Checks& c) {
  SeededRng rng(602);
  for (int i = 0; i < 20; ++i) {
    const ImageBuffer a = testing::random_image(64, 64, 1, rng);
    const ImageBuffer b = i % 2 ? testing::add_noise(a, 10 + 3 * i, rng) : testing::random_image(64, 64, 1, rng);
    c.near(ssim(a, b), oracle::ssim(a, b), 1e-6, "random pair " + std::to_string(i));
    c.near(ssim(a, a), 1.0, 1e-9, "self " + std::to_string(i));
  }
  const ImageBuffer x = ImageBuffer::filled(32, 32, 1, 100), y = ImageBuffer::filled(32, 32, 1, 105);
  // Constant images: only the luminance term remains.
  const double c1 = std::pow(0.01 * 255, 2);
  const double closed = (2.0 * 100 * 105 + c1) / (100.0 * 100 + 105.0 * 105 + c1);
  c.near(closed, 0.998811, 1e-6, "closed form");
  c.near(ssim(x, y), closed, 1e-6, "constant images");
}

void dct_kernel(Checks& c) {
  Block8x8 flat;
  flat.fill(16.0);
  const DctBlock d = dct8x8(flat);
  c.near(d.at(0, 0), 128.0, 1e-9, "DC of constant 16");
  double ac = 0;
  for (int i = 1; i < 64; ++i) ac = std::max(ac, std::fabs(d.coefficients[i]));
  c.near(ac, 0.0, 1e-9, "AC of constant 16");

  SeededRng rng(603);
  for (int t = 0; t < 1000; ++t) {
    Block8x8 b;
    std::array<double, 64> raw;
    for (int i = 0; i < 64; ++i) raw[i] = b[i] = static_cast<double>(rng.below(256)) - 128.0;
    const DctBlock f = dct8x8(b);
    double e_in = 0, e_out = 0;
    for (int i = 0; i < 64; ++i) {
      e_in += b[i] * b[i];
      e_out += f.coefficients[i] * f.coefficients[i];
    }
    c.expect(std::fabs(e_in - e_out) <= 1e-9 * std::max(1.0, e_in), "Parseval block " + std::to_string(t));
    const auto brute = oracle::dct8x8(raw);
    for (int i = 0; i < 64; ++i) {
      c.expect(std::fabs(brute[i] - f.coefficients[i]) <= 1e-9, "brute force block " + std::to_string(t));
    }
  }
}

void psnr_hvs_m_properties(Checks& c) {
  const ImageBuffer ref = testing::natural_image(48, 40, 1, 604);
  c.expect(psnr_hvs_m(ref, ref).psnr_hvs_m == kZeroErrorDb, "self-comparison cap");
  c.expect(psnr_hvs_m(ref, ref).psnr_hvs == kZeroErrorDb, "self-comparison cap (unmasked)");

  SeededRng rng(6040);
  for (int i = 0; i < 100; ++i) {
    const ImageBuffer a = testing::random_image(32, 32, 1, rng);
    const ImageBuffer b = i % 3 == 0 ? testing::random_image(32, 32, 1, rng) : testing::add_noise(a, 1 + i, rng);
    const HvsScores s = psnr_hvs_m(a, b);
    c.expect(s.psnr_hvs_m >= s.psnr_hvs, "masked >= unmasked, pair " + std::to_string(i));
  }

  const int sizes[10][2] = {{64, 64}, {48, 40}, {33, 27}, {80, 56}, {40, 64},
                            {72, 72}, {17, 9}, {96, 48}, {56, 56}, {64, 36}};
  for (int i = 0; i < 10; ++i) {
    const ImageBuffer a = testing::natural_image(sizes[i][0], sizes[i][1], 1, 700 + i);
    const ImageBuffer b = i < 5 ? testing::structured_distortion(a, 2.0 + 4.0 * i)
                                : testing::add_streaks(testing::structured_distortion(a, 3.0), 10 * i, 800 + i);
    const HvsScores got = psnr_hvs_m(a, b);
    const oracle::HvsResult want = oracle::psnr_hvs_m(a, b);
    c.near(got.psnr_hvs_m, want.psnr_hvs_m, 0.05, "fixture " + std::to_string(i) + " PSNR-HVS-M");
    c.near(got.psnr_hvs, want.psnr_hvs, 0.05, "fixture " + std::to_string(i) + " PSNR-HVS");
  }
}

void merged_pair_format(Checks& c) {
  SeededRng rng(605);
  for (int i = 0; i < 50; ++i) {
    const int w = 1 + static_cast<int>(rng.below(40)), h = 1 + static_cast<int>(rng.below(40));
    const int ch = i % 2 ? 3 : 1;
    const ImageBuffer rain = testing::random_image(w, h, ch, rng);
    const ImageBuffer clean = testing::random_image(w, h, ch, rng);
    const ImageBuffer merged = merge_pair(rain, clean);
    c.expect(merged.width() == 2 * w && merged.height() == h, "merged is 2W x H");
    c.expect(merged.at(0, 0, 0) == rain.at(0, 0, 0) && merged.at(w, 0, 0) == clean.at(0, 0, 0), "rain on the left");
    const RainCleanPair back = split_merged(merged);
    c.expect(back.rain == rain && back.clean == clean, "split(merge) identity, pair " + std::to_string(i));
  }
  const auto rejects = [&](const ImageBuffer& a, const ImageBuffer& b, ErrorKind want) {
    try {
      merge_pair(a, b);
    } catch (const Error& e) {
      return e.kind() == want;
    }
    return false;
  };
  c.expect(rejects(ImageBuffer::filled(8, 8, 1, 0), ImageBuffer::filled(8, 9, 1, 0), ErrorKind::kDimensionMismatch),
           "height mismatch rejected");
  c.expect(rejects(ImageBuffer::filled(8, 8, 1, 0), ImageBuffer::filled(9, 8, 1, 0), ErrorKind::kDimensionMismatch),
           "width mismatch rejected");
  c.expect(rejects(ImageBuffer::filled(8, 8, 1, 0), ImageBuffer::filled(8, 8, 3, 0), ErrorKind::kChannelMismatch),
           "channel mismatch rejected");
  bool odd = false;
  try {
    split_merged(ImageBuffer::filled(7, 4, 1, 0));
  } catch (const Error& e) {
    odd = e.kind() == ErrorKind::kOddWidth;
  }
  c.expect(odd, "odd merged width rejected");
}

// ingest -> sample -> pair -> split, returning the two persisted manifests.
std::pair<std::string, std::string> build_dataset(const std::string& labels, std::uint64_t seed,
                                                  std::size_t* test_pairs) {
  const auto records = parse_annotations(labels, SourceSplit::kTrain);
  const DatasetManifest classes = build_class_manifest(records, "images", 1000, seed);
  // Rained counterparts share the clean image's stem.
  std::vector<std::string> rain;
  for (const auto& p : classes.clean_entries) {
    const std::string stem = p.substr(p.rfind('/') + 1, p.rfind('.') - p.rfind('/') - 1);
    rain.push_back("rain/" + stem + ".png");
  }
  DatasetManifest paired;
  paired.seed = seed;
  paired.clean_entries = classes.clean_entries;
  paired.rain_entries = rain;
  paired.pairs = assign_splits(make_pairs(paired.clean_entries, rain), {806, 94, 100}, seed);
  *test_pairs = paired.pairs_with_role(SplitRole::kTest).size();
  return {persist_manifest(classes), persist_manifest(paired)};
}

void determinism(Checks& c) {
  const std::string labels = testing::bdd_annotation_json(1000, 1000, 0, 606);
  std::size_t n1 = 0, n2 = 0;
  const auto first = build_dataset(labels, 42, &n1);
  const auto second = build_dataset(labels, 42, &n2);
  c.expect(first.first == second.first, "class manifests byte-identical");
  c.expect(first.second == second.second, "pair manifests byte-identical");
  c.expect(n1 == 94 && n2 == 94, "test split has 94 pairs, got " + std::to_string(n1));
  const DatasetManifest m = load_manifest(first.second);
  c.expect(m.pairs.size() == 1000, "1000 pairs");
  c.expect(m.pairs_with_role(SplitRole::kVal).size() == 100, "val split has 100 pairs");
  c.expect(persist_manifest(m) == first.second, "manifest round trip is canonical");
  std::size_t other = 0;
  c.expect(build_dataset(labels, 43, &other).second != first.second, "different seed differs");
}

SurveySession answered(const SurveySession& s, SeededRng& rng, bool all_correct) {
  SurveySession out = s;
  for (const auto& it : s.items()) {
    Verdict v = it.ground_truth;
    if (!all_correct && rng.below(3) == 0) v = v == Verdict::kFake ? Verdict::kReal : Verdict::kFake;
    out = submit_answer(out, it.item_id, v, 0);
  }
  return out;
}

void survey_protocol(Checks& c) {
  std::vector<std::string> syn, real;
  for (int i = 0; i < 40; ++i) syn.push_back("syn/" + std::to_string(i) + ".png");
  for (int i = 0; i < 40; ++i) real.push_back("real/" + std::to_string(i) + ".png");
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const SurveySession s = build_quiz(syn, real, seed, "q" + std::to_string(seed));
    std::size_t fake = 0, realn = 0;
    std::set<std::string> refs;
    for (const auto& it : s.items()) {
      (it.ground_truth == Verdict::kFake ? fake : realn)++;
      refs.insert(it.image_ref);
    }
    c.expect(fake == 6 && realn == 4 && refs.size() == 10, "quiz " + std::to_string(seed) + " is 6 fake + 4 real");
  }

  SeededRng rng(607);
  std::vector<SurveySession> sessions;
  for (int i = 0; i < 21; ++i) {
    sessions.push_back(answered(build_quiz(syn, real, 5000 + i, "p" + std::to_string(i)), rng, false));
  }
  const ConfusionMatrix m = confusion_matrix(sessions);
  c.expect(m.total() == 210, "21 sessions tally to 210 answers, got " + std::to_string(m.total()));
  const oracle::Cells o = oracle::tally_fake_positive(sessions);
  c.expect(m.tp == o.tp && m.fp == o.fp && m.tn == o.tn && m.fn == o.fn, "tally matches per-answer oracle");

  const SurveyMetrics h = survey_metrics({.tp = 9, .fp = 3, .tn = 6, .fn = 2});
  c.near(*h.accuracy, 15.0 / 20.0, 1e-9, "fixture accuracy");
  c.near(*h.precision, 9.0 / 12.0, 1e-9, "fixture precision");
  c.near(*h.tpr, 9.0 / 11.0, 1e-9, "fixture tpr");
  c.near(*h.fpr, 3.0 / 9.0, 1e-9, "fixture fpr");
  c.near(*h.tpr, 0.818, 5e-4, "fixture tpr at display precision");
  c.near(*h.fpr, 0.333, 5e-4, "fixture fpr at display precision");

  std::vector<SurveySession> perfect;
  for (int i = 0; i < 5; ++i) perfect.push_back(answered(build_quiz(syn, real, 90 + i, "a" + std::to_string(i)), rng, true));
  const SurveyMetrics p = survey_metrics(confusion_matrix(perfect));
  c.expect(p.accuracy == 1.0 && p.precision == 1.0 && p.tpr == 1.0 && p.fpr == 0.0, "all-correct sessions");
}

void service_contract(Checks& c) {
  std::vector<std::string> syn, real;
  for (int i = 0; i < 6; ++i) syn.push_back("syn/" + std::to_string(i) + ".png");
  for (int i = 0; i < 4; ++i) real.push_back("real/" + std::to_string(i) + ".png");
  SurveyStore store(syn, real);
  SurveyServer server(store, {"token", std::nullopt});
  const int port = server.bind("127.0.0.1", 0);
  std::thread worker([&] { server.listen(); });
  struct Join {
    SurveyServer& s;
    std::thread& t;
    ~Join() {
      s.stop();
      t.join();
    }
  } join{server, worker};
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);

  const auto created = client.Post("/api/session", "", "application/json");
  c.expect(created && created->status == 200, "session created");
  if (!created || created->status != 200) return;
  const auto body = nlohmann::json::parse(created->body);
  const std::set<std::string> allowed_top = {"session_id", "items"};
  const std::set<std::string> allowed_item = {"item_id", "image_url"};
  for (const auto& [k, v] : body.items()) c.expect(allowed_top.contains(k), "unexpected session field " + k);
  c.expect(body["items"].size() == 10, "ten items");
  for (const auto& item : body["items"]) {
    for (const auto& [k, v] : item.items()) c.expect(allowed_item.contains(k), "unexpected item field " + k);
  }
  const std::string sid = body["session_id"];
  const auto answer = [&](const std::string& item, const char* choice) {
    const auto r = client.Post("/api/session/" + sid + "/answer",
                               nlohmann::json{{"item_id", item}, {"choice", choice}}.dump(), "application/json");
    return r ? r->status : -1;
  };
  const auto result_status = [&] {
    const auto r = client.Get("/api/session/" + sid + "/result");
    return r ? r->status : -1;
  };

  c.expect(result_status() == 409, "result is 409 before any answer");
  const std::string first = body["items"][0]["item_id"];
  c.expect(answer(first, "fake") == 200, "first answer accepted");
  c.expect(answer(first, "real") == 409, "duplicate answer is 409");
  for (std::size_t i = 1; i < 10; ++i) {
    c.expect(result_status() == 409, "result is 409 while open");
    c.expect(answer(body["items"][i]["item_id"], "real") == 200, "answer accepted");
  }
  c.expect(result_status() == 200, "result is 200 once complete");
  c.expect(answer(first, "real") == 409, "answer after completion is 409");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"gain arithmetic reproduces the 94-sample quality table", 1.0, gain_arithmetic},
      {"SSIM matches the direct-formula oracle", 5.0, ssim_oracle},
      {"8x8 DCT kernel", 5.0, dct_kernel},
      {"PSNR-HVS-M properties and oracle agreement", 10.0, psnr_hvs_m_properties},
      {"merged pair format", 5.0, merged_pair_format},
      {"dataset determinism with seed 42", 5.0, determinism},
      {"survey protocol", 5.0, survey_protocol},
      {"survey service contract", 0.0, service_contract},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Checks checks;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(checks);
    } catch (const std::exception& e) {
      checks.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.limit_s > 0 && secs >= cr.limit_s) {
      checks.expect(false, "runtime " + std::to_string(secs) + " s exceeds " + std::to_string(cr.limit_s) + " s");
    }
    std::printf("[%s] %s (%.0f ms)\n", checks.failed() ? "FAIL" : "PASS", cr.name.c_str(), secs * 1000);
    for (const auto& f : checks.failures()) std::printf("    %s\n", f.c_str());
    failed += checks.failed();
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
