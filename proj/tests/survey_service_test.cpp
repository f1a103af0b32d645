#include <set>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "fixtures.h"
#include "rainbench/error.h"
#include "rainbench/image.h"
#include "rainbench/survey_service.h"

namespace rainbench {
namespace {

using nlohmann::json;

// Serves a store on an ephemeral port for the lifetime of the fixture.
class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (int i = 0; i < 8; ++i) {
      const auto p = dir_.path() / "syn" / ("s" + std::to_string(i) + ".png");
      save_png(testing::natural_image(16, 16, 3, i), p.string());
      syn_.push_back(p.string());
    }
    for (int i = 0; i < 5; ++i) {
      const auto p = dir_.path() / "real" / ("r" + std::to_string(i) + ".png");
      save_png(testing::natural_image(16, 16, 3, 100 + i), p.string());
      real_.push_back(p.string());
    }
    store_ = std::make_unique<SurveyStore>(syn_, real_, dir_.path() / "events.jsonl");
    server_ = std::make_unique<SurveyServer>(*store_, ServerOptions{"sekrit", std::nullopt});
    port_ = server_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_connection_timeout(5);
  }

  void TearDown() override {
    server_->stop();
    thread_.join();
  }

  json new_session() {
    const auto res = client_->Post("/api/session", "", "application/json");
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    return json::parse(res->body);
  }

  httplib::Result answer(const std::string& sid, const std::string& item, const std::string& choice) {
    return client_->Post("/api/session/" + sid + "/answer", json{{"item_id", item}, {"choice", choice}}.dump(),
                         "application/json");
  }

  testing::TempDir dir_;
  std::vector<std::string> syn_, real_;
  std::unique_ptr<SurveyStore> store_;
  std::unique_ptr<SurveyServer> server_;
  std::thread thread_;
  int port_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServiceTest, SessionPayloadHidesGroundTruth) {
  const json s = new_session();
  ASSERT_EQ(s["items"].size(), 10u);
  const std::string dumped = s.dump();
  EXPECT_EQ(dumped.find("ground_truth"), std::string::npos);
  EXPECT_EQ(dumped.find("fake"), std::string::npos);
  EXPECT_EQ(dumped.find("syn"), std::string::npos);
  for (const auto& item : s["items"]) {
    EXPECT_EQ(item.size(), 2u);
    const auto img = client_->Get(item["image_url"].get<std::string>());
    ASSERT_TRUE(img);
    EXPECT_EQ(img->status, 200);
    EXPECT_EQ(img->get_header_value("Content-Type"), "image/png");
    const auto body = std::span(reinterpret_cast<const std::uint8_t*>(img->body.data()), img->body.size());
    EXPECT_EQ(decode_image(body).width(), 16);
  }
  EXPECT_EQ(client_->Get("/api/image/unknown")->status, 404);
}

TEST_F(ServiceTest, AnswerFlowAndConflicts) {
  const json s = new_session();
  const std::string sid = s["session_id"];
  const std::string first = s["items"][0]["item_id"];

  EXPECT_EQ(client_->Get("/api/session/" + sid + "/result")->status, 409);

  auto r = answer(sid, first, "fake");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(json::parse(r->body)["answered"], 1);
  EXPECT_EQ(json::parse(r->body)["remaining"], 9);

  r = answer(sid, first, "real");
  EXPECT_EQ(r->status, 409);
  EXPECT_EQ(json::parse(r->body)["error"], "AlreadyAnswered");
  EXPECT_EQ(store_->session(sid)->answers().size(), 1u);
  EXPECT_EQ(store_->session(sid)->answers()[0].choice, Verdict::kFake);

  EXPECT_EQ(answer("no-such-session", first, "real")->status, 404);
  EXPECT_EQ(answer(sid, "bogus-item", "real")->status, 404);
  EXPECT_EQ(answer(sid, first, "maybe")->status, 422);
  EXPECT_EQ(client_->Post("/api/session/" + sid + "/answer", "{not json", "application/json")->status, 422);

  for (std::size_t i = 1; i < 10; ++i) {
    EXPECT_EQ(answer(sid, s["items"][i]["item_id"], "real")->status, 200);
  }
  EXPECT_EQ(answer(sid, first, "real")->status, 409);

  const auto res = client_->Get("/api/session/" + sid + "/result");
  ASSERT_EQ(res->status, 200);
  const json result = json::parse(res->body);
  const SurveySession stored = *store_->session(sid);
  std::size_t correct = 0;
  for (const auto& item : result["items"]) {
    const QuizItem* truth = stored.find_item(item["item_id"].get<std::string>());
    ASSERT_NE(truth, nullptr);
    EXPECT_EQ(item["truth"], std::string(to_string(truth->ground_truth)));
    correct += item["correct"].get<bool>();
  }
  EXPECT_EQ(result["correct"], correct);
  EXPECT_DOUBLE_EQ(result["accuracy"].get<double>(), session_accuracy(stored));
}

TEST_F(ServiceTest, ReportRequiresToken) {
  EXPECT_EQ(client_->Get("/api/report")->status, 401);
  EXPECT_EQ(client_->Get("/api/report", {{"Authorization", "Bearer wrong"}})->status, 401);
  const httplib::Headers auth = {{"Authorization", "Bearer sekrit"}};
  EXPECT_EQ(client_->Get("/api/report", auth)->status, 409);

  const json s = new_session();
  for (const auto& item : s["items"]) answer(s["session_id"], item["item_id"], "fake");
  new_session();  // stays open

  const auto res = client_->Get("/api/report", auth);
  ASSERT_EQ(res->status, 200);
  const json rep = json::parse(res->body);
  EXPECT_EQ(rep["positive_class"], "fake");
  EXPECT_EQ(rep["sessions_complete"], 1);
  EXPECT_EQ(rep["sessions_open"], 1);
  EXPECT_EQ(rep["matrix"]["tp"], 6);
  EXPECT_EQ(rep["matrix"]["fp"], 4);
  EXPECT_EQ(rep["matrix"]["tn"], 0);
  EXPECT_EQ(rep["matrix"]["fn"], 0);
  EXPECT_DOUBLE_EQ(rep["metrics"]["fpr"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(rep["metrics"]["accuracy"].get<double>(), 0.6);

  const json flipped = json::parse(client_->Get("/api/report?positive=real", auth)->body);
  EXPECT_EQ(flipped["matrix"]["tn"], 6);
  EXPECT_EQ(flipped["matrix"]["fn"], 4);
  EXPECT_TRUE(flipped["metrics"]["precision"].is_null());
}

TEST_F(ServiceTest, ConcurrentSessionsStayIsolated) {
  std::vector<std::thread> workers;
  std::vector<std::string> ids(8);
  for (int w = 0; w < 8; ++w) {
    workers.emplace_back([this, w, &ids] {
      httplib::Client c("127.0.0.1", port_);
      const json s = json::parse(c.Post("/api/session", "", "application/json")->body);
      ids[w] = s["session_id"];
      for (const auto& item : s["items"]) {
        c.Post("/api/session/" + ids[w] + "/answer",
               json{{"item_id", item["item_id"]}, {"choice", w % 2 ? "real" : "fake"}}.dump(), "application/json");
      }
    });
  }
  for (auto& t : workers) t.join();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), 8u);
  for (const auto& id : ids) EXPECT_TRUE(store_->session(id)->complete());
  EXPECT_EQ(EventLog::replay(dir_.path() / "events.jsonl"), store_->sessions());
}

TEST_F(ServiceTest, OccupiedPortFailsToBind) {
  SurveyServer other(*store_, {});
  try {
    other.bind("127.0.0.1", port_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBindFailed);
  }
}

TEST(ServiceNoToken, ReportDisabled) {
  testing::TempDir dir;
  std::vector<std::string> syn, real;
  for (int i = 0; i < 6; ++i) syn.push_back("s" + std::to_string(i));
  for (int i = 0; i < 4; ++i) real.push_back("r" + std::to_string(i));
  SurveyStore store(syn, real);
  SurveyServer server(store, {});
  const int port = server.bind("127.0.0.1", 0);
  std::thread t([&] { server.listen(); });
  httplib::Client c("127.0.0.1", port);
  EXPECT_EQ(c.Get("/api/report", {{"Authorization", "Bearer "}})->status, 403);
  server.stop();
  t.join();
}

}  // namespace
}  // namespace rainbench
