#include <sstream>

#include <gtest/gtest.h>

#include "stratrec/synthgen.hpp"
#include "stratrec/text_io.hpp"

using namespace stratrec;

TEST(TextIo, StrategiesRoundTrip) {
  GenConfig cfg;
  cfg.strategy_count = 200;
  const auto catalog = gen_strategies(cfg);
  std::stringstream buf;
  io::write_strategies(buf, catalog);
  EXPECT_EQ(io::read_strategies(buf), catalog);
}

TEST(TextIo, RequestsRoundTrip) {
  GenConfig cfg;
  cfg.batch_size = 30;
  auto batch = gen_requests(cfg);
  batch[3].payoff = 2.5;
  batch[4].request_class = "creation";
  std::stringstream buf;
  io::write_requests(buf, batch);
  EXPECT_EQ(io::read_requests(buf), batch);
}

TEST(TextIo, ModelsRoundTrip) {
  GenConfig cfg;
  cfg.strategy_count = 50;
  const auto catalog = gen_strategies(cfg);
  auto models = gen_models(catalog, cfg);
  models.set_override("creation", catalog[0].id, Axis::Latency, {-0.3, 0.9});
  std::stringstream a;
  io::write_models(a, models);
  const ModelCatalog back = io::read_models(a);
  std::stringstream b;
  io::write_models(b, back);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(back.find(catalog[0].id, "creation")->latency, (LinearModel{-0.3, 0.9}));
}

TEST(TextIo, SkipsCommentsBlankLinesAndHeader) {
  std::istringstream in("# catalog\n\nid,quality,cost,latency\ns1, 0.5 ,0.25,0.28\r\n  # trailing\n");
  const auto catalog = io::read_strategies(in);
  ASSERT_EQ(catalog.size(), 1u);
  EXPECT_EQ(catalog[0].id, "s1");
  EXPECT_EQ(catalog[0].quality, 0.5);
  EXPECT_EQ(catalog[0].latency, 0.28);
}

TEST(TextIo, RejectsMalformedRecords) {
  std::istringstream bad_number("s1,0.5,abc,0.3\n");
  EXPECT_THROW(io::read_strategies(bad_number), ValidationError);
  std::istringstream too_few("s1,0.5,0.3\n");
  EXPECT_THROW(io::read_strategies(too_few), ValidationError);
  std::istringstream out_of_range("s1,1.5,0.3,0.3\n");
  EXPECT_THROW(io::read_strategies(out_of_range), ValidationError);
  std::istringstream dup("s1,0.5,0.3,0.3\ns1,0.5,0.3,0.3\n");
  EXPECT_THROW(io::read_strategies(dup), ValidationError);
  std::istringstream bad_k("d1,0.5,0.3,0.3,0\n");
  EXPECT_THROW(io::read_requests(bad_k), ValidationError);
  std::istringstream bad_axis("s1,speed,1,0\n");
  EXPECT_THROW(io::read_models(bad_axis), ValidationError);
  try {
    std::istringstream where("id,quality,cost,latency\ns1,0.5,0.3,0.3\ns2,0.5,x,0.3\n");
    io::read_strategies(where);
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(TextIo, PlanRoundTrip) {
  BatchPlan plan;
  plan.selected = {"d3", "d1"};
  plan.requirements = {0.1, 0.25};
  plan.recommendations = {{"s2", "s3", "s4"}, {"s1"}};
  plan.objective = 2;
  plan.workforce_used = 0.35;
  std::stringstream buf;
  io::write_plan(buf, plan);
  EXPECT_EQ(buf.str(), "request_id,requirement,strategies\nd3,0.1,s2;s3;s4\nd1,0.25,s1\ntotal,2,0.35\n");
  const BatchPlan back = io::read_plan(buf);
  EXPECT_EQ(back.selected, plan.selected);
  EXPECT_EQ(back.requirements, plan.requirements);
  EXPECT_EQ(back.recommendations, plan.recommendations);
  EXPECT_EQ(back.objective, 2.0);
  EXPECT_EQ(back.workforce_used, 0.35);
}

TEST(TextIo, AdparRoundTripWithFailure) {
  const DeploymentRequest d{"d1", 0.4, 0.17, 0.28, 3, {}, {}};
  AdparResult r;
  r.alternative = d;
  r.alternative.cost = 0.5;
  r.distance = 0.33;
  r.chosen = {"s1", "s2", "s3"};
  const std::vector<io::AdparRecord> rows{{d, r}, {d, std::nullopt}};
  std::stringstream buf;
  io::write_adpar(buf, rows);
  const auto back = io::read_adpar(buf);
  ASSERT_EQ(back.size(), 2u);
  ASSERT_TRUE(back[0].result.has_value());
  EXPECT_EQ(back[0].result->chosen, r.chosen);
  EXPECT_EQ(back[0].result->alternative.cost, 0.5);
  EXPECT_EQ(back[0].result->distance, 0.33);
  EXPECT_FALSE(back[1].result.has_value());
}

TEST(TextIo, NumbersRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, 0.5556, 1e-300, 0.7499999999999999}) {
    double back = 0.0;
    const std::string s = io::format_number(v);
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v);
  }
}

TEST(TextIo, SampleDataLoads) {
  const std::string dir = STRATREC_DATA_DIR;
  EXPECT_EQ(io::load_strategies(dir + "/running_example_strategies.csv").size(), 4u);
  EXPECT_EQ(io::load_requests(dir + "/running_example_requests.csv").size(), 3u);
  EXPECT_EQ(io::load_models(dir + "/running_example_models.csv").size(), 4u);
  EXPECT_EQ(io::load_models(dir + "/fitted_models.csv").size(), 2u);
  EXPECT_THROW(io::load_strategies(dir + "/missing.csv"), ValidationError);
}
