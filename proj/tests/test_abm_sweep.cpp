#include <sstream>

#include "doctest.h"
#include "sirsurv/abm.hpp"
#include "sirsurv/error.hpp"

using namespace sirsurv;
using namespace sirsurv::abm;

namespace {

AbmConfig base_config() {
  AbmConfig cfg;
  cfg.n = 1500;
  cfg.t_steps = 20;
  cfg.seed = 10;
  return cfg;
}

bool same(const RunSummary& a, const RunSummary& b) {
  return a.peak_i == b.peak_i && a.t_peak == b.t_peak && a.final_s == b.final_s && a.final_i == b.final_i &&
         a.final_r == b.final_r && a.final_dead == b.final_dead && a.final_mean_battery == b.final_mean_battery;
}

}  // namespace

TEST_CASE("a one-point, one-seed sweep equals a plain run") {
  const auto cfg = base_config();
  const std::vector<double> values{0.5};
  const auto table = sweep(cfg, "b", values, 1, 1);
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].seed == 10);
  CHECK(table.rows[1].seed == -1);
  CHECK(same(table.rows[0].summary, summarize(run(cfg))));
  CHECK(same(table.rows[1].summary, table.rows[0].summary));
}

TEST_CASE("rows are ordered by point then seed, aggregate last") {
  const std::vector<double> values{0.1, 0.3, 0.6};
  const auto table = sweep(base_config(), "b", values, 3, 2);
  REQUIRE(table.rows.size() == 12);
  for (std::size_t p = 0; p < 3; ++p) {
    double peak_sum = 0.0;
    for (std::size_t s = 0; s < 3; ++s) {
      const auto& row = table.rows[p * 4 + s];
      CHECK(row.values == std::vector<double>{values[p]});
      CHECK(row.seed == static_cast<std::int64_t>(10 + s));
      auto cfg = base_config();
      cfg.b = values[p];
      cfg.seed = 10 + s;
      CHECK(same(row.summary, summarize(run(cfg))));
      peak_sum += row.summary.peak_i;
    }
    CHECK(table.rows[p * 4 + 3].seed == -1);
    CHECK(table.rows[p * 4 + 3].summary.peak_i == doctest::Approx(peak_sum / 3));
  }
}

TEST_CASE("paired axes move fields together") {
  SweepAxis axis{{"b", "c"}, {{0.001, 0.9}, {0.5, 0.1}}};
  const auto table = sweep(base_config(), axis, 2, 1);
  REQUIRE(table.rows.size() == 6);
  auto cfg = base_config();
  cfg.b = 0.5;
  cfg.c = 0.1;
  CHECK(same(table.rows[3].summary, summarize(run(cfg))));

  std::ostringstream out;
  write_csv(out, table);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "axis,value,seed,peak_i,t_peak,final_s,final_i,final_r,final_dead,final_mean_battery");
  std::getline(in, line);
  CHECK(line.rfind("b:c,0.001:0.9,10,", 0) == 0);
}

TEST_CASE("sweeping the seed axis offsets replicate seeds") {
  const std::vector<double> values{5, 50};
  const auto table = sweep(base_config(), "seed", values, 2, 1);
  CHECK(table.rows[0].seed == 5);
  CHECK(table.rows[1].seed == 6);
  CHECK(table.rows[3].seed == 50);
}

TEST_CASE("integer fields reject fractional values and unknown axes are errors") {
  AbmConfig cfg;
  set_field(cfg, "k", 4);
  CHECK(cfg.strategy.k == 4);
  set_field(cfg, "tau", 0.25);
  CHECK(cfg.strategy.tau == 0.25);
  CHECK_THROWS_AS(set_field(cfg, "k", 2.5), ValidationError);
  try {
    set_field(cfg, "gamma", 1.0);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "axis");
  }
  for (auto name : sweepable_fields()) CHECK_NOTHROW(set_field(cfg, name, 1.0));

  const std::vector<double> values{1.0};
  CHECK_THROWS_AS(sweep(base_config(), "b", values, 0), ValidationError);
  CHECK_THROWS_AS(sweep(base_config(), SweepAxis{{"b", "c"}, {{0.5}}}, 1), ValidationError);
}

TEST_CASE("larger k informs more and drains more") {
  auto cfg = base_config();
  cfg.b = 0.0;
  cfg.strategy.kind = Strategy::KNeighbor;
  const std::vector<double> ks{1, 2, 4, 8};
  const auto table = sweep(cfg, "k", ks, 4, 2);
  std::vector<RunSummary> means;
  for (const auto& row : table.rows) {
    if (row.seed == -1) means.push_back(row.summary);
  }
  REQUIRE(means.size() == 4);
  for (std::size_t j = 1; j < means.size(); ++j) {
    CHECK(means[j].peak_i >= means[j - 1].peak_i);
    CHECK(means[j].final_mean_battery <= means[j - 1].final_mean_battery);
  }
}

TEST_CASE("sweep csv is identical across thread counts") {
  const std::vector<double> values{0.2, 0.4, 0.8};
  auto cfg = base_config();
  cfg.strategy.kind = Strategy::RandomFanout;
  cfg.b = 0.0;
  std::ostringstream one, many;
  write_csv(one, sweep(cfg, "tau", values, 3, 1));
  write_csv(many, sweep(cfg, "tau", values, 3, 4));
  CHECK(one.str() == many.str());
}
