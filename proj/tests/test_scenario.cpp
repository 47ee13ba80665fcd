#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "forksim/engine.hpp"
#include "forksim/output.hpp"
#include "oracles.hpp"

using namespace forksim;
using oracle::bf;

namespace {

const std::string kDataDir = FORKSIM_DATA_DIR;

// two-market fixture: lenders {30, 10} in the ETH market, a borrower
// collateralized in a second market, a trigger-exiting big lender, a keeper
// with nothing to do, and a fork at t=10800
ScenarioDoc fixture_doc() {
  ScenarioDoc doc;
  doc.name = "fixture";
  doc.start = 0;
  doc.end = 14400;
  doc.checkpoint_interval = 3600;

  Market::Params eth;
  eth.id = "m_eth";
  eth.asset = "ETH";
  eth.protocol = "aave";
  eth.mode = AccrualMode::PerSecondCompound;
  eth.model = AaveKinked{0, parse_ray("0.04"), parse_ray("0.60"), parse_ray("0.80")};
  eth.reserve_factor = ReserveFactor{parse_ray("0.10")};
  Market::Params coll;
  coll.id = "m_coll";
  coll.asset = "STETH";
  coll.protocol = "aave";
  coll.mode = AccrualMode::PerSecondCompound;
  coll.model = AaveKinked{0, parse_ray("0.01"), parse_ray("1.00"), parse_ray("0.70")};
  coll.reserve_factor = ReserveFactor{parse_ray("0.10")};
  doc.markets = {eth, coll};

  doc.configs["ETH"] = {"ETH", parse_ray("0.80"), parse_ray("0.825"), parse_ray("0.05"),
                        parse_ray("0.5")};
  doc.configs["STETH"] = {"STETH", parse_ray("0.73"), parse_ray("0.75"), parse_ray("0.075"),
                          parse_ray("0.5")};

  doc.accounts = {
      {"big", {{"ETH", parse_wad("30")}}},
      {"small", {{"ETH", parse_wad("10")}}},
      {"borrower", {{"STETH", parse_wad("20")}}},
      {"keeper", {{"ETH", parse_wad("100")}}},
  };

  AgentSpec lender;
  lender.kind = AgentKind::Lender;
  lender.account = "big";
  lender.market = "m_eth";
  lender.withdraw_trigger = parse_ray("0.15");
  AgentSpec keeper;
  keeper.kind = AgentKind::Keeper;
  keeper.account = "keeper";
  keeper.protocol = "aave";
  doc.agents = {lender, keeper};

  auto ev = [&](Timestamp t, EventKind k) {
    ScenarioEvent e;
    e.time = t;
    e.seq = static_cast<std::int64_t>(doc.events.size());
    e.kind = k;
    doc.events.push_back(e);
    return doc.events.size() - 1;
  };
  auto& d1 = doc.events[ev(0, EventKind::Deposit)];
  d1.account = "big";
  d1.market = "m_eth";
  d1.amount = parse_wad("30");
  auto& d2 = doc.events[ev(0, EventKind::Deposit)];
  d2.account = "small";
  d2.market = "m_eth";
  d2.amount = parse_wad("10");
  auto& d3 = doc.events[ev(0, EventKind::Deposit)];
  d3.account = "borrower";
  d3.market = "m_coll";
  d3.amount = parse_wad("20");
  auto& b = doc.events[ev(5000, EventKind::Borrow)];
  b.account = "borrower";
  b.market = "m_eth";
  b.amount = parse_wad("6");
  auto& f = doc.events[ev(10800, EventKind::Fork)];
  f.asset = "ETH";
  f.forked_asset = "ETHW";
  return doc;
}

PriceSeries fixture_prices() {
  PriceSeries p;
  p.add("ETH", 0, parse_wad("1"));
  p.add("STETH", 0, parse_wad("1"));
  // tiny ratio keeps the short-horizon break-even exponent in range
  p.add("ETHW", 0, parse_wad("0.00001"));
  return p;
}

}  // namespace

TEST_CASE("ingest_prices") {
  // single row, no header: constant series carried forward
  std::istringstream one("100,ETH,1600\n");
  PriceSeries p = ingest_prices(one);
  CHECK(p.at("ETH", 100) == parse_wad("1600"));
  CHECK(p.at("ETH", 999999) == parse_wad("1600"));
  CHECK_THROWS_AS(p.at("ETH", 99), SimError);  // LookupBeforeStart
  CHECK_THROWS_AS(p.at("BTC", 100), SimError);  // MissingPrice

  std::istringstream hdr("timestamp,asset,price_usd\n1,ETH,10\n2,ETH,20\n");
  p = ingest_prices(hdr);
  CHECK(p.at("ETH", 1) == parse_wad("10"));
  CHECK(p.at("ETH", 2) == parse_wad("20"));

  std::istringstream bad("1,ETH\n");
  CHECK_THROWS_AS(ingest_prices(bad), SimError);
  std::istringstream bad2("1,ETH,notanumber\n");
  CHECK_THROWS_AS(ingest_prices(bad2), SimError);
  std::istringstream unsorted("5,ETH,10\n3,ETH,20\n");
  CHECK_THROWS_AS(ingest_prices(unsorted), SimError);
  std::istringstream empty("timestamp,asset,price_usd\n");
  CHECK_THROWS_AS(ingest_prices(empty), SimError);
  CHECK_THROWS_AS(ingest_prices(kDataDir + "/no_such_file.csv"), SimError);
}

TEST_CASE("bundled price series drives the break-even math") {
  PriceSeries p = ingest_prices(kDataDir + "/merge_prices.csv");
  // ratio sits near 3% of ETH shortly before the fork
  Timestamp fork = 1663200000;
  i128 eth = p.at("ETH", fork - 3600);
  i128 ethw = p.at("ETHW", fork - 3600);
  i128 ratio = wad_div(ethw, eth);
  CHECK(ratio > parse_wad("0.02"));
  CHECK(ratio < parse_wad("0.05"));

  i128 be = break_even_rate(ethw, eth, {fork - 1662508800}).ray;
  CHECK(be > parse_ray("1"));  // short horizon annualizes well past 100%
}

TEST_CASE("mean position size") {
  Market::Params p;
  p.id = "m";
  p.asset = "ETH";
  p.protocol = "test";
  p.mode = AccrualMode::PerBlockLinear;
  p.model = CompoundLinear{0, 0};
  p.avg_block_time_ms = 1000;
  Market m(p, 0);

  std::map<std::string, Account> accounts;
  CHECK(mean_position_size(accounts, m) == 0);  // nobody home

  Account& a = accounts["a"];
  a.id = "a";
  a.wallet["ETH"] = parse_wad("10");
  Account& b = accounts["b"];
  b.id = "b";
  b.wallet["ETH"] = parse_wad("30");
  Account& c = accounts["c"];
  c.id = "c";  // no deposit: excluded from the mean
  m.deposit(a, parse_wad("10"), 0);
  m.deposit(b, parse_wad("30"), 0);
  CHECK(mean_position_size(accounts, m) == parse_wad("20"));

  // synthetic pool-contract accounts never count as lenders
  Account& pool = accounts["pool:m"];
  pool.id = "pool:m";
  pool.wallet["ETH"] = parse_wad("1000");
  m.deposit(pool, parse_wad("1000"), 0);
  CHECK(mean_position_size(accounts, m) == parse_wad("20"));
}

TEST_CASE("validate flags scenario defects") {
  ScenarioDoc doc = load_scenario_file(kDataDir + "/merge_replay.json");
  PriceSeries prices = ingest_prices(kDataDir + "/merge_prices.csv");
  CHECK(validate(doc, &prices).empty());  // bundled scenario is clean

  auto has = [](const std::vector<Diagnostic>& v, const std::string& code) {
    for (const auto& d : v)
      if (d.code == code) return true;
    return false;
  };

  {
    ScenarioDoc d = doc;
    ScenarioEvent e;
    e.time = doc.start + 100;
    e.kind = EventKind::Fork;
    e.asset = "ETH";
    e.forked_asset = "ETHX";
    d.events.push_back(e);
    CHECK(has(validate(d), "DuplicateFork"));
  }
  {
    ScenarioDoc d = doc;
    ScenarioEvent e;
    e.time = doc.start + 100;
    e.kind = EventKind::Borrow;
    e.account = "arb1";
    e.market = "no_such_market";
    e.amount = WAD;
    d.events.push_back(e);
    CHECK(has(validate(d), "UnknownMarket"));
  }
  {
    ScenarioDoc d = doc;
    ScenarioEvent e;
    e.time = doc.start + 100;
    e.kind = EventKind::Borrow;
    e.account = "arb1";
    e.market = "aave_eth";
    e.amount = 0;
    d.events.push_back(e);
    CHECK(has(validate(d), "NonPositiveAmount"));
  }
  {
    ScenarioDoc d = doc;
    ScenarioEvent e;
    e.time = doc.end + 100;
    e.kind = EventKind::Deposit;
    e.account = "arb1";
    e.market = "aave_eth";
    e.amount = WAD;
    d.events.push_back(e);
    CHECK(has(validate(d), "EventOutsideHorizon"));
  }
  {
    ScenarioDoc d = doc;
    d.end = d.start;
    CHECK(has(validate(d), "BadHorizon"));
  }
  {
    // missing coverage for a market asset
    PriceSeries thin;
    thin.add("ETH", doc.start, parse_wad("1600"));
    auto v = validate(doc, &thin);
    CHECK(has(v, "MissingPriceSeries"));
  }
}

TEST_CASE("empty scenario emits one frame of zeros") {
  ScenarioDoc doc;
  doc.name = "empty";
  doc.start = 0;
  doc.end = 1800;  // shorter than the interval: single checkpoint at start
  doc.checkpoint_interval = 3600;
  RunResult res = run_scenario(doc, PriceSeries{}, 0);
  REQUIRE(res.frames.size() == 1);
  const Frame& f = res.frames[0];
  CHECK(f.time == 0);
  CHECK(f.rows.empty());
  CHECK(f.liquidations_cum == 0);
  CHECK(f.rejections_cum == 0);
  CHECK(f.total_debt_value == 0);
  CHECK(f.bad_debt_value == 0);
  CHECK(f.ethw_minted == 0);
  CHECK(f.arb_pnl_closed == 0);
}

TEST_CASE("fixture run: lender exit halves the mean, fork mints, keeper idle") {
  RunResult res = run_scenario(fixture_doc(), fixture_prices(), 42);
  REQUIRE(res.frames.size() == 5);  // checkpoints 0..14400

  auto eth_row = [](const Frame& f) -> const MarketFrameRow& {
    for (const auto& r : f.rows)
      if (r.market == "m_eth") return r;
    FAIL("m_eth row missing");
    return f.rows.front();
  };

  // before the borrow crosses the trigger: both lenders in, mean (30+10)/2
  const Frame& f1 = res.frames[1];  // t=3600
  CHECK(eth_row(f1).mean_position_size == parse_wad("20"));
  CHECK(eth_row(f1).utilization == 0);

  // t=7200: utilization 6/40 = 0.15 hit the trigger, the big lender left
  const Frame& f2 = res.frames[2];
  CHECK(eth_row(f2).mean_position_size >= parse_wad("10"));
  CHECK(eth_row(f2).mean_position_size < parse_wad("10.001"));
  CHECK(eth_row(f2).utilization > parse_ray("0.59"));

  // the keeper saw only healthy accounts: no liquidations anywhere
  CHECK(res.liquidations.empty());
  for (const auto& f : res.frames) CHECK(f.liquidations_cum == 0);

  // fork at 10800: wallets + pool cash mint one-to-one
  REQUIRE(res.meta.fork_time.has_value());
  CHECK(*res.meta.fork_time == 10800);
  CHECK(res.frames[2].ethw_minted == 0);
  CHECK(res.frames[3].ethw_minted > 0);
  CHECK(res.frames[3].ethw_minted == res.fork_state.minted_total);
  // break-even reporting stops once the fork has happened
  CHECK(eth_row(res.frames[2]).break_even_rate > 0);
  CHECK(eth_row(res.frames[3]).break_even_rate == 0);

  // lender summaries: the exited lender locked nothing, the small one is stuck
  for (const auto& s : res.summaries) {
    if (s.account == "big" && s.market == "m_eth") {
      CHECK(s.locked_at_fork == 0);
      CHECK(s.withdrawn >= s.deposited);
    }
    if (s.account == "small" && s.market == "m_eth") {
      CHECK(s.locked_at_fork >= parse_wad("10"));
      CHECK(s.interest_income >= 0);
    }
  }
}

TEST_CASE("frame consistency: utilization recomputes from the frame itself") {
  RunResult res = run_scenario(fixture_doc(), fixture_prices(), 42);
  for (const auto& f : res.frames) {
    for (const auto& r : f.rows) {
      i128 debt = r.total_variable_debt + r.total_stable_debt;
      if (debt + r.cash == 0) {
        CHECK(r.utilization == 0);
        continue;
      }
      bf want = oracle::wad_value(debt) / (oracle::wad_value(debt) + oracle::wad_value(r.cash));
      CHECK(oracle::rel_err(oracle::ray_value(r.utilization), want) < 1e-12);
      CHECK(r.cash >= 0);
    }
  }
}

TEST_CASE("runs are deterministic and the metrics CSV round-trips exactly") {
  RunResult a = run_scenario(fixture_doc(), fixture_prices(), 7);
  RunResult b = run_scenario(fixture_doc(), fixture_prices(), 7);
  REQUIRE(a.frames.size() == b.frames.size());
  CHECK(a.frames == b.frames);

  std::ostringstream osa, osb;
  write_metrics_csv(osa, a.frames);
  write_metrics_csv(osb, b.frames);
  CHECK(osa.str() == osb.str());

  std::istringstream is(osa.str());
  std::vector<Frame> back = read_metrics_csv(is);
  CHECK(back == a.frames);
}

TEST_CASE("run rejects an invalid scenario with BadScenario") {
  ScenarioDoc doc = fixture_doc();
  doc.events[0].market = "nope";
  try {
    run_scenario(doc, fixture_prices(), 0);
    FAIL("expected BadScenario");
  } catch (const SimError& e) {
    CHECK(e.code() == Err::BadScenario);
  }
}
