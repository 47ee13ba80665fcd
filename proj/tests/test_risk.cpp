#include <catch2/catch_amalgamated.hpp>

#include "forksim/risk.hpp"
#include "oracles.hpp"

using namespace forksim;
using oracle::bf;

namespace {

// zero-rate markets so positions hold still while we probe the risk math
Market::Params flat_params(const std::string& id, const std::string& asset) {
  Market::Params p;
  p.id = id;
  p.asset = asset;
  p.protocol = "test";
  p.mode = AccrualMode::PerBlockLinear;
  p.model = CompoundLinear{0, 0};
  p.reserve_factor = ReserveFactor{0};
  p.avg_block_time_ms = 1000;
  return p;
}

struct Fixture {
  Markets markets;
  CollateralConfigs configs;
  PriceMap prices;
  Account whale;

  Fixture() {
    markets.emplace("m_eth", Market(flat_params("m_eth", "ETH"), 0));
    markets.emplace("m_usdc", Market(flat_params("m_usdc", "USDC"), 0));
    markets.emplace("m_steth", Market(flat_params("m_steth", "STETH"), 0));
    configs["ETH"] = {"ETH", parse_ray("0.70"), parse_ray("0.75"), parse_ray("0.05"),
                      parse_ray("0.5")};
    configs["USDC"] = {"USDC", parse_ray("0.80"), parse_ray("0.80"), parse_ray("0.05"),
                       parse_ray("0.5")};
    configs["STETH"] = {"STETH", parse_ray("0.70"), parse_ray("0.72"), parse_ray("0.07"),
                        parse_ray("0.4")};
    prices.price = {{"ETH", parse_wad("1")}, {"USDC", parse_wad("1")},
                    {"STETH", parse_wad("0.97")}};
    whale.id = "whale";
    whale.wallet = {{"ETH", parse_wad("1000000")}, {"USDC", parse_wad("1000000")},
                    {"STETH", parse_wad("1000000")}};
    for (auto& [id, m] : markets) m.deposit(whale, parse_wad("500000"), 0);
  }
};

bf oracle_health(const Account& a, const Markets& markets, const PriceMap& prices,
                 const CollateralConfigs& configs, bool& infinite) {
  bf num = 0, den = 0;
  for (const auto& [mid, m] : markets) {
    bf px = oracle::wad_value(prices.at(m.asset()));
    const auto& cfg = configs.at(m.asset());
    num += oracle::wad_value(m.supplied_balance(a)) * px *
           oracle::ray_value(cfg.liquidation_threshold);
    den += oracle::wad_value(m.debt_of(a)) * px;
  }
  infinite = den == 0;
  return infinite ? bf(0) : num / den;
}

}  // namespace

TEST_CASE("health factor examples") {
  Fixture f;
  Account a;
  a.id = "a";
  a.wallet["ETH"] = parse_wad("100");

  // no positions at all: infinite
  CHECK(health_factor(a, f.markets, f.prices, f.configs).infinite);

  f.markets.at("m_eth").deposit(a, parse_wad("100"), 0);
  // collateral but no debt: still infinite, never liquidatable
  CHECK(health_factor(a, f.markets, f.prices, f.configs).infinite);
  CHECK_FALSE(is_liquidatable(a, f.markets, f.prices, f.configs));

  // 100 collateral at threshold 0.75 against 75 of debt: exactly 1.0
  f.markets.at("m_usdc").borrow(a, parse_wad("75"), DebtMode::Variable, 0);
  auto h = health_factor(a, f.markets, f.prices, f.configs);
  CHECK_FALSE(h.infinite);
  CHECK(h.ray == RAY);
  CHECK_FALSE(is_liquidatable(a, f.markets, f.prices, f.configs));  // strict <

  // push debt to 80: 75/80 = 0.9375
  f.markets.at("m_usdc").borrow(a, parse_wad("5"), DebtMode::Variable, 0);
  h = health_factor(a, f.markets, f.prices, f.configs);
  CHECK(h.ray == parse_ray("0.9375"));
  CHECK(is_liquidatable(a, f.markets, f.prices, f.configs));
}

TEST_CASE("hypothetical adjustments") {
  Fixture f;
  Account a;
  a.id = "a";
  a.wallet["ETH"] = parse_wad("100");
  f.markets.at("m_eth").deposit(a, parse_wad("100"), 0);
  f.markets.at("m_usdc").borrow(a, parse_wad("50"), DebtMode::Variable, 0);

  // +25 debt lands exactly on the H = 1 boundary
  auto h = health_factor(a, f.markets, f.prices, f.configs, parse_wad("25"));
  CHECK(h.ray == RAY);
  // removing all weighted collateral floors the numerator at zero
  h = health_factor(a, f.markets, f.prices, f.configs, 0, parse_wad("100"));
  CHECK(h.ray == 0);
}

TEST_CASE("liquidation example: repay 40, seize value 42") {
  Fixture f;
  Account a;
  a.id = "a";
  a.wallet["ETH"] = parse_wad("100");
  f.markets.at("m_eth").deposit(a, parse_wad("100"), 0);
  f.markets.at("m_usdc").borrow(a, parse_wad("80"), DebtMode::Variable, 0);

  Account liq;
  liq.id = "liq";
  liq.wallet["USDC"] = parse_wad("1000");

  i128 h_before = health_factor(a, f.markets, f.prices, f.configs).ray;
  auto rec = liquidate(f.markets, liq, a, "m_usdc", "m_eth", parse_wad("1000"), f.prices,
                       f.configs, 0);
  // close factor 0.5 caps the repay at 40; bonus 5% makes the seize worth 42
  CHECK(rec.repaid == parse_wad("40"));
  CHECK(rec.seized == parse_wad("42"));
  CHECK(rec.debt_asset == "USDC");
  CHECK(rec.collateral_asset == "ETH");
  CHECK(f.markets.at("m_usdc").debt_of(a) == parse_wad("40"));
  CHECK(f.markets.at("m_eth").supplied_balance(a) == parse_wad("58"));
  CHECK(f.markets.at("m_eth").supplied_balance(liq) == parse_wad("42"));
  CHECK(liq.wallet_of("USDC") == parse_wad("960"));

  // the target's health improved: 58*0.75/40 = 1.0875
  i128 h_after = health_factor(a, f.markets, f.prices, f.configs).ray;
  CHECK(h_after > h_before);
  CHECK(h_after == parse_ray("1.0875"));

  // healthy again: a second liquidation must be rejected
  try {
    liquidate(f.markets, liq, a, "m_usdc", "m_eth", parse_wad("10"), f.prices, f.configs, 0);
    FAIL("expected NotLiquidatable");
  } catch (const SimError& e) {
    CHECK(e.code() == Err::NotLiquidatable);
  }
}

TEST_CASE("liquidation rejects missing collateral") {
  Fixture f;
  Account a;
  a.id = "a";
  a.wallet["ETH"] = parse_wad("100");
  f.markets.at("m_eth").deposit(a, parse_wad("100"), 0);
  f.markets.at("m_usdc").borrow(a, parse_wad("80"), DebtMode::Variable, 0);
  Account liq;
  liq.id = "liq";
  liq.wallet["USDC"] = parse_wad("1000");
  try {
    liquidate(f.markets, liq, a, "m_usdc", "m_steth", parse_wad("10"), f.prices, f.configs, 0);
    FAIL("expected NoSuchCollateral");
  } catch (const SimError& e) {
    CHECK(e.code() == Err::NoSuchCollateral);
  }
}

TEST_CASE("repeated liquidations improve health while bonus stays below 1/l - 1") {
  // threshold 0.75 allows up to ~33% bonus; ours is 5%
  oracle::Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    Fixture f;
    Account a;
    a.id = "a";
    a.wallet["ETH"] = parse_wad("1000");
    i128 coll = parse_wad(std::to_string(100 + rng.below(900)));
    f.markets.at("m_eth").deposit(a, coll, 0);
    // improvement is guaranteed for H in ((1+bonus)*l, 1): pick debt so that
    // weighted < debt < weighted/((1+bonus)*l)
    i128 weighted = mul_div_half_up(coll, parse_ray("0.75"), RAY);
    i128 debt_hi = mul_div_trunc(weighted, RAY, parse_ray("0.7875")) - 1;
    i128 debt = weighted + i128(1 + rng.below(100)) * (debt_hi - weighted) / 101;
    f.markets.at("m_usdc").borrow(a, debt, DebtMode::Variable, 0);
    REQUIRE(is_liquidatable(a, f.markets, f.prices, f.configs));

    Account liq;
    liq.id = "liq";
    liq.wallet["USDC"] = parse_wad("100000");
    i128 prev = health_factor(a, f.markets, f.prices, f.configs).ray;
    for (int round = 0; round < 20; ++round) {
      if (!is_liquidatable(a, f.markets, f.prices, f.configs)) break;
      auto rec = liquidate(f.markets, liq, a, "m_usdc", "m_eth", parse_wad("100000"), f.prices,
                           f.configs, 0);
      CHECK(rec.repaid > 0);
      auto h = health_factor(a, f.markets, f.prices, f.configs);
      if (h.infinite) break;
      CHECK(h.ray > prev);
      prev = h.ray;
    }
  }
}

TEST_CASE("health factor is homogeneous in prices") {
  oracle::Rng rng(555);
  for (int trial = 0; trial < 200; ++trial) {
    Fixture f;
    Account a;
    a.id = "a";
    a.wallet = {{"ETH", parse_wad("100000")}, {"STETH", parse_wad("100000")}};
    f.markets.at("m_eth").deposit(a, parse_wad(std::to_string(1 + rng.below(5000))), 0);
    f.markets.at("m_steth").deposit(a, parse_wad(std::to_string(1 + rng.below(5000))), 0);
    f.markets.at("m_usdc").borrow(a, parse_wad(std::to_string(1 + rng.below(4000))),
                                  DebtMode::Variable, 0);

    auto h1 = health_factor(a, f.markets, f.prices, f.configs);
    PriceMap scaled = f.prices;
    i128 lambda = parse_wad(std::to_string(1 + rng.below(50))) + i128(rng.below(WAD.convert_to<std::uint64_t>()));
    for (auto& [asset, px] : scaled.price) px = wad_mul(px, lambda);
    auto h2 = health_factor(a, f.markets, scaled, f.configs);
    REQUIRE_FALSE(h1.infinite);
    REQUIRE_FALSE(h2.infinite);
    CHECK(oracle::rel_err(oracle::ray_value(h2.ray), oracle::ray_value(h1.ray)) < 1e-12);
  }
}

TEST_CASE("health factor matches a brute-force oracle") {
  oracle::Rng rng(31337);
  for (int trial = 0; trial < 1000; ++trial) {
    Fixture f;
    int n_accounts = 1 + static_cast<int>(rng.below(5));
    std::vector<Account> accts(static_cast<std::size_t>(n_accounts));
    const char* assets[] = {"ETH", "USDC", "STETH"};
    const char* mkts[] = {"m_eth", "m_usdc", "m_steth"};
    for (int i = 0; i < n_accounts; ++i) {
      Account& a = accts[static_cast<std::size_t>(i)];
      a.id = "a" + std::to_string(i);
      for (const char* asset : assets) a.wallet[asset] = parse_wad("100000");
      for (int k = 0; k < 3; ++k) {
        if (rng.below(2))
          f.markets.at(mkts[k]).deposit(a, i128(1 + rng.below(9000)) * WAD / 7, 0);
        if (rng.below(3) == 0)
          f.markets.at(mkts[k]).borrow(a, i128(1 + rng.below(5000)) * WAD / 11,
                                       DebtMode::Variable, 0);
      }
    }
    for (const auto& a : accts) {
      bool want_inf = false;
      bf want = oracle_health(a, f.markets, f.prices, f.configs, want_inf);
      auto got = health_factor(a, f.markets, f.prices, f.configs);
      CHECK(got.infinite == want_inf);
      if (!want_inf) CHECK(oracle::rel_err(oracle::ray_value(got.ray), want) < 1e-12);
    }
  }
}

TEST_CASE("bad debt report") {
  Fixture f;
  std::map<std::string, Account> accounts;
  Account& a = accounts["a"];
  a.id = "a";
  a.wallet["ETH"] = parse_wad("100");
  f.markets.at("m_eth").deposit(a, parse_wad("100"), 0);
  f.markets.at("m_usdc").borrow(a, parse_wad("120"), DebtMode::Variable, 0);

  Account& b = accounts["b"];
  b.id = "b";
  b.wallet["ETH"] = parse_wad("50");
  f.markets.at("m_eth").deposit(b, parse_wad("50"), 0);
  f.markets.at("m_usdc").borrow(b, parse_wad("10"), DebtMode::Variable, 0);

  auto rep = bad_debt(accounts, f.markets, f.prices, f.configs);
  // a is 20 underwater on raw collateral; b is fine
  CHECK(rep.bad_debt_value == parse_wad("20"));
  CHECK(rep.total_debt_value == parse_wad("130"));
}

TEST_CASE("liquidation census") {
  CHECK(liquidation_census({}, 0, 86400, 3).size() == 3);
  for (const auto& b : liquidation_census({}, 0, 86400, 3)) {
    CHECK(b.total == 0);
    CHECK(b.native_debt == 0);
  }

  std::vector<LiquidationRecord> recs;
  auto add = [&](Timestamp t, const char* debt_asset) {
    LiquidationRecord r;
    r.time = t;
    r.debt_asset = debt_asset;
    recs.push_back(r);
  };
  // five in the first day, two of them with ETH debt
  add(100, "ETH");
  add(200, "USDC");
  add(300, "USDC");
  add(400, "ETH");
  add(500, "USDC");
  // one in the second day, one before the origin, one past the horizon
  add(86400 + 10, "ETH");
  add(-5, "ETH");
  add(3 * 86400 + 1, "USDC");

  auto buckets = liquidation_census(recs, 0, 86400, 3, "ETH");
  REQUIRE(buckets.size() == 3);
  CHECK(buckets[0].start == 0);
  CHECK(buckets[0].total == 5);
  CHECK(buckets[0].native_debt == 2);
  CHECK(buckets[1].total == 1);
  CHECK(buckets[1].native_debt == 1);
  CHECK(buckets[2].total == 0);
}
